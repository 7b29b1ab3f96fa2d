/**********
 *   Copyright 2026 The polarsep Authors
 *
 *   Licensed under the Apache License, Version 2.0 (the "License");
 *   you may not use this file except in compliance with the License.
 *   You may obtain a copy of the License at
 *
 *       http://www.apache.org/licenses/LICENSE-2.0
 *
 *   Unless required by applicable law or agreed to in writing, software
 *   distributed under the License is distributed on an "AS IS" BASIS,
 *   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 *   See the License for the specific language governing permissions and
 *   limitations under the License.
\**********/
#include "polarsep/pipeline.hpp"

#include "polarsep/calibration.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/image_io.hpp"
#include "polarsep/parallel.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <numbers>

namespace polarsep {

namespace {

constexpr double kDeg = std::numbers::pi / 180.0;

fs::path resolve(const fs::path& base, const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base / path;
}

std::vector<fs::path> resolve_all(const fs::path& base, const Json& list) {
    std::vector<fs::path> out;
    for (const auto& p : list)
        out.push_back(resolve(base, p.get<std::string>()));
    return out;
}

PatternKind pattern_kind_from(const std::string& name) {
    auto kind = parse_pattern_kind(name);
    if (!kind)
        throw ValidationError("unknown pattern kind '" + name + "'");
    return *kind;
}

CaptureConfig capture_from_json(const Json& j) {
    CaptureConfig c;
    if (j.contains("phase_deg"))
        c.phase = wrap_angle(j.at("phase_deg").get<double>() * kDeg);
    c.noise_sigma = j.value("noise_sigma", 0.0);
    c.seed = j.value("seed", std::uint64_t{0});
    c.validate();
    return c;
}

Json capture_to_json(const CaptureConfig& c) {
    return Json{{"phase_deg", c.phase / kDeg}, {"noise_sigma", c.noise_sigma}, {"seed", c.seed}};
}

Json pattern_to_json(const PatternSpec& p) {
    return Json{{"kind", std::string(to_string(p.kind))}, {"k", p.k}, {"seed", p.seed}};
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec)
        throw IoError(IoError::Kind::Write, "cannot create directory " + dir.string() + ": " + ec.message());
}

Image read_image(const fs::path& path) {
    if (path.extension() == ".png")
        return read_png(path);
    return read_pfm(path);
}

const fs::path& require(const fs::path& path, const char* what) {
    if (path.empty())
        throw ValidationError(std::string("manifest is missing ") + what);
    return path;
}

Json error_json(const AngularErrorReport& e) {
    return Json{{"mean_deg", e.mean_deg}, {"median_deg", e.median_deg}, {"pixels", e.pixel_count}};
}

void write_normals(const fs::path& dir, const std::string& stem, const NormalMap& map) {
    write_pfm(dir / (stem + ".pfm"), normal_components(map));
    write_png(dir / (stem + ".png"), srgb_to_linear(normal_visualization(map)));
}

std::string stack_name(const char* prefix, std::size_t i) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%s_%03zu.pfm", prefix, i);
    return buf;
}

Scene build_scene(const SceneSpec& spec) { return make_scene(spec.kind, spec.size, spec.seed, spec.options); }

FilterArray build_pattern(PatternSpec spec, std::size_t height, std::size_t width) {
    spec.height = height;
    spec.width = width;
    return generate_pattern(spec);
}

} // namespace

std::string SceneSpec::label() const {
    if (!name.empty())
        return name;
    return std::string(to_string(kind)) + "-" + std::to_string(seed);
}

std::vector<SweepCase> standard_suite(std::size_t size) {
    struct Row {
        SceneKind kind;
        std::uint64_t seed;
        Eigen::Vector3d light;
    };
    const Row rows[] = {
        {SceneKind::Sphere, 1, {0.3, 0.4, 0.866}},  {SceneKind::HeightMap, 2, {-0.2, 0.3, 0.93}},
        {SceneKind::FlatTextured, 3, {0.5, -0.1, 0.86}}, {SceneKind::Sphere, 4, {-0.4, -0.2, 0.89}},
        {SceneKind::HeightMap, 5, {0.1, 0.1, 0.99}},
    };
    std::vector<SweepCase> out;
    for (std::size_t i = 0; i < std::size(rows); ++i) {
        SweepCase c;
        c.scene.kind = rows[i].kind;
        c.scene.seed = rows[i].seed;
        c.scene.size = size;
        c.scene.light = rows[i].light.normalized();
        c.capture.phase = (static_cast<double>(i) + 0.5) * std::numbers::pi / static_cast<double>(std::size(rows));
        c.capture.seed = 77 + i;
        out.push_back(c);
    }
    return out;
}

SeparationResult run_solver(std::string_view name, const Image& y, const FilterArray& array, double phase,
                            SolverConfig cfg) {
    if (name == "two_stage")
        return separate_two_stage(y, array, phase, cfg);
    auto norm = parse_tv_norm(name);
    if (!norm)
        throw ValidationError("unknown solver '" + std::string(name) + "'");
    cfg.norm = *norm;
    return separate(y, array, phase, cfg);
}

Json to_json(const SceneSpec& spec) {
    return Json{{"name", spec.label()},
                {"kind", std::string(to_string(spec.kind))},
                {"size", spec.size},
                {"seed", spec.seed},
                {"channels", spec.options.channels},
                {"specular_coeff", spec.options.specular_coeff},
                {"shininess", spec.options.shininess},
                {"light", {spec.light.x(), spec.light.y(), spec.light.z()}}};
}

SceneSpec scene_spec_from_json(const Json& j) {
    SceneSpec s;
    if (j.contains("kind")) {
        const auto name = j.at("kind").get<std::string>();
        auto kind = parse_scene_kind(name);
        if (!kind)
            throw ValidationError("unknown scene kind '" + name + "'");
        s.kind = *kind;
    }
    s.name = j.value("name", std::string{});
    s.size = j.value("size", s.size);
    s.seed = j.value("seed", s.seed);
    s.options.channels = j.value("channels", s.options.channels);
    s.options.specular_coeff = j.value("specular_coeff", s.options.specular_coeff);
    s.options.shininess = j.value("shininess", s.options.shininess);
    if (j.contains("light")) {
        const auto v = j.at("light").get<std::vector<double>>();
        if (v.size() != 3)
            throw ValidationError("scene light must have three components");
        Eigen::Vector3d l(v[0], v[1], v[2]);
        if (!(l.norm() > 0.0))
            throw ValidationError("scene light must be nonzero");
        s.light = l.normalized();
    }
    return s;
}

RunManifest parse_manifest(const Json& j, const fs::path& base_dir) {
    if (!j.is_object())
        throw ValidationError("manifest must be a JSON object");
    RunManifest m;
    try {
        if (j.contains("out"))
            m.out_dir = resolve(base_dir, j.at("out").get<std::string>());
        else
            m.out_dir = base_dir;
        if (j.contains("scene"))
            m.scene = scene_spec_from_json(j.at("scene"));
        if (j.contains("pattern")) {
            const auto& p = j.at("pattern");
            if (p.contains("kind"))
                m.pattern.kind = pattern_kind_from(p.at("kind").get<std::string>());
            m.pattern.k = p.value("k", m.pattern.k);
            m.pattern.seed = p.value("seed", m.pattern.seed);
        }
        if (j.contains("capture"))
            m.capture = capture_from_json(j.at("capture"));
        if (j.contains("solver"))
            m.solver = solver_config_from_json(j.at("solver"));
        if (j.contains("phase_deg"))
            m.phase_deg = j.at("phase_deg").get<double>();
        if (j.contains("inputs")) {
            const auto& in = j.at("inputs");
            auto path = [&](const char* key, fs::path& dst) {
                if (in.contains(key))
                    dst = resolve(base_dir, in.at(key).get<std::string>());
            };
            path("mosaic", m.mosaic);
            path("pattern", m.pattern_file);
            path("diffuse", m.diffuse);
            path("specular", m.specular);
            path("true_diffuse", m.true_diffuse);
            path("true_specular", m.true_specular);
        }
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            if (s.contains("cases"))
                for (const auto& c : s.at("cases")) {
                    SweepCase sc;
                    sc.scene = scene_spec_from_json(c.at("scene"));
                    if (c.contains("capture"))
                        sc.capture = capture_from_json(c.at("capture"));
                    m.sweep_cases.push_back(sc);
                }
            if (s.contains("patterns")) {
                m.sweep_patterns.clear();
                for (const auto& p : s.at("patterns"))
                    m.sweep_patterns.push_back(pattern_kind_from(p.get<std::string>()));
            }
            if (s.contains("k"))
                m.sweep_k = s.at("k").get<std::vector<std::size_t>>();
            if (s.contains("solvers"))
                m.sweep_solvers = s.at("solvers").get<std::vector<std::string>>();
        }
        if (j.contains("dome")) {
            const auto& d = j.at("dome");
            m.dome_lights = d.value("lights", m.dome_lights);
            if (d.contains("light_file"))
                m.light_file = resolve(base_dir, d.at("light_file").get<std::string>());
        }
        if (j.contains("stack")) {
            const auto& s = j.at("stack");
            StackInput st;
            st.diffuse = resolve_all(base_dir, s.at("diffuse"));
            if (s.contains("reference"))
                st.reference = resolve_all(base_dir, s.at("reference"));
            st.lights = resolve(base_dir, s.at("lights").get<std::string>());
            m.stack = std::move(st);
        }
    } catch (const Json::exception& e) {
        throw ValidationError(std::string("manifest: ") + e.what());
    }
    for (const auto& name : m.sweep_solvers)
        if (name != "two_stage" && !parse_tv_norm(name))
            throw ValidationError("unknown solver '" + name + "'");
    return m;
}

RunManifest load_manifest(const fs::path& path) {
    return parse_manifest(load_json(path), path.has_parent_path() ? path.parent_path() : fs::path("."));
}

void apply_overrides(RunManifest& m, const CliOverrides& o) {
    if (o.out)
        m.out_dir = *o.out;
    if (o.phase_deg)
        m.phase_deg = *o.phase_deg;
    if (o.norm)
        m.solver.norm = *o.norm;
    if (o.pattern)
        m.pattern.kind = *o.pattern;
    if (o.k)
        m.pattern.k = *o.k;
    if (o.seed)
        m.pattern.seed = *o.seed;
}

std::vector<Eigen::Vector3d> load_lights(const fs::path& path) {
    const Json j = load_json(path);
    std::vector<Eigen::Vector3d> out;
    try {
        for (const auto& d : j.at("directions")) {
            const auto v = d.get<std::vector<double>>();
            if (v.size() != 3)
                throw ValidationError("light directions must have three components");
            out.emplace_back(v[0], v[1], v[2]);
        }
    } catch (const Json::exception& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
    LightDome{out}.validate();
    return out;
}

void save_lights(const fs::path& path, std::span<const Eigen::Vector3d> lights) {
    Json dirs = Json::array();
    for (const auto& l : lights)
        dirs.push_back({l.x(), l.y(), l.z()});
    save_json(path, Json{{"directions", dirs}});
}

SimulateOutputs cmd_simulate(const RunManifest& m) {
    if (!m.scene)
        throw ValidationError("simulate needs a scene");
    m.capture.validate();
    const Scene scene = build_scene(*m.scene);
    const auto layers = render_layers(scene, m.scene->light);
    const FilterArray array = build_pattern(m.pattern, scene.height, scene.width);
    const Image y = mosaic_capture(layers.diffuse, layers.specular, array, m.capture);

    ensure_dir(m.out_dir);
    SimulateOutputs out{m.out_dir / "mosaic.pfm", m.out_dir / "diffuse_true.pfm", m.out_dir / "specular_true.pfm",
                        m.out_dir / "pattern.json", m.out_dir / "manifest.json"};
    write_pfm(out.mosaic, y);
    write_pfm(out.diffuse, layers.diffuse);
    write_pfm(out.specular, layers.specular);
    save_json(out.pattern, to_json(array));

    Json next{{"out", "."},
              {"scene", to_json(*m.scene)},
              {"pattern", pattern_to_json(m.pattern)},
              {"capture", capture_to_json(m.capture)},
              {"solver", to_json(m.solver)},
              {"inputs",
               {{"mosaic", "mosaic.pfm"},
                {"pattern", "pattern.json"},
                {"diffuse", "diffuse.pfm"},
                {"specular", "specular.pfm"},
                {"true_diffuse", "diffuse_true.pfm"},
                {"true_specular", "specular_true.pfm"}}}};
    save_json(out.manifest, next);
    return out;
}

SeparateOutputs cmd_separate(const RunManifest& m) {
    m.solver.validate();
    const Image y = read_image(require(m.mosaic, "inputs.mosaic"));
    const FilterArray array = filter_array_from_json(load_json(require(m.pattern_file, "inputs.pattern")));
    if (!array.matches(y))
        throw ShapeError("mosaic and pattern dimensions differ");

    SeparateOutputs out;
    Json diag;
    if (m.phase_deg) {
        out.phase = wrap_angle(*m.phase_deg * kDeg);
        out.phase_source = "user";
    } else {
        const PhaseEstimate est = estimate_phase(y, array);
        if (!est.identifiable)
            throw NumericalError("light phase is unidentifiable from this mosaic (no polarized component); "
                                 "supply the phase explicitly");
        out.phase = est.phase;
        out.phase_source = "estimated";
        diag["phase_estimate"] = {{"mu_d", est.mu_d},
                                  {"mu_s", est.mu_s},
                                  {"residual", est.residual},
                                  {"exactly_determined", est.exactly_determined}};
    }
    out.result = separate(y, array, out.phase, m.solver);

    ensure_dir(m.out_dir);
    write_pfm(m.out_dir / "diffuse.pfm", out.result.diffuse);
    write_pfm(m.out_dir / "specular.pfm", out.result.specular);
    write_png(m.out_dir / "diffuse.png", out.result.diffuse);
    write_png(m.out_dir / "specular.png", out.result.specular);

    const auto& d = out.result.diagnostics;
    diag["phase_deg"] = out.phase / kDeg;
    diag["phase_source"] = out.phase_source;
    diag["solver"] = to_json(m.solver);
    diag["iterations"] = out.result.iterations;
    diag["final_residual"] = out.result.final_residual;
    diag["objective_trace"] = out.result.objective_trace;
    diag["cg_iterations"] = d.cg_iterations;
    diag["cg_converged"] = d.cg_converged;
    diag["outer_converged"] = d.outer_converged;
    diag["line_search_failed"] = d.line_search_failed;
    if (!d.constraint_trace.empty())
        diag["constraint_trace"] = d.constraint_trace;
    save_json(m.out_dir / "diagnostics.json", diag);
    return out;
}

MetricReport cmd_evaluate(const RunManifest& m) {
    const Image est_d = read_image(require(m.diffuse, "inputs.diffuse"));
    const Image est_s = read_image(require(m.specular, "inputs.specular"));
    const Image true_d = read_image(require(m.true_diffuse, "ground truth inputs.true_diffuse"));
    const Image true_s = read_image(require(m.true_specular, "ground truth inputs.true_specular"));

    MetricReport report = evaluate_separation(est_d, est_s, true_d, true_s);
    report.scene = m.scene ? m.scene->label() : "unnamed";
    report.pattern = std::string(to_string(m.pattern.kind));
    report.k = m.pattern_file.empty() ? m.pattern.k
                                      : filter_array_from_json(load_json(m.pattern_file)).orientation_count();
    report.solver = std::string(to_string(m.solver.norm));
    report.gamma_d = m.solver.gamma_d;
    report.gamma_s = m.solver.gamma_s;

    ensure_dir(m.out_dir);
    write_file_atomic(m.out_dir / "metrics.csv", csv_header() + "\n" + csv_row(report) + "\n");
    return report;
}

std::vector<MetricReport> cmd_sweep(const RunManifest& m) {
    m.solver.validate();
    const auto cases = m.sweep_cases.empty() ? standard_suite() : m.sweep_cases;

    struct Capture {
        std::size_t case_index;
        PatternKind kind;
        std::size_t k;
        FilterArray array;
        Image y;
    };
    std::vector<RenderedLayers> truth;
    std::vector<Capture> captures;
    for (std::size_t ci = 0; ci < cases.size(); ++ci) {
        const auto& c = cases[ci];
        const Scene scene = build_scene(c.scene);
        truth.push_back(render_layers(scene, c.scene.light));
        for (PatternKind kind : m.sweep_patterns)
            for (std::size_t k : m.sweep_k) {
                if (kind == PatternKind::Regular) {
                    const auto t = static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(k))));
                    if (t * t != k || t > scene.height || t > scene.width)
                        continue;
                }
                PatternSpec spec = m.pattern;
                spec.kind = kind;
                spec.k = k;
                spec.seed = m.pattern.seed + ci;
                FilterArray array = build_pattern(spec, scene.height, scene.width);
                Image y = mosaic_capture(truth.back().diffuse, truth.back().specular, array, c.capture);
                captures.push_back({ci, kind, k, std::move(array), std::move(y)});
            }
    }

    const std::size_t solvers = m.sweep_solvers.size();
    std::vector<MetricReport> rows(captures.size() * solvers);
    parallel_for(rows.size(), [&](std::size_t job) {
        const Capture& cap = captures[job / solvers];
        const std::string& solver = m.sweep_solvers[job % solvers];
        const auto& c = cases[cap.case_index];
        const auto t0 = std::chrono::steady_clock::now();
        const SeparationResult r = run_solver(solver, cap.y, cap.array, c.capture.phase, m.solver);
        const auto t1 = std::chrono::steady_clock::now();
        MetricReport report = evaluate_separation(r.diffuse, r.specular, truth[cap.case_index].diffuse,
                                                  truth[cap.case_index].specular);
        report.scene = c.scene.label();
        report.pattern = std::string(to_string(cap.kind));
        report.k = cap.k;
        report.solver = solver;
        report.gamma_d = m.solver.gamma_d;
        report.gamma_s = m.solver.gamma_s;
        report.wall_time_s = std::chrono::duration<double>(t1 - t0).count();
        rows[job] = std::move(report);
    });

    std::string csv = csv_header() + "\n";
    for (const auto& r : rows)
        csv += csv_row(r) + "\n";
    ensure_dir(m.out_dir);
    write_file_atomic(m.out_dir / "sweep.csv", csv);
    return rows;
}

NormalsOutputs cmd_normals(const RunManifest& m) {
    NormalsOutputs out;
    std::optional<NormalMap> analytic;
    if (m.scene)
        analytic = NormalMap::from_scene(build_scene(*m.scene));
    Json report;
    ensure_dir(m.out_dir);

    if (m.stack) {
        const auto lights = load_lights(m.stack->lights);
        if (lights.size() != m.stack->diffuse.size())
            throw ValidationError("stack has " + std::to_string(m.stack->diffuse.size()) + " images for " +
                                  std::to_string(lights.size()) + " lights");
        std::vector<Image> diffuse;
        for (const auto& p : m.stack->diffuse)
            diffuse.push_back(read_image(p));
        out.separated = photometric_stereo(diffuse, lights);
        if (!m.stack->reference.empty()) {
            if (m.stack->reference.size() != lights.size())
                throw ValidationError("reference stack size differs from the light count");
            std::vector<Image> ref;
            for (const auto& p : m.stack->reference)
                ref.push_back(read_image(p));
            out.reference = photometric_stereo(ref, lights);
        }
        report["mode"] = "stack";
        report["lights"] = lights.size();
    } else {
        if (!m.scene)
            throw ValidationError("normals needs a scene (dome mode) or a stack");
        m.solver.validate();
        m.capture.validate();
        const Scene scene = build_scene(*m.scene);
        const LightDome dome = m.light_file.empty() ? LightDome::golden_spiral(m.dome_lights)
                                                    : LightDome{load_lights(m.light_file)};
        dome.validate();
        const FilterArray array = build_pattern(m.pattern, scene.height, scene.width);
        const DomeCapture cap = simulate_dome_captures(scene, dome, array, m.capture);
        const std::size_t count = cap.mosaics.size();

        std::vector<double> phases(count, m.phase_deg ? wrap_angle(*m.phase_deg * kDeg) : 0.0);
        if (!m.phase_deg)
            for (std::size_t i = 0; i < count; ++i) {
                const PhaseEstimate est = estimate_phase(cap.mosaics[i], array);
                if (!est.identifiable)
                    throw NumericalError("light phase is unidentifiable for dome light " + std::to_string(i) +
                                         "; supply the phase explicitly");
                phases[i] = est.phase;
            }

        std::vector<Image> separated(count);
        parallel_for(count, [&](std::size_t i) {
            separated[i] = separate(cap.mosaics[i], array, phases[i], m.solver).diffuse;
        });
        std::vector<Image> raw;
        for (std::size_t i = 0; i < count; ++i)
            raw.push_back(cap.diffuse[i] + cap.specular[i]);

        out.separated = photometric_stereo(separated, dome.directions);
        out.raw = photometric_stereo(raw, dome.directions);
        out.reference = photometric_stereo(cap.diffuse, dome.directions);

        const fs::path stack_dir = m.out_dir / "stack";
        ensure_dir(stack_dir);
        for (std::size_t i = 0; i < count; ++i) {
            write_pfm(stack_dir / stack_name("diffuse", i), separated[i]);
            write_pfm(stack_dir / stack_name("reference", i), cap.diffuse[i]);
        }
        save_lights(m.out_dir / "lights.json", dome.directions);
        write_normals(m.out_dir, "normals_raw", *out.raw);
        report["mode"] = "dome";
        report["lights"] = count;
        report["phase_source"] = m.phase_deg ? "user" : "estimated";
    }

    write_normals(m.out_dir, "normals", out.separated);
    if (out.reference)
        write_normals(m.out_dir, "normals_reference", *out.reference);

    if (analytic) {
        out.separated_vs_analytic = angular_error(out.separated, *analytic);
        report["separated"]["vs_analytic"] = error_json(*out.separated_vs_analytic);
        write_pfm(m.out_dir / "angular_error.pfm", out.separated_vs_analytic->map);
        if (out.raw) {
            out.raw_vs_analytic = angular_error(*out.raw, *analytic);
            report["raw_composite"]["vs_analytic"] = error_json(*out.raw_vs_analytic);
        }
    }
    if (out.reference) {
        out.separated_vs_reference = angular_error(out.separated, *out.reference);
        report["separated"]["vs_reference"] = error_json(*out.separated_vs_reference);
        if (out.raw) {
            out.raw_vs_reference = angular_error(*out.raw, *out.reference);
            report["raw_composite"]["vs_reference"] = error_json(*out.raw_vs_reference);
        }
    }
    save_json(m.out_dir / "normals_report.json", report);
    return out;
}

int exit_code_for(const std::exception_ptr& error) {
    try {
        std::rethrow_exception(error);
    } catch (const ValidationError&) {
        return kExitValidation;
    } catch (const Json::exception&) {
        return kExitValidation;
    } catch (const IoError&) {
        return kExitIo;
    } catch (const fs::filesystem_error&) {
        return kExitIo;
    } catch (const NumericalError&) {
        return kExitNumerical;
    } catch (...) {
        return 1;
    }
}

} // namespace polarsep
