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
#include <doctest.h>

#include "polarsep/errors.hpp"
#include "polarsep/image_io.hpp"
#include "polarsep/pipeline.hpp"
#include "test_support.hpp"

#include <cstdlib>
#include <fstream>
#include <iterator>
#include <sstream>
#include <sys/wait.h>

using namespace polarsep;
using namespace polarsep::testing;

namespace {

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

int run_cli(const std::string& args) {
    const std::string cmd = std::string(POLARSEP_CLI_PATH) + " " + args + " > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

fs::path write_manifest(const fs::path& dir, const std::string& name, const Json& j) {
    const auto path = dir / name;
    save_json(path, j);
    return path;
}

Json sphere_manifest(std::size_t size = 64) {
    return Json{{"out", "run"},
                {"scene", {{"kind", "sphere"}, {"size", size}, {"seed", 3}, {"light", {0.3, 0.2, 0.9}}}},
                {"pattern", {{"kind", "random"}, {"k", 16}, {"seed", 9}}},
                {"capture", {{"phase_deg", 40.0}, {"noise_sigma", 0.002}, {"seed", 4}}}};
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ','))
        out.push_back(cell);
    return out;
}

} // namespace

TEST_CASE("simulate writes consistent outputs") {
    const auto dir = scratch_dir("cli_simulate");
    const auto manifest = load_manifest(write_manifest(dir, "m.json", sphere_manifest()));
    const auto out = cmd_simulate(manifest);
    for (const auto* p : {&out.mosaic, &out.diffuse, &out.specular, &out.pattern, &out.manifest})
        CHECK(fs::exists(*p));
    const Image y = read_pfm(out.mosaic), d = read_pfm(out.diffuse), s = read_pfm(out.specular);
    const FilterArray a = filter_array_from_json(load_json(out.pattern));
    CHECK(y.same_shape(d));
    CHECK(y.same_shape(s));
    CHECK(a.matches(y));
    CHECK(y.height() == 64);
    CHECK(a.orientation_count() == 16);

    // the mosaic is the capture of the written layers (up to float storage)
    const Image again = mosaic_capture(d, s, a, manifest.capture);
    CHECK(max_abs_diff(again, y) < 1e-6);

    // same manifest, same bytes
    const auto first = slurp(out.mosaic);
    cmd_simulate(manifest);
    CHECK(slurp(out.mosaic) == first);
}

TEST_CASE("separate follows the library and records the phase source") {
    const auto dir = scratch_dir("cli_separate");
    const auto sim = cmd_simulate(load_manifest(write_manifest(dir, "m.json", sphere_manifest())));
    RunManifest m = load_manifest(sim.manifest);
    CHECK(m.solver.gamma_d == 0.01);
    CHECK(m.solver.gamma_s == 0.002);
    CHECK(m.solver.norm == TvNorm::L2);

    const auto est = cmd_separate(m);
    CHECK(est.phase_source == "estimated");
    CHECK(std::abs(est.phase * 180.0 / std::numbers::pi - 40.0) < 1.0);
    const Json diag = load_json(m.out_dir / "diagnostics.json");
    CHECK(diag.at("phase_source") == "estimated");
    CHECK(diag.contains("phase_estimate"));
    for (const char* f : {"diffuse.pfm", "specular.pfm", "diffuse.png", "specular.png"})
        CHECK(fs::exists(m.out_dir / f));

    CliOverrides ov;
    ov.phase_deg = 40.0;
    apply_overrides(m, ov);
    const auto user = cmd_separate(m);
    CHECK(user.phase_source == "user");
    CHECK(load_json(m.out_dir / "diagnostics.json").at("phase_source") == "user");
    const Image y = read_pfm(sim.mosaic);
    const FilterArray a = filter_array_from_json(load_json(sim.pattern));
    const auto direct = separate(y, a, wrap_angle(40.0 * std::numbers::pi / 180.0), SolverConfig{});
    CHECK(max_abs_diff(direct.diffuse, user.result.diffuse) == 0.0);
    Image stored = direct.specular;
    for (double& v : stored.data())
        v = static_cast<float>(v);
    CHECK(read_pfm(m.out_dir / "specular.pfm") == stored);
}

TEST_CASE("separate refuses an unidentifiable phase") {
    const auto dir = scratch_dir("cli_unidentifiable");
    Json j = sphere_manifest(32);
    j["scene"]["specular_coeff"] = 0.0;
    j["capture"]["noise_sigma"] = 0.0;
    const auto sim = cmd_simulate(load_manifest(write_manifest(dir, "m.json", j)));
    RunManifest m = load_manifest(sim.manifest);
    CHECK_THROWS_AS(cmd_separate(m), NumericalError);
    CHECK(run_cli("separate --manifest " + sim.manifest.string()) == kExitNumerical);
    CHECK(run_cli("separate --manifest " + sim.manifest.string() + " --phase 10") == 0);
}

TEST_CASE("evaluate and sweep agree") {
    const auto dir = scratch_dir("cli_sweep");
    Json j{{"out", "sweep"},
           {"pattern", {{"seed", 100}}},
           {"sweep",
            {{"cases",
              {{{"scene", {{"kind", "heightmap"}, {"size", 32}, {"seed", 2}}}, {"capture", {{"phase_deg", 30}}}},
               {{"scene", {{"kind", "flat"}, {"size", 32}, {"seed", 5}, {"name", "tex"}}},
                {"capture", {{"phase_deg", 120}}}}}},
             {"k", {4, 8, 16}},
             {"patterns", {"regular", "random"}},
             {"solvers", {"l2", "two_stage"}}}}};
    const auto manifest = load_manifest(write_manifest(dir, "sweep.json", j));
    const auto rows = cmd_sweep(manifest);
    // regular K=8 is skipped: 2 cases x (2 regular + 3 random) x 2 solvers
    CHECK(rows.size() == 20);
    const auto csv = slurp(dir / "sweep" / "sweep.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
    CHECK(rows[0].scene == "heightmap-2");
    CHECK(rows[0].pattern == "regular");
    CHECK(rows.back().scene == "tex");
    CHECK(rows.back().solver == "two_stage");

    // the random K=8 l2 row of the first case, rebuilt through simulate/separate/evaluate
    Json single{{"out", "single"},
                {"scene", j["sweep"]["cases"][0]["scene"]},
                {"capture", j["sweep"]["cases"][0]["capture"]},
                {"pattern", {{"kind", "random"}, {"k", 8}, {"seed", 100}}}};
    const auto sim = cmd_simulate(load_manifest(write_manifest(dir, "single.json", single)));
    RunManifest m = load_manifest(sim.manifest);
    m.phase_deg = 30.0;
    cmd_separate(m);
    const auto report = cmd_evaluate(m);
    const auto match = std::find_if(rows.begin(), rows.end(), [](const MetricReport& r) {
        return r.scene == "heightmap-2" && r.pattern == "random" && r.k == 8 && r.solver == "l2";
    });
    REQUIRE(match != rows.end());
    CHECK(report.scene == match->scene);
    CHECK(report.psnr_diffuse.db == doctest::Approx(match->psnr_diffuse.db).epsilon(1e-4));
    CHECK(report.psnr_specular.db == doctest::Approx(match->psnr_specular.db).epsilon(1e-4));
    const auto fields = split_csv(split_csv(slurp(m.out_dir / "metrics.csv")).size() ? [&] {
        std::stringstream ss(slurp(m.out_dir / "metrics.csv"));
        std::string header, row;
        std::getline(ss, header);
        std::getline(ss, row);
        return row;
    }() : "");
    REQUIRE(fields.size() == 9);
    CHECK(fields[0] == "heightmap-2");
    CHECK(fields[2] == "8");
    CHECK(fields[3] == "l2");
}

TEST_CASE("evaluate of identical images reports the identical flag") {
    const auto dir = scratch_dir("cli_evaluate");
    const auto sim = cmd_simulate(load_manifest(write_manifest(dir, "m.json", sphere_manifest(32))));
    RunManifest m = load_manifest(sim.manifest);
    m.diffuse = sim.diffuse;
    m.specular = sim.specular;
    const auto r = cmd_evaluate(m);
    CHECK(r.psnr_diffuse.identical);
    CHECK(csv_row(r).ends_with("inf,inf,inf"));
    m.true_specular.clear();
    CHECK_THROWS_AS(cmd_evaluate(m), ValidationError);
}

TEST_CASE("normals pipeline") {
    const auto dir = scratch_dir("cli_normals");
    SUBCASE("flat scene is nearly exact") {
        Json j{{"out", "flat"},
               {"scene", {{"kind", "flat"}, {"size", 32}, {"seed", 1}}},
               {"pattern", {{"kind", "random"}, {"k", 16}, {"seed", 4}}},
               {"capture", {{"phase_deg", 60}}},
               {"phase_deg", 60},
               {"dome", {{"lights", 12}}}};
        const auto out = cmd_normals(load_manifest(write_manifest(dir, "flat.json", j)));
        REQUIRE(out.separated_vs_analytic);
        CHECK(out.separated_vs_analytic->mean_deg < 0.5);
        CHECK(out.reference);
    }
    SUBCASE("separation helps on a specular sphere and the stack path agrees") {
        Json j{{"out", "sphere"},
               {"scene", {{"kind", "sphere"}, {"size", 128}, {"seed", 7}, {"specular_coeff", 0.5}}},
               {"pattern", {{"kind", "random"}, {"k", 16}, {"seed", 11}}},
               {"capture", {{"phase_deg", 34}}},
               {"phase_deg", 34},
               {"dome", {{"lights", 16}}}};
        const auto out = cmd_normals(load_manifest(write_manifest(dir, "sphere.json", j)));
        REQUIRE(out.separated_vs_analytic);
        REQUIRE(out.raw_vs_analytic);
        CHECK(out.separated_vs_analytic->mean_deg < out.raw_vs_analytic->mean_deg);
        const Json report = load_json(dir / "sphere" / "normals_report.json");
        CHECK(report.at("mode") == "dome");
        CHECK(report.contains("raw_composite"));

        Json diffuse = Json::array(), reference = Json::array();
        for (std::size_t i = 0; i < 16; ++i) {
            char name[32];
            std::snprintf(name, sizeof name, "%03zu.pfm", i);
            diffuse.push_back(std::string("sphere/stack/diffuse_") + name);
            reference.push_back(std::string("sphere/stack/reference_") + name);
        }
        Json stack{{"out", "stack"},
                   {"scene", j["scene"]},
                   {"stack", {{"lights", "sphere/lights.json"}, {"diffuse", diffuse}, {"reference", reference}}}};
        const auto from_files = cmd_normals(load_manifest(write_manifest(dir, "stack.json", stack)));
        REQUIRE(from_files.separated_vs_analytic);
        CHECK(from_files.separated_vs_analytic->mean_deg ==
              doctest::Approx(out.separated_vs_analytic->mean_deg).epsilon(1e-4));
        CHECK(from_files.separated_vs_reference->mean_deg ==
              doctest::Approx(out.separated_vs_reference->mean_deg).epsilon(1e-4));
        CHECK(fs::exists(dir / "stack" / "normals.pfm"));
        CHECK(fs::exists(dir / "stack" / "normals.png"));
        CHECK(read_pfm(dir / "stack" / "normals.pfm").channels() == 3);
    }
    SUBCASE("coplanar lights are rejected") {
        save_lights(dir / "planar.json", std::vector<Eigen::Vector3d>{Eigen::Vector3d(0.6, 0, 0.8),
                                                                      Eigen::Vector3d::UnitZ(),
                                                                      Eigen::Vector3d(-0.6, 0, 0.8)});
        Json j{{"out", "planar"},
               {"scene", {{"kind", "flat"}, {"size", 16}}},
               {"phase_deg", 10},
               {"dome", {{"light_file", "planar.json"}}}};
        CHECK_THROWS_AS(cmd_normals(load_manifest(write_manifest(dir, "planar_m.json", j))), ValidationError);
    }
}

TEST_CASE("command line") {
    const auto dir = scratch_dir("cli_binary");
    const auto m = write_manifest(dir, "m.json", sphere_manifest(32));
    CHECK(run_cli("simulate --manifest " + m.string()) == 0);
    const auto first = slurp(dir / "run" / "mosaic.pfm");
    CHECK(run_cli("simulate --manifest " + m.string() + " --out " + (dir / "again").string()) == 0);
    CHECK(slurp(dir / "again" / "mosaic.pfm") == first);

    // flags override manifest fields
    CHECK(run_cli("simulate --manifest " + m.string() + " --out " + (dir / "k4").string() +
                  " --k 4 --pattern regular") == 0);
    const FilterArray a = filter_array_from_json(load_json(dir / "k4" / "pattern.json"));
    CHECK(a.orientation_count() == 4);
    CHECK(a.index(1, 1) == 3);

    const auto sim = (dir / "run" / "manifest.json").string();
    CHECK(run_cli("separate --manifest " + sim + " --phase 40 --norm huber") == 0);
    CHECK(load_json(dir / "run" / "diagnostics.json").at("solver").at("norm") == "huber");
    CHECK(run_cli("evaluate --manifest " + sim) == 0);
    const auto csv = slurp(dir / "run" / "metrics.csv");
    CHECK(run_cli("evaluate --manifest " + sim) == 0);
    CHECK(slurp(dir / "run" / "metrics.csv") == csv);

    // exit codes
    CHECK(run_cli("") == kExitValidation);
    CHECK(run_cli("separate --manifest " + sim + " --norm tv") == kExitValidation);
    CHECK(run_cli("separate --manifest " + (dir / "nope.json").string()) == kExitValidation);
    std::ofstream(dir / "bad.json") << R"({"scene": {"kind": "cube"}})";
    CHECK(run_cli("simulate --manifest " + (dir / "bad.json").string()) == kExitValidation);
    std::ofstream(dir / "missing.json") << R"({"inputs": {"mosaic": "absent.pfm", "pattern": "absent.json"}})";
    CHECK(run_cli("separate --manifest " + (dir / "missing.json").string()) == kExitIo);
    std::ofstream(dir / "broken.json") << "{";
    CHECK(run_cli("simulate --manifest " + (dir / "broken.json").string()) == kExitIo);
}
