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

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <numbers>

namespace {

struct Options {
    std::string manifest;
    std::string out;
    std::optional<double> phase_deg;
    std::string norm;
    std::string pattern;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed;
};

void add_common(CLI::App* cmd, Options& o) {
    cmd->add_option("--manifest", o.manifest, "run manifest (JSON)")->required()->check(CLI::ExistingFile);
    cmd->add_option("--out", o.out, "output directory");
    cmd->add_option("--phase", o.phase_deg, "light polarization phase in degrees");
    cmd->add_option("--norm", o.norm, "regularizer")->check(CLI::IsMember({"l2", "l1", "huber"}));
    cmd->add_option("--pattern", o.pattern, "filter layout")->check(CLI::IsMember({"regular", "random"}));
    cmd->add_option("--k", o.k, "number of orientations");
    cmd->add_option("--seed", o.seed, "pattern seed");
}

polarsep::CliOverrides overrides(const Options& o) {
    polarsep::CliOverrides ov;
    if (!o.out.empty())
        ov.out = o.out;
    ov.phase_deg = o.phase_deg;
    if (!o.norm.empty())
        ov.norm = polarsep::parse_tv_norm(o.norm);
    if (!o.pattern.empty())
        ov.pattern = polarsep::parse_pattern_kind(o.pattern);
    ov.k = o.k;
    ov.seed = o.seed;
    return ov;
}

void print_error(const char* label, const polarsep::AngularErrorReport& e) {
    std::printf("%s: mean %.4f deg, median %.4f deg over %zu pixels\n", label, e.mean_deg, e.median_deg,
                e.pixel_count);
}

int run(const std::string& command, const polarsep::RunManifest& m) {
    using namespace polarsep;
    if (command == "simulate") {
        const auto out = cmd_simulate(m);
        for (const auto* p : {&out.mosaic, &out.diffuse, &out.specular, &out.pattern, &out.manifest})
            std::printf("%s\n", p->string().c_str());
    } else if (command == "separate") {
        const auto out = cmd_separate(m);
        std::printf("phase %.4f deg (%s), %zu iterations, residual %.3e\n", out.phase * 180.0 / std::numbers::pi,
                    out.phase_source.c_str(), out.result.iterations, out.result.final_residual);
    } else if (command == "evaluate") {
        std::printf("%s\n%s\n", csv_header().c_str(), csv_row(cmd_evaluate(m)).c_str());
    } else if (command == "sweep") {
        std::printf("%s\n", csv_header().c_str());
        for (const auto& row : cmd_sweep(m))
            std::printf("%s\n", csv_row(row).c_str());
    } else {
        const auto out = cmd_normals(m);
        if (out.separated_vs_analytic)
            print_error("separated vs analytic", *out.separated_vs_analytic);
        if (out.separated_vs_reference)
            print_error("separated vs reference", *out.separated_vs_reference);
        if (out.raw_vs_analytic)
            print_error("raw composite vs analytic", *out.raw_vs_analytic);
        if (out.raw_vs_reference)
            print_error("raw composite vs reference", *out.raw_vs_reference);
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Joint demosaicing and diffuse/specular separation for polarization filter arrays"};
    app.require_subcommand(1, 1);
    Options options;
    for (const char* name : {"simulate", "separate", "evaluate", "sweep", "normals"})
        add_common(app.add_subcommand(name), options);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : polarsep::kExitValidation;
    }

    try {
        const std::string command = app.get_subcommands().front()->get_name();
        auto manifest = polarsep::load_manifest(options.manifest);
        polarsep::apply_overrides(manifest, overrides(options));
        return run(command, manifest);
    } catch (const std::exception& e) {
        std::cerr << "polarsep: " << e.what() << "\n";
        return polarsep::exit_code_for(std::current_exception());
    }
}
