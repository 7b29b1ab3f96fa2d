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
#ifndef POLARSEP_PIPELINE_HPP
#define POLARSEP_PIPELINE_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/metrics.hpp"
#include "polarsep/patterns.hpp"
#include "polarsep/serialization.hpp"
#include "polarsep/solvers.hpp"
#include "polarsep/stereo.hpp"
#include "polarsep/synth.hpp"

#include <Eigen/Core>

#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace polarsep {

namespace fs = std::filesystem;

/// A procedural scene plus the light it is rendered under.
struct SceneSpec {
    std::string name; ///< defaults to "<kind>-<seed>"
    SceneKind kind = SceneKind::Sphere;
    std::size_t size = 128;
    std::uint64_t seed = 0;
    SceneOptions options;
    Eigen::Vector3d light = Eigen::Vector3d::UnitZ();

    std::string label() const;
};

struct SweepCase {
    SceneSpec scene;
    CaptureConfig capture;
};

/// Five 128x128 scenes (two spheres, two height maps, one flat texture) with
/// light phases spread evenly over [0, pi) and no noise.
std::vector<SweepCase> standard_suite(std::size_t size = 128);

/// Solver names accepted by sweep: "l2", "l1", "huber", "two_stage".
SeparationResult run_solver(std::string_view name, const Image& y, const FilterArray& array, double phase,
                            SolverConfig cfg);

struct StackInput {
    std::vector<fs::path> diffuse;   ///< one image per light
    std::vector<fs::path> reference; ///< optional non-mosaiced diffuse stack
    fs::path lights;                 ///< {"directions": [[x, y, z], ...]}
};

/// Everything a subcommand may need. Paths are resolved against the
/// directory of the manifest file.
struct RunManifest {
    fs::path out_dir = ".";

    std::optional<SceneSpec> scene;
    PatternSpec pattern; ///< height and width come from the scene or the inputs
    CaptureConfig capture;
    SolverConfig solver;
    std::optional<double> phase_deg; ///< separate: user phase, estimated when absent

    fs::path mosaic;
    fs::path pattern_file;
    fs::path diffuse;
    fs::path specular;
    fs::path true_diffuse;
    fs::path true_specular;

    std::vector<SweepCase> sweep_cases; ///< empty: standard_suite()
    std::vector<PatternKind> sweep_patterns{PatternKind::Regular, PatternKind::Random};
    std::vector<std::size_t> sweep_k{4, 8, 16};
    std::vector<std::string> sweep_solvers{"l2", "two_stage"};

    std::size_t dome_lights = 16;
    fs::path light_file; ///< overrides dome_lights when set
    std::optional<StackInput> stack;
};

struct CliOverrides {
    std::optional<fs::path> out;
    std::optional<double> phase_deg;
    std::optional<TvNorm> norm;
    std::optional<PatternKind> pattern;
    std::optional<std::size_t> k;
    std::optional<std::uint64_t> seed; ///< pattern seed
};

RunManifest parse_manifest(const Json& j, const fs::path& base_dir);
RunManifest load_manifest(const fs::path& path);
void apply_overrides(RunManifest& manifest, const CliOverrides& overrides);

Json to_json(const SceneSpec& spec);
SceneSpec scene_spec_from_json(const Json& j);

std::vector<Eigen::Vector3d> load_lights(const fs::path& path);
void save_lights(const fs::path& path, std::span<const Eigen::Vector3d> lights);

struct SimulateOutputs {
    fs::path mosaic;
    fs::path diffuse;
    fs::path specular;
    fs::path pattern;
    fs::path manifest;
};

/// Renders the scene, captures it through the pattern and writes the mosaic,
/// both true layers, the pattern and a manifest ready for separate/evaluate.
SimulateOutputs cmd_simulate(const RunManifest& m);

struct SeparateOutputs {
    SeparationResult result;
    double phase = 0.0;
    std::string phase_source; ///< "user" or "estimated"
};

/// Writes diffuse/specular PFM and PNG plus diagnostics.json.
SeparateOutputs cmd_separate(const RunManifest& m);

/// Writes metrics.csv with a header and one row.
MetricReport cmd_evaluate(const RunManifest& m);

/// Rows in case, pattern, K, solver order; writes sweep.csv. Regular
/// patterns with non-square K are skipped.
std::vector<MetricReport> cmd_sweep(const RunManifest& m);

struct NormalsOutputs {
    NormalMap separated;
    std::optional<NormalMap> raw;       ///< dome mode: stereo on Z_d + Z_s
    std::optional<NormalMap> reference; ///< stereo on the non-mosaiced diffuse stack
    std::optional<AngularErrorReport> separated_vs_analytic;
    std::optional<AngularErrorReport> separated_vs_reference;
    std::optional<AngularErrorReport> raw_vs_analytic;
    std::optional<AngularErrorReport> raw_vs_reference;
};

/// Dome mode (no stack input): simulate every light, separate, run stereo.
/// Stack mode: stereo on precomputed diffuse images.
NormalsOutputs cmd_normals(const RunManifest& m);

/// 0 success, 2 validation, 3 I/O, 4 numerical, 1 anything else.
inline constexpr int kExitValidation = 2;
inline constexpr int kExitIo = 3;
inline constexpr int kExitNumerical = 4;
int exit_code_for(const std::exception_ptr& error);

} // namespace polarsep

#endif
