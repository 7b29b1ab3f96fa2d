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
#ifndef POLARSEP_SERIALIZATION_HPP
#define POLARSEP_SERIALIZATION_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/solvers.hpp"

#include <json.hpp>

#include <filesystem>

namespace polarsep {

using Json = nlohmann::json;

/// { "height", "width", "angles_deg": [...], "orientation_index": [row-major] }
Json to_json(const FilterArray& array);
FilterArray filter_array_from_json(const Json& j);

/// Every field optional; absent fields keep the values of base.
Json to_json(const SolverConfig& cfg);
SolverConfig solver_config_from_json(const Json& j, SolverConfig base = {});

Json load_json(const std::filesystem::path& path);
/// Pretty-printed, written atomically.
void save_json(const std::filesystem::path& path, const Json& j);

} // namespace polarsep

#endif
