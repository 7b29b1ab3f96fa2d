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
#ifndef POLARSEP_PATTERNS_HPP
#define POLARSEP_PATTERNS_HPP

#include "polarsep/forward_model.hpp"

#include <cstdint>
#include <optional>
#include <string_view>

namespace polarsep {

enum class PatternKind { Regular, Random };

std::string_view to_string(PatternKind kind);
std::optional<PatternKind> parse_pattern_kind(std::string_view name);

struct PatternSpec {
    PatternKind kind = PatternKind::Random;
    std::size_t k = 4;
    std::uint64_t seed = 0;
    std::size_t height = 0;
    std::size_t width = 0;
};

/// theta_j = j pi / k, j = 0..k-1.
OrientationSet generate_orientations(std::size_t k);

/// Regular: a sqrt(k) x sqrt(k) tile holding indices 0..k-1 row-major,
/// repeated over the sensor. Random: iid uniform indices from the seeded
/// generator; a draw missing some orientation is redrawn with seed + 1
/// (only when the array has at least k pixels).
FilterArray generate_pattern(const PatternSpec& spec);

} // namespace polarsep

#endif
