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
#include "polarsep/patterns.hpp"

#include "polarsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace polarsep {

std::string_view to_string(PatternKind kind) {
    return kind == PatternKind::Regular ? "regular" : "random";
}

std::optional<PatternKind> parse_pattern_kind(std::string_view name) {
    if (name == "regular")
        return PatternKind::Regular;
    if (name == "random")
        return PatternKind::Random;
    return std::nullopt;
}

OrientationSet generate_orientations(std::size_t k) {
    if (k < 2)
        throw ValidationError("orientation count must be >= 2");
    std::vector<double> angles(k);
    for (std::size_t j = 0; j < k; ++j)
        angles[j] = static_cast<double>(j) * std::numbers::pi / static_cast<double>(k);
    return OrientationSet(std::move(angles));
}

namespace {

std::size_t exact_sqrt(std::size_t k) {
    auto t = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(k))));
    return t * t == k ? t : 0;
}

std::vector<std::uint16_t> draw_random(std::size_t n, std::size_t k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::uint32_t> pick(0, static_cast<std::uint32_t>(k - 1));
    std::vector<std::uint16_t> idx(n);
    for (auto& i : idx)
        i = static_cast<std::uint16_t>(pick(rng));
    return idx;
}

bool covers_all(const std::vector<std::uint16_t>& idx, std::size_t k) {
    std::vector<bool> seen(k, false);
    for (auto i : idx)
        seen[i] = true;
    return std::all_of(seen.begin(), seen.end(), [](bool b) { return b; });
}

} // namespace

FilterArray generate_pattern(const PatternSpec& spec) {
    if (spec.height == 0 || spec.width == 0)
        throw ValidationError("pattern dimensions must be positive");
    if (spec.k > 65535)
        throw ValidationError("too many orientations");
    auto orientations = generate_orientations(spec.k);
    const auto n = spec.height * spec.width;

    if (spec.kind == PatternKind::Regular) {
        const auto tile = exact_sqrt(spec.k);
        if (tile == 0)
            throw ValidationError("regular pattern needs a perfect-square orientation count, got " +
                                  std::to_string(spec.k));
        if (spec.height < tile || spec.width < tile)
            throw ValidationError("regular pattern smaller than its tile");
        std::vector<std::uint16_t> idx(n);
        for (std::size_t r = 0; r < spec.height; ++r)
            for (std::size_t c = 0; c < spec.width; ++c)
                idx[r * spec.width + c] = static_cast<std::uint16_t>((r % tile) * tile + (c % tile));
        return FilterArray(spec.height, spec.width, std::move(idx), std::move(orientations));
    }

    auto seed = spec.seed;
    auto idx = draw_random(n, spec.k, seed);
    if (n >= spec.k) {
        for (int attempt = 0; !covers_all(idx, spec.k); ++attempt) {
            if (attempt == 1000)
                throw NumericalError("random pattern: could not cover every orientation");
            idx = draw_random(n, spec.k, ++seed);
        }
    }
    return FilterArray(spec.height, spec.width, std::move(idx), std::move(orientations));
}

} // namespace polarsep
