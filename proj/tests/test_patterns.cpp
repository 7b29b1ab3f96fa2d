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
#include "polarsep/patterns.hpp"

#include <cmath>
#include <numbers>
#include <set>

using namespace polarsep;

TEST_CASE("orientations are evenly spaced over half a turn") {
    for (std::size_t k : {2u, 3u, 4u, 8u, 9u, 16u, 25u}) {
        const auto set = generate_orientations(k);
        REQUIRE(set.size() == k);
        for (std::size_t j = 0; j < k; ++j)
            CHECK(set[j] == doctest::Approx(static_cast<double>(j) * std::numbers::pi / static_cast<double>(k)));
    }
    CHECK_THROWS_AS(generate_orientations(1), ValidationError);
}

TEST_CASE("pattern names") {
    CHECK(parse_pattern_kind("regular") == PatternKind::Regular);
    CHECK(parse_pattern_kind("random") == PatternKind::Random);
    CHECK_FALSE(parse_pattern_kind("bayer").has_value());
    CHECK(to_string(PatternKind::Regular) == "regular");
}

TEST_CASE("regular tile layout") {
    const auto a = generate_pattern({PatternKind::Regular, 4, 0, 4, 6});
    const std::uint16_t expect[4][6] = {{0, 1, 0, 1, 0, 1}, {2, 3, 2, 3, 2, 3}, {0, 1, 0, 1, 0, 1}, {2, 3, 2, 3, 2, 3}};
    for (std::size_t r = 0; r < 4; ++r)
        for (std::size_t c = 0; c < 6; ++c)
            CHECK(a.index(r, c) == expect[r][c]);

    // every t x t window holds every orientation exactly once
    const auto b = generate_pattern({PatternKind::Regular, 16, 0, 13, 11});
    for (std::size_t r = 0; r + 4 <= 13; ++r)
        for (std::size_t c = 0; c + 4 <= 11; ++c) {
            std::set<int> seen;
            for (std::size_t i = 0; i < 4; ++i)
                for (std::size_t j = 0; j < 4; ++j)
                    seen.insert(b.index(r + i, c + j));
            CHECK(seen.size() == 16);
        }
    CHECK_THROWS_AS(generate_pattern({PatternKind::Regular, 8, 0, 16, 16}), ValidationError);
    CHECK_THROWS_AS(generate_pattern({PatternKind::Regular, 16, 0, 3, 16}), ValidationError);
}

TEST_CASE("random pattern") {
    const PatternSpec spec{PatternKind::Random, 8, 42, 64, 64};
    const auto a = generate_pattern(spec);
    CHECK(a == generate_pattern(spec));
    auto other = spec;
    other.seed = 43;
    CHECK_FALSE(a == generate_pattern(other));

    // roughly uniform class frequencies: chi-square with 7 dof far below its 0.999 quantile (24.3)
    const auto counts = a.class_counts();
    const double expected = 64.0 * 64.0 / 8.0;
    double chi2 = 0.0;
    for (auto c : counts)
        chi2 += (static_cast<double>(c) - expected) * (static_cast<double>(c) - expected) / expected;
    CHECK(chi2 < 24.3);

    // small arrays still carry every orientation
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const auto small = generate_pattern({PatternKind::Random, 16, seed, 5, 5});
        for (auto c : small.class_counts())
            CHECK(c > 0);
    }
    CHECK_THROWS_AS(generate_pattern({PatternKind::Random, 4, 0, 0, 4}), ValidationError);
}
