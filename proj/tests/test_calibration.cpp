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

#include "polarsep/calibration.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/patterns.hpp"
#include "test_support.hpp"

#include <algorithm>
#include <numbers>

using namespace polarsep;
using namespace polarsep::testing;

namespace {

constexpr double kPi = std::numbers::pi;

double phase_error(double a, double b) {
    const double d = std::abs(wrap_angle(a - b));
    return std::min(d, kPi - d);
}

std::vector<double> model_means(const OrientationSet& set, double phase, double mu_d, double mu_s) {
    std::vector<double> out;
    for (double theta : set.angles())
        out.push_back(mu_d + mu_s * malus_attenuation(phase, theta));
    return out;
}

} // namespace

TEST_CASE("noiseless means recover the phase") {
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> up(0.0, kPi), ud(0.05, 1.0), us(0.01, 1.0);
    const auto set = generate_orientations(8);
    for (int trial = 0; trial < 200; ++trial) {
        const double phase = up(rng), mu_d = ud(rng), mu_s = us(rng);
        const auto est = estimate_phase(model_means(set, phase, mu_d, mu_s), set);
        CHECK(phase_error(est.phase, phase) < 1e-3);
        CHECK(est.mu_d == doctest::Approx(mu_d).epsilon(1e-6));
        CHECK(est.mu_s == doctest::Approx(mu_s).epsilon(1e-6));
        CHECK(est.identifiable);
        CHECK_FALSE(est.exactly_determined);
        CHECK(est.phase >= 0.0);
        CHECK(est.phase < kPi);
    }
}

TEST_CASE("noisy means stay within a degree in median") {
    std::mt19937_64 rng(43);
    std::uniform_real_distribution<double> up(0.0, kPi), ud(0.05, 1.0), us(0.2, 1.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    const auto set = generate_orientations(8);
    std::vector<double> errors;
    for (int trial = 0; trial < 200; ++trial) {
        const double phase = up(rng);
        auto means = model_means(set, phase, ud(rng), us(rng));
        for (double& m : means)
            m *= 1.0 + 0.01 * noise(rng);
        errors.push_back(phase_error(estimate_phase(means, set).phase, phase));
    }
    std::nth_element(errors.begin(), errors.begin() + 100, errors.end());
    CHECK(errors[100] < kPi / 180.0);
}

TEST_CASE("phase estimate is equivariant to orientation shifts and invariant to scale") {
    std::mt19937_64 rng(45);
    const auto set = generate_orientations(6);
    const auto means = model_means(set, 0.9, 0.3, 0.4);
    const auto base = estimate_phase(means, set);
    for (double shift : {0.1, 0.7, 2.0}) {
        std::vector<double> shifted;
        for (double a : set.angles())
            shifted.push_back(wrap_angle(a + shift));
        std::sort(shifted.begin(), shifted.end());
        // means follow their orientation when re-sorted
        std::vector<std::pair<double, double>> pairs;
        for (std::size_t k = 0; k < set.size(); ++k)
            pairs.emplace_back(wrap_angle(set[k] + shift), means[k]);
        std::sort(pairs.begin(), pairs.end());
        std::vector<double> m2;
        for (auto& p : pairs)
            m2.push_back(p.second);
        const auto est = estimate_phase(m2, OrientationSet(shifted));
        CHECK(phase_error(est.phase, base.phase + shift) < 1e-9);
    }
    std::vector<double> scaled = means;
    for (double& m : scaled)
        m *= 3.5;
    const auto est = estimate_phase(scaled, set);
    CHECK(phase_error(est.phase, base.phase) < 1e-9);
    CHECK(est.mu_s == doctest::Approx(3.5 * base.mu_s));
}

TEST_CASE("degenerate cases") {
    const auto three = generate_orientations(3);
    const auto exact = estimate_phase(model_means(three, 1.2, 0.2, 0.5), three);
    CHECK(exact.exactly_determined);
    CHECK(phase_error(exact.phase, 1.2) < 1e-6);

    const auto two = generate_orientations(2);
    CHECK_THROWS_AS(estimate_phase(model_means(two, 1.2, 0.2, 0.5), two), ValidationError);

    const auto eight = generate_orientations(8);
    const auto flat = estimate_phase(std::vector<double>(8, 0.4), eight);
    CHECK_FALSE(flat.identifiable);
    CHECK(flat.mu_d == doctest::Approx(0.4));

    CHECK_THROWS_AS(estimate_phase(std::vector<double>(5, 0.4), eight), ValidationError);
}

TEST_CASE("orientation means of a mosaic") {
    const auto a = generate_pattern({PatternKind::Random, 8, 5, 40, 40});
    const Image d(40, 40, 3, 0.6), s(40, 40, 3, 0.3);
    const Image y = mosaic_capture(d, s, a, CaptureConfig{0.5, 0.0, 0});
    const auto means = orientation_means(y, a);
    REQUIRE(means.size() == 8);
    for (std::size_t k = 0; k < 8; ++k)
        CHECK(means[k] == doctest::Approx(0.3 + 0.3 * malus_attenuation(0.5, a.orientations()[k])));
    const auto est = estimate_phase(y, a);
    CHECK(phase_error(est.phase, 0.5) < 1e-6);
    CHECK(est.mu_d == doctest::Approx(0.3));

    // an empty orientation class cannot be averaged
    const FilterArray sparse(1, 3, {0, 0, 1}, generate_orientations(3));
    CHECK_THROWS_AS(orientation_means(Image(1, 3, 1, 0.5), sparse), ValidationError);
}
