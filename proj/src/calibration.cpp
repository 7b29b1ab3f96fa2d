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
#include "polarsep/calibration.hpp"

#include "polarsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace polarsep {

std::vector<double> orientation_means(const Image& y, const FilterArray& array) {
    if (!array.matches(y))
        throw ShapeError("measurement and filter array dimensions differ");
    const auto k = array.orientation_count();
    std::vector<double> sums(k, 0.0);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t c = 0; c < y.channels(); ++c) {
        auto plane = y.plane(c);
        for (std::size_t p = 0; p < plane.size(); ++p) {
            sums[array.index(p)] += plane[p];
            ++counts[array.index(p)];
        }
    }
    for (std::size_t j = 0; j < k; ++j) {
        if (counts[j] == 0)
            throw ValidationError("orientation " + std::to_string(j) + " has no pixel in the array");
        sums[j] /= static_cast<double>(counts[j]);
    }
    return sums;
}

namespace {

struct Fit {
    double mu_d = 0.0;
    double mu_s = 0.0;
    double sse = 0.0;
};

double sse_at(std::span<const double> means, const OrientationSet& orientations, double phase, double mu_d,
              double mu_s) {
    double sse = 0.0;
    for (std::size_t j = 0; j < means.size(); ++j) {
        const double r = means[j] - mu_d - mu_s * malus_attenuation(phase, orientations[j]);
        sse += r * r;
    }
    return sse;
}

// Linear least squares for (mu_d, mu_s) at a fixed phase, with mu_s >= 0.
Fit linear_fit(std::span<const double> means, const OrientationSet& orientations, double phase) {
    const auto k = static_cast<double>(means.size());
    double s_c = 0.0, s_cc = 0.0, s_m = 0.0, s_cm = 0.0;
    for (std::size_t j = 0; j < means.size(); ++j) {
        const double c = malus_attenuation(phase, orientations[j]);
        s_c += c;
        s_cc += c * c;
        s_m += means[j];
        s_cm += c * means[j];
    }
    Fit fit;
    const double det = k * s_cc - s_c * s_c;
    if (det > 1e-14 * std::max(1.0, k * s_cc)) {
        fit.mu_s = (k * s_cm - s_c * s_m) / det;
        fit.mu_d = (s_m - fit.mu_s * s_c) / k;
    }
    if (fit.mu_s <= 0.0) {
        fit.mu_s = 0.0;
        fit.mu_d = s_m / k;
    }
    fit.sse = sse_at(means, orientations, phase, fit.mu_d, fit.mu_s);
    return fit;
}

} // namespace

PhaseEstimate estimate_phase(std::span<const double> means, const OrientationSet& orientations) {
    const auto k = orientations.size();
    if (means.size() != k)
        throw ShapeError("phase estimation: mean count differs from orientation count");
    if (k < 3)
        throw ValidationError("phase estimation needs at least 3 orientations");
    for (double m : means)
        if (!std::isfinite(m))
            throw ValidationError("phase estimation: non-finite mean");

    double phase = 0.0;
    Fit best{0.0, 0.0, std::numeric_limits<double>::infinity()};
    for (int g = 0; g < 180; ++g) {
        const double candidate = g * std::numbers::pi / 180.0;
        const Fit fit = linear_fit(means, orientations, candidate);
        if (fit.sse < best.sse) {
            best = fit;
            phase = candidate;
        }
    }

    // Gauss-Newton on (phase, mu_d, mu_s); residual r_k = mu_k - mu_d - mu_s c_k(phase).
    double mu_d = best.mu_d, mu_s = best.mu_s, sse = best.sse;
    if (mu_s > 0.0) {
        for (int it = 0; it < 100; ++it) {
            double jtj[3][3] = {}, jtr[3] = {};
            for (std::size_t j = 0; j < k; ++j) {
                const double delta = phase - orientations[j];
                const double c = std::cos(delta);
                const double r = means[j] - mu_d - mu_s * c * c;
                const double jac[3] = {mu_s * std::sin(2.0 * delta), -1.0, -c * c};
                for (int a = 0; a < 3; ++a) {
                    jtr[a] += jac[a] * r;
                    for (int b = 0; b < 3; ++b)
                        jtj[a][b] += jac[a] * jac[b];
                }
            }
            // Solve (J^T J) step = -J^T r by Cramer's rule.
            auto det3 = [](const double m[3][3]) {
                return m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) -
                       m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0]) +
                       m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
            };
            const double det = det3(jtj);
            if (!(std::abs(det) > 1e-300))
                break;
            double step[3];
            for (int col = 0; col < 3; ++col) {
                double m[3][3];
                for (int a = 0; a < 3; ++a)
                    for (int b = 0; b < 3; ++b)
                        m[a][b] = b == col ? -jtr[a] : jtj[a][b];
                step[col] = det3(m) / det;
            }
            double t = 1.0;
            bool improved = false;
            for (int halving = 0; halving < 40; ++halving, t *= 0.5) {
                const double p = phase + t * step[0], d = mu_d + t * step[1], s = std::max(0.0, mu_s + t * step[2]);
                const double trial = sse_at(means, orientations, p, d, s);
                if (trial < sse) {
                    phase = p;
                    mu_d = d;
                    mu_s = s;
                    sse = trial;
                    improved = true;
                    break;
                }
            }
            if (!improved || std::abs(t * step[0]) < 1e-15)
                break;
        }
    }

    PhaseEstimate est;
    est.phase = wrap_angle(phase);
    est.mu_d = mu_d;
    est.mu_s = mu_s;
    est.residual = std::sqrt(sse / static_cast<double>(k));
    est.exactly_determined = k == 3;
    double scale = 0.0;
    for (double m : means)
        scale = std::max(scale, std::abs(m));
    est.identifiable = mu_s >= 1e-6 * scale && mu_s > 0.0;
    if (k > 3) {
        // The cosine amplitude mu_s / 2 must stand out of the fit noise: under pure
        // noise of deviation sigma its estimate is of order sigma sqrt(2 / K).
        const double sigma = std::sqrt(sse / static_cast<double>(k - 3));
        est.identifiable = est.identifiable && 0.5 * mu_s > 4.0 * sigma * std::sqrt(2.0 / static_cast<double>(k));
    }
    return est;
}

PhaseEstimate estimate_phase(const Image& y, const FilterArray& array) {
    return estimate_phase(orientation_means(y, array), array.orientations());
}

} // namespace polarsep
