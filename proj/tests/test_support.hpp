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
#ifndef POLARSEP_TEST_SUPPORT_HPP
#define POLARSEP_TEST_SUPPORT_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/image.hpp"

#include <Eigen/Dense>

#include <filesystem>
#include <random>
#include <string>

namespace polarsep::testing {

inline Image random_image(std::size_t h, std::size_t w, std::size_t ch, std::mt19937_64& rng, double lo = 0.0,
                          double hi = 1.0) {
    std::uniform_real_distribution<double> uni(lo, hi);
    Image img(h, w, ch);
    for (double& v : img.data())
        v = uni(rng);
    return img;
}

/// Every orientation j pi / k, each pixel drawn independently (classes may be empty).
inline FilterArray random_array(std::size_t h, std::size_t w, std::size_t k, std::mt19937_64& rng) {
    std::vector<double> angles;
    for (std::size_t j = 0; j < k; ++j)
        angles.push_back(static_cast<double>(j) * 3.14159265358979323846 / static_cast<double>(k));
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    std::vector<std::uint16_t> idx(h * w);
    for (auto& i : idx)
        i = static_cast<std::uint16_t>(pick(rng));
    return FilterArray(h, w, std::move(idx), OrientationSet(angles));
}

/// Sampling matrix written out entry by entry.
inline Eigen::MatrixXd explicit_operator(const FilterArray& a, double phase) {
    const std::size_t n = a.pixel_count();
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(2 * n));
    for (std::size_t p = 0; p < n; ++p) {
        const double c = std::cos(phase - a.orientations()[a.index(p)]);
        s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p)) = 0.5;
        s(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(n + p)) = c * c;
    }
    return s;
}

/// Forward differences with a zero last difference (Neumann): rows [dx; dy].
inline Eigen::MatrixXd explicit_gradient(std::size_t h, std::size_t w) {
    const auto n = static_cast<Eigen::Index>(h * w);
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(2 * n, n);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const auto p = static_cast<Eigen::Index>(r * w + c);
            if (c + 1 < w) {
                d(p, p) = -1.0;
                d(p, p + 1) = 1.0;
            }
            if (r + 1 < h) {
                d(n + p, p) = -1.0;
                d(n + p, p + static_cast<Eigen::Index>(w)) = 1.0;
            }
        }
    return d;
}

inline Eigen::VectorXd to_vector(const Image& img) {
    return Eigen::Map<const Eigen::VectorXd>(img.data().data(), static_cast<Eigen::Index>(img.size()));
}

inline Eigen::VectorXd stack(const Image& a, const Image& b) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(a.size() + b.size()));
    v << to_vector(a), to_vector(b);
    return v;
}

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("polarsep_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

inline double max_abs_diff(const Image& a, const Image& b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        m = std::max(m, std::abs(a.data()[i] - b.data()[i]));
    return m;
}

} // namespace polarsep::testing

#endif
