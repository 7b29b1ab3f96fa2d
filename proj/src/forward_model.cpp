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
#include "polarsep/forward_model.hpp"

#include "polarsep/errors.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace polarsep {

double wrap_angle(double radians) {
    double r = std::fmod(radians, std::numbers::pi);
    if (r < 0.0)
        r += std::numbers::pi;
    // fmod of a value just below a multiple of pi can round up to pi itself
    if (r >= std::numbers::pi)
        r = 0.0;
    return r;
}

OrientationSet::OrientationSet(std::vector<double> radians) : angles_(std::move(radians)) {
    if (angles_.size() < 2)
        throw ValidationError("orientation set needs at least 2 angles");
    for (double& a : angles_) {
        if (!std::isfinite(a))
            throw ValidationError("orientation angle is not finite");
        a = wrap_angle(a);
    }
    // Angles closer than this modulo pi are treated as the same orientation.
    constexpr double kMinSeparation = 1e-9;
    for (std::size_t k = 1; k < angles_.size(); ++k)
        if (!(angles_[k] > angles_[k - 1] + kMinSeparation))
            throw ValidationError("orientation angles must be strictly increasing in [0, pi)");
    if (!(angles_.back() - angles_.front() < std::numbers::pi - kMinSeparation))
        throw ValidationError("orientation angles must be distinct modulo pi");
}

FilterArray::FilterArray(std::size_t height, std::size_t width, std::vector<std::uint16_t> orientation_index,
                         OrientationSet orientations)
    : height_(height), width_(width), index_(std::move(orientation_index)), orientations_(std::move(orientations)) {
    if (height == 0 || width == 0)
        throw ValidationError("filter array must be non-empty");
    if (index_.size() != height * width)
        throw ShapeError("filter array: index count " + std::to_string(index_.size()) + " != " +
                         std::to_string(height) + "x" + std::to_string(width));
    if (orientations_.size() < 2)
        throw ValidationError("filter array needs an orientation set with K >= 2");
    const auto k = orientations_.size();
    if (std::any_of(index_.begin(), index_.end(), [k](std::uint16_t i) { return i >= k; }))
        throw ValidationError("filter array: orientation index out of range");
}

std::vector<std::size_t> FilterArray::class_counts() const {
    std::vector<std::size_t> counts(orientation_count(), 0);
    for (auto i : index_)
        ++counts[i];
    return counts;
}

std::vector<double> FilterArray::attenuation_map(double phase) const {
    std::vector<double> per_class(orientation_count());
    for (std::size_t k = 0; k < per_class.size(); ++k)
        per_class[k] = malus_attenuation(phase, orientations_[k]);
    std::vector<double> out(index_.size());
    std::transform(index_.begin(), index_.end(), out.begin(), [&](std::uint16_t i) { return per_class[i]; });
    return out;
}

void CaptureConfig::validate() const {
    if (!(phase >= 0.0 && phase < std::numbers::pi))
        throw ValidationError("capture phase must lie in [0, pi)");
    if (!(noise_sigma >= 0.0))
        throw ValidationError("noise sigma must be >= 0");
}

double malus_attenuation(double phase, double theta) {
    const double c = std::cos(wrap_angle(phase - theta));
    return c * c;
}

namespace {

void check_pair(const Image& diffuse, const Image& specular, const FilterArray& array) {
    if (!diffuse.same_shape(specular))
        throw ShapeError("diffuse and specular images differ in shape");
    if (!array.matches(diffuse))
        throw ShapeError("image and filter array dimensions differ");
}

} // namespace

Image apply_operator(const Image& diffuse, const Image& specular, const FilterArray& array, double phase) {
    check_pair(diffuse, specular, array);
    const auto atten = array.attenuation_map(phase);
    Image y(diffuse.height(), diffuse.width(), diffuse.channels());
    for (std::size_t c = 0; c < y.channels(); ++c) {
        auto zd = diffuse.plane(c);
        auto zs = specular.plane(c);
        auto out = y.plane(c);
        for (std::size_t p = 0; p < out.size(); ++p)
            out[p] = 0.5 * zd[p] + atten[p] * zs[p];
    }
    return y;
}

std::pair<Image, Image> apply_adjoint(const Image& measurement, const FilterArray& array, double phase) {
    if (!array.matches(measurement))
        throw ShapeError("measurement and filter array dimensions differ");
    const auto atten = array.attenuation_map(phase);
    Image zd(measurement.height(), measurement.width(), measurement.channels());
    Image zs(measurement.height(), measurement.width(), measurement.channels());
    for (std::size_t c = 0; c < measurement.channels(); ++c) {
        auto y = measurement.plane(c);
        auto d = zd.plane(c);
        auto s = zs.plane(c);
        for (std::size_t p = 0; p < y.size(); ++p) {
            d[p] = 0.5 * y[p];
            s[p] = atten[p] * y[p];
        }
    }
    return {std::move(zd), std::move(zs)};
}

Image mosaic_capture(const Image& diffuse, const Image& specular, const FilterArray& array,
                     const CaptureConfig& config) {
    config.validate();
    Image y = apply_operator(diffuse, specular, array, config.phase);
    if (config.noise_sigma > 0.0) {
        std::mt19937_64 rng(config.seed);
        std::normal_distribution<double> noise(0.0, config.noise_sigma);
        for (double& v : y.data())
            v += noise(rng);
    }
    return y;
}

Eigen::MatrixXd build_dense_operator(const FilterArray& array, double phase) {
    const auto n = array.pixel_count();
    if (n > kDenseOperatorMaxPixels)
        throw ValidationError("dense operator limited to " + std::to_string(kDenseOperatorMaxPixels) + " pixels");
    // S = A C with C_k = [I/2, cos^2(phase - theta_k) I] stacked, A = [A_1 .. A_K].
    // A and C are assembled sparse; only the product is densified.
    using Triplet = Eigen::Triplet<double>;
    const auto k = array.orientation_count();
    const auto ni = static_cast<Eigen::Index>(n);
    const auto ki = static_cast<Eigen::Index>(k);

    std::vector<Triplet> c_entries;
    c_entries.reserve(2 * k * n);
    for (Eigen::Index j = 0; j < ki; ++j) {
        const double att = malus_attenuation(phase, array.orientations()[static_cast<std::size_t>(j)]);
        for (Eigen::Index p = 0; p < ni; ++p) {
            c_entries.emplace_back(j * ni + p, p, 0.5);
            c_entries.emplace_back(j * ni + p, ni + p, att);
        }
    }
    Eigen::SparseMatrix<double> c(ki * ni, 2 * ni);
    c.setFromTriplets(c_entries.begin(), c_entries.end());

    std::vector<Triplet> a_entries;
    a_entries.reserve(n);
    for (Eigen::Index p = 0; p < ni; ++p)
        a_entries.emplace_back(p, static_cast<Eigen::Index>(array.index(static_cast<std::size_t>(p))) * ni + p, 1.0);
    Eigen::SparseMatrix<double> a(ni, ki * ni);
    a.setFromTriplets(a_entries.begin(), a_entries.end());

    Eigen::SparseMatrix<double> s = a * c;
    return Eigen::MatrixXd(s);
}

} // namespace polarsep
