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
#ifndef POLARSEP_FORWARD_MODEL_HPP
#define POLARSEP_FORWARD_MODEL_HPP

#include "polarsep/image.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <numbers>
#include <utility>
#include <vector>

namespace polarsep {

/// Reduce an angle into [0, pi). Polarizer orientations are pi-periodic.
double wrap_angle(double radians);

/// The K polarizer orientations of a filter array, in radians.
/// Angles are reduced into [0, pi) and must be strictly increasing, K >= 2.
class OrientationSet {
public:
    OrientationSet() = default;
    explicit OrientationSet(std::vector<double> radians);

    std::size_t size() const noexcept { return angles_.size(); }
    double operator[](std::size_t k) const { return angles_[k]; }
    const std::vector<double>& angles() const noexcept { return angles_; }

    bool operator==(const OrientationSet&) const = default;

private:
    std::vector<double> angles_;
};

/// Per-pixel micro-polarizer layout. Every pixel carries exactly one
/// orientation index, so the implied selection masks partition the sensor.
class FilterArray {
public:
    FilterArray() = default;
    FilterArray(std::size_t height, std::size_t width, std::vector<std::uint16_t> orientation_index,
                OrientationSet orientations);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t pixel_count() const noexcept { return height_ * width_; }
    std::size_t orientation_count() const noexcept { return orientations_.size(); }

    std::uint16_t index(std::size_t pixel) const { return index_[pixel]; }
    std::uint16_t index(std::size_t row, std::size_t col) const { return index_[row * width_ + col]; }
    const std::vector<std::uint16_t>& indices() const noexcept { return index_; }
    const OrientationSet& orientations() const noexcept { return orientations_; }

    /// Number of pixels carrying each orientation index.
    std::vector<std::size_t> class_counts() const;

    /// Per-pixel Malus attenuation cos^2(phase - theta_k(p)) for the given light phase.
    std::vector<double> attenuation_map(double phase) const;

    bool matches(const Image& img) const noexcept {
        return img.height() == height_ && img.width() == width_;
    }

    bool operator==(const FilterArray&) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::vector<std::uint16_t> index_;
    OrientationSet orientations_;
};

/// Light polarization phase and sensor noise for a simulated capture.
struct CaptureConfig {
    double phase = 0.0;       ///< radians, [0, pi)
    double noise_sigma = 0.0; ///< additive Gaussian, linear units
    std::uint64_t seed = 0;

    void validate() const;
};

/// Malus' law: fraction of linearly polarized light passing a polarizer.
double malus_attenuation(double phase, double theta);

/// Simulated capture: y = z_d / 2 + z_s cos^2(phase - theta_k(p)) + noise.
/// The same mask and phase apply to every color channel. No clipping.
Image mosaic_capture(const Image& diffuse, const Image& specular, const FilterArray& array,
                     const CaptureConfig& config);

/// Matrix-free sampling operator S applied to the pair (z_d, z_s).
Image apply_operator(const Image& diffuse, const Image& specular, const FilterArray& array, double phase);

/// Adjoint S^T: returns the (diffuse, specular) pair.
std::pair<Image, Image> apply_adjoint(const Image& measurement, const FilterArray& array, double phase);

/// Largest image (in pixels) accepted by build_dense_operator.
inline constexpr std::size_t kDenseOperatorMaxPixels = 4096;

/// Explicit S = A C as a dense (HW) x (2HW) matrix. Test oracle only;
/// throws ValidationError above kDenseOperatorMaxPixels pixels.
Eigen::MatrixXd build_dense_operator(const FilterArray& array, double phase);

} // namespace polarsep

#endif
