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
#ifndef POLARSEP_IMAGE_HPP
#define POLARSEP_IMAGE_HPP

#include <cstddef>
#include <span>
#include <vector>

namespace polarsep {

/// Planar floating point image: channel planes stored one after the other,
/// each plane row-major. Values are linear radiance, nominally in [0, 1].
class Image {
public:
    Image() = default;
    Image(std::size_t height, std::size_t width, std::size_t channels = 1, double fill = 0.0);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t channels() const noexcept { return channels_; }
    std::size_t pixel_count() const noexcept { return height_ * width_; }
    std::size_t size() const noexcept { return data_.size(); }
    bool empty() const noexcept { return data_.empty(); }

    double& operator()(std::size_t row, std::size_t col, std::size_t ch = 0) {
        return data_[(ch * height_ + row) * width_ + col];
    }
    double operator()(std::size_t row, std::size_t col, std::size_t ch = 0) const {
        return data_[(ch * height_ + row) * width_ + col];
    }

    std::span<double> data() noexcept { return data_; }
    std::span<const double> data() const noexcept { return data_; }

    std::span<double> plane(std::size_t ch);
    std::span<const double> plane(std::size_t ch) const;

    /// Same height, width and channel count.
    bool same_shape(const Image& other) const noexcept;
    /// Same height and width; channel count may differ.
    bool same_extent(const Image& other) const noexcept;

    bool all_finite() const noexcept;

    /// Single-channel image holding a copy of one channel plane.
    Image channel(std::size_t ch) const;
    /// Mean over channels, single-channel result.
    Image luma() const;

    Image& operator+=(const Image& rhs);
    Image& operator-=(const Image& rhs);
    Image& operator*=(double s);

    friend Image operator+(Image lhs, const Image& rhs) { return lhs += rhs; }
    friend Image operator-(Image lhs, const Image& rhs) { return lhs -= rhs; }
    friend Image operator*(Image lhs, double s) { return lhs *= s; }
    friend Image operator*(double s, Image rhs) { return rhs *= s; }

    bool operator==(const Image&) const = default;

private:
    std::size_t height_ = 0;
    std::size_t width_ = 0;
    std::size_t channels_ = 0;
    std::vector<double> data_;
};

/// Stack single-channel images (all the same extent) into one multi-channel image.
Image merge_channels(std::span<const Image> planes);

/// Clamp every value into [lo, hi].
Image clamped(Image img, double lo = 0.0, double hi = 1.0);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> a);

} // namespace polarsep

#endif
