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
#include "polarsep/image.hpp"

#include "polarsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polarsep {

Image::Image(std::size_t height, std::size_t width, std::size_t channels, double fill)
    : height_(height), width_(width), channels_(channels), data_(height * width * channels, fill) {
    if (channels != 1 && channels != 3)
        throw ValidationError("image channels must be 1 or 3, got " + std::to_string(channels));
}

std::span<double> Image::plane(std::size_t ch) {
    return std::span<double>(data_).subspan(ch * pixel_count(), pixel_count());
}

std::span<const double> Image::plane(std::size_t ch) const {
    return std::span<const double>(data_).subspan(ch * pixel_count(), pixel_count());
}

bool Image::same_shape(const Image& other) const noexcept {
    return same_extent(other) && channels_ == other.channels_;
}

bool Image::same_extent(const Image& other) const noexcept {
    return height_ == other.height_ && width_ == other.width_;
}

bool Image::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

Image Image::channel(std::size_t ch) const {
    if (ch >= channels_)
        throw ValidationError("channel index out of range");
    Image out(height_, width_, 1);
    auto src = plane(ch);
    std::copy(src.begin(), src.end(), out.data_.begin());
    return out;
}

Image Image::luma() const {
    if (channels_ == 1)
        return *this;
    Image out(height_, width_, 1);
    const double inv = 1.0 / static_cast<double>(channels_);
    for (std::size_t c = 0; c < channels_; ++c) {
        auto src = plane(c);
        for (std::size_t p = 0; p < src.size(); ++p)
            out.data_[p] += src[p];
    }
    for (double& v : out.data_)
        v *= inv;
    return out;
}

Image& Image::operator+=(const Image& rhs) {
    if (!same_shape(rhs))
        throw ShapeError("image addition: shape mismatch");
    std::transform(data_.begin(), data_.end(), rhs.data_.begin(), data_.begin(), std::plus<>());
    return *this;
}

Image& Image::operator-=(const Image& rhs) {
    if (!same_shape(rhs))
        throw ShapeError("image subtraction: shape mismatch");
    std::transform(data_.begin(), data_.end(), rhs.data_.begin(), data_.begin(), std::minus<>());
    return *this;
}

Image& Image::operator*=(double s) {
    for (double& v : data_)
        v *= s;
    return *this;
}

Image merge_channels(std::span<const Image> planes) {
    if (planes.empty())
        throw ValidationError("merge_channels: no planes");
    const auto& first = planes.front();
    Image out(first.height(), first.width(), planes.size());
    for (std::size_t c = 0; c < planes.size(); ++c) {
        if (!planes[c].same_extent(first) || planes[c].channels() != 1)
            throw ShapeError("merge_channels: planes must be single-channel with equal extent");
        auto src = planes[c].plane(0);
        std::copy(src.begin(), src.end(), out.plane(c).begin());
    }
    return out;
}

Image clamped(Image img, double lo, double hi) {
    for (double& v : img.data())
        v = std::clamp(v, lo, hi);
    return img;
}

double dot(std::span<const double> a, std::span<const double> b) {
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

double norm2(std::span<const double> a) {
    return std::sqrt(dot(a, a));
}

} // namespace polarsep
