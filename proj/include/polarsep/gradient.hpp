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
#ifndef POLARSEP_GRADIENT_HPP
#define POLARSEP_GRADIENT_HPP

#include "polarsep/image.hpp"

#include <span>
#include <vector>

namespace polarsep {

/// Forward differences of an image, one (dx, dy) pair per pixel and channel,
/// laid out like Image::data(). The last column has dx = 0 and the last row
/// dy = 0 (Neumann boundary).
struct GradientField {
    std::size_t height = 0;
    std::size_t width = 0;
    std::size_t channels = 0;
    std::vector<double> dx;
    std::vector<double> dy;

    GradientField() = default;
    GradientField(std::size_t h, std::size_t w, std::size_t c)
        : height(h), width(w), channels(c), dx(h * w * c, 0.0), dy(h * w * c, 0.0) {}
};

GradientField grad(const Image& img);

/// Negative adjoint of grad: <grad u, g> = -<u, div g>.
Image div(const GradientField& g);

// Plane-level kernels used by the solvers. out must be pre-sized to h*w.
void grad_plane(std::span<const double> u, std::size_t h, std::size_t w, std::span<double> dx, std::span<double> dy);
void div_plane(std::span<const double> dx, std::span<const double> dy, std::size_t h, std::size_t w,
               std::span<double> out);
/// out += weight * (-div grad u), i.e. weight * D^T D u.
void add_gradient_gram(std::span<const double> u, std::size_t h, std::size_t w, double weight,
                       std::span<double> out);

} // namespace polarsep

#endif
