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
#include "polarsep/gradient.hpp"

#include "polarsep/errors.hpp"

namespace polarsep {

void grad_plane(std::span<const double> u, std::size_t h, std::size_t w, std::span<double> dx, std::span<double> dy) {
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t row = r * w;
        for (std::size_t c = 0; c + 1 < w; ++c)
            dx[row + c] = u[row + c + 1] - u[row + c];
        dx[row + w - 1] = 0.0;
        if (r + 1 < h) {
            for (std::size_t c = 0; c < w; ++c)
                dy[row + c] = u[row + w + c] - u[row + c];
        } else {
            for (std::size_t c = 0; c < w; ++c)
                dy[row + c] = 0.0;
        }
    }
}

void div_plane(std::span<const double> dx, std::span<const double> dy, std::size_t h, std::size_t w,
               std::span<double> out) {
    // Entries of dx in the last column and dy in the last row never enter
    // grad, so they are ignored here as well.
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t row = r * w;
        for (std::size_t c = 0; c < w; ++c) {
            double v = 0.0;
            if (c + 1 < w)
                v += dx[row + c];
            if (c > 0)
                v -= dx[row + c - 1];
            if (r + 1 < h)
                v += dy[row + c];
            if (r > 0)
                v -= dy[row - w + c];
            out[row + c] = v;
        }
    }
}

void add_gradient_gram(std::span<const double> u, std::size_t h, std::size_t w, double weight,
                       std::span<double> out) {
    // 5-point Neumann Laplacian, negated.
    for (std::size_t r = 0; r < h; ++r) {
        const std::size_t row = r * w;
        for (std::size_t c = 0; c < w; ++c) {
            const double center = u[row + c];
            double v = 0.0;
            if (c + 1 < w)
                v += center - u[row + c + 1];
            if (c > 0)
                v += center - u[row + c - 1];
            if (r + 1 < h)
                v += center - u[row + w + c];
            if (r > 0)
                v += center - u[row - w + c];
            out[row + c] += weight * v;
        }
    }
}

GradientField grad(const Image& img) {
    GradientField g(img.height(), img.width(), img.channels());
    const auto n = img.pixel_count();
    for (std::size_t c = 0; c < img.channels(); ++c)
        grad_plane(img.plane(c), img.height(), img.width(), std::span<double>(g.dx).subspan(c * n, n),
                   std::span<double>(g.dy).subspan(c * n, n));
    return g;
}

Image div(const GradientField& g) {
    Image out(g.height, g.width, g.channels);
    const auto n = g.height * g.width;
    if (g.dx.size() != n * g.channels || g.dy.size() != n * g.channels)
        throw ShapeError("gradient field storage does not match its dimensions");
    for (std::size_t c = 0; c < g.channels; ++c)
        div_plane(std::span<const double>(g.dx).subspan(c * n, n), std::span<const double>(g.dy).subspan(c * n, n),
                  g.height, g.width, out.plane(c));
    return out;
}

} // namespace polarsep
