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
#include "polarsep/synth.hpp"

#include "polarsep/errors.hpp"
#include "polarsep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace polarsep {

std::string_view to_string(SceneKind kind) {
    switch (kind) {
    case SceneKind::Sphere: return "sphere";
    case SceneKind::HeightMap: return "heightmap";
    case SceneKind::FlatTextured: return "flat";
    }
    return "sphere";
}

std::optional<SceneKind> parse_scene_kind(std::string_view name) {
    if (name == "sphere")
        return SceneKind::Sphere;
    if (name == "heightmap")
        return SceneKind::HeightMap;
    if (name == "flat")
        return SceneKind::FlatTextured;
    return std::nullopt;
}

void Scene::validate() const {
    if (normals.size() != height * width)
        throw ShapeError("scene normal map size mismatch");
    if (albedo.height() != height || albedo.width() != width)
        throw ShapeError("scene albedo size mismatch");
    for (const auto& n : normals)
        if (std::abs(n.norm() - 1.0) > 1e-6)
            throw ValidationError("scene normals must be unit length");
    for (double a : albedo.data())
        if (!(a >= 0.0 && a <= 1.0))
            throw ValidationError("scene albedo must lie in [0, 1]");
    if (!(specular_coeff >= 0.0))
        throw ValidationError("specular coefficient must be >= 0");
    if (!(shininess >= 1.0))
        throw ValidationError("shininess must be >= 1");
}

namespace {

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Value noise in [0, 1]: random lattice with cells x cells cells, smoothly interpolated.
std::vector<double> value_noise(std::size_t h, std::size_t w, std::size_t cells, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uni(0.0, 1.0);
    const std::size_t lattice = cells + 1;
    std::vector<double> grid(lattice * lattice);
    for (double& g : grid)
        g = uni(rng);
    std::vector<double> out(h * w);
    for (std::size_t r = 0; r < h; ++r) {
        const double fy = static_cast<double>(r) / static_cast<double>(h) * static_cast<double>(cells);
        const auto y0 = static_cast<std::size_t>(fy);
        const double ty = smoothstep(fy - static_cast<double>(y0));
        for (std::size_t c = 0; c < w; ++c) {
            const double fx = static_cast<double>(c) / static_cast<double>(w) * static_cast<double>(cells);
            const auto x0 = static_cast<std::size_t>(fx);
            const double tx = smoothstep(fx - static_cast<double>(x0));
            const double g00 = grid[y0 * lattice + x0], g01 = grid[y0 * lattice + x0 + 1];
            const double g10 = grid[(y0 + 1) * lattice + x0], g11 = grid[(y0 + 1) * lattice + x0 + 1];
            out[r * w + c] = (1 - ty) * ((1 - tx) * g00 + tx * g01) + ty * ((1 - tx) * g10 + tx * g11);
        }
    }
    return out;
}

// Multi-octave value noise: octave o has 2^o times the base cell count and
// half the amplitude of the previous one. Normalized to [0, 1].
std::vector<double> fractal_noise(std::size_t h, std::size_t w, std::size_t base_cells, std::size_t octaves,
                                  std::mt19937_64& rng) {
    std::vector<double> out(h * w, 0.0);
    double amplitude = 1.0, total = 0.0;
    std::size_t cells = base_cells;
    for (std::size_t o = 0; o < octaves; ++o) {
        const auto layer = value_noise(h, w, cells, rng);
        for (std::size_t p = 0; p < out.size(); ++p)
            out[p] += amplitude * layer[p];
        total += amplitude;
        amplitude *= 0.5;
        cells *= 2;
    }
    for (double& v : out)
        v /= total;
    return out;
}

Image textured_albedo(std::size_t size, std::size_t channels, double base, double amplitude, std::size_t cells,
                      std::mt19937_64& rng) {
    Image albedo(size, size, channels);
    for (std::size_t c = 0; c < channels; ++c) {
        const auto noise = fractal_noise(size, size, cells, 4, rng);
        auto plane = albedo.plane(c);
        for (std::size_t p = 0; p < plane.size(); ++p)
            plane[p] = std::clamp(base + 2.0 * amplitude * (noise[p] - 0.5), 0.0, 1.0);
    }
    return albedo;
}

} // namespace

Scene make_scene(SceneKind kind, std::size_t size, std::uint64_t seed, const SceneOptions& options) {
    if (size < 16)
        throw ValidationError("scene size must be >= 16");
    if (options.channels != 1 && options.channels != 3)
        throw ValidationError("scene channels must be 1 or 3");
    std::mt19937_64 rng(seed);
    Scene scene;
    scene.height = size;
    scene.width = size;
    scene.specular_coeff = options.specular_coeff;
    scene.shininess = options.shininess;
    scene.normals.assign(size * size, Eigen::Vector3d::UnitZ());

    switch (kind) {
    case SceneKind::Sphere: {
        const double radius = 0.4 * static_cast<double>(size);
        const double centre = static_cast<double>(size / 2);
        Image sphere_albedo = textured_albedo(size, options.channels, 0.6, 0.4, 6, rng);
        Image background = textured_albedo(size, options.channels, 0.35, 0.2, 3, rng);
        scene.albedo = background;
        for (std::size_t r = 0; r < size; ++r)
            for (std::size_t c = 0; c < size; ++c) {
                const double x = (static_cast<double>(c) - centre) / radius;
                const double y = -(static_cast<double>(r) - centre) / radius;
                const double rho2 = x * x + y * y;
                if (rho2 >= 1.0)
                    continue;
                scene.normals[r * size + c] = Eigen::Vector3d(x, y, std::sqrt(1.0 - rho2)).normalized();
                for (std::size_t ch = 0; ch < options.channels; ++ch)
                    scene.albedo(r, c, ch) = sphere_albedo(r, c, ch);
            }
        break;
    }
    case SceneKind::HeightMap: {
        // Height in pixel units; slopes stay below roughly 45 degrees.
        const double amplitude = 0.12 * static_cast<double>(size);
        const auto coarse = value_noise(size, size, 4, rng);
        const auto fine = value_noise(size, size, 9, rng);
        std::vector<double> height(size * size);
        for (std::size_t p = 0; p < height.size(); ++p)
            height[p] = amplitude * (0.8 * coarse[p] + 0.2 * fine[p]);
        auto at = [&](std::ptrdiff_t r, std::ptrdiff_t c) {
            const auto n = static_cast<std::ptrdiff_t>(size);
            r = std::clamp<std::ptrdiff_t>(r, 0, n - 1);
            c = std::clamp<std::ptrdiff_t>(c, 0, n - 1);
            return height[static_cast<std::size_t>(r) * size + static_cast<std::size_t>(c)];
        };
        for (std::size_t r = 0; r < size; ++r)
            for (std::size_t c = 0; c < size; ++c) {
                const auto ri = static_cast<std::ptrdiff_t>(r), ci = static_cast<std::ptrdiff_t>(c);
                const double h_col = 0.5 * (at(ri, ci + 1) - at(ri, ci - 1));
                const double h_row = 0.5 * (at(ri + 1, ci) - at(ri - 1, ci));
                // surface z = h(x, y) with y pointing up: n ~ (-dh/dx, -dh/dy, 1), dh/dy = -dh/drow
                scene.normals[r * size + c] = Eigen::Vector3d(-h_col, h_row, 1.0).normalized();
            }
        scene.albedo = textured_albedo(size, options.channels, 0.55, 0.5, 5, rng);
        break;
    }
    case SceneKind::FlatTextured: {
        scene.albedo = textured_albedo(size, options.channels, 0.5, 0.3, 4, rng);
        // Overlay a few flat rectangular patches with their own albedo.
        std::uniform_int_distribution<std::size_t> pos(0, size - 1);
        std::uniform_real_distribution<double> val(0.15, 0.9);
        for (int patch = 0; patch < 6; ++patch) {
            auto r0 = pos(rng), r1 = pos(rng), c0 = pos(rng), c1 = pos(rng);
            if (r0 > r1)
                std::swap(r0, r1);
            if (c0 > c1)
                std::swap(c0, c1);
            std::vector<double> colour(options.channels);
            for (double& v : colour)
                v = val(rng);
            for (std::size_t r = r0; r <= r1; ++r)
                for (std::size_t c = c0; c <= c1; ++c)
                    for (std::size_t ch = 0; ch < options.channels; ++ch)
                        scene.albedo(r, c, ch) = colour[ch];
        }
        break;
    }
    }
    return scene;
}

RenderedLayers render_layers(const Scene& scene, const Eigen::Vector3d& light) {
    if (std::abs(light.norm() - 1.0) > 1e-6)
        throw ValidationError("light direction must be unit length");
    const Eigen::Vector3d view = Eigen::Vector3d::UnitZ();
    const Eigen::Vector3d half = (light + view).normalized();
    const auto channels = scene.albedo.channels();
    RenderedLayers out{Image(scene.height, scene.width, channels), Image(scene.height, scene.width, channels)};
    for (std::size_t r = 0; r < scene.height; ++r)
        for (std::size_t c = 0; c < scene.width; ++c) {
            const auto& n = scene.normal(r, c);
            const double shade = std::max(0.0, n.dot(light));
            const double spec = std::clamp(
                scene.specular_coeff * std::pow(std::max(0.0, n.dot(half)), scene.shininess), 0.0, 1.0);
            for (std::size_t ch = 0; ch < channels; ++ch) {
                out.diffuse(r, c, ch) = std::clamp(scene.albedo(r, c, ch) * shade, 0.0, 1.0);
                out.specular(r, c, ch) = spec;
            }
        }
    return out;
}

void LightDome::validate() const {
    if (directions.size() < 3)
        throw ValidationError("light dome needs at least 3 lights");
    for (const auto& d : directions) {
        if (std::abs(d.norm() - 1.0) > 1e-9)
            throw ValidationError("light directions must be unit length");
        if (!(d.z() > 0.0))
            throw ValidationError("light directions must lie on the upper hemisphere");
    }
}

LightDome LightDome::golden_spiral(std::size_t count) {
    const double golden_angle = std::numbers::pi * (3.0 - std::sqrt(5.0));
    LightDome dome;
    dome.directions.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double z = 1.0 - (static_cast<double>(i) + 0.5) / static_cast<double>(count);
        const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double azimuth = golden_angle * static_cast<double>(i);
        dome.directions.emplace_back(rho * std::cos(azimuth), rho * std::sin(azimuth), z);
    }
    dome.validate();
    return dome;
}

DomeCapture simulate_dome_captures(const Scene& scene, const LightDome& dome, const FilterArray& array,
                                   const CaptureConfig& config) {
    dome.validate();
    config.validate();
    if (array.height() != scene.height || array.width() != scene.width)
        throw ShapeError("filter array and scene dimensions differ");
    const auto count = dome.directions.size();
    DomeCapture capture;
    capture.mosaics.resize(count);
    capture.diffuse.resize(count);
    capture.specular.resize(count);
    parallel_for(count, [&](std::size_t i) {
        auto layers = render_layers(scene, dome.directions[i]);
        CaptureConfig per_light = config;
        per_light.seed = config.seed + i;
        capture.mosaics[i] = mosaic_capture(layers.diffuse, layers.specular, array, per_light);
        capture.diffuse[i] = std::move(layers.diffuse);
        capture.specular[i] = std::move(layers.specular);
    });
    return capture;
}

} // namespace polarsep
