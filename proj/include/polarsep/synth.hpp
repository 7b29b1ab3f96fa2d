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
#ifndef POLARSEP_SYNTH_HPP
#define POLARSEP_SYNTH_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/image.hpp"

#include <Eigen/Core>

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace polarsep {

enum class SceneKind { Sphere, HeightMap, FlatTextured };

std::string_view to_string(SceneKind kind);
std::optional<SceneKind> parse_scene_kind(std::string_view name);

/// Procedural ground truth: per-pixel unit normals, diffuse albedo and a
/// global Blinn-Phong specular lobe. Camera looks down -z (view v = (0,0,1)),
/// image rows run towards -y.
struct Scene {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Eigen::Vector3d> normals; ///< row-major, unit length
    Image albedo;                         ///< in [0, 1]
    double specular_coeff = 0.5;          ///< k_s >= 0
    double shininess = 50.0;              ///< Phong exponent >= 1

    const Eigen::Vector3d& normal(std::size_t row, std::size_t col) const { return normals[row * width + col]; }
    void validate() const;
};

struct SceneOptions {
    std::size_t channels = 1;
    double specular_coeff = 0.5;
    double shininess = 50.0;
};

/// Sphere: orthographic sphere (radius 0.4 size, centred on pixel (size/2, size/2))
/// over a flat background. HeightMap: smoothed random height field.
/// FlatTextured: n = (0,0,1) with a patchwork albedo. Deterministic per seed.
Scene make_scene(SceneKind kind, std::size_t size, std::uint64_t seed, const SceneOptions& options = {});

struct RenderedLayers {
    Image diffuse;
    Image specular;
};

/// Lambertian diffuse albedo max(0, n.l) and Blinn-Phong specular
/// k_s max(0, n.h)^alpha with h = normalize(l + v); both clipped to [0, 1].
RenderedLayers render_layers(const Scene& scene, const Eigen::Vector3d& light);

/// Directional lights on the upper hemisphere around a zenith camera.
struct LightDome {
    std::vector<Eigen::Vector3d> directions;

    void validate() const;

    static constexpr std::size_t kDefaultLightCount = 58;
    /// Golden-spiral placement: z_i = 1 - (i + 1/2) / count, azimuth i times the golden angle.
    static LightDome golden_spiral(std::size_t count = kDefaultLightCount);
};

struct DomeCapture {
    std::vector<Image> mosaics;  ///< one per light
    std::vector<Image> diffuse;  ///< ground truth diffuse layer per light
    std::vector<Image> specular; ///< ground truth specular layer per light
};

/// Renders every light and captures it through the shared filter array and
/// phase. Light i uses noise seed config.seed + i.
DomeCapture simulate_dome_captures(const Scene& scene, const LightDome& dome, const FilterArray& array,
                                   const CaptureConfig& config);

} // namespace polarsep

#endif
