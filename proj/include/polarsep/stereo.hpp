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
#ifndef POLARSEP_STEREO_HPP
#define POLARSEP_STEREO_HPP

#include "polarsep/image.hpp"
#include "polarsep/synth.hpp"

#include <Eigen/Core>

#include <span>
#include <vector>

namespace polarsep {

/// Per-pixel surface orientation. Invalid pixels hold (0, 0, 1) and albedo 0.
struct NormalMap {
    std::size_t height = 0;
    std::size_t width = 0;
    std::vector<Eigen::Vector3d> normals;
    std::vector<double> albedo;
    std::vector<char> valid;

    NormalMap() = default;
    NormalMap(std::size_t h, std::size_t w);

    std::size_t valid_count() const;

    /// Analytic scene normals, valid everywhere.
    static NormalMap from_scene(const Scene& scene);
};

/// Shadow threshold in linear units: observations at or below it are dropped.
inline constexpr double kShadowThreshold = 0.01;

/// Lambertian photometric stereo. Per pixel, lights whose observation exceeds
/// shadow_threshold are kept; with at least three well-conditioned ones the
/// least-squares g = albedo * n is solved. Colour inputs are reduced to their
/// channel mean. Throws ValidationError for fewer than 3 lights or a
/// rank-deficient light matrix.
NormalMap photometric_stereo(std::span<const Image> images, std::span<const Eigen::Vector3d> lights,
                             double shadow_threshold = kShadowThreshold);

struct AngularErrorReport {
    double mean_deg = 0.0;
    double median_deg = 0.0;
    std::size_t pixel_count = 0; ///< jointly valid pixels
    Image map;                   ///< degrees; 0 outside the jointly valid set
};

/// Angle between estimated and reference normals over jointly valid pixels.
AngularErrorReport angular_error(const NormalMap& estimate, const NormalMap& truth);

/// 3-channel image of the normal components, values in [-1, 1].
Image normal_components(const NormalMap& map);
/// 3-channel visualization n / 2 + 1/2.
Image normal_visualization(const NormalMap& map);

} // namespace polarsep

#endif
