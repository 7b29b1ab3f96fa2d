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
#include "polarsep/stereo.hpp"

#include "polarsep/errors.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace polarsep {

NormalMap::NormalMap(std::size_t h, std::size_t w)
    : height(h), width(w), normals(h * w, Eigen::Vector3d::UnitZ()), albedo(h * w, 0.0), valid(h * w, 0) {}

std::size_t NormalMap::valid_count() const {
    return static_cast<std::size_t>(std::count(valid.begin(), valid.end(), 1));
}

NormalMap NormalMap::from_scene(const Scene& scene) {
    NormalMap map(scene.height, scene.width);
    map.normals = scene.normals;
    const Image luma = scene.albedo.luma();
    std::copy(luma.data().begin(), luma.data().end(), map.albedo.begin());
    std::fill(map.valid.begin(), map.valid.end(), 1);
    return map;
}

NormalMap photometric_stereo(std::span<const Image> images, std::span<const Eigen::Vector3d> lights,
                             double shadow_threshold) {
    if (images.size() != lights.size())
        throw ShapeError("photometric stereo: image and light counts differ");
    if (lights.size() < 3)
        throw ValidationError("photometric stereo needs at least 3 lights");
    Eigen::MatrixXd light_matrix(static_cast<Eigen::Index>(lights.size()), 3);
    for (std::size_t i = 0; i < lights.size(); ++i)
        light_matrix.row(static_cast<Eigen::Index>(i)) = lights[i].transpose();
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(light_matrix);
    qr.setThreshold(1e-9);
    if (qr.rank() < 3)
        throw ValidationError("photometric stereo: light directions are coplanar");

    std::vector<Image> luma;
    luma.reserve(images.size());
    for (const auto& img : images) {
        if (!img.same_extent(images.front()))
            throw ShapeError("photometric stereo: images differ in size");
        luma.push_back(img.luma());
    }

    const auto h = images.front().height(), w = images.front().width();
    NormalMap map(h, w);
    for (std::size_t p = 0; p < h * w; ++p) {
        Eigen::Matrix3d normal_matrix = Eigen::Matrix3d::Zero();
        Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
        std::size_t used = 0;
        for (std::size_t i = 0; i < lights.size(); ++i) {
            const double v = luma[i].data()[p];
            if (!(v > shadow_threshold))
                continue;
            normal_matrix += lights[i] * lights[i].transpose();
            rhs += v * lights[i];
            ++used;
        }
        if (used < 3)
            continue;
        const double scale = normal_matrix.trace() / 3.0;
        if (!(normal_matrix.determinant() > 1e-9 * scale * scale * scale))
            continue;
        const Eigen::Vector3d g = normal_matrix.ldlt().solve(rhs);
        const double albedo = g.norm();
        if (!(albedo > 1e-8))
            continue;
        map.normals[p] = g / albedo;
        map.albedo[p] = albedo;
        map.valid[p] = 1;
    }
    return map;
}

AngularErrorReport angular_error(const NormalMap& estimate, const NormalMap& truth) {
    if (estimate.height != truth.height || estimate.width != truth.width)
        throw ShapeError("angular error: normal maps differ in size");
    AngularErrorReport report;
    report.map = Image(estimate.height, estimate.width, 1);
    std::vector<double> errors;
    for (std::size_t p = 0; p < estimate.normals.size(); ++p) {
        if (!estimate.valid[p] || !truth.valid[p])
            continue;
        // Same angle as acos of the clamped dot product, without its loss of precision near 0.
        const auto& a = estimate.normals[p];
        const auto& b = truth.normals[p];
        const double deg = std::atan2(a.cross(b).norm(), a.dot(b)) * 180.0 / std::numbers::pi;
        report.map.data()[p] = deg;
        errors.push_back(deg);
    }
    if (errors.empty())
        throw NumericalError("angular error: no jointly valid pixels");
    report.pixel_count = errors.size();
    double sum = 0.0;
    for (double e : errors)
        sum += e;
    report.mean_deg = sum / static_cast<double>(errors.size());
    const auto mid = errors.size() / 2;
    std::nth_element(errors.begin(), errors.begin() + static_cast<std::ptrdiff_t>(mid), errors.end());
    report.median_deg = errors[mid];
    if (errors.size() % 2 == 0) {
        const double lower = *std::max_element(errors.begin(), errors.begin() + static_cast<std::ptrdiff_t>(mid));
        report.median_deg = 0.5 * (report.median_deg + lower);
    }
    return report;
}

Image normal_components(const NormalMap& map) {
    Image out(map.height, map.width, 3);
    for (std::size_t r = 0; r < map.height; ++r)
        for (std::size_t c = 0; c < map.width; ++c) {
            const auto& n = map.normals[r * map.width + c];
            for (int ch = 0; ch < 3; ++ch)
                out(r, c, static_cast<std::size_t>(ch)) = n[ch];
        }
    return out;
}

Image normal_visualization(const NormalMap& map) {
    Image out = normal_components(map);
    for (double& v : out.data())
        v = 0.5 * v + 0.5;
    return out;
}

} // namespace polarsep
