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
#include "polarsep/metrics.hpp"

#include "polarsep/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

namespace polarsep {

Psnr psnr(const Image& a, const Image& b, double peak) {
    if (!a.same_shape(b))
        throw ShapeError("psnr: image shapes differ");
    if (a.empty())
        throw ValidationError("psnr: empty images");
    double sse = 0.0;
    auto da = a.data();
    auto db = b.data();
    for (std::size_t i = 0; i < da.size(); ++i) {
        const double d = da[i] - db[i];
        sse += d * d;
    }
    const double mse = sse / static_cast<double>(da.size());
    if (mse == 0.0)
        return {std::numeric_limits<double>::infinity(), true};
    return {10.0 * std::log10(peak * peak / mse), false};
}

double linear_to_srgb(double linear) {
    const double v = std::clamp(linear, 0.0, 1.0);
    return v <= 0.0031308 ? 12.92 * v : 1.055 * std::pow(v, 1.0 / 2.4) - 0.055;
}

double srgb_to_linear(double encoded) {
    const double v = std::clamp(encoded, 0.0, 1.0);
    return v <= 0.04045 ? v / 12.92 : std::pow((v + 0.055) / 1.055, 2.4);
}

Image linear_to_srgb(Image img) {
    for (double& v : img.data())
        v = linear_to_srgb(v);
    return img;
}

Image srgb_to_linear(Image img) {
    for (double& v : img.data())
        v = srgb_to_linear(v);
    return img;
}

MetricReport evaluate_separation(const Image& est_diffuse, const Image& est_specular, const Image& true_diffuse,
                                 const Image& true_specular) {
    MetricReport report;
    report.psnr_diffuse = psnr(est_diffuse, true_diffuse);
    report.psnr_specular = psnr(est_specular, true_specular);
    report.psnr_sum = psnr(est_diffuse + est_specular, true_diffuse + true_specular);
    return report;
}

std::string csv_header() {
    return "scene,pattern,k,solver,gamma_d,gamma_s,psnr_diffuse,psnr_specular,psnr_sum";
}

std::string format_psnr(const Psnr& value) {
    if (value.identical)
        return "inf";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6f", value.db);
    return buf;
}

std::string csv_row(const MetricReport& r) {
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu,%s,%.6g,%.6g,", r.k, r.solver.c_str(), r.gamma_d, r.gamma_s);
    return r.scene + "," + r.pattern + "," + buf + format_psnr(r.psnr_diffuse) + "," +
           format_psnr(r.psnr_specular) + "," + format_psnr(r.psnr_sum);
}

} // namespace polarsep
