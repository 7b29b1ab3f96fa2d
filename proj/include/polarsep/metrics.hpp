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
#ifndef POLARSEP_METRICS_HPP
#define POLARSEP_METRICS_HPP

#include "polarsep/image.hpp"

#include <string>

namespace polarsep {

/// Peak signal-to-noise ratio. identical is set (and db is +inf) when MSE = 0.
struct Psnr {
    double db = 0.0;
    bool identical = false;
};

/// 10 log10(peak^2 / MSE), MSE over all pixels and channels.
Psnr psnr(const Image& a, const Image& b, double peak = 1.0);

/// Standard sRGB transfer curve; inputs are clamped to [0, 1].
double linear_to_srgb(double linear);
double srgb_to_linear(double encoded);
Image linear_to_srgb(Image img);
Image srgb_to_linear(Image img);

/// One evaluation row: a separation compared against its ground truth.
struct MetricReport {
    std::string scene;
    std::string pattern;
    std::size_t k = 0;
    std::string solver;
    double gamma_d = 0.0;
    double gamma_s = 0.0;
    Psnr psnr_diffuse;
    Psnr psnr_specular;
    Psnr psnr_sum; ///< diffuse + specular against the true unpolarized image
    double wall_time_s = 0.0; ///< not part of the CSV row, see csv_row
};

MetricReport evaluate_separation(const Image& est_diffuse, const Image& est_specular, const Image& true_diffuse,
                                 const Image& true_specular);

/// Stable column order. Wall time is left out so that rows are reproducible.
std::string csv_header();
std::string csv_row(const MetricReport& report);
std::string format_psnr(const Psnr& value);

} // namespace polarsep

#endif
