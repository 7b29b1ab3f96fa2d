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
#ifndef POLARSEP_CALIBRATION_HPP
#define POLARSEP_CALIBRATION_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/image.hpp"

#include <span>
#include <vector>

namespace polarsep {

/// Fit of the per-orientation means to mu_k = mu_d + mu_s cos^2(phase - theta_k).
/// With a mosaic measurement mu_d is half the mean diffuse level.
struct PhaseEstimate {
    double phase = 0.0;    ///< radians, [0, pi)
    double mu_d = 0.0;
    double mu_s = 0.0;     ///< >= 0
    double residual = 0.0; ///< RMS fit error over the K means
    /// false when mu_s is negligible or, for K > 3, not significant against the fit residual
    bool identifiable = true;
    bool exactly_determined = false; ///< K == 3: as many equations as unknowns
};

/// Mean measurement of each orientation class, averaged over channels.
/// Throws ValidationError if some orientation has no pixel.
std::vector<double> orientation_means(const Image& y, const FilterArray& array);

/// Grid search over the phase at 1 degree steps with the linear (mu_d, mu_s)
/// fit solved in closed form, refined by Gauss-Newton. Requires K >= 3.
PhaseEstimate estimate_phase(std::span<const double> means, const OrientationSet& orientations);

/// orientation_means followed by estimate_phase.
PhaseEstimate estimate_phase(const Image& y, const FilterArray& array);

} // namespace polarsep

#endif
