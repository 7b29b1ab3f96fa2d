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
#ifndef POLARSEP_SOLVERS_HPP
#define POLARSEP_SOLVERS_HPP

#include "polarsep/forward_model.hpp"
#include "polarsep/image.hpp"

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace polarsep {

enum class TvNorm { L2, L1, Huber };

std::string_view to_string(TvNorm norm);
std::optional<TvNorm> parse_tv_norm(std::string_view name);

struct SolverConfig {
    double gamma_d = 0.01;  ///< diffuse TV weight
    double gamma_s = 0.002; ///< specular TV weight
    TvNorm norm = TvNorm::L2;
    double lambda = 0.1;       ///< split Bregman coupling (L1)
    double huber_delta = 0.05; ///< Huber transition point
    double cg_tol = 1e-8;
    std::size_t cg_max_iter = 2000;
    std::size_t outer_max_iter = 50;
    double outer_tol = 1e-4;

    void validate() const;
};

struct SolverDiagnostics {
    bool cg_converged = true;       ///< every inner CG solve met cg_tol
    bool outer_converged = true;    ///< outer loop met outer_tol before outer_max_iter
    bool line_search_failed = false;
    std::size_t cg_iterations = 0;  ///< total over all inner solves and channels
    /// Split Bregman only: ||D z - d|| after each outer iteration (summed over channels).
    std::vector<double> constraint_trace;
};

struct SeparationResult {
    Image diffuse;
    Image specular;
    std::size_t iterations = 0;  ///< CG iterations (L2) or outer iterations, max over channels
    double final_residual = 0.0; ///< relative residual of the last linear solve, max over channels
    std::vector<double> objective_trace;
    SolverDiagnostics diagnostics;
};

/// Soft threshold: sign(v) max(|v| - t, 0). Minimizer of t|d| + (d - v)^2 / 2,
/// equivalently of gamma|d| + lambda (d - v)^2 for t = gamma / (2 lambda).
double shrink(double v, double t);

/// Huber function with transition delta: x^2 / 2 for |x| < delta,
/// delta (|x| - delta / 2) otherwise. delta = 1 gives x^2/2 and |x| - 1/2.
double huber_value(double x, double delta);
double huber_grad(double x, double delta);

/// Single-channel view of the separation problem for the unknown
/// z = [z_d; z_s] (2 n entries). Exposes the operators shared by every solver.
class ChannelProblem {
public:
    ChannelProblem(std::span<const double> measurement, const FilterArray& array, double phase);

    std::size_t height() const noexcept { return height_; }
    std::size_t width() const noexcept { return width_; }
    std::size_t pixels() const noexcept { return height_ * width_; }
    std::size_t unknowns() const noexcept { return 2 * pixels(); }
    std::span<const double> attenuation() const noexcept { return atten_; }
    std::span<const double> measurement() const noexcept { return y_; }

    /// S z
    void sample(std::span<const double> z, std::span<double> out) const;
    /// S^T y
    std::vector<double> adjoint_measurement() const;
    /// S^T S z
    void apply_gram(std::span<const double> z, std::span<double> out) const;
    /// (S^T S + D^T W D) z with W = diag(weight_d on diffuse, weight_s on specular gradients)
    void apply_quadratic_system(std::span<const double> z, double weight_d, double weight_s,
                                std::span<double> out) const;
    /// Inverse of the per-pixel 2x2 diagonal blocks of apply_quadratic_system,
    /// usable as a block-Jacobi preconditioner.
    std::vector<double> block_jacobi_inverse(double weight_d, double weight_s) const;
    void apply_block_jacobi(std::span<const double> inverse_blocks, std::span<const double> r,
                            std::span<double> out) const;

    /// ||y - S z||^2
    double data_misfit(std::span<const double> z) const;

    /// ||y - S z||^2 + g_d ||D z_d||^2 + g_s ||D z_s||^2
    double l2_objective(std::span<const double> z, double gamma_d, double gamma_s) const;
    /// ||y - S z||^2 + g_d ||D z_d||_1 + g_s ||D z_s||_1 (anisotropic)
    double l1_objective(std::span<const double> z, double gamma_d, double gamma_s) const;
    /// ||y - S z||^2 + 2 g_d sum H(D z_d) + 2 g_s sum H(D z_s) with H = huber_value.
    /// The factor 2 makes the quadratic zone coincide with l2_objective.
    double huber_objective(std::span<const double> z, double gamma_d, double gamma_s, double delta) const;
    void huber_gradient(std::span<const double> z, double gamma_d, double gamma_s, double delta,
                        std::span<double> out) const;

    /// D z for z = [z_d; z_s]: four stacked planes [dx_d, dy_d, dx_s, dy_s].
    void gradient(std::span<const double> z, std::span<double> out) const;
    /// D^T g for the stacked layout of gradient().
    void gradient_adjoint(std::span<const double> g, std::span<double> out) const;

private:
    std::size_t height_;
    std::size_t width_;
    std::vector<double> y_;
    std::vector<double> atten_;
};

/// Quadratic-TV joint demosaic and separation: solves
/// (S^T S + D^T W D) z = S^T y by preconditioned conjugate gradient.
SeparationResult separate_l2(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg);

/// Anisotropic l1-TV by split Bregman, initialized from the quadratic-TV solution.
SeparationResult separate_l1(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg);

/// Huber-TV by damped Newton with backtracking, initialized from the quadratic-TV solution.
SeparationResult separate_huber(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg);

/// Baseline: demosaic each orientation channel by quadratic-TV inpainting
/// (weight cfg.gamma_d), then fit (z_d, z_s) per pixel by least squares.
SeparationResult separate_two_stage(const Image& y, const FilterArray& array, double phase,
                                    const SolverConfig& cfg);

/// Dispatch on cfg.norm.
SeparationResult separate(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg);

/// Per-pixel least-squares fit of x_k = z_d / 2 + z_s cos^2(phase - theta_k)
/// to a full stack of K orientation images.
std::pair<Image, Image> fit_cosine_stack(std::span<const Image> stack, const OrientationSet& orientations,
                                         double phase);

} // namespace polarsep

#endif
