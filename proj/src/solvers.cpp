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
#include "polarsep/solvers.hpp"

#include "polarsep/conjugate_gradient.hpp"
#include "polarsep/errors.hpp"
#include "polarsep/gradient.hpp"
#include "polarsep/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace polarsep {

std::string_view to_string(TvNorm norm) {
    switch (norm) {
    case TvNorm::L2: return "l2";
    case TvNorm::L1: return "l1";
    case TvNorm::Huber: return "huber";
    }
    return "l2";
}

std::optional<TvNorm> parse_tv_norm(std::string_view name) {
    if (name == "l2")
        return TvNorm::L2;
    if (name == "l1")
        return TvNorm::L1;
    if (name == "huber")
        return TvNorm::Huber;
    return std::nullopt;
}

void SolverConfig::validate() const {
    auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
    if (!positive(gamma_d) || !positive(gamma_s))
        throw ValidationError("TV weights gamma_d and gamma_s must be > 0");
    if (!positive(lambda))
        throw ValidationError("split Bregman lambda must be > 0");
    if (!positive(huber_delta))
        throw ValidationError("huber_delta must be > 0");
    if (!positive(cg_tol) || !positive(outer_tol))
        throw ValidationError("solver tolerances must be > 0");
    if (cg_max_iter == 0 || outer_max_iter == 0)
        throw ValidationError("iteration limits must be > 0");
}

double shrink(double v, double t) {
    const double mag = std::abs(v) - t;
    if (mag <= 0.0)
        return 0.0;
    return v < 0.0 ? -mag : mag;
}

double huber_value(double x, double delta) {
    const double a = std::abs(x);
    return a < delta ? 0.5 * x * x : delta * (a - 0.5 * delta);
}

double huber_grad(double x, double delta) {
    if (std::abs(x) < delta)
        return x;
    return x < 0.0 ? -delta : delta;
}

// ---------------------------------------------------------------------------
// ChannelProblem

ChannelProblem::ChannelProblem(std::span<const double> measurement, const FilterArray& array, double phase)
    : height_(array.height()), width_(array.width()), y_(measurement.begin(), measurement.end()),
      atten_(array.attenuation_map(phase)) {
    if (y_.size() != pixels())
        throw ShapeError("measurement plane does not match the filter array");
}

void ChannelProblem::sample(std::span<const double> z, std::span<double> out) const {
    const auto n = pixels();
    for (std::size_t p = 0; p < n; ++p)
        out[p] = 0.5 * z[p] + atten_[p] * z[n + p];
}

std::vector<double> ChannelProblem::adjoint_measurement() const {
    const auto n = pixels();
    std::vector<double> out(2 * n);
    for (std::size_t p = 0; p < n; ++p) {
        out[p] = 0.5 * y_[p];
        out[n + p] = atten_[p] * y_[p];
    }
    return out;
}

void ChannelProblem::apply_gram(std::span<const double> z, std::span<double> out) const {
    const auto n = pixels();
    for (std::size_t p = 0; p < n; ++p) {
        const double s = 0.5 * z[p] + atten_[p] * z[n + p];
        out[p] = 0.5 * s;
        out[n + p] = atten_[p] * s;
    }
}

void ChannelProblem::apply_quadratic_system(std::span<const double> z, double weight_d, double weight_s,
                                            std::span<double> out) const {
    const auto n = pixels();
    apply_gram(z, out);
    add_gradient_gram(z.first(n), height_, width_, weight_d, out.first(n));
    add_gradient_gram(z.subspan(n, n), height_, width_, weight_s, out.subspan(n, n));
}

namespace {

std::size_t neighbour_count(std::size_t r, std::size_t c, std::size_t h, std::size_t w) {
    return static_cast<std::size_t>(r > 0) + static_cast<std::size_t>(r + 1 < h) + static_cast<std::size_t>(c > 0) +
           static_cast<std::size_t>(c + 1 < w);
}

// Inverts the symmetric 2x2 blocks [[a, b], [b, d]] stored as triples.
void invert_blocks(std::vector<double>& blocks) {
    for (std::size_t i = 0; i + 2 < blocks.size(); i += 3) {
        const double a = blocks[i], b = blocks[i + 1], d = blocks[i + 2];
        const double det = a * d - b * b;
        if (det > 1e-300 * std::max(1.0, a * d)) {
            blocks[i] = d / det;
            blocks[i + 1] = -b / det;
            blocks[i + 2] = a / det;
        } else {
            blocks[i] = a > 0.0 ? 1.0 / a : 1.0;
            blocks[i + 1] = 0.0;
            blocks[i + 2] = d > 0.0 ? 1.0 / d : 1.0;
        }
    }
}

} // namespace

std::vector<double> ChannelProblem::block_jacobi_inverse(double weight_d, double weight_s) const {
    std::vector<double> blocks(3 * pixels());
    for (std::size_t r = 0; r < height_; ++r)
        for (std::size_t c = 0; c < width_; ++c) {
            const auto p = r * width_ + c;
            const double deg = static_cast<double>(neighbour_count(r, c, height_, width_));
            blocks[3 * p] = 0.25 + weight_d * deg;
            blocks[3 * p + 1] = 0.5 * atten_[p];
            blocks[3 * p + 2] = atten_[p] * atten_[p] + weight_s * deg;
        }
    invert_blocks(blocks);
    return blocks;
}

void ChannelProblem::apply_block_jacobi(std::span<const double> inverse_blocks, std::span<const double> r,
                                        std::span<double> out) const {
    const auto n = pixels();
    for (std::size_t p = 0; p < n; ++p) {
        const double a = inverse_blocks[3 * p], b = inverse_blocks[3 * p + 1], d = inverse_blocks[3 * p + 2];
        out[p] = a * r[p] + b * r[n + p];
        out[n + p] = b * r[p] + d * r[n + p];
    }
}

double ChannelProblem::data_misfit(std::span<const double> z) const {
    const auto n = pixels();
    double acc = 0.0;
    for (std::size_t p = 0; p < n; ++p) {
        const double e = y_[p] - 0.5 * z[p] - atten_[p] * z[n + p];
        acc += e * e;
    }
    return acc;
}

void ChannelProblem::gradient(std::span<const double> z, std::span<double> out) const {
    const auto n = pixels();
    grad_plane(z.first(n), height_, width_, out.first(n), out.subspan(n, n));
    grad_plane(z.subspan(n, n), height_, width_, out.subspan(2 * n, n), out.subspan(3 * n, n));
}

void ChannelProblem::gradient_adjoint(std::span<const double> g, std::span<double> out) const {
    const auto n = pixels();
    div_plane(g.first(n), g.subspan(n, n), height_, width_, out.first(n));
    div_plane(g.subspan(2 * n, n), g.subspan(3 * n, n), height_, width_, out.subspan(n, n));
    for (std::size_t i = 0; i < 2 * n; ++i)
        out[i] = -out[i];
}

namespace {

template <typename Penalty>
double penalized(const ChannelProblem& prob, std::span<const double> z, double gamma_d, double gamma_s,
                 Penalty&& penalty) {
    const auto n = prob.pixels();
    std::vector<double> g(4 * n);
    prob.gradient(z, g);
    double reg_d = 0.0, reg_s = 0.0;
    for (std::size_t i = 0; i < 2 * n; ++i)
        reg_d += penalty(g[i]);
    for (std::size_t i = 2 * n; i < 4 * n; ++i)
        reg_s += penalty(g[i]);
    return prob.data_misfit(z) + gamma_d * reg_d + gamma_s * reg_s;
}

} // namespace

double ChannelProblem::l2_objective(std::span<const double> z, double gamma_d, double gamma_s) const {
    return penalized(*this, z, gamma_d, gamma_s, [](double v) { return v * v; });
}

double ChannelProblem::l1_objective(std::span<const double> z, double gamma_d, double gamma_s) const {
    return penalized(*this, z, gamma_d, gamma_s, [](double v) { return std::abs(v); });
}

double ChannelProblem::huber_objective(std::span<const double> z, double gamma_d, double gamma_s,
                                       double delta) const {
    return penalized(*this, z, gamma_d, gamma_s, [delta](double v) { return 2.0 * huber_value(v, delta); });
}

void ChannelProblem::huber_gradient(std::span<const double> z, double gamma_d, double gamma_s, double delta,
                                    std::span<double> out) const {
    const auto n = pixels();
    std::vector<double> g(4 * n);
    gradient(z, g);
    for (std::size_t i = 0; i < 4 * n; ++i)
        g[i] = 2.0 * (i < 2 * n ? gamma_d : gamma_s) * huber_grad(g[i], delta);
    gradient_adjoint(g, out);
    for (std::size_t p = 0; p < n; ++p) {
        const double r = 0.5 * z[p] + atten_[p] * z[n + p] - y_[p];
        out[p] += 2.0 * 0.5 * r;
        out[n + p] += 2.0 * atten_[p] * r;
    }
}

// ---------------------------------------------------------------------------
// Solvers

namespace {

struct ChannelOutcome {
    std::vector<double> z;
    std::size_t iterations = 0;
    double final_residual = 0.0;
    std::vector<double> objective_trace;
    SolverDiagnostics diagnostics;
};

void check_inputs(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg) {
    cfg.validate();
    if (!array.matches(y))
        throw ShapeError("measurement and filter array dimensions differ");
    if (y.empty())
        throw ValidationError("empty measurement");
    if (!std::isfinite(phase))
        throw ValidationError("phase must be finite");
}

double relative_change(std::span<const double> now, std::span<const double> before) {
    double diff = 0.0, ref = 0.0;
    for (std::size_t i = 0; i < now.size(); ++i) {
        const double d = now[i] - before[i];
        diff += d * d;
        ref += before[i] * before[i];
    }
    return std::sqrt(diff) / std::max(std::sqrt(ref), 1e-300);
}

double true_residual(const ChannelProblem& prob, std::span<const double> z, std::span<const double> rhs,
                     double weight_d, double weight_s) {
    std::vector<double> mz(z.size());
    prob.apply_quadratic_system(z, weight_d, weight_s, mz);
    double num = 0.0;
    for (std::size_t i = 0; i < mz.size(); ++i)
        num += (rhs[i] - mz[i]) * (rhs[i] - mz[i]);
    const double den = norm2(rhs);
    return den > 0.0 ? std::sqrt(num) / den : std::sqrt(num);
}

// Solves (S^T S + D^T W D) z = rhs starting from z.
CgReport solve_quadratic(const ChannelProblem& prob, std::span<const double> rhs, std::span<double> z,
                         double weight_d, double weight_s, const SolverConfig& cfg) {
    const auto blocks = prob.block_jacobi_inverse(weight_d, weight_s);
    return conjugate_gradient(
        [&](std::span<const double> in, std::span<double> out) {
            prob.apply_quadratic_system(in, weight_d, weight_s, out);
        },
        [&](std::span<const double> in, std::span<double> out) { prob.apply_block_jacobi(blocks, in, out); }, rhs,
        z, cfg.cg_tol, cfg.cg_max_iter);
}

ChannelOutcome solve_channel_l2(const ChannelProblem& prob, const SolverConfig& cfg) {
    ChannelOutcome out;
    out.z.assign(prob.unknowns(), 0.0);
    out.objective_trace.push_back(prob.l2_objective(out.z, cfg.gamma_d, cfg.gamma_s));
    const auto rhs = prob.adjoint_measurement();
    const auto report = solve_quadratic(prob, rhs, out.z, cfg.gamma_d, cfg.gamma_s, cfg);
    out.iterations = report.iterations;
    out.final_residual = true_residual(prob, out.z, rhs, cfg.gamma_d, cfg.gamma_s);
    out.diagnostics.cg_converged = report.converged;
    out.diagnostics.cg_iterations = report.iterations;
    out.objective_trace.push_back(prob.l2_objective(out.z, cfg.gamma_d, cfg.gamma_s));
    return out;
}

ChannelOutcome solve_channel_l1(const ChannelProblem& prob, const SolverConfig& cfg) {
    ChannelOutcome out = solve_channel_l2(prob, cfg);
    out.iterations = 0;
    out.objective_trace.assign(1, prob.l1_objective(out.z, cfg.gamma_d, cfg.gamma_s));

    const auto n = prob.pixels();
    const double lambda = cfg.lambda;
    const double t_d = cfg.gamma_d / (2.0 * lambda);
    const double t_s = cfg.gamma_s / (2.0 * lambda);

    std::vector<double> dz(4 * n), d(4 * n), b(4 * n, 0.0), tmp(4 * n), rhs(2 * n), prev(2 * n);
    prob.gradient(out.z, d);
    const auto sty = prob.adjoint_measurement();
    const auto blocks = prob.block_jacobi_inverse(lambda, lambda);

    out.diagnostics.outer_converged = false;
    for (std::size_t it = 0; it < cfg.outer_max_iter; ++it) {
        // z-step: (S^T S + lambda D^T D) z = S^T y + lambda D^T (d - b)
        for (std::size_t i = 0; i < 4 * n; ++i)
            tmp[i] = d[i] - b[i];
        prob.gradient_adjoint(tmp, rhs);
        for (std::size_t i = 0; i < 2 * n; ++i)
            rhs[i] = sty[i] + lambda * rhs[i];
        std::copy(out.z.begin(), out.z.end(), prev.begin());
        const auto report = conjugate_gradient(
            [&](std::span<const double> in, std::span<double> o) {
                prob.apply_quadratic_system(in, lambda, lambda, o);
            },
            [&](std::span<const double> in, std::span<double> o) { prob.apply_block_jacobi(blocks, in, o); },
            std::span<const double>(rhs), std::span<double>(out.z), cfg.cg_tol, cfg.cg_max_iter);
        out.diagnostics.cg_iterations += report.iterations;
        out.diagnostics.cg_converged = out.diagnostics.cg_converged && report.converged;
        out.final_residual = report.relative_residual;

        // d-step (componentwise shrinkage) and Bregman update
        prob.gradient(out.z, dz);
        double constraint = 0.0;
        for (std::size_t i = 0; i < 4 * n; ++i) {
            d[i] = shrink(dz[i] + b[i], i < 2 * n ? t_d : t_s);
            const double gap = dz[i] - d[i];
            b[i] += gap;
            constraint += gap * gap;
        }
        out.diagnostics.constraint_trace.push_back(std::sqrt(constraint));
        out.objective_trace.push_back(prob.l1_objective(out.z, cfg.gamma_d, cfg.gamma_s));
        out.iterations = it + 1;

        if (relative_change(out.z, prev) < cfg.outer_tol) {
            out.diagnostics.outer_converged = true;
            break;
        }
    }
    return out;
}

ChannelOutcome solve_channel_huber(const ChannelProblem& prob, const SolverConfig& cfg) {
    ChannelOutcome out = solve_channel_l2(prob, cfg);
    out.iterations = 0;
    const double delta = cfg.huber_delta;
    auto objective = [&](std::span<const double> z) {
        return prob.huber_objective(z, cfg.gamma_d, cfg.gamma_s, delta);
    };

    const auto n = prob.pixels();
    const auto h = prob.height(), w = prob.width();
    std::vector<double> grad_f(2 * n), step(2 * n), trial(2 * n), dz(4 * n), weights(4 * n), tmp(4 * n),
        neg_grad(2 * n), adjoint_buf(2 * n);
    double f = objective(out.z);
    out.objective_trace.assign(1, f);
    out.diagnostics.outer_converged = false;

    for (std::size_t it = 0; it < cfg.outer_max_iter; ++it) {
        prob.huber_gradient(out.z, cfg.gamma_d, cfg.gamma_s, delta, grad_f);
        if (norm2(grad_f) < cfg.outer_tol * (1.0 + f)) {
            out.diagnostics.outer_converged = true;
            break;
        }

        // Curvature weights: the Huber second derivative (1) in the quadratic
        // zone, its secant majorant delta/|x| in the linear zone.
        prob.gradient(out.z, dz);
        for (std::size_t i = 0; i < 4 * n; ++i) {
            const double a = std::abs(dz[i]);
            const double curv = a < delta ? 1.0 : delta / a;
            weights[i] = 2.0 * (i < 2 * n ? cfg.gamma_d : cfg.gamma_s) * curv;
        }
        // Diagonal of D^T diag(weights) D per pixel, for the preconditioner.
        std::vector<double> blocks(3 * n);
        for (std::size_t p = 0; p < n; ++p) {
            const double a = prob.attenuation()[p];
            blocks[3 * p] = 0.5;
            blocks[3 * p + 1] = a;
            blocks[3 * p + 2] = 2.0 * a * a;
        }
        for (std::size_t r = 0; r < h; ++r)
            for (std::size_t c = 0; c < w; ++c) {
                const auto p = r * w + c;
                if (c + 1 < w) {
                    blocks[3 * p] += weights[p];
                    blocks[3 * (p + 1)] += weights[p];
                    blocks[3 * p + 2] += weights[2 * n + p];
                    blocks[3 * (p + 1) + 2] += weights[2 * n + p];
                }
                if (r + 1 < h) {
                    blocks[3 * p] += weights[n + p];
                    blocks[3 * (p + w)] += weights[n + p];
                    blocks[3 * p + 2] += weights[3 * n + p];
                    blocks[3 * (p + w) + 2] += weights[3 * n + p];
                }
            }
        invert_blocks(blocks);

        auto hessian = [&](std::span<const double> in, std::span<double> o) {
            prob.apply_gram(in, o);
            for (double& v : o)
                v *= 2.0;
            prob.gradient(in, tmp);
            for (std::size_t i = 0; i < 4 * n; ++i)
                tmp[i] *= weights[i];
            prob.gradient_adjoint(tmp, adjoint_buf);
            for (std::size_t i = 0; i < 2 * n; ++i)
                o[i] += adjoint_buf[i];
        };
        for (std::size_t i = 0; i < 2 * n; ++i)
            neg_grad[i] = -grad_f[i];
        std::fill(step.begin(), step.end(), 0.0);
        const auto report = conjugate_gradient(
            hessian, [&](std::span<const double> in, std::span<double> o) { prob.apply_block_jacobi(blocks, in, o); },
            std::span<const double>(neg_grad), std::span<double>(step), cfg.cg_tol, cfg.cg_max_iter);
        out.diagnostics.cg_iterations += report.iterations;
        out.diagnostics.cg_converged = out.diagnostics.cg_converged && report.converged;
        out.final_residual = report.relative_residual;

        // Backtracking: halve until the objective strictly decreases.
        double t = 1.0;
        bool accepted = false;
        for (int halving = 0; halving <= 30; ++halving, t *= 0.5) {
            for (std::size_t i = 0; i < 2 * n; ++i)
                trial[i] = out.z[i] + t * step[i];
            const double f_trial = objective(trial);
            if (f_trial < f) {
                out.z.swap(trial);
                f = f_trial;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            out.diagnostics.line_search_failed = true;
            break;
        }
        out.objective_trace.push_back(f);
        out.iterations = it + 1;
    }
    return out;
}

struct InpaintOutcome {
    std::vector<double> x;
    CgReport report;
};

// argmin ||M (x - y)||^2 + gamma ||D x||^2 for a binary mask M.
InpaintOutcome inpaint_quadratic(std::span<const double> y, const std::vector<char>& mask, std::size_t h,
                                 std::size_t w, double gamma, const SolverConfig& cfg) {
    const auto n = h * w;
    std::vector<double> rhs(n), diag_inv(n);
    double sum = 0.0;
    std::size_t count = 0;
    for (std::size_t p = 0; p < n; ++p) {
        rhs[p] = mask[p] ? y[p] : 0.0;
        if (mask[p]) {
            sum += y[p];
            ++count;
        }
    }
    const double mean = count ? sum / static_cast<double>(count) : 0.0;
    InpaintOutcome out;
    out.x.resize(n);
    for (std::size_t r = 0; r < h; ++r)
        for (std::size_t c = 0; c < w; ++c) {
            const auto p = r * w + c;
            out.x[p] = mask[p] ? y[p] : mean;
            diag_inv[p] = 1.0 / ((mask[p] ? 1.0 : 0.0) + gamma * static_cast<double>(neighbour_count(r, c, h, w)));
        }
    out.report = conjugate_gradient(
        [&](std::span<const double> in, std::span<double> o) {
            for (std::size_t p = 0; p < n; ++p)
                o[p] = mask[p] ? in[p] : 0.0;
            add_gradient_gram(in, h, w, gamma, o);
        },
        [&](std::span<const double> in, std::span<double> o) {
            for (std::size_t p = 0; p < n; ++p)
                o[p] = diag_inv[p] * in[p];
        },
        std::span<const double>(rhs), std::span<double>(out.x), cfg.cg_tol, cfg.cg_max_iter);
    return out;
}

// Runs a per-channel solver over every channel and assembles the result.
template <typename ChannelSolver>
SeparationResult run_channels(const Image& y, const FilterArray& array, double phase, ChannelSolver&& solve) {
    const auto channels = y.channels();
    std::vector<ChannelOutcome> outcomes(channels);
    parallel_for(channels, [&](std::size_t c) {
        ChannelProblem prob(y.plane(c), array, phase);
        outcomes[c] = solve(prob);
    });

    SeparationResult result;
    result.diffuse = Image(y.height(), y.width(), channels);
    result.specular = Image(y.height(), y.width(), channels);
    const auto n = y.pixel_count();
    std::size_t trace_len = 0, constraint_len = 0;
    for (std::size_t c = 0; c < channels; ++c) {
        const auto& o = outcomes[c];
        std::copy(o.z.begin(), o.z.begin() + static_cast<std::ptrdiff_t>(n), result.diffuse.plane(c).begin());
        std::copy(o.z.begin() + static_cast<std::ptrdiff_t>(n), o.z.end(), result.specular.plane(c).begin());
        result.iterations = std::max(result.iterations, o.iterations);
        result.final_residual = std::max(result.final_residual, o.final_residual);
        auto& diag = result.diagnostics;
        diag.cg_converged = diag.cg_converged && o.diagnostics.cg_converged;
        diag.outer_converged = diag.outer_converged && o.diagnostics.outer_converged;
        diag.line_search_failed = diag.line_search_failed || o.diagnostics.line_search_failed;
        diag.cg_iterations += o.diagnostics.cg_iterations;
        trace_len = std::max(trace_len, o.objective_trace.size());
        constraint_len = std::max(constraint_len, o.diagnostics.constraint_trace.size());
    }
    // Channels that stopped early contribute their final value to later entries.
    auto sum_padded = [&](auto member, std::size_t len) {
        std::vector<double> total(len, 0.0);
        for (const auto& o : outcomes) {
            const auto& trace = member(o);
            for (std::size_t i = 0; i < len && !trace.empty(); ++i)
                total[i] += trace[std::min(i, trace.size() - 1)];
        }
        return total;
    };
    result.objective_trace =
        sum_padded([](const ChannelOutcome& o) -> const std::vector<double>& { return o.objective_trace; }, trace_len);
    result.diagnostics.constraint_trace = sum_padded(
        [](const ChannelOutcome& o) -> const std::vector<double>& { return o.diagnostics.constraint_trace; },
        constraint_len);
    return result;
}

} // namespace

SeparationResult separate_l2(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg) {
    check_inputs(y, array, phase, cfg);
    return run_channels(y, array, phase, [&](const ChannelProblem& prob) { return solve_channel_l2(prob, cfg); });
}

SeparationResult separate_l1(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg) {
    check_inputs(y, array, phase, cfg);
    return run_channels(y, array, phase, [&](const ChannelProblem& prob) { return solve_channel_l1(prob, cfg); });
}

SeparationResult separate_huber(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg) {
    check_inputs(y, array, phase, cfg);
    return run_channels(y, array, phase,
                        [&](const ChannelProblem& prob) { return solve_channel_huber(prob, cfg); });
}

SeparationResult separate(const Image& y, const FilterArray& array, double phase, const SolverConfig& cfg) {
    switch (cfg.norm) {
    case TvNorm::L2: return separate_l2(y, array, phase, cfg);
    case TvNorm::L1: return separate_l1(y, array, phase, cfg);
    case TvNorm::Huber: return separate_huber(y, array, phase, cfg);
    }
    throw ValidationError("unknown TV norm");
}

std::pair<Image, Image> fit_cosine_stack(std::span<const Image> stack, const OrientationSet& orientations,
                                         double phase) {
    const auto k = orientations.size();
    if (stack.size() != k)
        throw ShapeError("cosine fit: stack size differs from orientation count");
    for (const auto& img : stack)
        if (!img.same_shape(stack.front()))
            throw ShapeError("cosine fit: stack images differ in shape");

    // Normal equations of the rows [1/2, c_k]; identical at every pixel.
    std::vector<double> att(k);
    double s_c = 0.0, s_cc = 0.0;
    for (std::size_t j = 0; j < k; ++j) {
        att[j] = malus_attenuation(phase, orientations[j]);
        s_c += att[j];
        s_cc += att[j] * att[j];
    }
    const double a = 0.25 * static_cast<double>(k), b = 0.5 * s_c, d = s_cc;
    const double det = a * d - b * b;
    if (!(det > 1e-12 * std::max(1.0, a * d)))
        throw NumericalError("cosine fit is singular: fewer than two distinct attenuation values");

    const auto& ref = stack.front();
    Image zd(ref.height(), ref.width(), ref.channels());
    Image zs(ref.height(), ref.width(), ref.channels());
    auto out_d = zd.data();
    auto out_s = zs.data();
    for (std::size_t i = 0; i < out_d.size(); ++i) {
        double r0 = 0.0, r1 = 0.0;
        for (std::size_t j = 0; j < k; ++j) {
            const double x = stack[j].data()[i];
            r0 += 0.5 * x;
            r1 += att[j] * x;
        }
        out_d[i] = (d * r0 - b * r1) / det;
        out_s[i] = (a * r1 - b * r0) / det;
    }
    return {std::move(zd), std::move(zs)};
}

SeparationResult separate_two_stage(const Image& y, const FilterArray& array, double phase,
                                    const SolverConfig& cfg) {
    check_inputs(y, array, phase, cfg);
    const auto counts = array.class_counts();
    if (std::any_of(counts.begin(), counts.end(), [](std::size_t c) { return c == 0; }))
        throw ValidationError("two-stage separation needs every orientation present in the array");

    const auto k = array.orientation_count();
    const auto h = y.height(), w = y.width(), n = y.pixel_count(), channels = y.channels();
    std::vector<Image> stack(k, Image(h, w, channels));
    std::vector<CgReport> reports(k * channels);
    parallel_for(k * channels, [&](std::size_t job) {
        const auto j = job / channels, c = job % channels;
        std::vector<char> mask(n);
        for (std::size_t p = 0; p < n; ++p)
            mask[p] = array.index(p) == j ? 1 : 0;
        auto inpainted = inpaint_quadratic(y.plane(c), mask, h, w, cfg.gamma_d, cfg);
        std::copy(inpainted.x.begin(), inpainted.x.end(), stack[j].plane(c).begin());
        reports[job] = inpainted.report;
    });

    auto [zd, zs] = fit_cosine_stack(stack, array.orientations(), phase);
    SeparationResult result;
    result.diffuse = std::move(zd);
    result.specular = std::move(zs);
    for (const auto& r : reports) {
        result.iterations = std::max(result.iterations, r.iterations);
        result.final_residual = std::max(result.final_residual, r.relative_residual);
        result.diagnostics.cg_converged = result.diagnostics.cg_converged && r.converged;
        result.diagnostics.cg_iterations += r.iterations;
    }
    return result;
}

} // namespace polarsep
