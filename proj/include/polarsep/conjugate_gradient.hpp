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
#ifndef POLARSEP_CONJUGATE_GRADIENT_HPP
#define POLARSEP_CONJUGATE_GRADIENT_HPP

#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <vector>

namespace polarsep {

struct CgReport {
    std::size_t iterations = 0;
    double relative_residual = 0.0;
    bool converged = false;
};

/// Preconditioned conjugate gradient for a symmetric positive definite
/// operator given only by its action. apply(in, out) writes A*in into out;
/// precondition(in, out) writes M^-1 in. x holds the initial guess and
/// receives the solution. Stops when ||b - A x|| < tol ||b||.
template <typename Apply, typename Precondition>
CgReport conjugate_gradient(Apply&& apply, Precondition&& precondition, std::span<const double> b,
                            std::span<double> x, double tol, std::size_t max_iter) {
    const std::size_t n = b.size();
    auto dotp = [](const std::vector<double>& u, const std::vector<double>& v) {
        return std::inner_product(u.begin(), u.end(), v.begin(), 0.0);
    };

    std::vector<double> r(n), z(n), p(n), q(n);
    apply(std::span<const double>(x.data(), n), std::span<double>(q));
    for (std::size_t i = 0; i < n; ++i)
        r[i] = b[i] - q[i];

    const double b_norm = std::sqrt(std::inner_product(b.begin(), b.end(), b.begin(), 0.0));
    CgReport report;
    if (b_norm == 0.0) {
        // A is SPD, so the solution is zero.
        std::fill(x.begin(), x.end(), 0.0);
        report.converged = true;
        return report;
    }

    double r_norm = std::sqrt(dotp(r, r));
    report.relative_residual = r_norm / b_norm;
    if (report.relative_residual < tol) {
        report.converged = true;
        return report;
    }

    precondition(std::span<const double>(r), std::span<double>(z));
    p = z;
    double rz = dotp(r, z);

    while (report.iterations < max_iter) {
        ++report.iterations;
        apply(std::span<const double>(p), std::span<double>(q));
        const double pq = dotp(p, q);
        if (!(pq > 0.0))
            break; // lost positive definiteness numerically
        const double alpha = rz / pq;
        for (std::size_t i = 0; i < n; ++i) {
            x[i] += alpha * p[i];
            r[i] -= alpha * q[i];
        }
        r_norm = std::sqrt(dotp(r, r));
        report.relative_residual = r_norm / b_norm;
        if (report.relative_residual < tol) {
            report.converged = true;
            break;
        }
        precondition(std::span<const double>(r), std::span<double>(z));
        const double rz_next = dotp(r, z);
        const double beta = rz_next / rz;
        rz = rz_next;
        for (std::size_t i = 0; i < n; ++i)
            p[i] = z[i] + beta * p[i];
    }
    return report;
}

/// Unpreconditioned variant.
template <typename Apply>
CgReport conjugate_gradient(Apply&& apply, std::span<const double> b, std::span<double> x, double tol,
                            std::size_t max_iter) {
    auto identity = [](std::span<const double> in, std::span<double> out) {
        std::copy(in.begin(), in.end(), out.begin());
    };
    return conjugate_gradient(std::forward<Apply>(apply), identity, b, x, tol, max_iter);
}

} // namespace polarsep

#endif
