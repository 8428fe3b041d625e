#include "qpf/cg.hpp"

#include "qpf/error.hpp"

#include <cmath>
#include <string>

namespace qpf::sparse {

namespace {

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] += alpha * x[i];
    }
}

} // namespace

CGResult cg_solve(const SparseMatrix& a, std::span<const double> b, const CGOptions& options) {
    const auto n = a.n();
    if (b.size() != n) {
        throw DimensionMismatch(n, b.size());
    }
    if (options.x0 && options.x0->size() != n) {
        throw DimensionMismatch(n, options.x0->size());
    }
    if (!(options.rel_tol > 0.0 && options.rel_tol < 1.0)) {
        throw DomainError("cg_solve: rel_tol must lie in (0, 1)");
    }

    CGResult result;
    if (options.kappa) {
        result.bound_iterations = cg_iteration_bound(*options.kappa, options.rel_tol);
    }

    const double b_norm = norm2(b);
    if (b_norm == 0.0) {
        // The unique solution of an SPD system with zero right-hand side.
        result.x.assign(n, 0.0);
        result.residual_history.push_back(0.0);
        result.converged = true;
        if (options.observer) {
            options.observer(0, result.x);
        }
        return result;
    }

    Vector x = options.x0 ? *options.x0 : Vector(n, 0.0);
    Vector r(b.begin(), b.end());
    Vector ap(n);
    if (options.x0) {
        matvec_into(a, x, ap);
        axpy(-1.0, ap, r);
    }
    Vector p = r;
    double rr = dot(r, r);

    result.residual_history.push_back(std::sqrt(rr) / b_norm);
    if (options.observer) {
        options.observer(0, x);
    }

    std::size_t it = 0;
    while (result.residual_history.back() > options.rel_tol && it < options.max_iter) {
        matvec_into(a, p, ap);
        const double curvature = dot(p, ap);
        if (!(curvature > 0.0)) {
            throw NotPositiveDefinite("cg_solve: non-positive curvature p'Ap = " +
                                      std::to_string(curvature) + " at iteration " +
                                      std::to_string(it));
        }
        const double alpha = rr / curvature;
        axpy(alpha, p, x);
        axpy(-alpha, ap, r);
        const double rr_next = dot(r, r);
        const double beta = rr_next / rr;
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = r[i] + beta * p[i];
        }
        rr = rr_next;
        ++it;
        result.residual_history.push_back(std::sqrt(rr) / b_norm);
        if (options.observer) {
            options.observer(it, x);
        }
    }

    result.x = std::move(x);
    result.iterations = it;
    result.converged = result.residual_history.back() <= options.rel_tol;
    return result;
}

std::size_t cg_iteration_bound(double kappa, double eps_c) {
    if (!(kappa >= 1.0) || !std::isfinite(kappa)) {
        throw DomainError("cg_iteration_bound: kappa must be a finite value >= 1");
    }
    if (!(eps_c > 0.0 && eps_c <= 1.0)) {
        throw DomainError("cg_iteration_bound: eps_c must lie in (0, 1]");
    }
    return static_cast<std::size_t>(std::ceil(0.5 * std::sqrt(kappa) * std::log(2.0 / eps_c)));
}

double energy_norm_error(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> x_star) {
    if (x.size() != a.n()) {
        throw DimensionMismatch(a.n(), x.size());
    }
    if (x_star.size() != a.n()) {
        throw DimensionMismatch(a.n(), x_star.size());
    }
    Vector e(a.n());
    for (std::size_t i = 0; i < e.size(); ++i) {
        e[i] = x_star[i] - x[i];
    }
    const double q = dot(e, matvec(a, e));
    if (q < 0.0) {
        throw NotPositiveDefinite("energy_norm_error: negative quadratic form " + std::to_string(q));
    }
    return std::sqrt(q);
}

} // namespace qpf::sparse
