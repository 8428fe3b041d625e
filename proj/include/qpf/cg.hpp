#pragma once

#include "qpf/sparse_matrix.hpp"

#include <cstddef>
#include <functional>
#include <optional>
#include <span>

namespace qpf::sparse {

/// Called once for the initial iterate (iteration 0) and once after every CG step.
using CGObserver = std::function<void(std::size_t iteration, std::span<const double> x)>;

struct CGOptions {
    double rel_tol = 1e-10;
    std::size_t max_iter = 10000;
    /// Initial guess (warm start). Zero vector when empty.
    std::optional<Vector> x0;
    /// When set, the result carries cg_iteration_bound(*kappa, rel_tol).
    std::optional<double> kappa;
    CGObserver observer;
};

struct CGResult {
    Vector x;
    std::size_t iterations = 0;
    /// ||r_i||_2 / ||b||_2 for i = 0..iterations.
    std::vector<double> residual_history;
    bool converged = false;
    std::optional<std::size_t> bound_iterations;
};

/// Unpreconditioned conjugate gradient for symmetric positive definite `a`.
///
/// Stops once the relative residual drops to `rel_tol` or after `max_iter`
/// steps; non-convergence is reported through `converged`, not thrown. Throws
/// NotPositiveDefinite if a search direction has p'Ap <= 0.
CGResult cg_solve(const SparseMatrix& a, std::span<const double> b, const CGOptions& options = {});

/// Worst-case iteration count ceil(sqrt(kappa)/2 * ln(2/eps_c)) to shrink the
/// energy-norm error by eps_c. Requires kappa >= 1 and eps_c in (0, 1].
std::size_t cg_iteration_bound(double kappa, double eps_c);

/// sqrt((x_star - x)' A (x_star - x)).
double energy_norm_error(const SparseMatrix& a, std::span<const double> x,
                         std::span<const double> x_star);

} // namespace qpf::sparse
