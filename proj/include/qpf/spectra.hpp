#pragma once

#include "qpf/netmodel.hpp"
#include "qpf/sparse_matrix.hpp"

#include <cstdint>
#include <string>

namespace qpf::spectra {

struct EigOptions {
    /// Relative accuracy target for each extreme eigenvalue.
    double tol = 1e-8;
    std::size_t max_iter = 20000;
    /// Seed for the random start vectors; fixed so reports are reproducible.
    std::uint64_t seed = 20240601;
};

struct ExtremeEigs {
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    std::size_t lanczos_steps = 0;
    std::size_t inverse_iterations = 0;
};

/// Extreme eigenvalues of a symmetric positive definite matrix.
///
/// lambda_max comes from Lanczos with full reorthogonalisation started from a
/// seeded random vector; lambda_min from zero-shift inverse iteration started
/// from all-ones, with conjugate gradient as the inner solver, so the matrix is
/// only touched through products. If the inverse-iteration result sits above
/// the smallest Lanczos Ritz value, it is rerun from a seeded random vector.
/// Throws ConvergenceError when the iteration cap is hit and
/// NotPositiveDefinite if the matrix turns out not to be SPD.
ExtremeEigs extreme_eigs(const sparse::SparseMatrix& a, const EigOptions& options = {});

/// lambda_max / lambda_min.
double condition_number(const sparse::SparseMatrix& a, const EigOptions& options = {});

/// ||A||_1 * est(||A^-1||_1) using the Hager-Higham estimator with CG solves.
/// A surrogate for kappa on systems too large for eigen-iterations.
double one_norm_kappa_bound(const sparse::SparseMatrix& a, double solve_tol = 1e-12);

struct RowSparsity {
    std::size_t s_max = 0;
    double s_avg = 0.0;
};

RowSparsity row_sparsity(const sparse::SparseMatrix& a);

struct SpectralReport {
    std::string name;
    std::size_t n = 0;
    double lambda_min = 0.0;
    double lambda_max = 0.0;
    double kappa = 0.0;
    double kappa_lower_bound_1norm = 0.0;
    std::size_t s_max = 0;
    double s_avg = 0.0;
    double injection_density = 0.0;
    double eig_tol = 0.0;
    double solve_tol = 0.0;
};

SpectralReport analyze_case(const net::NetworkCase& net, const EigOptions& options = {});

} // namespace qpf::spectra
