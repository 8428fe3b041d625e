#pragma once

// Dense reference computations used only by tests. They go through Eigen's
// direct factorisations and full eigensolvers, never through the toolkit's
// iterative code paths.

#include "qpf/sparse_matrix.hpp"

#include <Eigen/Dense>

#include <vector>

namespace qpf::testing {

inline Eigen::MatrixXd dense(const sparse::SparseMatrix& a) {
    const auto n = static_cast<Eigen::Index>(a.n());
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    const auto starts = a.row_starts();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t i = 0; i < a.n(); ++i) {
        for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(cols[k])) = vals[k];
        }
    }
    return m;
}

inline std::vector<double> to_std(const Eigen::VectorXd& v) {
    return {v.data(), v.data() + v.size()};
}

inline Eigen::VectorXd to_eigen(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Direct solve through a full-pivot LU.
inline std::vector<double> dense_solve(const sparse::SparseMatrix& a, const std::vector<double>& b) {
    return to_std(dense(a).fullPivLu().solve(to_eigen(b)));
}

/// Ascending eigenvalues from a dense symmetric eigensolver.
inline Eigen::VectorXd dense_eigenvalues(const sparse::SparseMatrix& a) {
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(dense(a), Eigen::EigenvaluesOnly).eigenvalues();
}

inline double dense_one_norm(const Eigen::MatrixXd& m) {
    return m.cwiseAbs().colwise().sum().maxCoeff();
}

/// ||A||_1 ||A^-1||_1 with an explicit inverse.
inline double dense_one_norm_kappa(const sparse::SparseMatrix& a) {
    const Eigen::MatrixXd m = dense(a);
    return dense_one_norm(m) * dense_one_norm(m.inverse());
}

inline double relative_error(const std::vector<double>& x, const std::vector<double>& ref) {
    return (to_eigen(x) - to_eigen(ref)).norm() / to_eigen(ref).norm();
}

} // namespace qpf::testing
