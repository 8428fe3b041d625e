#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace qpf::sparse {

using Vector = std::vector<double>;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Square matrix in compressed-row storage.
///
/// Column indices are strictly increasing within each row. Symmetric matrices
/// store both triangles, so per-row counts are the true row sparsity.
class SparseMatrix {
public:
    SparseMatrix() = default;

    /// Assemble from triplets; duplicates are summed. The result is bitwise
    /// independent of the order of `entries`.
    static SparseMatrix from_triplets(std::size_t n, std::span<const Triplet> entries);
    static SparseMatrix identity(std::size_t n);
    static SparseMatrix diagonal(std::span<const double> diag);
    /// Dense row-major input; exact zeros are not stored.
    static SparseMatrix from_dense(std::size_t n, std::span<const double> row_major);

    std::size_t n() const noexcept { return n_; }
    std::size_t nnz() const noexcept { return values_.size(); }

    std::span<const std::size_t> row_starts() const noexcept { return row_starts_; }
    std::span<const std::size_t> col_indices() const noexcept { return col_indices_; }
    std::span<const double> values() const noexcept { return values_; }

    std::size_t row_nnz(std::size_t row) const { return row_starts_[row + 1] - row_starts_[row]; }

    /// Stored value at (row, col), 0 when structurally absent.
    double coeff(std::size_t row, std::size_t col) const;

    /// Exact (bitwise-equal values) structural symmetry check.
    bool is_symmetric() const;

    SparseMatrix scaled(double factor) const;

    /// Dense row-major copy; intended for small matrices and test oracles.
    std::vector<double> to_dense() const;

    friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

private:
    std::size_t n_ = 0;
    std::vector<std::size_t> row_starts_{0};
    std::vector<std::size_t> col_indices_;
    std::vector<double> values_;
};

/// y = A v. Throws DimensionMismatch if v.size() != a.n().
Vector matvec(const SparseMatrix& a, std::span<const double> v);
void matvec_into(const SparseMatrix& a, std::span<const double> v, std::span<double> out);

double dot(std::span<const double> a, std::span<const double> b);
double norm2(std::span<const double> v);

/// Maximum absolute column sum.
double one_norm(const SparseMatrix& a);

} // namespace qpf::sparse
