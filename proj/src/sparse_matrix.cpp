#include "qpf/sparse_matrix.hpp"

#include "qpf/error.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace qpf::sparse {

SparseMatrix SparseMatrix::from_triplets(std::size_t n, std::span<const Triplet> entries) {
    std::vector<Triplet> sorted(entries.begin(), entries.end());
    for (const auto& t : sorted) {
        if (t.row >= n || t.col >= n) {
            throw DomainError("triplet index out of range for dimension " + std::to_string(n));
        }
    }
    // Ties broken by value so duplicate sums do not depend on input order.
    std::sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
        if (a.row != b.row) {
            return a.row < b.row;
        }
        if (a.col != b.col) {
            return a.col < b.col;
        }
        return a.value < b.value;
    });

    SparseMatrix m;
    m.n_ = n;
    m.row_starts_.assign(n + 1, 0);
    m.col_indices_.reserve(sorted.size());
    m.values_.reserve(sorted.size());

    for (std::size_t k = 0; k < sorted.size();) {
        const auto row = sorted[k].row;
        const auto col = sorted[k].col;
        double sum = 0.0;
        for (; k < sorted.size() && sorted[k].row == row && sorted[k].col == col; ++k) {
            sum += sorted[k].value;
        }
        m.col_indices_.push_back(col);
        m.values_.push_back(sum);
        ++m.row_starts_[row + 1];
    }
    std::partial_sum(m.row_starts_.begin(), m.row_starts_.end(), m.row_starts_.begin());
    return m;
}

SparseMatrix SparseMatrix::identity(std::size_t n) {
    std::vector<double> ones(n, 1.0);
    return diagonal(ones);
}

SparseMatrix SparseMatrix::diagonal(std::span<const double> diag) {
    std::vector<Triplet> t;
    t.reserve(diag.size());
    for (std::size_t i = 0; i < diag.size(); ++i) {
        t.push_back({i, i, diag[i]});
    }
    return from_triplets(diag.size(), t);
}

SparseMatrix SparseMatrix::from_dense(std::size_t n, std::span<const double> row_major) {
    if (row_major.size() != n * n) {
        throw DimensionMismatch(n * n, row_major.size());
    }
    std::vector<Triplet> t;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (row_major[i * n + j] != 0.0) {
                t.push_back({i, j, row_major[i * n + j]});
            }
        }
    }
    return from_triplets(n, t);
}

double SparseMatrix::coeff(std::size_t row, std::size_t col) const {
    const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_starts_[row]);
    const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_starts_[row + 1]);
    const auto it = std::lower_bound(first, last, col);
    if (it == last || *it != col) {
        return 0.0;
    }
    return values_[static_cast<std::size_t>(it - col_indices_.begin())];
}

bool SparseMatrix::is_symmetric() const {
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = row_starts_[i]; k < row_starts_[i + 1]; ++k) {
            const auto j = col_indices_[k];
            if (j == i) {
                continue;
            }
            // Both triangles must be stored for the structure to count as symmetric.
            const auto first = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_starts_[j]);
            const auto last = col_indices_.begin() + static_cast<std::ptrdiff_t>(row_starts_[j + 1]);
            const auto it = std::lower_bound(first, last, i);
            if (it == last || *it != i ||
                values_[static_cast<std::size_t>(it - col_indices_.begin())] != values_[k]) {
                return false;
            }
        }
    }
    return true;
}

SparseMatrix SparseMatrix::scaled(double factor) const {
    SparseMatrix m = *this;
    for (auto& v : m.values_) {
        v *= factor;
    }
    return m;
}

std::vector<double> SparseMatrix::to_dense() const {
    std::vector<double> dense(n_ * n_, 0.0);
    for (std::size_t i = 0; i < n_; ++i) {
        for (std::size_t k = row_starts_[i]; k < row_starts_[i + 1]; ++k) {
            dense[i * n_ + col_indices_[k]] = values_[k];
        }
    }
    return dense;
}

void matvec_into(const SparseMatrix& a, std::span<const double> v, std::span<double> out) {
    if (v.size() != a.n()) {
        throw DimensionMismatch(a.n(), v.size());
    }
    if (out.size() != a.n()) {
        throw DimensionMismatch(a.n(), out.size());
    }
    const auto starts = a.row_starts();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t i = 0; i < a.n(); ++i) {
        double sum = 0.0;
        for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
            sum += vals[k] * v[cols[k]];
        }
        out[i] = sum;
    }
}

Vector matvec(const SparseMatrix& a, std::span<const double> v) {
    Vector out(a.n());
    matvec_into(a, v, out);
    return out;
}

double dot(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) {
        throw DimensionMismatch(a.size(), b.size());
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sum += a[i] * b[i];
    }
    return sum;
}

double norm2(std::span<const double> v) {
    return std::sqrt(dot(v, v));
}

double one_norm(const SparseMatrix& a) {
    std::vector<double> col_sums(a.n(), 0.0);
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t k = 0; k < a.nnz(); ++k) {
        col_sums[cols[k]] += std::abs(vals[k]);
    }
    return col_sums.empty() ? 0.0 : *std::max_element(col_sums.begin(), col_sums.end());
}

} // namespace qpf::sparse
