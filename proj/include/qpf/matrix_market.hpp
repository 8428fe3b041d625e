#pragma once

#include "qpf/sparse_matrix.hpp"

#include <iosfwd>
#include <string>

namespace qpf::sparse {

/// Reads coordinate text: an optional `%%MatrixMarket matrix coordinate real
/// {general|symmetric}` banner, `%` comment lines, a size line `rows cols nnz`,
/// then `i j value` lines (1-based). Symmetric files store one triangle and are
/// expanded on read. Only square matrices are accepted.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market_file(const std::string& path);

/// Writes a `general` coordinate file with every stored entry.
void write_matrix_market(std::ostream& out, const SparseMatrix& a);

/// One real per line; blank lines and `%`/`#` comments are skipped.
Vector read_vector(std::istream& in);
Vector read_vector_file(const std::string& path);
void write_vector(std::ostream& out, std::span<const double> v);

} // namespace qpf::sparse
