#include "qpf/matrix_market.hpp"

#include "qpf/error.hpp"
#include "qpf/numfmt.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace qpf::sparse {

namespace {

std::string lowercase(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::vector<std::string_view> split_ws(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t i = 0;
    while (i < line.size()) {
        while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        const auto start = i;
        while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) {
            ++i;
        }
        if (i > start) {
            out.push_back(line.substr(start, i - start));
        }
    }
    return out;
}

std::size_t parse_index(std::string_view token, std::size_t line_no) {
    const auto v = parse_double(token);
    if (!v || *v < 1.0 || *v != static_cast<double>(static_cast<std::size_t>(*v))) {
        throw ParseError(line_no, "expected a positive integer, got '" + std::string(token) + "'");
    }
    return static_cast<std::size_t>(*v);
}

} // namespace

SparseMatrix read_matrix_market(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    bool symmetric = false;
    bool have_size = false;
    std::size_t n = 0;
    std::size_t declared_nnz = 0;
    std::vector<Triplet> entries;

    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty()) {
            continue;
        }
        if (body.starts_with("%%MatrixMarket") || body.starts_with("%%matrixmarket")) {
            const auto banner = lowercase(std::string(body));
            if (banner.find("coordinate") == std::string::npos) {
                throw ParseError(line_no, "only coordinate Matrix Market files are supported");
            }
            if (banner.find("complex") != std::string::npos) {
                throw ParseError(line_no, "complex matrices are not supported");
            }
            symmetric = banner.find("symmetric") != std::string::npos;
            continue;
        }
        if (body.front() == '%') {
            continue;
        }
        const auto tokens = split_ws(body);
        if (!have_size) {
            if (tokens.size() != 3) {
                throw ParseError(line_no, "expected size line 'rows cols nnz'");
            }
            const auto rows = parse_index(tokens[0], line_no);
            const auto cols = parse_index(tokens[1], line_no);
            const auto nnz = parse_double(tokens[2]);
            if (rows != cols) {
                throw ParseError(line_no, "matrix must be square");
            }
            if (!nnz || *nnz < 0.0) {
                throw ParseError(line_no, "invalid nonzero count");
            }
            n = rows;
            declared_nnz = static_cast<std::size_t>(*nnz);
            have_size = true;
            continue;
        }
        if (tokens.size() != 3) {
            throw ParseError(line_no, "expected entry 'i j value'");
        }
        const auto i = parse_index(tokens[0], line_no);
        const auto j = parse_index(tokens[1], line_no);
        const auto value = parse_double(tokens[2]);
        if (!value) {
            throw ParseError(line_no, "invalid value '" + std::string(tokens[2]) + "'");
        }
        if (i > n || j > n) {
            throw ParseError(line_no, "entry index outside declared dimension");
        }
        entries.push_back({i - 1, j - 1, *value});
        if (symmetric && i != j) {
            entries.push_back({j - 1, i - 1, *value});
        }
    }
    if (!have_size) {
        throw ParseError(line_no, "missing size line");
    }
    const auto stored = symmetric
        ? static_cast<std::size_t>(std::count_if(entries.begin(), entries.end(),
                                                 [](const Triplet& t) { return t.row >= t.col; }))
        : entries.size();
    if (stored != declared_nnz) {
        throw ParseError(line_no, "declared " + std::to_string(declared_nnz) + " entries, found " +
                                      std::to_string(stored));
    }
    return SparseMatrix::from_triplets(n, entries);
}

SparseMatrix read_matrix_market_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open matrix file '" + path + "'");
    }
    return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& a) {
    out << "%%MatrixMarket matrix coordinate real general\n";
    out << a.n() << ' ' << a.n() << ' ' << a.nnz() << '\n';
    const auto starts = a.row_starts();
    const auto cols = a.col_indices();
    const auto vals = a.values();
    for (std::size_t i = 0; i < a.n(); ++i) {
        for (std::size_t k = starts[i]; k < starts[i + 1]; ++k) {
            out << i + 1 << ' ' << cols[k] + 1 << ' ' << format_double(vals[k]) << '\n';
        }
    }
}

Vector read_vector(std::istream& in) {
    Vector v;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto body = trim(line);
        if (body.empty() || body.front() == '%' || body.front() == '#') {
            continue;
        }
        const auto value = parse_double(body);
        if (!value) {
            throw ParseError(line_no, "expected one real per line, got '" + std::string(body) + "'");
        }
        v.push_back(*value);
    }
    return v;
}

Vector read_vector_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open vector file '" + path + "'");
    }
    return read_vector(in);
}

void write_vector(std::ostream& out, std::span<const double> v) {
    for (const double x : v) {
        out << format_double(x) << '\n';
    }
}

} // namespace qpf::sparse
