#include "qpf/netmodel.hpp"

#include "qpf/error.hpp"
#include "qpf/numfmt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

namespace qpf::net {

namespace {

// MATPOWER column positions (0-based) of the fields we read.
constexpr std::size_t kBusId = 0;
constexpr std::size_t kBusType = 1;
constexpr std::size_t kBusPd = 2;
constexpr std::size_t kGenBus = 0;
constexpr std::size_t kGenPg = 1;
constexpr std::size_t kBranchFrom = 0;
constexpr std::size_t kBranchTo = 1;
constexpr std::size_t kBranchX = 3;
constexpr std::size_t kBranchStatus = 10;

constexpr int kTypeReference = 3;
constexpr int kTypeIsolated = 4;

struct Row {
    std::vector<double> values;
    std::size_t line = 0;
};

struct RawTables {
    std::optional<double> base_mva;
    std::size_t base_mva_line = 0;
    std::vector<Row> bus;
    std::vector<Row> gen;
    std::vector<Row> branch;
};

std::string_view strip_comment(std::string_view line) {
    bool in_quote = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '\'') {
            in_quote = !in_quote;
        } else if (line[i] == '%' && !in_quote) {
            return line.substr(0, i);
        }
    }
    return line;
}

bool is_identifier_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
}

/// Accumulates numeric rows of one `[ ... ]` block.
class MatrixReader {
public:
    MatrixReader(std::vector<Row>* sink, std::string field) : sink_(sink), field_(std::move(field)) {}

    /// Consumes one (comment-stripped) line segment. Returns the text after the
    /// closing bracket once the block ends, std::nullopt while still inside.
    std::optional<std::string_view> feed(std::string_view segment, std::size_t line_no) {
        for (std::size_t i = 0; i < segment.size(); ++i) {
            const char c = segment[i];
            if (c == ']') {
                flush_token(line_no);
                flush_row(line_no);
                return segment.substr(i + 1);
            }
            if (c == ';') {
                flush_token(line_no);
                flush_row(line_no);
            } else if (c == ',' || std::isspace(static_cast<unsigned char>(c))) {
                flush_token(line_no);
            } else {
                token_.push_back(c);
            }
        }
        flush_token(line_no);
        flush_row(line_no);
        return std::nullopt;
    }

private:
    void flush_token(std::size_t line_no) {
        if (token_.empty()) {
            return;
        }
        if (sink_ != nullptr) {
            const auto v = parse_double(token_);
            if (!v) {
                throw ParseError(line_no, "invalid number '" + token_ + "' in mpc." + field_);
            }
            current_.values.push_back(*v);
            current_.line = line_no;
        }
        token_.clear();
    }

    void flush_row(std::size_t) {
        if (!current_.values.empty() && sink_ != nullptr) {
            sink_->push_back(std::move(current_));
        }
        current_ = Row{};
    }

    std::vector<Row>* sink_;
    std::string field_;
    std::string token_;
    Row current_;
};

void expect_statement_end(std::string_view rest, std::size_t line_no) {
    rest = trim(rest);
    if (!rest.empty() && rest.front() == ';') {
        rest = trim(rest.substr(1));
    }
    if (!rest.empty()) {
        throw ParseError(line_no, "unexpected text '" + std::string(rest) + "' after matrix");
    }
}

RawTables read_tables(std::string_view text) {
    RawTables tables;
    std::optional<MatrixReader> matrix;
    int cell_depth = 0;
    std::size_t open_line = 0;
    std::size_t line_no = 0;

    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto eol = text.find('\n', pos);
        const auto raw = text.substr(pos, eol == std::string_view::npos ? std::string_view::npos : eol - pos);
        pos = eol == std::string_view::npos ? text.size() + 1 : eol + 1;
        ++line_no;

        auto line = strip_comment(raw);

        if (cell_depth > 0) {
            for (const char c : line) {
                cell_depth += (c == '{') - (c == '}');
            }
            continue;
        }
        if (matrix) {
            if (auto rest = matrix->feed(line, line_no)) {
                expect_statement_end(*rest, line_no);
                matrix.reset();
            }
            continue;
        }

        line = trim(line);
        if (line.empty() || line == "end" || line.starts_with("function ") || line.starts_with("function\t")) {
            continue;
        }

        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw ParseError(line_no, "expected an assignment, got '" + std::string(line) + "'");
        }
        const auto lhs = trim(line.substr(0, eq));
        auto rhs = trim(line.substr(eq + 1));
        if (lhs.empty() || !std::all_of(lhs.begin(), lhs.end(),
                                        [](char c) { return is_identifier_char(c) || c == '.'; })) {
            throw ParseError(line_no, "invalid assignment target '" + std::string(lhs) + "'");
        }
        const std::string field = lhs.starts_with("mpc.") ? std::string(lhs.substr(4)) : std::string();

        if (!rhs.empty() && rhs.front() == '[') {
            std::vector<Row>* sink = nullptr;
            if (field == "bus") {
                sink = &tables.bus;
            } else if (field == "gen") {
                sink = &tables.gen;
            } else if (field == "branch") {
                sink = &tables.branch;
            }
            matrix.emplace(sink, field);
            open_line = line_no;
            if (auto rest = matrix->feed(rhs.substr(1), line_no)) {
                expect_statement_end(*rest, line_no);
                matrix.reset();
            }
            continue;
        }
        if (!rhs.empty() && rhs.front() == '{') {
            for (const char c : rhs) {
                cell_depth += (c == '{') - (c == '}');
            }
            open_line = line_no;
            continue;
        }
        if (field == "baseMVA") {
            if (rhs.ends_with(';')) {
                rhs.remove_suffix(1);
            }
            const auto v = parse_double(rhs);
            if (!v || !(*v > 0.0)) {
                throw ParseError(line_no, "baseMVA must be a positive number");
            }
            tables.base_mva = *v;
            tables.base_mva_line = line_no;
        }
    }
    if (matrix) {
        throw ParseError(open_line, "unterminated matrix (missing ']')");
    }
    if (cell_depth > 0) {
        throw ParseError(open_line, "unterminated cell array (missing '}')");
    }
    return tables;
}

double column(const Row& row, std::size_t index, const char* table, const char* name) {
    if (index >= row.values.size()) {
        throw ParseError(row.line, std::string("mpc.") + table + " row lacks column '" + name + "'");
    }
    return row.values[index];
}

BusId to_bus_id(double v, std::size_t line) {
    if (!(v >= 1.0) || v != std::floor(v) || v > 9.0e15) {
        throw ParseError(line, "bus id must be a positive integer, got " + format_double(v));
    }
    return static_cast<BusId>(v);
}

/// Union-find connectivity over in-service branches; buses are indexed by position.
bool is_connected(const NetworkCase& net, const std::unordered_map<BusId, std::size_t>& index) {
    const auto n = net.buses.size();
    if (n <= 1) {
        return true;
    }
    std::vector<std::size_t> parent(n);
    std::iota(parent.begin(), parent.end(), std::size_t{0});
    auto find = [&](std::size_t v) {
        while (parent[v] != v) {
            parent[v] = parent[parent[v]];
            v = parent[v];
        }
        return v;
    };
    std::size_t components = n;
    for (const auto& br : net.branches) {
        if (!br.in_service) {
            continue;
        }
        const auto a = find(index.at(br.from_bus));
        const auto b = find(index.at(br.to_bus));
        if (a != b) {
            parent[a] = b;
            --components;
        }
    }
    return components == 1;
}

std::unordered_map<BusId, std::size_t> bus_index(const NetworkCase& net) {
    std::unordered_map<BusId, std::size_t> index;
    index.reserve(net.buses.size());
    for (std::size_t i = 0; i < net.buses.size(); ++i) {
        if (!index.emplace(net.buses[i].id, i).second) {
            throw NetworkError("duplicate bus id " + std::to_string(net.buses[i].id));
        }
    }
    return index;
}

void check_branches(const NetworkCase& net, const std::unordered_map<BusId, std::size_t>& index) {
    for (const auto& br : net.branches) {
        for (const auto id : {br.from_bus, br.to_bus}) {
            if (!index.contains(id)) {
                throw NetworkError("branch " + std::to_string(br.from_bus) + "-" +
                                   std::to_string(br.to_bus) + " refers to unknown bus " +
                                   std::to_string(id));
            }
        }
        if (br.from_bus == br.to_bus) {
            throw NetworkError("branch connects bus " + std::to_string(br.from_bus) + " to itself");
        }
        if (br.in_service && !(br.susceptance > 0.0 && std::isfinite(br.susceptance))) {
            throw NetworkError("branch " + std::to_string(br.from_bus) + "-" +
                               std::to_string(br.to_bus) + " has non-positive susceptance");
        }
    }
}

} // namespace

BusId NetworkCase::slack_id() const {
    for (const auto& bus : buses) {
        if (bus.kind == BusKind::slack) {
            return bus.id;
        }
    }
    throw NetworkError("case '" + name + "' has no slack bus");
}

const Bus* NetworkCase::find_bus(BusId id) const {
    const auto it = std::find_if(buses.begin(), buses.end(), [id](const Bus& b) { return b.id == id; });
    return it == buses.end() ? nullptr : &*it;
}

void validate(const NetworkCase& net) {
    if (!(net.base_mva > 0.0)) {
        throw NetworkError("baseMVA must be positive");
    }
    if (net.buses.empty()) {
        throw NetworkError("case '" + net.name + "' has no buses");
    }
    const auto slack_count = std::count_if(net.buses.begin(), net.buses.end(),
                                           [](const Bus& b) { return b.kind == BusKind::slack; });
    if (slack_count != 1) {
        throw NetworkError("case '" + net.name + "' must have exactly one slack bus, found " +
                           std::to_string(slack_count));
    }
    const auto index = bus_index(net);
    check_branches(net, index);
    if (!is_connected(net, index)) {
        throw NetworkError("disconnected graph: in-service branches of '" + net.name +
                           "' do not connect all buses");
    }
}

NetworkCase parse_case(std::string_view text, std::string name) {
    const auto tables = read_tables(text);
    if (!tables.base_mva) {
        throw ParseError(0, "missing mpc.baseMVA");
    }

    NetworkCase net;
    net.name = std::move(name);
    net.base_mva = *tables.base_mva;

    std::unordered_map<BusId, std::size_t> index;
    std::vector<BusId> isolated;
    bool have_slack = false;
    for (const auto& row : tables.bus) {
        const auto id = to_bus_id(column(row, kBusId, "bus", "bus_i"), row.line);
        const auto type = column(row, kBusType, "bus", "type");
        const auto pd = column(row, kBusPd, "bus", "Pd");
        if (index.contains(id) || std::find(isolated.begin(), isolated.end(), id) != isolated.end()) {
            throw NetworkError("line " + std::to_string(row.line) + ": duplicate bus id " +
                               std::to_string(id));
        }
        if (type == kTypeIsolated) {
            isolated.push_back(id);
            continue;
        }
        Bus bus;
        bus.id = id;
        // Only the first reference bus is the slack; later type-3 rows are ordinary buses.
        if (type == kTypeReference && !have_slack) {
            bus.kind = BusKind::slack;
            have_slack = true;
        }
        bus.p_injection = -pd / net.base_mva;
        index.emplace(id, net.buses.size());
        net.buses.push_back(bus);
    }

    for (const auto& row : tables.gen) {
        const auto id = to_bus_id(column(row, kGenBus, "gen", "bus"), row.line);
        const auto pg = column(row, kGenPg, "gen", "Pg");
        const auto it = index.find(id);
        if (it == index.end()) {
            if (std::find(isolated.begin(), isolated.end(), id) != isolated.end()) {
                continue;
            }
            throw NetworkError("line " + std::to_string(row.line) + ": generator at unknown bus " +
                               std::to_string(id));
        }
        net.buses[it->second].p_injection += pg / net.base_mva;
    }

    for (const auto& row : tables.branch) {
        Branch br;
        br.from_bus = to_bus_id(column(row, kBranchFrom, "branch", "fbus"), row.line);
        br.to_bus = to_bus_id(column(row, kBranchTo, "branch", "tbus"), row.line);
        const auto x = column(row, kBranchX, "branch", "x");
        br.in_service = row.values.size() <= kBranchStatus || row.values[kBranchStatus] != 0.0;

        const bool touches_isolated =
            std::find(isolated.begin(), isolated.end(), br.from_bus) != isolated.end() ||
            std::find(isolated.begin(), isolated.end(), br.to_bus) != isolated.end();
        if (touches_isolated) {
            continue;
        }
        for (const auto id : {br.from_bus, br.to_bus}) {
            if (!index.contains(id)) {
                throw NetworkError("line " + std::to_string(row.line) + ": branch refers to unknown bus " +
                                   std::to_string(id));
            }
        }
        if (br.from_bus == br.to_bus) {
            throw NetworkError("line " + std::to_string(row.line) + ": branch connects bus " +
                               std::to_string(br.from_bus) + " to itself");
        }
        if (br.in_service && !(x > 0.0)) {
            throw NetworkError("line " + std::to_string(row.line) + ": branch " +
                               std::to_string(br.from_bus) + "-" + std::to_string(br.to_bus) +
                               " has non-positive reactance " + format_double(x));
        }
        br.susceptance = x != 0.0 ? 1.0 / x : 0.0;
        net.branches.push_back(br);
    }

    if (!have_slack && !net.buses.empty()) {
        throw NetworkError("case '" + net.name + "' declares no reference bus (type 3)");
    }
    validate(net);
    return net;
}

NetworkCase parse_case_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open case file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    auto name = path;
    if (const auto slash = name.find_last_of('/'); slash != std::string::npos) {
        name = name.substr(slash + 1);
    }
    if (const auto dot = name.find_last_of('.'); dot != std::string::npos && dot > 0) {
        name = name.substr(0, dot);
    }
    return parse_case(buf.str(), name);
}

ReducedSystem build_reduced_system(const NetworkCase& net, std::optional<BusId> slack) {
    validate(net);
    const BusId slack_id = slack.value_or(net.slack_id());
    if (net.find_bus(slack_id) == nullptr) {
        throw NetworkError("unknown slack bus id " + std::to_string(slack_id));
    }

    ReducedSystem sys;
    sys.slack_id = slack_id;
    for (const auto& bus : net.buses) {
        if (bus.id == slack_id) {
            continue;
        }
        sys.bus_row.emplace(bus.id, sys.row_bus.size());
        sys.row_bus.push_back(bus.id);
        sys.b.push_back(bus.p_injection);
    }

    std::vector<sparse::Triplet> entries;
    entries.reserve(4 * net.branches.size());
    for (const auto& br : net.branches) {
        if (!br.in_service) {
            continue;
        }
        const auto from = sys.bus_row.find(br.from_bus);
        const auto to = sys.bus_row.find(br.to_bus);
        const bool from_kept = from != sys.bus_row.end();
        const bool to_kept = to != sys.bus_row.end();
        if (from_kept) {
            entries.push_back({from->second, from->second, br.susceptance});
        }
        if (to_kept) {
            entries.push_back({to->second, to->second, br.susceptance});
        }
        if (from_kept && to_kept) {
            entries.push_back({from->second, to->second, -br.susceptance});
            entries.push_back({to->second, from->second, -br.susceptance});
        }
    }
    sys.a = sparse::SparseMatrix::from_triplets(sys.row_bus.size(), entries);
    return sys;
}

double injection_density(const NetworkCase& net) {
    if (net.buses.size() < 2) {
        return 0.0;
    }
    const auto slack = net.slack_id();
    const auto nonzero = std::count_if(net.buses.begin(), net.buses.end(), [slack](const Bus& b) {
        return b.id != slack && std::abs(b.p_injection) > 0.0;
    });
    return static_cast<double>(nonzero) / static_cast<double>(net.buses.size() - 1);
}

sparse::SparseMatrix full_laplacian(const NetworkCase& net) {
    const auto index = bus_index(net);
    std::vector<sparse::Triplet> entries;
    for (const auto& br : net.branches) {
        if (!br.in_service) {
            continue;
        }
        const auto i = index.at(br.from_bus);
        const auto j = index.at(br.to_bus);
        entries.push_back({i, i, br.susceptance});
        entries.push_back({j, j, br.susceptance});
        entries.push_back({i, j, -br.susceptance});
        entries.push_back({j, i, -br.susceptance});
    }
    return sparse::SparseMatrix::from_triplets(net.buses.size(), entries);
}

} // namespace qpf::net
