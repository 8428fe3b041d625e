#pragma once

#include "qpf/sparse_matrix.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace qpf::net {

using BusId = std::int64_t;

enum class BusKind { slack, non_slack };

struct Bus {
    BusId id = 0;
    BusKind kind = BusKind::non_slack;
    /// Net real injection (generation minus load), per unit on the case base.
    double p_injection = 0.0;
};

struct Branch {
    BusId from_bus = 0;
    BusId to_bus = 0;
    /// 1/x, per unit.
    double susceptance = 0.0;
    bool in_service = true;
};

/// A validated network: unique bus ids, one slack bus, every branch endpoint
/// known, and a connected in-service branch graph.
struct NetworkCase {
    std::string name;
    double base_mva = 100.0;
    std::vector<Bus> buses;
    std::vector<Branch> branches;

    BusId slack_id() const;
    const Bus* find_bus(BusId id) const;
};

/// DCPF system A theta = p with the slack row and column removed.
struct ReducedSystem {
    sparse::SparseMatrix a;
    sparse::Vector b;
    /// Bus id for each matrix row.
    std::vector<BusId> row_bus;
    /// Inverse of row_bus.
    std::unordered_map<BusId, std::size_t> bus_row;
    BusId slack_id = 0;

    std::size_t n() const noexcept { return a.n(); }
};

/// Parses the MATPOWER-style text subset (baseMVA, bus, gen, branch tables).
///
/// Susceptances are 1/x. Injections are (sum Pg - Pd) / baseMVA. Throws
/// ParseError (with line number) on malformed text and NetworkError on unknown
/// bus references, non-positive reactance on an in-service branch, a missing
/// reference bus, or a disconnected in-service graph.
NetworkCase parse_case(std::string_view text, std::string name = "case");
NetworkCase parse_case_file(const std::string& path);

/// Checks the NetworkCase invariants, throwing NetworkError on the first violation.
void validate(const NetworkCase& net);

/// Builds the slack-reduced susceptance matrix and injection vector. Rows are
/// ordered by the position of the bus in `net.buses`. Parallel in-service
/// branches add; out-of-service branches are skipped.
ReducedSystem build_reduced_system(const NetworkCase& net, std::optional<BusId> slack = std::nullopt);

/// Fraction of non-slack buses with a nonzero injection.
double injection_density(const NetworkCase& net);

/// Full (unreduced) weighted Laplacian over all buses, in bus order.
sparse::SparseMatrix full_laplacian(const NetworkCase& net);

} // namespace qpf::net
