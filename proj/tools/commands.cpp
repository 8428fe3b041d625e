#include "commands.hpp"

#include "qpf/cg.hpp"
#include "qpf/complexity.hpp"
#include "qpf/error.hpp"
#include "qpf/hhl_sim.hpp"
#include "qpf/matrix_market.hpp"
#include "qpf/netmodel.hpp"
#include "qpf/numfmt.hpp"
#include "qpf/spectra.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cctype>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <thread>

namespace qpf::cli {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

/// Bad flags or flag combinations; maps to exit code 2.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct GlobalOptions {
    std::string out_path;
    std::string format = "csv";
    std::uint64_t seed = spectra::EigOptions{}.seed;
    unsigned jobs = 1;
};

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string quoted = "\"";
    for (const char c : s) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    return quoted + '"';
}

std::string join_csv(const std::vector<std::string>& fields) {
    std::string line;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i > 0) {
            line += ',';
        }
        line += csv_field(fields[i]);
    }
    return line;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields(1);
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                fields.back() += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                fields.back() += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.emplace_back();
        } else if (c != '\r') {
            fields.back() += c;
        }
    }
    for (auto& f : fields) {
        f = std::string(trim(f));
    }
    return fields;
}

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    std::optional<std::size_t> column(std::string_view name) const {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (header[i] == name) {
                return i;
            }
        }
        return std::nullopt;
    }
};

/// First non-blank, non-'#' line is the header.
CsvTable read_csv_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw Error("cannot open " + path);
    }
    CsvTable table;
    std::string line;
    bool have_header = false;
    while (std::getline(in, line)) {
        const auto t = trim(line);
        if (t.empty() || t.front() == '#') {
            continue;
        }
        auto fields = split_csv_line(line);
        if (!have_header) {
            table.header = std::move(fields);
            have_header = true;
        } else {
            table.rows.push_back(std::move(fields));
        }
    }
    return table;
}

double parse_number(const std::string& token, const std::string& what) {
    const auto v = parse_double(token);
    if (!v) {
        throw Error("invalid number '" + token + "' in " + what);
    }
    return *v;
}

std::string upper(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> items;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto t = trim(item);
        if (!t.empty()) {
            items.emplace_back(t);
        }
    }
    return items;
}

std::string fmt(double v) {
    return format_double(v + 0.0);
}

/// Adding 0.0 turns -0 into +0 so output never shows negative zeros.
json number_array(std::span<const double> v) {
    json a = json::array();
    for (const double x : v) {
        a.push_back(x + 0.0);
    }
    return a;
}

// ---------------------------------------------------------------- analyze

struct AnalyzeRow {
    std::string name;
    std::optional<spectra::SpectralReport> report;
    std::string error;
};

std::vector<std::string> expand_paths(const std::vector<std::string>& inputs) {
    std::vector<std::string> files;
    for (const auto& p : inputs) {
        std::error_code ec;
        if (fs::is_directory(p, ec)) {
            std::vector<std::string> found;
            for (const auto& entry : fs::directory_iterator(p)) {
                if (entry.is_regular_file() && entry.path().extension() == ".m") {
                    found.push_back(entry.path().string());
                }
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.push_back(p);
        }
    }
    return files;
}

int cmd_analyze(const GlobalOptions& g, const std::vector<std::string>& inputs, double eig_tol, std::ostream& out,
                std::ostream& err) {
    const auto files = expand_paths(inputs);
    std::vector<AnalyzeRow> rows(files.size());
    spectra::EigOptions eig;
    eig.tol = eig_tol;
    eig.seed = g.seed;

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < files.size(); i = next++) {
            auto& row = rows[i];
            row.name = fs::path(files[i]).stem().string();
            try {
                const auto net = net::parse_case_file(files[i]);
                row.name = net.name;
                row.report = spectra::analyze_case(net, eig);
            } catch (const std::exception& e) {
                row.error = files[i] + ": " + e.what();
            }
        }
    };
    const unsigned jobs = g.jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : g.jobs;
    std::vector<std::thread> pool;
    for (unsigned t = 1; t < std::min<std::size_t>(jobs, files.size()); ++t) {
        pool.emplace_back(worker);
    }
    worker();
    for (auto& t : pool) {
        t.join();
    }

    bool failed = false;
    if (g.format == "json") {
        json a = json::array();
        for (const auto& row : rows) {
            json o;
            o["name"] = row.name;
            if (row.report) {
                const auto& r = *row.report;
                o["n"] = r.n;
                o["s_max"] = r.s_max;
                o["s_avg"] = r.s_avg;
                o["lambda_min"] = r.lambda_min;
                o["lambda_max"] = r.lambda_max;
                o["kappa"] = r.kappa;
                o["kappa_1norm_bound"] = r.kappa_lower_bound_1norm;
                o["injection_density"] = r.injection_density;
            } else {
                o["error"] = row.error;
            }
            a.push_back(std::move(o));
        }
        out << a.dump(2) << '\n';
    } else {
        out << "name,n,s_max,s_avg,lambda_min,lambda_max,kappa,kappa_1norm_bound,injection_density,error\n";
        for (const auto& row : rows) {
            if (row.report) {
                const auto& r = *row.report;
                out << join_csv({row.name, std::to_string(r.n), std::to_string(r.s_max), fmt(r.s_avg),
                                 fmt(r.lambda_min), fmt(r.lambda_max), fmt(r.kappa), fmt(r.kappa_lower_bound_1norm),
                                 fmt(r.injection_density), ""})
                    << '\n';
            } else {
                out << join_csv({row.name, "", "", "", "", "", "", "", "", row.error}) << '\n';
            }
        }
    }
    for (const auto& row : rows) {
        if (!row.report) {
            err << "error: " << row.error << '\n';
            failed = true;
        }
    }
    return failed ? kExitFailure : kExitOk;
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
    std::string case_path;
    std::string warm_path;
    std::string stats_path;
    double tol = 1e-10;
    std::size_t max_iter = 10000;
    std::optional<std::int64_t> slack;
    bool degrees = false;
};

/// Reads a "bus,angle_rad" or "bus,angle_deg" table into reduced-row order.
sparse::Vector read_warm_start(const std::string& path, const net::ReducedSystem& sys) {
    const auto table = read_csv_file(path);
    const auto bus_col = table.column("bus");
    auto angle_col = table.column("angle_rad");
    double scale = 1.0;
    if (!angle_col) {
        angle_col = table.column("angle_deg");
        scale = std::numbers::pi / 180.0;
    }
    if (!bus_col || !angle_col) {
        throw Error(path + ": warm start needs columns bus and angle_rad (or angle_deg)");
    }
    sparse::Vector x0(sys.n(), 0.0);
    std::vector<bool> seen(sys.n(), false);
    for (const auto& row : table.rows) {
        if (row.size() <= std::max(*bus_col, *angle_col)) {
            throw Error(path + ": short row");
        }
        const double id = parse_number(row[*bus_col], path);
        const auto bus = static_cast<net::BusId>(id);
        if (bus == sys.slack_id) {
            continue;
        }
        const auto it = sys.bus_row.find(bus);
        if (it == sys.bus_row.end()) {
            throw Error(path + ": unknown bus " + row[*bus_col]);
        }
        x0[it->second] = scale * parse_number(row[*angle_col], path);
        seen[it->second] = true;
    }
    for (std::size_t r = 0; r < sys.n(); ++r) {
        if (!seen[r]) {
            throw Error(path + ": no angle for bus " + std::to_string(sys.row_bus[r]));
        }
    }
    return x0;
}

int cmd_solve(const GlobalOptions& g, const SolveArgs& args, std::ostream& out, std::ostream& err) {
    const auto net = net::parse_case_file(args.case_path);
    const auto sys = net::build_reduced_system(net, args.slack);

    sparse::CGOptions opts;
    opts.rel_tol = args.tol;
    opts.max_iter = args.max_iter;
    if (!args.warm_path.empty()) {
        opts.x0 = read_warm_start(args.warm_path, sys);
    }
    spectra::EigOptions eig;
    eig.seed = g.seed;
    const double kappa = spectra::condition_number(sys.a, eig);
    opts.kappa = kappa;
    const auto result = sparse::cg_solve(sys.a, sys.b, opts);

    json stats;
    stats["case"] = net.name;
    stats["n"] = sys.n();
    stats["slack"] = sys.slack_id;
    stats["tol"] = args.tol;
    stats["max_iter"] = args.max_iter;
    stats["iterations"] = result.iterations;
    stats["converged"] = result.converged;
    stats["kappa"] = kappa;
    stats["bound_iterations"] = result.bound_iterations ? json(*result.bound_iterations) : json(nullptr);
    stats["residual_history"] = number_array(result.residual_history);

    const double unit = args.degrees ? 180.0 / std::numbers::pi : 1.0;
    const std::string angle_name = args.degrees ? "angle_deg" : "angle_rad";
    auto angle_of = [&](const net::Bus& bus) {
        if (bus.id == sys.slack_id) {
            return 0.0;
        }
        return unit * result.x[sys.bus_row.at(bus.id)];
    };

    if (g.format == "json") {
        json doc;
        json angles = json::array();
        for (const auto& bus : net.buses) {
            angles.push_back({{"bus", bus.id}, {angle_name, angle_of(bus)}});
        }
        doc["angles"] = std::move(angles);
        doc["stats"] = stats;
        out << doc.dump(2) << '\n';
    } else {
        out << "bus," << angle_name << '\n';
        for (const auto& bus : net.buses) {
            out << bus.id << ',' << fmt(angle_of(bus)) << '\n';
        }
    }
    if (!args.stats_path.empty()) {
        std::ofstream s(args.stats_path);
        if (!s) {
            throw Error("cannot write " + args.stats_path);
        }
        s << stats.dump(2) << '\n';
    } else if (g.format != "json") {
        err << stats.dump() << '\n';
    }
    if (!result.converged) {
        err << "error: CG did not converge in " << result.iterations << " iterations\n";
        return kExitFailure;
    }
    return kExitOk;
}

// ------------------------------------------------------------- complexity

struct ComplexityArgs {
    std::string models = "CG,HHL_OPTIMISTIC,VTAA_OPTIMISTIC";
    double n_min = 1e2;
    double n_max = 1e6;
    std::size_t n_steps = 9;
    std::optional<double> beta;
    std::optional<double> kappa;
    double s = 10.0;
    double eps = 1e-2;
    std::optional<double> d;
    bool qram = false;
};

int cmd_complexity(const GlobalOptions& g, const ComplexityArgs& args, std::ostream& out) {
    std::vector<complexity::Model> models;
    for (const auto& name : split_list(args.models)) {
        const auto m = complexity::parse_model(name);
        if (!m) {
            throw UsageError("unknown model '" + name + "'");
        }
        models.push_back(*m);
    }
    if (models.empty()) {
        throw UsageError("--models is empty");
    }
    if (args.beta && args.kappa) {
        throw UsageError("--beta and --kappa are mutually exclusive");
    }

    complexity::Params base;
    base.s = args.s;
    base.eps = args.eps;
    base.d = args.d;
    base.qram = args.qram;
    if (args.kappa) {
        base.kappa = *args.kappa;
    } else {
        base.beta = args.beta.value_or(2.0);
    }

    std::vector<double> grid;
    std::vector<std::pair<complexity::Model, complexity::Params>> points;
    try {
        grid = complexity::geometric_grid(args.n_min, args.n_max, args.n_steps);
        for (const auto m : models) {
            for (const double n : grid) {
                auto p = base;
                p.n = n;
                complexity::validate(p);
                points.emplace_back(m, p);
            }
        }
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }

    if (g.format == "json") {
        json a = json::array();
        for (const auto& [m, p] : points) {
            a.push_back({{"model", complexity::model_name(m)},
                         {"N", p.n},
                         {"s", p.s},
                         {"kappa", p.effective_kappa()},
                         {"eps", p.eps},
                         {"D", p.readout()},
                         {"cost", complexity::eval_model(m, p)}});
        }
        out << a.dump(2) << '\n';
    } else {
        out << "model,N,s,kappa,eps,D,cost\n";
        for (const auto& [m, p] : points) {
            out << complexity::model_name(m) << ',' << fmt(p.n) << ',' << fmt(p.s) << ',' << fmt(p.effective_kappa())
                << ',' << fmt(p.eps) << ',' << fmt(p.readout()) << ',' << fmt(complexity::eval_model(m, p)) << '\n';
        }
    }
    return kExitOk;
}

// -------------------------------------------------------------------- pqa

struct PqaArgs {
    std::string d_list = "1,10,100";
    double s = 10.0;
    double n_min = 1e2;
    double n_max = 1e8;
    std::size_t n_steps = 13;
    std::string variants = "HHL,VTAA";
    double threshold = complexity::kDefaultPqaThreshold;
};

int cmd_pqa(const GlobalOptions& g, const PqaArgs& args, std::ostream& out) {
    std::vector<complexity::Variant> variants;
    for (const auto& name : split_list(args.variants)) {
        const auto v = complexity::parse_variant(name);
        if (!v) {
            throw UsageError("unknown variant '" + name + "'");
        }
        variants.push_back(*v);
    }
    std::vector<double> ds;
    for (const auto& item : split_list(args.d_list)) {
        const auto v = parse_double(item);
        if (!v || !(*v > 0.0)) {
            throw UsageError("invalid --d entry '" + item + "'");
        }
        ds.push_back(*v);
    }
    if (variants.empty() || ds.empty()) {
        throw UsageError("--variant and --d need at least one entry");
    }
    if (!(args.s > 0.0) || !(args.threshold > 0.0)) {
        throw UsageError("--s and --threshold must be positive");
    }
    std::vector<double> grid;
    try {
        grid = complexity::geometric_grid(args.n_min, args.n_max, args.n_steps);
    } catch (const DomainError& e) {
        throw UsageError(e.what());
    }

    struct Row {
        complexity::Variant variant;
        double n;
        double d;
        double kappa_max;
    };
    std::vector<Row> rows;
    for (const auto v : variants) {
        for (const double d : ds) {
            for (const double n : grid) {
                if (d > n) {
                    continue;
                }
                double k = std::numeric_limits<double>::infinity();
                try {
                    k = complexity::kappa_upper_bound(n, d, args.s, v, args.threshold);
                } catch (const DomainError&) {
                    // No VTAA root below the bisection ceiling: the bound is effectively unlimited.
                }
                rows.push_back({v, n, d, k});
            }
        }
    }

    if (g.format == "json") {
        json a = json::array();
        for (const auto& r : rows) {
            a.push_back({{"model", complexity::variant_name(r.variant)},
                         {"N", r.n},
                         {"D", r.d},
                         {"s", args.s},
                         {"kappa_max", std::isfinite(r.kappa_max) ? json(r.kappa_max) : json("inf")}});
        }
        out << a.dump(2) << '\n';
    } else {
        out << "model,N,D,s,kappa_max\n";
        for (const auto& r : rows) {
            out << complexity::variant_name(r.variant) << ',' << fmt(r.n) << ',' << fmt(r.d) << ',' << fmt(args.s)
                << ',' << fmt(r.kappa_max) << '\n';
        }
    }
    return kExitOk;
}

// ----------------------------------------------------------------- hhlsim

struct HhlArgs {
    std::string case_path;
    std::string matrix_path;
    std::string rhs_path;
    int n_clock = 6;
    std::optional<double> t0;
    std::optional<double> c_rot;
    std::optional<std::int64_t> slack;
};

int cmd_hhlsim(const HhlArgs& args, std::ostream& out, std::ostream& err) {
    const bool from_case = !args.case_path.empty();
    const bool from_matrix = !args.matrix_path.empty() || !args.rhs_path.empty();
    if (from_case == from_matrix) {
        throw UsageError("give either a case file or both --matrix and --rhs");
    }
    if (from_matrix && (args.matrix_path.empty() || args.rhs_path.empty())) {
        throw UsageError("--matrix and --rhs must be given together");
    }
    if (args.n_clock < 1 || args.n_clock > 12) {
        throw UsageError("--n-clock must lie in [1, 12]");
    }

    sparse::SparseMatrix a_sparse;
    sparse::Vector b_vec;
    std::string name;
    if (from_case) {
        const auto net = net::parse_case_file(args.case_path);
        auto sys = net::build_reduced_system(net, args.slack);
        a_sparse = std::move(sys.a);
        b_vec = std::move(sys.b);
        name = net.name;
    } else {
        a_sparse = sparse::read_matrix_market_file(args.matrix_path);
        b_vec = sparse::read_vector_file(args.rhs_path);
        name = fs::path(args.matrix_path).stem().string();
    }
    const std::size_t n = a_sparse.n();
    if (n > hhl::kMaxDimension) {
        throw Error("hhlsim: system dimension " + std::to_string(n) + " exceeds the simulator limit of " +
                    std::to_string(hhl::kMaxDimension) + "; use solve for larger systems");
    }
    if (b_vec.size() != n) {
        throw DimensionMismatch(n, b_vec.size());
    }
    const auto dense = a_sparse.to_dense();
    Eigen::MatrixXd a(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = dense[i * n + j];
        }
    }
    const Eigen::VectorXd b = Eigen::Map<const Eigen::VectorXd>(b_vec.data(), static_cast<Eigen::Index>(n));
    const bool hermitized = !a_sparse.is_symmetric();
    const auto [a_h, b_h] = hhl::hermitize(a, b);

    const auto cfg = hhl::default_config(a_h, args.n_clock, args.t0, args.c_rot);
    const auto r = hhl::hhl_run(a_h, b_h, cfg);
    for (const auto& w : r.warnings) {
        err << "warning: " << w << '\n';
    }

    std::vector<double> re(static_cast<std::size_t>(r.x_tilde.size()));
    std::vector<double> im(re.size());
    for (Eigen::Index i = 0; i < r.x_tilde.size(); ++i) {
        re[static_cast<std::size_t>(i)] = r.x_tilde[i].real();
        im[static_cast<std::size_t>(i)] = r.x_tilde[i].imag();
    }
    std::vector<double> classical(r.classical_x.data(), r.classical_x.data() + r.classical_x.size());

    json doc;
    doc["name"] = name;
    doc["n"] = n;
    doc["n_clock"] = cfg.n_clock;
    doc["t0"] = cfg.t0;
    doc["t0_auto"] = !args.t0.has_value();
    doc["c_rot"] = cfg.c_rot;
    doc["hermitized"] = hermitized;
    doc["padded_dimension"] = r.padded_dimension;
    doc["success_prob"] = r.success_prob;
    doc["eps_h"] = r.eps_h;
    doc["fidelity"] = r.fidelity();
    doc["unitarity_error"] = r.unitarity_error;
    doc["repetitions_naive"] = r.repetitions_naive;
    doc["repetitions_boosted"] = r.repetitions_boosted;
    doc["x_tilde"] = number_array(re);
    doc["x_tilde_imag"] = number_array(im);
    doc["classical_x"] = number_array(classical);
    doc["warnings"] = r.warnings;
    out << doc.dump(2) << '\n';
    return kExitOk;
}

// -------------------------------------------------------------------- fit

struct FitArgs {
    std::string csv_path;
    std::string x_col = "N";
    std::string y_col = "cost";
    std::string model;
};

int cmd_fit(const GlobalOptions& g, const FitArgs& args, std::ostream& out) {
    const auto table = read_csv_file(args.csv_path);
    const auto x_col = table.column(args.x_col);
    const auto y_col = table.column(args.y_col);
    if (!x_col || !y_col) {
        throw UsageError(args.csv_path + ": missing column '" + (x_col ? args.y_col : args.x_col) + "'");
    }
    const auto model_col = table.column("model");
    if (!args.model.empty() && !model_col) {
        throw UsageError(args.csv_path + ": --model given but the table has no model column");
    }

    // Group by model unless a filter is given; tables without a model column form one group.
    std::map<std::string, std::vector<complexity::CurvePoint>> groups;
    std::vector<std::string> order;
    for (const auto& row : table.rows) {
        const std::string key = model_col && *model_col < row.size() ? row[*model_col] : "all";
        if (!args.model.empty() && upper(key) != upper(args.model)) {
            continue;
        }
        if (row.size() <= std::max(*x_col, *y_col)) {
            throw Error(args.csv_path + ": short row");
        }
        if (!groups.contains(key)) {
            order.push_back(key);
        }
        groups[key].push_back(
            {parse_number(row[*x_col], args.csv_path), parse_number(row[*y_col], args.csv_path)});
    }
    if (order.empty()) {
        throw UsageError(args.csv_path + ": fewer than 3 rows to fit");
    }
    for (const auto& key : order) {
        if (groups[key].size() < 3) {
            throw UsageError(args.csv_path + ": fewer than 3 rows to fit for '" + key + "'");
        }
    }

    if (g.format == "json") {
        json a = json::array();
        for (const auto& key : order) {
            const auto fit = complexity::fit_exponent(groups[key]);
            a.push_back({{"model", key}, {"beta", fit.beta}, {"r_squared", fit.r_squared}, {"points", groups[key].size()}});
        }
        out << a.dump(2) << '\n';
    } else {
        out << "model,beta,r_squared,points\n";
        for (const auto& key : order) {
            const auto fit = complexity::fit_exponent(groups[key]);
            out << join_csv({key, fmt(fit.beta), fmt(fit.r_squared), std::to_string(groups[key].size())}) << '\n';
        }
    }
    return kExitOk;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"DC power-flow linear-system toolkit: classical and quantum solver scaling"};
    app.name("qpf");
    app.require_subcommand(1);
    app.fallthrough();

    GlobalOptions g;
    app.add_option("--out,-o", g.out_path, "Write results to this file instead of stdout");
    app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--seed", g.seed, "Seed for randomized start vectors");
    app.add_option("--jobs,-j", g.jobs, "Worker threads for batch commands (0 = all cores)");

    std::vector<std::string> analyze_paths;
    double eig_tol = spectra::EigOptions{}.tol;
    auto* analyze = app.add_subcommand("analyze", "Spectral and sparsity report per case file");
    analyze->add_option("paths", analyze_paths, "Case files or directories of .m files")->required();
    analyze->add_option("--eig-tol", eig_tol, "Relative tolerance for extreme eigenvalues");

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve the DC power flow with conjugate gradients");
    solve->add_option("case", solve_args.case_path, "Case file")->required();
    solve->add_option("--warm", solve_args.warm_path, "Warm-start angles (CSV from a previous solve)");
    solve->add_option("--tol", solve_args.tol, "Relative residual tolerance");
    solve->add_option("--max-iter", solve_args.max_iter, "Iteration limit");
    solve->add_option("--slack", solve_args.slack, "Override the slack bus id");
    solve->add_flag("--degrees", solve_args.degrees, "Report angles in degrees");
    solve->add_option("--stats", solve_args.stats_path, "Write solver statistics JSON here");

    ComplexityArgs cx;
    auto* cx_cmd = app.add_subcommand("complexity", "Cost model curves over a geometric N grid");
    cx_cmd->add_option("--models", cx.models, "Comma-separated model names");
    cx_cmd->add_option("--n-min", cx.n_min, "Smallest system size");
    cx_cmd->add_option("--n-max", cx.n_max, "Largest system size");
    cx_cmd->add_option("--n-steps", cx.n_steps, "Grid points");
    cx_cmd->add_option("--beta", cx.beta, "kappa = N^beta (default 2 unless --kappa is given)");
    cx_cmd->add_option("--kappa", cx.kappa, "Fixed condition number");
    cx_cmd->add_option("--s", cx.s, "Sparsity");
    cx_cmd->add_option("--eps", cx.eps, "Target error");
    cx_cmd->add_option("--d", cx.d, "Readout level D (default N)");
    cx_cmd->add_flag("--qram", cx.qram, "Assume QRAM state preparation");

    PqaArgs pqa;
    auto* pqa_cmd = app.add_subcommand("pqa", "Largest kappa that keeps a practical quantum advantage");
    pqa_cmd->add_option("--d", pqa.d_list, "Comma-separated readout levels");
    pqa_cmd->add_option("--s", pqa.s, "Sparsity");
    pqa_cmd->add_option("--n-min", pqa.n_min, "Smallest system size");
    pqa_cmd->add_option("--n-max", pqa.n_max, "Largest system size");
    pqa_cmd->add_option("--n-steps", pqa.n_steps, "Grid points");
    pqa_cmd->add_option("--variant", pqa.variants, "Comma-separated: HHL, VTAA");
    pqa_cmd->add_option("--threshold", pqa.threshold, "Ratio below which the advantage holds");

    HhlArgs hhl_args;
    auto* hhl_cmd = app.add_subcommand("hhlsim", "Exact statevector HHL on a small system");
    hhl_cmd->add_option("case", hhl_args.case_path, "Case file");
    hhl_cmd->add_option("--matrix", hhl_args.matrix_path, "Matrix Market file");
    hhl_cmd->add_option("--rhs", hhl_args.rhs_path, "Right-hand side, one value per line");
    hhl_cmd->add_option("--n-clock", hhl_args.n_clock, "Clock qubits");
    hhl_cmd->add_option("--t0", hhl_args.t0, "Evolution time (default pi / lambda_max)");
    hhl_cmd->add_option("--c-rot", hhl_args.c_rot, "Rotation constant C (default: largest clock value <= lambda_min)");
    hhl_cmd->add_option("--slack", hhl_args.slack, "Override the slack bus id");

    FitArgs fit_args;
    auto* fit = app.add_subcommand("fit", "Least-squares log-log slope of a CSV table");
    fit->add_option("csv", fit_args.csv_path, "Input CSV")->required();
    fit->add_option("--x-col", fit_args.x_col, "Column holding x (default N)");
    fit->add_option("--y-col", fit_args.y_col, "Column holding y (default cost)");
    fit->add_option("--model", fit_args.model, "Only rows whose model column matches");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::Success& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\nRun with --help for more information.\n";
        return kExitUsage;
    }

    std::ofstream file;
    if (!g.out_path.empty()) {
        file.open(g.out_path);
        if (!file) {
            err << "error: cannot write " << g.out_path << '\n';
            return kExitFailure;
        }
    }
    std::ostream& sink = g.out_path.empty() ? out : file;

    try {
        if (analyze->parsed()) {
            return cmd_analyze(g, analyze_paths, eig_tol, sink, err);
        }
        if (solve->parsed()) {
            return cmd_solve(g, solve_args, sink, err);
        }
        if (cx_cmd->parsed()) {
            return cmd_complexity(g, cx, sink);
        }
        if (pqa_cmd->parsed()) {
            return cmd_pqa(g, pqa, sink);
        }
        if (hhl_cmd->parsed()) {
            return cmd_hhlsim(hhl_args, sink, err);
        }
        if (fit->parsed()) {
            return cmd_fit(g, fit_args, sink);
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
    return kExitUsage;
}

} // namespace qpf::cli
