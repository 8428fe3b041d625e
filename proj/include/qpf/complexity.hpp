#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

/// Asymptotic cost models for classical and quantum DC power flow.
///
/// Every hidden big-O constant is 1 and every log is natural. The numbers are
/// dimensionless scaling indicators for comparing growth rates; they are not
/// runtime predictions.
namespace qpf::complexity {

enum class Model {
    cg,
    hhl_e2e,
    hhl_optimistic,
    vtaa_e2e,
    vtaa_optimistic,
    quantum_lower_bound,
    fdlf_classical,
};

inline constexpr std::array<Model, 7> kAllModels = {
    Model::cg,           Model::hhl_e2e,           Model::hhl_optimistic,      Model::vtaa_e2e,
    Model::vtaa_optimistic, Model::quantum_lower_bound, Model::fdlf_classical,
};

/// Upper-case identifier, e.g. "HHL_OPTIMISTIC".
std::string_view model_name(Model model);
/// Case-insensitive inverse of model_name.
std::optional<Model> parse_model(std::string_view name);

struct Params {
    /// System dimension N (real so that continuous sweeps are possible).
    double n = 1.0;
    /// Sparsity: maximum nonzeros per row.
    double s = 1.0;
    /// Condition number; ignored when `beta` is set.
    double kappa = 1.0;
    /// Target error, in (0, 1].
    double eps = 1e-6;
    /// Readout level D; empty means full readout, D = N.
    std::optional<double> d;
    /// State preparation through QRAM (T_b = ln N) instead of an arbitrary-state circuit (T_b = N).
    bool qram = false;
    /// When set, kappa = N^beta.
    std::optional<double> beta;

    double readout() const { return d.value_or(n); }
    double effective_kappa() const;
};

/// Throws DomainError unless n, s, kappa > 0, eps in (0, 1], 0 < D <= N and beta >= 0.
void validate(const Params& p);

/// Cost of `model` at `p`:
///   CG               s N sqrt(k) ln N ln(1/eps)
///   HHL_E2E          (D/eps) (k T_b + ln N k^2 s^2 / eps)
///   HHL_OPTIMISTIC   s^2 k^2 D ln N / eps^2
///   VTAA_E2E         (D/eps) (k T_b + ln N k ln^3 k s^2 / eps)
///   VTAA_OPTIMISTIC  s^2 k ln^3 k D ln N / eps^2
///   LOWER_BOUND      k D ln(1/eps) / eps
///   FDLF_CLASSICAL   N ln N sqrt(k) s ln(1/eps)
/// with T_b = ln N under QRAM and N otherwise.
double eval_model(Model model, const Params& p);

struct CurvePoint {
    double n = 0.0;
    double cost = 0.0;
};

/// `steps` points spaced geometrically on [n_min, n_max], rounded to integers
/// and deduplicated. A single step yields {n_min}.
std::vector<double> geometric_grid(double n_min, double n_max, std::size_t steps);

/// Evaluates `model` on each grid point with p.n replaced by the grid value.
std::vector<CurvePoint> model_curve(Model model, const Params& base, std::span<const double> grid);

using CostFn = std::function<double(double n)>;

/// Smallest grid N with cost_b(N) < cost_a(N), scanning in order.
std::optional<double> crossover(const CostFn& cost_a, const CostFn& cost_b, std::span<const double> grid);
std::optional<double> crossover(Model a, Model b, const Params& base, std::span<const double> grid);

enum class Variant { hhl, vtaa };

std::string_view variant_name(Variant variant);
std::optional<Variant> parse_variant(std::string_view name);

inline constexpr double kDefaultPqaThreshold = 0.1;

struct PqaCheck {
    double ratio = 0.0;
    bool holds = false;
};

/// Practical-advantage test: HHL ratio D k^{3/2} s / N, VTAA ratio
/// D sqrt(k) ln^3 k s / N; holds when the ratio is strictly below `threshold`.
PqaCheck pqa_condition(Variant variant, double d, double kappa, double n, double s,
                       double threshold = kDefaultPqaThreshold);

/// Largest kappa for which the ratio reaches `threshold`. Closed form for HHL;
/// bisection over (1, 1e15) for VTAA, throwing DomainError if no root exists.
double kappa_upper_bound(double n, double d, double s, Variant variant,
                         double threshold = kDefaultPqaThreshold);

struct ExponentFit {
    double beta = 0.0;
    double r_squared = 0.0;
};

/// Least-squares slope of ln(cost) against ln(n). Needs at least 3 points,
/// all positive, with at least two distinct n.
ExponentFit fit_exponent(std::span<const CurvePoint> points);

} // namespace qpf::complexity
