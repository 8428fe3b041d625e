#include "qpf/complexity.hpp"

#include "qpf/error.hpp"
#include "qpf/numfmt.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

namespace qpf::complexity {

namespace {

bool iequals(std::string_view a, std::string_view b) {
    return a.size() == b.size() &&
           std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
               return std::toupper(static_cast<unsigned char>(x)) == std::toupper(static_cast<unsigned char>(y));
           });
}

double cube(double x) {
    return x * x * x;
}

double check_positive(double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) {
        throw DomainError(std::string(what) + " must be a positive finite number, got " + format_double(v));
    }
    return v;
}

} // namespace

std::string_view model_name(Model model) {
    switch (model) {
    case Model::cg:
        return "CG";
    case Model::hhl_e2e:
        return "HHL_E2E";
    case Model::hhl_optimistic:
        return "HHL_OPTIMISTIC";
    case Model::vtaa_e2e:
        return "VTAA_E2E";
    case Model::vtaa_optimistic:
        return "VTAA_OPTIMISTIC";
    case Model::quantum_lower_bound:
        return "QUANTUM_LOWER_BOUND";
    case Model::fdlf_classical:
        return "FDLF_CLASSICAL";
    }
    throw DomainError("unknown complexity model");
}

std::optional<Model> parse_model(std::string_view name) {
    for (const auto m : kAllModels) {
        if (iequals(name, model_name(m))) {
            return m;
        }
    }
    return std::nullopt;
}

double Params::effective_kappa() const {
    return beta ? std::pow(n, *beta) : kappa;
}

void validate(const Params& p) {
    check_positive(p.n, "N");
    check_positive(p.s, "s");
    if (p.beta) {
        if (!(*p.beta >= 0.0) || !std::isfinite(*p.beta)) {
            throw DomainError("beta must be a finite value >= 0");
        }
    } else {
        check_positive(p.kappa, "kappa");
    }
    if (!(p.eps > 0.0 && p.eps <= 1.0)) {
        throw DomainError("eps must lie in (0, 1], got " + format_double(p.eps));
    }
    if (p.d) {
        check_positive(*p.d, "D");
        if (*p.d > p.n) {
            throw DomainError("readout level D must not exceed N");
        }
    }
}

double eval_model(Model model, const Params& p) {
    validate(p);
    const double n = p.n;
    const double s = p.s;
    const double k = p.effective_kappa();
    const double eps = p.eps;
    const double d = p.readout();
    const double ln_n = std::log(n);
    const double ln_inv_eps = std::log(1.0 / eps);
    const double state_prep = p.qram ? ln_n : n;

    switch (model) {
    case Model::cg:
        return s * n * std::sqrt(k) * ln_n * ln_inv_eps;
    case Model::hhl_e2e:
        return (d / eps) * (k * state_prep + ln_n * k * k * s * s / eps);
    case Model::hhl_optimistic:
        return s * s * k * k * d * ln_n / (eps * eps);
    case Model::vtaa_e2e:
        return (d / eps) * (k * state_prep + ln_n * k * cube(std::log(k)) * s * s / eps);
    case Model::vtaa_optimistic:
        return s * s * k * cube(std::log(k)) * d * ln_n / (eps * eps);
    case Model::quantum_lower_bound:
        return k * d * ln_inv_eps / eps;
    case Model::fdlf_classical:
        return n * ln_n * std::sqrt(k) * s * ln_inv_eps;
    }
    throw DomainError("unknown complexity model");
}

std::vector<double> geometric_grid(double n_min, double n_max, std::size_t steps) {
    check_positive(n_min, "n_min");
    check_positive(n_max, "n_max");
    if (n_max < n_min) {
        throw DomainError("grid bounds must be ascending");
    }
    if (steps == 0) {
        throw DomainError("grid needs at least one step");
    }
    std::vector<double> grid;
    grid.reserve(steps);
    const double lo = std::log(n_min);
    const double hi = std::log(n_max);
    for (std::size_t i = 0; i < steps; ++i) {
        const double t = steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(steps - 1);
        const double value = std::max(1.0, std::round(std::exp(lo + t * (hi - lo))));
        if (grid.empty() || value > grid.back()) {
            grid.push_back(value);
        }
    }
    return grid;
}

std::vector<CurvePoint> model_curve(Model model, const Params& base, std::span<const double> grid) {
    std::vector<CurvePoint> curve;
    curve.reserve(grid.size());
    for (const double n : grid) {
        Params p = base;
        p.n = n;
        curve.push_back({n, eval_model(model, p)});
    }
    return curve;
}

std::optional<double> crossover(const CostFn& cost_a, const CostFn& cost_b, std::span<const double> grid) {
    if (grid.empty()) {
        throw DomainError("crossover: empty N range");
    }
    if (!std::is_sorted(grid.begin(), grid.end())) {
        throw DomainError("crossover: N range must be ascending");
    }
    for (const double n : grid) {
        if (cost_b(n) < cost_a(n)) {
            return n;
        }
    }
    return std::nullopt;
}

std::optional<double> crossover(Model a, Model b, const Params& base, std::span<const double> grid) {
    auto at = [&base](Model m) {
        return [m, &base](double n) {
            Params p = base;
            p.n = n;
            return eval_model(m, p);
        };
    };
    return crossover(at(a), at(b), grid);
}

std::string_view variant_name(Variant variant) {
    return variant == Variant::hhl ? "HHL" : "VTAA";
}

std::optional<Variant> parse_variant(std::string_view name) {
    if (iequals(name, "HHL")) {
        return Variant::hhl;
    }
    if (iequals(name, "VTAA")) {
        return Variant::vtaa;
    }
    return std::nullopt;
}

PqaCheck pqa_condition(Variant variant, double d, double kappa, double n, double s, double threshold) {
    check_positive(d, "D");
    check_positive(kappa, "kappa");
    check_positive(n, "N");
    check_positive(s, "s");
    check_positive(threshold, "threshold");
    const double kappa_term =
        variant == Variant::hhl ? kappa * std::sqrt(kappa) : std::sqrt(kappa) * cube(std::log(kappa));
    PqaCheck check;
    check.ratio = d * kappa_term * s / n;
    check.holds = check.ratio < threshold;
    return check;
}

double kappa_upper_bound(double n, double d, double s, Variant variant, double threshold) {
    check_positive(n, "N");
    check_positive(d, "D");
    check_positive(s, "s");
    check_positive(threshold, "threshold");
    const double target = threshold * n / (d * s);
    if (variant == Variant::hhl) {
        return std::cbrt(target * target);
    }

    // sqrt(k) ln^3 k is increasing on k > 1; bisect in ln k.
    auto f = [](double ln_k) { return std::exp(0.5 * ln_k) * cube(ln_k); };
    double lo = 0.0;
    double hi = std::log(1e15);
    if (!(f(hi) > target)) {
        throw DomainError("kappa_upper_bound: no VTAA solution below kappa = 1e15 for target " +
                          format_double(target));
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < target ? lo : hi) = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

ExponentFit fit_exponent(std::span<const CurvePoint> points) {
    if (points.size() < 3) {
        throw DomainError("fit_exponent: need at least 3 points, got " + std::to_string(points.size()));
    }
    double mean_x = 0.0;
    double mean_y = 0.0;
    for (const auto& pt : points) {
        if (!(pt.n > 0.0) || !(pt.cost > 0.0)) {
            throw DomainError("fit_exponent: points must be positive");
        }
        mean_x += std::log(pt.n);
        mean_y += std::log(pt.cost);
    }
    const auto count = static_cast<double>(points.size());
    mean_x /= count;
    mean_y /= count;

    double sxx = 0.0;
    double sxy = 0.0;
    double syy = 0.0;
    for (const auto& pt : points) {
        const double dx = std::log(pt.n) - mean_x;
        const double dy = std::log(pt.cost) - mean_y;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) {
        throw DomainError("fit_exponent: all points share the same N");
    }
    ExponentFit fit;
    fit.beta = sxy / sxx;
    double ss_res = 0.0;
    for (const auto& pt : points) {
        const double r = std::log(pt.cost) - mean_y - fit.beta * (std::log(pt.n) - mean_x);
        ss_res += r * r;
    }
    fit.r_squared = syy == 0.0 ? 1.0 : 1.0 - ss_res / syy;
    return fit;
}

} // namespace qpf::complexity
