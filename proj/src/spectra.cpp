#include "qpf/spectra.hpp"

#include "qpf/cg.hpp"
#include "qpf/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

namespace qpf::spectra {

using sparse::SparseMatrix;
using sparse::Vector;

namespace {

void normalize(Vector& v) {
    const double norm = sparse::norm2(v);
    for (auto& x : v) {
        x /= norm;
    }
}

Vector random_unit_vector(std::size_t n, std::mt19937_64& rng) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vector v(n);
    for (auto& x : v) {
        x = gauss(rng);
    }
    normalize(v);
    return v;
}

/// Orthonormal Lanczos vectors stored as matrix columns, grown by doubling.
class KrylovBasis {
public:
    explicit KrylovBasis(std::size_t n) : q_(static_cast<Eigen::Index>(n), 16) {}

    std::size_t size() const noexcept { return size_; }

    void push_back(const Vector& v) {
        if (static_cast<Eigen::Index>(size_) == q_.cols()) {
            q_.conservativeResize(Eigen::NoChange, 2 * q_.cols());
        }
        q_.col(static_cast<Eigen::Index>(size_)) =
            Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
        ++size_;
    }

    /// Classical Gram-Schmidt against every stored vector, applied twice.
    void orthogonalize(Vector& w) const {
        Eigen::Map<Eigen::VectorXd> x(w.data(), static_cast<Eigen::Index>(w.size()));
        const auto q = q_.leftCols(static_cast<Eigen::Index>(size_));
        for (int pass = 0; pass < 2; ++pass) {
            const Eigen::VectorXd c = q.transpose() * x;
            x.noalias() -= q * c;
        }
    }

private:
    Eigen::MatrixXd q_;
    std::size_t size_ = 0;
};

struct LanczosOutcome {
    double theta_max = 0.0;
    double theta_min = 0.0;
    std::size_t steps = 0;
};

/// Last component of the unit eigenvector of the tridiagonal (alpha, beta) for
/// its largest eigenvalue theta. Inverse iteration with shift sigma > theta:
/// sigma I - T is then positive definite, so LDL' without pivoting is stable.
double top_ritz_last_component(const std::vector<double>& alpha, const std::vector<double>& beta, double theta,
                               double scale) {
    const std::size_t m = alpha.size();
    const double sigma = theta + 1e-10 * std::max(std::abs(theta), scale);
    std::vector<double> d(m);
    std::vector<double> l(m > 0 ? m - 1 : 0);
    d[0] = sigma - alpha[0];
    for (std::size_t i = 1; i < m; ++i) {
        l[i - 1] = -beta[i - 1] / d[i - 1];
        d[i] = (sigma - alpha[i]) + l[i - 1] * beta[i - 1];
    }
    std::vector<double> y(m, 1.0);
    for (int sweep = 0; sweep < 4; ++sweep) {
        for (std::size_t i = 1; i < m; ++i) {
            y[i] -= l[i - 1] * y[i - 1];
        }
        for (std::size_t i = 0; i < m; ++i) {
            y[i] /= d[i];
        }
        for (std::size_t i = m - 1; i-- > 0;) {
            y[i] -= l[i] * y[i + 1];
        }
        double norm = 0.0;
        for (const double x : y) {
            norm += x * x;
        }
        norm = std::sqrt(norm);
        for (auto& x : y) {
            x /= norm;
        }
    }
    return y[m - 1];
}

bool lanczos_check_due(std::size_t step) {
    return step <= 10 || step % std::max<std::size_t>(10, step / 10) == 0;
}

/// Lanczos with full reorthogonalisation from a seeded random start. A random
/// start overlaps every eigenvector, so a breakdown means the Krylov space is
/// invariant and its Ritz values are exact, including lambda_max.
LanczosOutcome lanczos_extremes(const SparseMatrix& a, const EigOptions& options, std::mt19937_64& rng) {
    const auto n = a.n();
    const auto max_steps = std::min(n, options.max_iter);
    const double scale = std::max(sparse::one_norm(a), std::numeric_limits<double>::min());

    KrylovBasis basis(n);
    std::vector<double> alpha;
    std::vector<double> beta;  // beta[j] couples basis[j] and basis[j + 1]
    Vector v = random_unit_vector(n, rng);
    Vector w(n);

    LanczosOutcome out;
    while (basis.size() < max_steps) {
        basis.push_back(v);
        sparse::matvec_into(a, v, w);
        alpha.push_back(sparse::dot(v, w));
        basis.orthogonalize(w);
        const double b = sparse::norm2(w);
        const auto m = basis.size();

        const bool breakdown = b <= 1e-13 * scale;
        const bool last = m == max_steps;
        if (breakdown || last || lanczos_check_due(m)) {
            Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), static_cast<Eigen::Index>(m));
            Eigen::VectorXd sub(static_cast<Eigen::Index>(m - 1));
            for (std::size_t j = 0; j + 1 < m; ++j) {
                sub[static_cast<Eigen::Index>(j)] = beta[j];
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
            tri.computeFromTridiagonal(diag, sub, Eigen::EigenvaluesOnly);
            out.theta_max = tri.eigenvalues()[static_cast<Eigen::Index>(m - 1)];
            out.theta_min = tri.eigenvalues()[0];
            out.steps = m;
            // Ritz residual ||A y - theta y|| = b * |last component of the Ritz vector|.
            const double residual =
                b * std::abs(top_ritz_last_component(alpha, beta, out.theta_max, scale));
            if (breakdown || residual <= options.tol * std::abs(out.theta_max)) {
                return out;
            }
            if (last) {
                break;
            }
        }
        beta.push_back(b);
        for (std::size_t i = 0; i < n; ++i) {
            v[i] = w[i] / b;
        }
    }
    if (max_steps < n) {
        throw ConvergenceError("lanczos: lambda_max did not converge within " +
                               std::to_string(max_steps) + " steps");
    }
    // A full-dimension Krylov space gives the exact spectrum up to round-off.
    return out;
}

struct InverseOutcome {
    double lambda = 0.0;
    std::size_t iterations = 0;
};

/// Zero-shift inverse iteration. Convergence is declared on the eigen-residual
/// or when the geometric extrapolation of the Rayleigh-quotient updates says
/// the remaining error is below the tolerance.
InverseOutcome inverse_iteration(const SparseMatrix& a, Vector v, const EigOptions& options) {
    const auto n = a.n();
    normalize(v);
    sparse::CGOptions cg;
    cg.rel_tol = std::min(1e-12, options.tol * 1e-3);
    cg.max_iter = std::max<std::size_t>(10 * n, 1000);

    Vector av(n);
    double rho_prev = 0.0;
    double delta_prev = 0.0;
    for (std::size_t it = 1; it <= options.max_iter; ++it) {
        auto solve = sparse::cg_solve(a, v, cg);
        Vector& w = solve.x;
        const double wv = sparse::dot(w, v);
        if (!(wv > 0.0)) {
            throw NotPositiveDefinite("inverse iteration: v'A^-1 v <= 0");
        }
        normalize(w);
        v = std::move(w);
        sparse::matvec_into(a, v, av);
        const double rho = sparse::dot(v, av);
        if (!(rho > 0.0)) {
            throw NotPositiveDefinite("inverse iteration: non-positive Rayleigh quotient");
        }
        double residual = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            residual += (av[i] - rho * v[i]) * (av[i] - rho * v[i]);
        }
        residual = std::sqrt(residual);
        if (residual <= options.tol * rho) {
            return {rho, it};
        }
        if (it > 1) {
            const double delta = std::abs(rho - rho_prev) / rho;
            if (it > 2 && delta_prev > 0.0) {
                const double q = delta / delta_prev;
                if (q < 1.0 && delta * q / (1.0 - q) <= 0.1 * options.tol) {
                    return {rho, it};
                }
            }
            if (delta == 0.0) {
                return {rho, it};
            }
            delta_prev = delta;
        }
        rho_prev = rho;
    }
    throw ConvergenceError("inverse iteration: lambda_min did not converge within " +
                           std::to_string(options.max_iter) + " iterations");
}

} // namespace

ExtremeEigs extreme_eigs(const SparseMatrix& a, const EigOptions& options) {
    const auto n = a.n();
    if (n == 0) {
        throw DomainError("extreme_eigs: empty matrix");
    }
    if (!(options.tol > 0.0 && options.tol < 1.0)) {
        throw DomainError("extreme_eigs: tol must lie in (0, 1)");
    }
    std::mt19937_64 rng(options.seed);

    const auto lanczos = lanczos_extremes(a, options, rng);
    if (!(lanczos.theta_min > 0.0)) {
        throw NotPositiveDefinite("extreme_eigs: matrix has a non-positive Ritz value");
    }

    auto inverse = inverse_iteration(a, Vector(n, 1.0), options);
    // Ritz values bound the spectrum from inside, so an inverse-iteration result
    // above the smallest Ritz value means all-ones missed the lowest eigenvector.
    if (inverse.lambda > lanczos.theta_min * (1.0 + 10.0 * options.tol)) {
        const auto first = inverse.iterations;
        inverse = inverse_iteration(a, random_unit_vector(n, rng), options);
        inverse.iterations += first;
    }

    ExtremeEigs eigs;
    eigs.lambda_min = inverse.lambda;
    eigs.lambda_max = std::max(lanczos.theta_max, inverse.lambda);
    eigs.lanczos_steps = lanczos.steps;
    eigs.inverse_iterations = inverse.iterations;
    return eigs;
}

double condition_number(const SparseMatrix& a, const EigOptions& options) {
    const auto eigs = extreme_eigs(a, options);
    return eigs.lambda_max / eigs.lambda_min;
}

double one_norm_kappa_bound(const SparseMatrix& a, double solve_tol) {
    const auto n = a.n();
    if (n == 0) {
        throw DomainError("one_norm_kappa_bound: empty matrix");
    }
    sparse::CGOptions cg;
    cg.rel_tol = solve_tol;
    cg.max_iter = std::max<std::size_t>(10 * n, 1000);
    auto apply_inverse = [&](const Vector& x) {
        auto r = sparse::cg_solve(a, x, cg);
        if (!r.converged) {
            throw ConvergenceError("one_norm_kappa_bound: inner CG solve did not converge");
        }
        return std::move(r.x);
    };
    auto l1 = [](const Vector& v) {
        double s = 0.0;
        for (const double x : v) {
            s += std::abs(x);
        }
        return s;
    };
    auto signs = [](const Vector& v) {
        Vector s(v.size());
        std::transform(v.begin(), v.end(), s.begin(), [](double x) { return x >= 0.0 ? 1.0 : -1.0; });
        return s;
    };

    // Hager's method as refined by Higham; A is symmetric so A^-T = A^-1.
    Vector x(n, 1.0 / static_cast<double>(n));
    Vector y = apply_inverse(x);
    double estimate = l1(y);
    if (n > 1) {
        Vector xi = signs(y);
        Vector z = apply_inverse(xi);
        for (int k = 2; k <= 5; ++k) {
            std::size_t j = 0;
            for (std::size_t i = 1; i < n; ++i) {
                if (std::abs(z[i]) > std::abs(z[j])) {
                    j = i;
                }
            }
            if (std::abs(z[j]) <= sparse::dot(z, x)) {
                break;
            }
            std::fill(x.begin(), x.end(), 0.0);
            x[j] = 1.0;
            y = apply_inverse(x);
            const double previous = estimate;
            estimate = l1(y);
            const Vector xi_next = signs(y);
            if (xi_next == xi || estimate <= previous) {
                estimate = std::max(estimate, previous);
                break;
            }
            xi = xi_next;
            z = apply_inverse(xi);
        }
        // Alternating test vector guards against the estimator's known blind spots.
        Vector alt(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double sign = i % 2 == 0 ? 1.0 : -1.0;
            alt[i] = sign * (1.0 + static_cast<double>(i) / static_cast<double>(n - 1));
        }
        estimate = std::max(estimate, 2.0 * l1(apply_inverse(alt)) / (3.0 * static_cast<double>(n)));
    }
    return sparse::one_norm(a) * estimate;
}

RowSparsity row_sparsity(const SparseMatrix& a) {
    RowSparsity s;
    if (a.n() == 0) {
        return s;
    }
    for (std::size_t i = 0; i < a.n(); ++i) {
        s.s_max = std::max(s.s_max, a.row_nnz(i));
    }
    s.s_avg = static_cast<double>(a.nnz()) / static_cast<double>(a.n());
    return s;
}

SpectralReport analyze_case(const net::NetworkCase& net, const EigOptions& options) {
    const auto sys = net::build_reduced_system(net);
    SpectralReport report;
    report.name = net.name;
    report.n = sys.n();
    const auto eigs = extreme_eigs(sys.a, options);
    report.lambda_min = eigs.lambda_min;
    report.lambda_max = eigs.lambda_max;
    report.kappa = eigs.lambda_max / eigs.lambda_min;
    report.solve_tol = 1e-12;
    report.kappa_lower_bound_1norm = one_norm_kappa_bound(sys.a, report.solve_tol);
    const auto sparsity = row_sparsity(sys.a);
    report.s_max = sparsity.s_max;
    report.s_avg = sparsity.s_avg;
    report.injection_density = net::injection_density(net);
    report.eig_tol = options.tol;
    return report;
}

} // namespace qpf::spectra
