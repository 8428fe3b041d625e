#include "qpf/hhl_sim.hpp"

#include "qpf/error.hpp"
#include "qpf/numfmt.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace qpf::hhl {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

int qubits_for(std::size_t n) {
    int q = 0;
    while ((std::size_t{1} << q) < n) {
        ++q;
    }
    return q;
}

void hadamard_on_clock(QuantumState& psi) {
    const double h = 1.0 / std::sqrt(2.0);
    for (int bit = 0; bit < psi.n_clock(); ++bit) {
        const std::size_t mask = std::size_t{1} << bit;
        for (std::size_t c = 0; c < psi.clock_dim(); ++c) {
            if (c & mask) {
                continue;
            }
            for (std::size_t v = 0; v < psi.value_dim(); ++v) {
                for (std::size_t a = 0; a < psi.ancilla_dim(); ++a) {
                    Complex& lo = psi.at(c, v, a);
                    Complex& hi = psi.at(c | mask, v, a);
                    const Complex x = lo;
                    const Complex y = hi;
                    lo = h * (x + y);
                    hi = h * (x - y);
                }
            }
        }
    }
}

/// Clock bit k controls U^(2^k) with U = exp(i direction A t0) on the value register.
void controlled_evolutions(QuantumState& psi, const Eigen::MatrixXd& eigvecs, const Eigen::VectorXd& eigvals,
                           double t0, double direction) {
    const auto dim = static_cast<Eigen::Index>(psi.value_dim());
    Eigen::VectorXcd in(dim);
    for (int bit = 0; bit < psi.n_clock(); ++bit) {
        const double power = std::ldexp(1.0, bit);
        Eigen::VectorXcd phases(dim);
        for (Eigen::Index j = 0; j < dim; ++j) {
            phases[j] = std::polar(1.0, direction * eigvals[j] * t0 * power);
        }
        const Eigen::MatrixXcd u = eigvecs.cast<Complex>() * phases.asDiagonal() * eigvecs.transpose().cast<Complex>();
        const std::size_t mask = std::size_t{1} << bit;
        for (std::size_t c = 0; c < psi.clock_dim(); ++c) {
            if (!(c & mask)) {
                continue;
            }
            for (std::size_t a = 0; a < psi.ancilla_dim(); ++a) {
                for (Eigen::Index v = 0; v < dim; ++v) {
                    in[v] = psi.at(c, static_cast<std::size_t>(v), a);
                }
                const Eigen::VectorXcd out = u * in;
                for (Eigen::Index v = 0; v < dim; ++v) {
                    psi.at(c, static_cast<std::size_t>(v), a) = out[v];
                }
            }
        }
    }
}

/// Applies F (inverse = false) or F^dagger on the clock register, with
/// F[j][k] = exp(2 pi i j k / M) / sqrt(M).
void fourier_on_clock(QuantumState& psi, bool inverse) {
    const auto m = psi.clock_dim();
    const double sign = inverse ? -1.0 : 1.0;
    const double scale = 1.0 / std::sqrt(static_cast<double>(m));
    std::vector<Complex> table(m);
    for (std::size_t k = 0; k < m; ++k) {
        table[k] = std::polar(scale, sign * kTwoPi * static_cast<double>(k) / static_cast<double>(m));
    }
    std::vector<Complex> column(m);
    for (std::size_t v = 0; v < psi.value_dim(); ++v) {
        for (std::size_t a = 0; a < psi.ancilla_dim(); ++a) {
            for (std::size_t c = 0; c < m; ++c) {
                column[c] = psi.at(c, v, a);
            }
            for (std::size_t j = 0; j < m; ++j) {
                Complex sum = 0.0;
                for (std::size_t k = 0; k < m; ++k) {
                    sum += table[(j * k) % m] * column[k];
                }
                psi.at(j, v, a) = sum;
            }
        }
    }
}

double clock_eigenvalue(std::size_t clock, std::size_t clock_dim, double t0) {
    return kTwoPi * static_cast<double>(clock) / (static_cast<double>(clock_dim) * t0);
}

/// Ancilla rotation |0> -> sqrt(1 - r^2)|0> + r|1> with r = C / lambda(clock).
/// The clock-zero branch is left untouched. Returns true when a ratio had to be
/// clamped to 1 on a clock value that carries non-negligible amplitude.
bool eigenvalue_rotation(QuantumState& psi, double t0, double c_rot) {
    bool clamped = false;
    for (std::size_t c = 1; c < psi.clock_dim(); ++c) {
        double r = c_rot / clock_eigenvalue(c, psi.clock_dim(), t0);
        if (r > 1.0 + 1e-12) {
            double weight = 0.0;
            for (std::size_t v = 0; v < psi.value_dim(); ++v) {
                weight += std::norm(psi.at(c, v, 0)) + std::norm(psi.at(c, v, 1));
            }
            clamped = clamped || weight > 1e-20;
        }
        r = std::min(r, 1.0);
        const double keep = std::sqrt(1.0 - r * r);
        for (std::size_t v = 0; v < psi.value_dim(); ++v) {
            const Complex zero = psi.at(c, v, 0);
            const Complex one = psi.at(c, v, 1);
            psi.at(c, v, 0) = keep * zero - r * one;
            psi.at(c, v, 1) = r * zero + keep * one;
        }
    }
    return clamped;
}

Eigen::MatrixXd pad_matrix(const Eigen::MatrixXd& a, Eigen::Index dim) {
    Eigen::MatrixXd padded = Eigen::MatrixXd::Identity(dim, dim);
    padded.topLeftCorner(a.rows(), a.cols()) = a;
    return padded;
}

void check_symmetric_pd(const Eigen::MatrixXd& a, const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>& eig) {
    const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
        throw DomainError("hhl: matrix must be symmetric; hermitize it first");
    }
    if (!(eig.eigenvalues().minCoeff() > 0.0)) {
        throw NotPositiveDefinite("hhl: matrix must be positive definite");
    }
}

} // namespace

QuantumState::QuantumState(int n_clock, int n_value, int n_ancilla)
    : n_clock_(n_clock), n_value_(n_value), n_ancilla_(n_ancilla) {
    if (n_clock < 0 || n_value < 0 || n_ancilla < 0 || n_clock + n_value + n_ancilla > 24) {
        throw DomainError("QuantumState: invalid register sizes");
    }
    amplitudes_.assign(std::size_t{1} << (n_clock + n_value + n_ancilla), Complex{0.0, 0.0});
    amplitudes_[0] = 1.0;
}

double QuantumState::norm() const {
    double sum = 0.0;
    for (const auto& z : amplitudes_) {
        sum += std::norm(z);
    }
    return std::sqrt(sum);
}

std::pair<Eigen::MatrixXd, Eigen::VectorXd> hermitize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
    if (a.rows() != a.cols() || a.rows() == 0) {
        throw DomainError("hermitize: matrix must be square and non-empty");
    }
    if (b.size() != a.rows()) {
        throw DimensionMismatch(static_cast<std::size_t>(a.rows()), static_cast<std::size_t>(b.size()));
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (lu.rank() < a.rows()) {
        throw DomainError("hermitize: matrix is singular");
    }
    if (a == a.transpose()) {
        return {a, b};
    }
    return {a.transpose() * a, a.transpose() * b};
}

QuantumState amplitude_encode(std::span<const double> b) {
    if (b.empty()) {
        throw DomainError("amplitude_encode: empty vector");
    }
    double norm = 0.0;
    for (const double x : b) {
        norm += x * x;
    }
    norm = std::sqrt(norm);
    if (!(norm > 0.0)) {
        throw DomainError("amplitude_encode: zero vector cannot be normalised");
    }
    QuantumState psi(0, qubits_for(b.size()), 0);
    auto amps = psi.amplitudes();
    std::fill(amps.begin(), amps.end(), Complex{0.0, 0.0});
    for (std::size_t i = 0; i < b.size(); ++i) {
        amps[i] = b[i] / norm;
    }
    return psi;
}

HHLConfig default_config(const Eigen::MatrixXd& a, int n_clock, std::optional<double> t0,
                         std::optional<double> c_rot) {
    if (n_clock < 1) {
        throw DomainError("hhl: n_clock must be >= 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a, Eigen::EigenvaluesOnly);
    const double lambda_min = eig.eigenvalues().minCoeff();
    const double lambda_max = eig.eigenvalues().maxCoeff();
    if (!(lambda_min > 0.0)) {
        throw NotPositiveDefinite("hhl: matrix must be positive definite");
    }
    HHLConfig cfg;
    cfg.n_clock = n_clock;
    cfg.t0 = t0.value_or(kTwoPi / (2.0 * lambda_max));
    if (c_rot) {
        cfg.c_rot = *c_rot;
    } else {
        const auto m = std::size_t{1} << n_clock;
        const double step = clock_eigenvalue(1, m, cfg.t0);
        // Nudge before flooring so an exactly representable lambda_min is not lost to round-off.
        const double clock = std::floor(lambda_min / step * (1.0 + 1e-12));
        cfg.c_rot = clock_eigenvalue(static_cast<std::size_t>(std::max(1.0, clock)), m, cfg.t0);
        cfg.c_rot = std::min(cfg.c_rot, lambda_min);
    }
    return cfg;
}

double HHLResult::fidelity() const {
    const Eigen::VectorXcd x = classical_x.normalized().cast<Complex>();
    return std::norm(x.dot(x_tilde));
}

HHLResult hhl_run(const Eigen::MatrixXd& a_h, const Eigen::VectorXd& b, const HHLConfig& config) {
    const auto n = static_cast<std::size_t>(a_h.rows());
    if (a_h.rows() != a_h.cols() || n == 0) {
        throw DomainError("hhl: matrix must be square and non-empty");
    }
    if (n > kMaxDimension) {
        throw DomainError("hhl: dimension " + std::to_string(n) + " exceeds the simulator limit of " +
                          std::to_string(kMaxDimension));
    }
    if (static_cast<std::size_t>(b.size()) != n) {
        throw DimensionMismatch(n, static_cast<std::size_t>(b.size()));
    }
    if (config.n_clock < 1 || config.n_clock > 12) {
        throw DomainError("hhl: n_clock must lie in [1, 12]");
    }
    if (!(config.t0 > 0.0) || !std::isfinite(config.t0)) {
        throw DomainError("hhl: t0 must be positive");
    }
    if (!(config.c_rot > 0.0)) {
        throw DomainError("hhl: rotation constant C must be positive");
    }

    const int n_value = std::max(1, qubits_for(n));
    const auto padded_dim = static_cast<Eigen::Index>(std::size_t{1} << n_value);
    const Eigen::MatrixXd a = pad_matrix(a_h, padded_dim);
    Eigen::VectorXd b_pad = Eigen::VectorXd::Zero(padded_dim);
    b_pad.head(b.size()) = b;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
    check_symmetric_pd(a_h, eig);
    const Eigen::VectorXd spectrum =
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a_h, Eigen::EigenvaluesOnly).eigenvalues();
    const double lambda_min = spectrum.minCoeff();
    if (config.c_rot > lambda_min * (1.0 + 1e-12)) {
        throw DomainError("hhl: rotation constant C = " + format_double(config.c_rot) +
                          " exceeds lambda_min = " + format_double(lambda_min));
    }

    HHLResult result;
    result.padded_dimension = static_cast<std::size_t>(padded_dim);
    result.classical_x = a_h.ldlt().solve(b);

    const auto clock_dim = std::size_t{1} << config.n_clock;
    const double resolution = clock_eigenvalue(1, clock_dim, config.t0);
    const double window = clock_eigenvalue(clock_dim, clock_dim, config.t0);
    if (spectrum.maxCoeff() >= window) {
        result.warnings.push_back("eigenvalue " + format_double(spectrum.maxCoeff()) +
                                  " is outside the phase-estimation window [0, " + format_double(window) +
                                  "); it will alias");
    }
    if (lambda_min < 0.5 * resolution) {
        result.warnings.push_back("eigenvalue " + format_double(lambda_min) + " is below the clock resolution " +
                                  format_double(resolution));
    }

    // (1) encode b on the value register; clock and ancilla start in |0>.
    const auto encoded = amplitude_encode(std::span<const double>(b_pad.data(), static_cast<std::size_t>(b_pad.size())));
    QuantumState psi(config.n_clock, n_value, 1);
    {
        auto amps = psi.amplitudes();
        std::fill(amps.begin(), amps.end(), Complex{0.0, 0.0});
        for (std::size_t v = 0; v < psi.value_dim(); ++v) {
            psi.at(0, v, 0) = encoded.amplitudes()[v];
        }
    }
    auto track = [&result](const QuantumState& state) {
        result.unitarity_error = std::max(result.unitarity_error, std::abs(state.norm() - 1.0));
    };
    track(psi);

    // (2) phase estimation.
    hadamard_on_clock(psi);
    track(psi);
    controlled_evolutions(psi, eig.eigenvectors(), eig.eigenvalues(), config.t0, +1.0);
    track(psi);
    fourier_on_clock(psi, /*inverse=*/true);
    track(psi);

    // (3) eigenvalue inversion onto the ancilla.
    if (eigenvalue_rotation(psi, config.t0, config.c_rot)) {
        result.warnings.push_back("rotation amplitude C/lambda exceeded 1 for some clock values and was clamped");
    }
    track(psi);

    // (4) uncompute phase estimation.
    fourier_on_clock(psi, /*inverse=*/false);
    track(psi);
    controlled_evolutions(psi, eig.eigenvectors(), eig.eigenvalues(), config.t0, -1.0);
    track(psi);
    hadamard_on_clock(psi);
    track(psi);

    // (5) postselect ancilla = 1, clock = 0.
    Eigen::VectorXcd projected(padded_dim);
    for (Eigen::Index v = 0; v < padded_dim; ++v) {
        projected[v] = psi.at(0, static_cast<std::size_t>(v), 1);
    }
    result.success_prob = projected.squaredNorm();
    if (!(result.success_prob > 0.0)) {
        throw Error("hhl: postselection probability is zero; no eigenvalue was resolved by the clock register");
    }
    const Eigen::VectorXcd x_tilde = projected / std::sqrt(result.success_prob);
    result.x_tilde = x_tilde.head(static_cast<Eigen::Index>(n));

    Eigen::VectorXd reference = Eigen::VectorXd::Zero(padded_dim);
    reference.head(static_cast<Eigen::Index>(n)) = result.classical_x.normalized();
    result.eps_h = (x_tilde - reference.cast<Complex>()).norm();

    const double p = std::min(1.0, result.success_prob);
    result.repetitions_naive = 1.0 / p;
    result.repetitions_boosted = std::ceil(std::numbers::pi / (4.0 * std::asin(std::sqrt(p))));
    return result;
}

double expectation(const Eigen::VectorXcd& x_tilde, std::span<const double> m_diag) {
    if (static_cast<std::size_t>(x_tilde.size()) != m_diag.size()) {
        throw DimensionMismatch(static_cast<std::size_t>(x_tilde.size()), m_diag.size());
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < m_diag.size(); ++i) {
        sum += m_diag[i] * std::norm(x_tilde[static_cast<Eigen::Index>(i)]);
    }
    return sum;
}

double tomography_cost(double n, double eps_t) {
    if (!(n > 0.0)) {
        throw DomainError("tomography_cost: N must be positive");
    }
    if (!(eps_t > 0.0 && eps_t <= 1.0)) {
        throw DomainError("tomography_cost: eps_t must lie in (0, 1]");
    }
    return n / eps_t;
}

} // namespace qpf::hhl
