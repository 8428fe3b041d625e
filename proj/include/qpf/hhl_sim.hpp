#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

/// Exact dense statevector simulation of HHL on desk-scale systems.
namespace qpf::hhl {

using Complex = std::complex<double>;

/// Largest matrix dimension hhl_run accepts (before power-of-two padding).
inline constexpr std::size_t kMaxDimension = 16;

/// Amplitudes over (clock, value, ancilla) registers. Basis index is
/// (clock << (n_value + n_ancilla)) | (value << n_ancilla) | ancilla,
/// so each register is a contiguous bit field.
class QuantumState {
public:
    QuantumState(int n_clock, int n_value, int n_ancilla);

    int n_clock() const noexcept { return n_clock_; }
    int n_value() const noexcept { return n_value_; }
    int n_ancilla() const noexcept { return n_ancilla_; }
    std::size_t clock_dim() const noexcept { return std::size_t{1} << n_clock_; }
    std::size_t value_dim() const noexcept { return std::size_t{1} << n_value_; }
    std::size_t ancilla_dim() const noexcept { return std::size_t{1} << n_ancilla_; }
    std::size_t dimension() const noexcept { return amplitudes_.size(); }

    std::size_t index(std::size_t clock, std::size_t value, std::size_t ancilla) const noexcept {
        return (clock << (n_value_ + n_ancilla_)) | (value << n_ancilla_) | ancilla;
    }
    Complex& at(std::size_t clock, std::size_t value, std::size_t ancilla) {
        return amplitudes_[index(clock, value, ancilla)];
    }
    Complex at(std::size_t clock, std::size_t value, std::size_t ancilla) const {
        return amplitudes_[index(clock, value, ancilla)];
    }

    std::span<Complex> amplitudes() noexcept { return amplitudes_; }
    std::span<const Complex> amplitudes() const noexcept { return amplitudes_; }

    double norm() const;

private:
    int n_clock_;
    int n_value_;
    int n_ancilla_;
    std::vector<Complex> amplitudes_;
};

/// Returns (A, b) when A is symmetric, otherwise the normal equations (A'A, A'b).
/// Throws DomainError for non-square or singular A.
std::pair<Eigen::MatrixXd, Eigen::VectorXd> hermitize(const Eigen::MatrixXd& a, const Eigen::VectorXd& b);

/// b / ||b|| on a value-only register of ceil(log2 N) qubits, zero padded.
QuantumState amplitude_encode(std::span<const double> b);

struct HHLConfig {
    int n_clock = 6;
    /// Evolution time scale; clock value c encodes lambda = 2 pi c / (2^n_clock t0).
    double t0 = 1.0;
    /// Rotation constant C; ancilla amplitude is C / lambda.
    double c_rot = 1.0;
};

/// Fills the unset parameters from the spectrum of `a`: t0 = pi / lambda_max,
/// then C = the largest clock value not exceeding lambda_min.
HHLConfig default_config(const Eigen::MatrixXd& a, int n_clock, std::optional<double> t0 = std::nullopt,
                         std::optional<double> c_rot = std::nullopt);

struct HHLResult {
    /// Value register after postselection (ancilla = 1, clock = 0), original dimension.
    Eigen::VectorXcd x_tilde;
    double success_prob = 0.0;
    /// || x_tilde - x / ||x|| ||_2.
    double eps_h = 0.0;
    Eigen::VectorXd classical_x;
    /// 1/p: independent repetitions until the ancilla reads 1.
    double repetitions_naive = 0.0;
    /// ceil(pi / (4 asin(sqrt p))): Grover iterations with amplitude amplification.
    double repetitions_boosted = 0.0;
    /// max | ||psi|| - 1 | over all stages before the projection.
    double unitarity_error = 0.0;
    std::size_t padded_dimension = 0;
    std::vector<std::string> warnings;

    /// |<x/||x|| | x_tilde>|^2.
    double fidelity() const;
};

/// Simulates encode, phase estimation, controlled rotation, inverse phase
/// estimation and postselection. `a_h` must be symmetric positive definite of
/// dimension <= kMaxDimension; it is padded to a power of two with decoupled
/// identity rows and zero injections. Eigenvalues falling outside the clock
/// window produce warnings, not errors.
HHLResult hhl_run(const Eigen::MatrixXd& a_h, const Eigen::VectorXd& b, const HHLConfig& config);

/// sum_i m_i |x_i|^2 for a diagonal observable.
double expectation(const Eigen::VectorXcd& x_tilde, std::span<const double> m_diag);

/// Copies of the output state needed to read it out classically: N / eps_t.
double tomography_cost(double n, double eps_t);

} // namespace qpf::hhl
