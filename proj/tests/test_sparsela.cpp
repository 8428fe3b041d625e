#include "oracles.hpp"

#include "qpf/cg.hpp"
#include "qpf/error.hpp"
#include "qpf/matrix_market.hpp"
#include "qpf/sparse_matrix.hpp"

#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

using namespace qpf;
using qpf::sparse::SparseMatrix;
using qpf::sparse::Triplet;
using qpf::sparse::Vector;

namespace {

SparseMatrix fig1_reduced() {
    const std::vector<double> dense = {2, -1, 0, -1, 3, -1, 0, -1, 2};
    return SparseMatrix::from_dense(3, dense);
}

/// B'B + shift*I for a random sparse-ish B: SPD with moderate conditioning.
SparseMatrix random_spd(std::size_t n, std::mt19937_64& rng, double shift = 0.5) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::bernoulli_distribution keep(0.3);
    Eigen::MatrixXd b = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (Eigen::Index i = 0; i < b.rows(); ++i) {
        for (Eigen::Index j = 0; j < b.cols(); ++j) {
            if (i == j || keep(rng)) {
                b(i, j) = u(rng);
            }
        }
    }
    Eigen::MatrixXd a = b.transpose() * b;
    a += shift * Eigen::MatrixXd::Identity(b.rows(), b.cols());
    a = 0.5 * (a + a.transpose());
    std::vector<double> row_major(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            row_major[i * n + j] = a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
        }
    }
    return SparseMatrix::from_dense(n, row_major);
}

Vector random_vector(std::size_t n, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    Vector v(n);
    for (auto& x : v) {
        x = u(rng);
    }
    return v;
}

} // namespace

TEST_CASE("from_triplets sums duplicates and sorts columns") {
    const std::vector<Triplet> t = {{1, 2, 1.0}, {0, 0, 2.0}, {1, 0, 3.0}, {1, 2, 0.5}, {2, 2, 4.0}};
    const auto a = SparseMatrix::from_triplets(3, t);
    CHECK(a.nnz() == 4);
    CHECK(a.coeff(1, 2) == 1.5);
    CHECK(a.coeff(1, 0) == 3.0);
    CHECK(a.coeff(0, 1) == 0.0);
    const auto cols = a.col_indices();
    CHECK(cols[1] < cols[2]);
    CHECK_THROWS_AS(SparseMatrix::from_triplets(2, std::vector<Triplet>{{2, 0, 1.0}}), DomainError);
}

TEST_CASE("from_triplets is independent of entry order") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Triplet> t;
    for (int k = 0; k < 200; ++k) {
        t.push_back({static_cast<std::size_t>(k % 5), static_cast<std::size_t>((k * 7) % 5), u(rng)});
    }
    const auto reference = SparseMatrix::from_triplets(5, t);
    for (int trial = 0; trial < 10; ++trial) {
        std::shuffle(t.begin(), t.end(), rng);
        CHECK(SparseMatrix::from_triplets(5, t) == reference);
    }
}

TEST_CASE("matvec") {
    SUBCASE("identity") {
        const Vector v = {1, 2, 3};
        CHECK(sparse::matvec(SparseMatrix::identity(3), v) == v);
    }
    SUBCASE("reduced 4-bus system times its solution gives the injections") {
        const auto y = sparse::matvec(fig1_reduced(), Vector{0.5, 0.0, -0.5});
        CHECK(y == Vector{1.0, 0.0, -1.0});
    }
    SUBCASE("zero matrix") {
        const auto zero = SparseMatrix::from_triplets(3, std::vector<Triplet>{});
        CHECK(sparse::matvec(zero, Vector{4, 5, 6}) == Vector{0, 0, 0});
    }
    SUBCASE("dimension mismatch") {
        CHECK_THROWS_AS(sparse::matvec(SparseMatrix::identity(3), Vector{1, 2}), DimensionMismatch);
    }
}

TEST_CASE("cg_solve examples") {
    SUBCASE("identity converges in one step") {
        const Vector b = {3.0, -1.0, 2.5, 0.25};
        const auto r = sparse::cg_solve(SparseMatrix::identity(4), b);
        CHECK(r.converged);
        CHECK(r.iterations <= 1);
        for (std::size_t i = 0; i < b.size(); ++i) {
            CHECK(r.x[i] == doctest::Approx(b[i]).epsilon(1e-14));
        }
    }
    SUBCASE("4-bus system terminates within 3 iterations") {
        const auto a = fig1_reduced();
        const Vector b = {1.0, 0.0, -1.0};
        const auto oracle = testing::dense_solve(a, b);
        const auto r = sparse::cg_solve(a, b, {.rel_tol = 1e-12});
        CHECK(r.converged);
        CHECK(r.iterations <= 3);
        CHECK(testing::relative_error(r.x, oracle) < 1e-12);
        CHECK(r.x[0] == doctest::Approx(0.5).epsilon(1e-12));
        CHECK(std::abs(r.x[1]) < 1e-12);
        CHECK(r.x[2] == doctest::Approx(-0.5).epsilon(1e-12));
    }
    SUBCASE("warm start at the exact solution takes no iterations") {
        sparse::CGOptions opt;
        opt.x0 = Vector{0.5, 0.0, -0.5};
        const auto r = sparse::cg_solve(fig1_reduced(), Vector{1.0, 0.0, -1.0}, opt);
        CHECK(r.converged);
        CHECK(r.iterations == 0);
        CHECK(r.residual_history.size() == 1);
        CHECK(r.residual_history[0] == 0.0);
    }
    SUBCASE("max_iter = 0 on a nontrivial system does not converge") {
        const auto r = sparse::cg_solve(fig1_reduced(), Vector{1.0, 0.0, -1.0}, {.max_iter = 0});
        CHECK_FALSE(r.converged);
        CHECK(r.iterations == 0);
        CHECK(r.residual_history.size() == 1);
    }
    SUBCASE("bound_iterations reported when kappa is supplied") {
        const auto r = sparse::cg_solve(fig1_reduced(), Vector{1.0, 0.0, -1.0}, {.rel_tol = 1e-4, .kappa = 4.0});
        REQUIRE(r.bound_iterations);
        CHECK(*r.bound_iterations == 10);
    }
    SUBCASE("zero right-hand side") {
        const auto r = sparse::cg_solve(fig1_reduced(), Vector{0.0, 0.0, 0.0});
        CHECK(r.converged);
        CHECK(r.x == Vector{0.0, 0.0, 0.0});
    }
}

TEST_CASE("cg_solve errors") {
    CHECK_THROWS_AS(sparse::cg_solve(SparseMatrix::identity(3), Vector{1, 2}), DimensionMismatch);
    sparse::CGOptions bad_x0;
    bad_x0.x0 = Vector{1.0};
    CHECK_THROWS_AS(sparse::cg_solve(SparseMatrix::identity(2), Vector{1, 2}, bad_x0), DimensionMismatch);
    CHECK_THROWS_AS(sparse::cg_solve(SparseMatrix::identity(2), Vector{1, 2}, {.rel_tol = 0.0}), DomainError);
    CHECK_THROWS_AS(sparse::cg_solve(SparseMatrix::identity(2), Vector{1, 2}, {.rel_tol = 1.0}), DomainError);
    const std::vector<double> indefinite = {1.0, 0.0, 0.0, -1.0};
    CHECK_THROWS_AS(sparse::cg_solve(SparseMatrix::from_dense(2, indefinite), Vector{0.0, 1.0}),
                    NotPositiveDefinite);
}

TEST_CASE("cg_iteration_bound") {
    CHECK(sparse::cg_iteration_bound(1.0, 1.0) == 1);
    CHECK(sparse::cg_iteration_bound(100.0, 1e-6) == 73);
    CHECK(sparse::cg_iteration_bound(4.0, 1e-4) == 10);
    CHECK_THROWS_AS(sparse::cg_iteration_bound(0.5, 0.1), DomainError);
    CHECK_THROWS_AS(sparse::cg_iteration_bound(2.0, 0.0), DomainError);
    CHECK_THROWS_AS(sparse::cg_iteration_bound(2.0, 1.5), DomainError);
}

TEST_CASE("energy_norm_error") {
    const Vector x = {1.0, -2.0, 0.5};
    CHECK(sparse::energy_norm_error(fig1_reduced(), x, x) == 0.0);
    CHECK(sparse::energy_norm_error(SparseMatrix::identity(4), Vector{0, 0, 0, 0}, Vector{3, 4, 0, 0}) ==
          doctest::Approx(5.0).epsilon(1e-15));
    const std::vector<double> d = {1.0, 4.0};
    CHECK(sparse::energy_norm_error(SparseMatrix::diagonal(d), Vector{0, 0}, Vector{1, 1}) ==
          doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));
    const std::vector<double> neg = {-1.0};
    CHECK_THROWS_AS(sparse::energy_norm_error(SparseMatrix::diagonal(neg), Vector{0}, Vector{1}), NotPositiveDefinite);
    CHECK_THROWS_AS(sparse::energy_norm_error(SparseMatrix::identity(2), Vector{0}, Vector{1, 1}), DimensionMismatch);
}

TEST_CASE("property: CG terminates within N iterations on random SPD systems") {
    std::mt19937_64 rng(12345);
    for (std::size_t n = 2; n <= 50; n += 4) {
        const auto a = random_spd(n, rng);
        const auto b = random_vector(n, rng);
        const auto r = sparse::cg_solve(a, b, {.rel_tol = 1e-8, .max_iter = n});
        INFO("n = " << n);
        CHECK(r.converged);
        CHECK(r.iterations <= n);
        CHECK(r.residual_history.size() == r.iterations + 1);
        CHECK(r.residual_history.back() <= 1e-8);
        CHECK(testing::relative_error(r.x, testing::dense_solve(a, b)) < 1e-6);
    }
}

TEST_CASE("property: energy-norm error never increases and respects the iteration bound") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 5 + static_cast<std::size_t>(trial) * 3;
        const auto a = random_spd(n, rng, 0.05 + 0.1 * trial);
        const auto b = random_vector(n, rng);
        const auto x_star = testing::dense_solve(a, b);
        const auto eigs = testing::dense_eigenvalues(a);
        const double kappa = eigs.maxCoeff() / eigs.minCoeff();

        std::vector<double> errors;
        sparse::CGOptions opt;
        opt.rel_tol = 1e-13;
        opt.max_iter = 10 * n;
        opt.observer = [&](std::size_t, std::span<const double> x) {
            errors.push_back(sparse::energy_norm_error(a, x, x_star));
        };
        sparse::cg_solve(a, b, opt);

        INFO("trial " << trial << " n=" << n << " kappa=" << kappa);
        for (std::size_t i = 1; i < errors.size(); ++i) {
            CHECK(errors[i] <= errors[i - 1] * (1.0 + 1e-10) + 1e-14 * errors[0]);
        }
        for (const double eps_c : {1e-4, 1e-6}) {
            std::size_t reached = errors.size();
            for (std::size_t i = 0; i < errors.size(); ++i) {
                if (errors[i] <= eps_c * errors[0]) {
                    reached = i;
                    break;
                }
            }
            REQUIRE(reached < errors.size());
            CHECK(reached <= sparse::cg_iteration_bound(kappa, eps_c));
        }
    }
}

TEST_CASE("property: energy norm lies between sqrt(lambda_min) and sqrt(lambda_max) times the 2-norm") {
    std::mt19937_64 rng(2024);
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t n = 3 + static_cast<std::size_t>(trial);
        const auto a = random_spd(n, rng);
        const auto eigs = testing::dense_eigenvalues(a);
        const auto e = random_vector(n, rng);
        const Vector zero(n, 0.0);
        const double energy = sparse::energy_norm_error(a, zero, e);
        const double two = sparse::norm2(e);
        CHECK(std::sqrt(eigs.minCoeff()) * two <= energy * (1.0 + 1e-12));
        CHECK(energy <= std::sqrt(eigs.maxCoeff()) * two * (1.0 + 1e-12));
    }
}

TEST_CASE("matrix market round trip preserves every stored entry") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 5; ++trial) {
        const auto a = random_spd(4 + static_cast<std::size_t>(trial), rng);
        std::stringstream buf;
        sparse::write_matrix_market(buf, a);
        CHECK(sparse::read_matrix_market(buf) == a);
    }
}

TEST_CASE("matrix market reader") {
    SUBCASE("symmetric banner expands the stored triangle") {
        std::istringstream in("%%MatrixMarket matrix coordinate real symmetric\n% comment\n3 3 4\n"
                              "1 1 2\n2 1 -1\n2 2 3\n3 3 2\n");
        const auto a = sparse::read_matrix_market(in);
        CHECK(a.coeff(0, 1) == -1.0);
        CHECK(a.coeff(1, 0) == -1.0);
        CHECK(a.is_symmetric());
    }
    SUBCASE("malformed entry reports its line") {
        std::istringstream in("%%MatrixMarket matrix coordinate real general\n2 2 2\n1 1 1\n2 x 1\n");
        try {
            sparse::read_matrix_market(in);
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("entry count mismatch") {
        std::istringstream in("2 2 3\n1 1 1\n2 2 1\n");
        CHECK_THROWS_AS(sparse::read_matrix_market(in), ParseError);
    }
    SUBCASE("vector file") {
        std::istringstream in("# header\n1.5\n\n-2\n+3e-1\n");
        CHECK(sparse::read_vector(in) == Vector{1.5, -2.0, 0.3});
    }
}
