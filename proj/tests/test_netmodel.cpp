#include "networks.hpp"
#include "oracles.hpp"

#include "qpf/error.hpp"
#include "qpf/netmodel.hpp"
#include "qpf/spectra.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace qpf;

namespace {

constexpr const char* kTwoBus = R"(function mpc = two_bus
mpc.version = '2';
mpc.baseMVA = 100;
mpc.bus = [
	1	3	0	0	0	0	1	1	0	230	1	1.1	0.9;
	2	1	50	10	0	0	1	1	0	230	1	1.1	0.9;
];
mpc.gen = [
	1	50	0	300	-300	1	100	1	250	10;
];
mpc.branch = [
	1	2	0.01	0.1	0.02	250	250	250	0	0	1	-360	360;
];
)";

constexpr const char* kFig1 = R"(% four-bus example, all reactances 1
function mpc = fig1
mpc.baseMVA = 100;
mpc.bus = [
  1 3 0 0;
  2 2 0 0;
  3 1 0 0;
  4 1 100 0;
];
mpc.gen = [1 0; 2 100];
mpc.branch = [
  1 2 0 1.0 0 0 0 0 0 0 1;
  2 3 0 1.0 0 0 0 0 0 0 1;
  1 3 0 1.0 0 0 0 0 0 0 1;
  1 4 0 1.0 0 0 0 0 0 0 1;
  3 4 0 1.0 0 0 0 0 0 0 1;
];
)";

std::string fig1_with_branches(const std::string& branches) {
    return "mpc.baseMVA = 100;\nmpc.bus = [\n1 3 0 0;\n2 1 0 0;\n3 1 0 0;\n4 1 0 0;\n];\nmpc.branch = [\n" +
           branches + "];\n";
}

} // namespace

TEST_CASE("parse_case: two-bus case") {
    const auto net = net::parse_case(kTwoBus, "two_bus");
    REQUIRE(net.buses.size() == 2);
    REQUIRE(net.branches.size() == 1);
    CHECK(net.branches[0].susceptance == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(net.slack_id() == 1);
    CHECK(net.buses[1].p_injection == doctest::Approx(-0.5));
    CHECK(net.buses[0].p_injection == doctest::Approx(0.5));
}

TEST_CASE("parse_case: four-bus example") {
    const auto net = net::parse_case(kFig1, "fig1");
    CHECK(net.branches.size() == 5);
    for (const auto& br : net.branches) {
        CHECK(br.susceptance == 1.0);
        CHECK(br.in_service);
    }
    CHECK(net.buses[1].p_injection == 1.0);
    CHECK(net.buses[2].p_injection == 0.0);
    CHECK(net.buses[3].p_injection == -1.0);
}

TEST_CASE("parse_case errors") {
    SUBCASE("empty branch table is a disconnected graph") {
        try {
            net::parse_case(fig1_with_branches(""));
            FAIL("expected NetworkError");
        } catch (const NetworkError& e) {
            CHECK(std::string(e.what()).find("disconnected graph") != std::string::npos);
        }
    }
    SUBCASE("unknown bus reference") {
        CHECK_THROWS_AS(net::parse_case(fig1_with_branches("1 2 0 1;\n2 3 0 1;\n3 9 0 1;\n")), NetworkError);
    }
    SUBCASE("zero reactance") {
        CHECK_THROWS_AS(net::parse_case(fig1_with_branches("1 2 0 0;\n2 3 0 1;\n3 4 0 1;\n")), NetworkError);
    }
    SUBCASE("negative reactance") {
        CHECK_THROWS_AS(net::parse_case(fig1_with_branches("1 2 0 -0.2;\n2 3 0 1;\n3 4 0 1;\n")), NetworkError);
    }
    SUBCASE("syntax error carries the line number") {
        try {
            net::parse_case("mpc.baseMVA = 100;\nmpc.bus = [\n1 3 0 0;\n2 1 abc 0;\n];\n");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            CHECK(e.line() == 4);
        }
    }
    SUBCASE("unterminated matrix") {
        CHECK_THROWS_AS(net::parse_case("mpc.baseMVA = 100;\nmpc.bus = [\n1 3 0 0;\n"), ParseError);
    }
    SUBCASE("stray text outside statements") {
        CHECK_THROWS_AS(net::parse_case("mpc.baseMVA = 100;\nhello world\n"), ParseError);
    }
    SUBCASE("missing baseMVA") {
        CHECK_THROWS_AS(net::parse_case("mpc.bus = [1 3 0 0];\n"), ParseError);
    }
    SUBCASE("no reference bus") {
        CHECK_THROWS_AS(net::parse_case("mpc.baseMVA = 100;\nmpc.bus = [1 1 0 0; 2 1 0 0];\nmpc.branch = [1 2 0 1];\n"),
                        NetworkError);
    }
    SUBCASE("duplicate bus id") {
        CHECK_THROWS_AS(net::parse_case("mpc.baseMVA = 100;\nmpc.bus = [1 3 0 0; 1 1 0 0];\n"), NetworkError);
    }
}

TEST_CASE("parse_case: out-of-service branches are kept but skipped, isolated buses dropped") {
    const std::string text = "mpc.baseMVA = 100;\nmpc.bus = [1 3 0 0; 2 1 0 0; 3 4 0 0];\n"
                             "mpc.branch = [1 2 0 0.5 0 0 0 0 0 0 1; 1 2 0 0 0 0 0 0 0 0 0; 2 3 0 1 0 0 0 0 0 0 0];\n";
    const auto net = net::parse_case(text);
    CHECK(net.buses.size() == 2);
    REQUIRE(net.branches.size() == 2);
    CHECK_FALSE(net.branches[1].in_service);
    const auto sys = net::build_reduced_system(net);
    CHECK(sys.a.coeff(0, 0) == 2.0);
}

TEST_CASE("parse_case: comments, commas and same-line brackets") {
    const std::string text = "mpc.baseMVA = 50; % base\nmpc.bus = [1, 3, 0, 0; 2, 1, 25, 0]; % two buses\n"
                             "mpc.bus_name = {\n'a';\n'b';\n};\nmpc.branch = [1 2 0 0.25];\n";
    const auto net = net::parse_case(text);
    CHECK(net.base_mva == 50.0);
    CHECK(net.buses[1].p_injection == -0.5);
    CHECK(net.branches[0].susceptance == 4.0);
}

TEST_CASE("build_reduced_system examples") {
    SUBCASE("four-bus example with slack 1") {
        const auto sys = net::build_reduced_system(testing::fig1_case());
        const std::vector<double> expected = {2, -1, 0, -1, 3, -1, 0, -1, 2};
        CHECK(sys.a.to_dense() == expected);
        CHECK(sys.row_bus == std::vector<net::BusId>{2, 3, 4});
        CHECK(sys.b == std::vector<double>{1.0, 0.0, -1.0});
        CHECK(sys.slack_id == 1);

        // Independent route: full Laplacian with slack row/column deleted.
        const Eigen::MatrixXd full = testing::dense(net::full_laplacian(testing::fig1_case()));
        const Eigen::MatrixXd reduced = full.bottomRightCorner(3, 3);
        CHECK(testing::dense(sys.a) == reduced);
    }
    SUBCASE("single non-slack bus") {
        const auto sys = net::build_reduced_system(net::parse_case(kTwoBus));
        CHECK(sys.a.to_dense() == std::vector<double>{10.0});
    }
    SUBCASE("slack override") {
        const auto sys = net::build_reduced_system(testing::fig1_case(), net::BusId{3});
        CHECK(sys.row_bus == std::vector<net::BusId>{1, 2, 4});
        CHECK(sys.slack_id == 3);
    }
    SUBCASE("parallel branches add") {
        auto net = testing::fig1_case();
        net.branches.push_back({1, 2, 0.5, true});
        const auto sys = net::build_reduced_system(net);
        CHECK(sys.a.coeff(0, 0) == 2.5);
    }
    SUBCASE("errors") {
        CHECK_THROWS_AS(net::build_reduced_system(testing::fig1_case(), net::BusId{42}), NetworkError);
        auto broken = testing::fig1_case();
        broken.branches.erase(broken.branches.begin() + 3, broken.branches.end());
        CHECK_THROWS_AS(net::build_reduced_system(broken), NetworkError);
    }
}

TEST_CASE("injection_density") {
    CHECK(net::injection_density(testing::fig1_case(0.0, 0.0, 0.0)) == 0.0);
    CHECK(net::injection_density(testing::fig1_case(1.0, 0.0, -1.0)) == doctest::Approx(2.0 / 3.0));
    CHECK(net::injection_density(testing::fig1_case(1.0, 2.0, -3.0)) == 1.0);
}

TEST_CASE("property: reduced system invariants over random networks") {
    for (std::uint64_t seed = 1; seed <= 15; ++seed) {
        const auto net = seed % 3 == 0 ? testing::ring_case(10 + seed, seed)
                       : seed % 3 == 1 ? testing::grid_case(3, 2 + seed % 5, seed)
                                       : testing::tree_chords_case(8 + 2 * seed, seed, seed);
        INFO("case " << net.name);
        const auto sys = net::build_reduced_system(net);
        const auto slack = sys.slack_id;

        CHECK(sys.a.is_symmetric());

        // Full Laplacian rows sum to zero.
        const auto full = net::full_laplacian(net);
        for (std::size_t i = 0; i < full.n(); ++i) {
            double sum = 0.0;
            for (std::size_t j = 0; j < full.n(); ++j) {
                sum += full.coeff(i, j);
            }
            CHECK(std::abs(sum) <= 1e-12 * full.coeff(i, i));
        }

        // Reduced row sums equal the susceptance to the slack; diagonal dominance follows.
        for (std::size_t r = 0; r < sys.n(); ++r) {
            double row_sum = 0.0;
            double off = 0.0;
            for (std::size_t j = 0; j < sys.n(); ++j) {
                row_sum += sys.a.coeff(r, j);
                off += j == r ? 0.0 : std::abs(sys.a.coeff(r, j));
            }
            double to_slack = 0.0;
            for (const auto& br : net.branches) {
                if (br.in_service && ((br.from_bus == slack && br.to_bus == sys.row_bus[r]) ||
                                      (br.to_bus == slack && br.from_bus == sys.row_bus[r]))) {
                    to_slack += br.susceptance;
                }
            }
            CHECK(row_sum == doctest::Approx(to_slack).epsilon(1e-10).scale(sys.a.coeff(r, r)));
            CHECK(sys.a.coeff(r, r) >= off * (1.0 - 1e-12));
        }

        CHECK(testing::dense_eigenvalues(sys.a).minCoeff() > 0.0);

        // Reordering branches never changes the matrix.
        auto shuffled = net;
        std::mt19937_64 rng(seed);
        std::shuffle(shuffled.branches.begin(), shuffled.branches.end(), rng);
        CHECK(net::build_reduced_system(shuffled).a == sys.a);
    }
}

TEST_CASE("round trip through MATPOWER text reproduces the system") {
    const auto net = testing::tree_chords_case(30, 10, 3);
    const auto parsed = net::parse_case(testing::to_matpower(net), net.name);
    const auto a = net::build_reduced_system(net);
    const auto b = net::build_reduced_system(parsed);
    const Eigen::MatrixXd diff = testing::dense(a.a) - testing::dense(b.a);
    CHECK(diff.cwiseAbs().maxCoeff() <= 1e-13 * testing::dense(a.a).cwiseAbs().maxCoeff());
    CHECK(testing::relative_error(b.b, a.b) < 1e-14);
}
