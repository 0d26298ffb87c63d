#include <catch2/catch_amalgamated.hpp>

#include <omp.h>

#include "fairrank/kernels.hpp"
#include "fairrank/recovery.hpp"
#include "support.hpp"

using namespace fairrank;
using namespace fairrank::kernels;
using Catch::Approx;

namespace {

std::vector<double> random_vector(std::size_t n, SeededRng& rng) {
    std::vector<double> v(n);
    for (double& x : v) {
        x = rng.normal(0.0, 1.0);
    }
    return v;
}

// Runs f with a fixed OpenMP thread count, restoring the previous setting.
template <class F>
auto with_threads(int threads, F&& f) {
    const int before = omp_get_max_threads();
    omp_set_num_threads(threads);
    auto result = f();
    omp_set_num_threads(before);
    return result;
}

} // namespace

TEST_CASE("compensated sum recovers cancelled low-order terms", "[kernels]") {
    CompensatedSum s;
    s.add(1.0);
    s.add(1e100);
    s.add(1.0);
    s.add(-1e100);
    REQUIRE(s.value() == 2.0);
}

TEST_CASE("parallel reductions match the serial reference", "[kernels]") {
    SeededRng rng(9);
    for (std::size_t n : {0ul, 1ul, 7ul, 4096ul, 4097ul, 50000ul}) {
        const auto a = random_vector(n, rng);
        const auto b = random_vector(n, rng);
        REQUIRE(sum_parallel(a) == Approx(sum_serial(a)).margin(1e-12));
        REQUIRE(dot_parallel(a, b) == Approx(dot_serial(a, b)).margin(1e-12));
        REQUIRE(l1_distance_parallel(a, b) == Approx(l1_distance_serial(a, b)).margin(1e-12));
    }
}

TEST_CASE("parallel reductions do not depend on the thread count", "[kernels]") {
    SeededRng rng(10);
    const auto a = random_vector(30000, rng);
    const double one = with_threads(1, [&] { return sum_parallel(a); });
    const double four = with_threads(4, [&] { return sum_parallel(a); });
    REQUIRE(one == four);
}

TEST_CASE("parallel propagation is identical to serial", "[kernels]") {
    SeededRng rng(12);
    const ComparisonGraph g = testing::random_graph(300, 3000, rng);
    const PullMatrix op = rank_centrality_operator(g, DegreeNormalization::MaxDegree);
    const auto x = random_vector(300, rng);
    std::vector<double> ys(300);
    std::vector<double> yp(300);
    propagate_serial(op, x, ys);
    propagate_parallel(op, x, yp);
    REQUIRE(ys == yp);
}

TEST_CASE("pair discordance: parallel matches serial and the brute-force oracle", "[kernels]") {
    SeededRng rng(13);
    for (std::size_t n : {2ul, 5ul, 64ul, 257ul}) {
        std::vector<double> skills = random_vector(n, rng);
        std::vector<NodeId> order(n);
        for (std::size_t i = 0; i < n; ++i) {
            order[i] = static_cast<NodeId>(i);
        }
        rng.shuffle(std::span<NodeId>(order));
        const Ranking ranking = Ranking::from_order(order);
        std::vector<std::uint8_t> tags(n);
        std::vector<bool> bit0(n);
        std::vector<bool> bit1(n);
        std::vector<bool> everyone(n, true);
        for (std::size_t i = 0; i < n; ++i) {
            tags[i] = static_cast<std::uint8_t>(rng.uniform_index(4));
            bit0[i] = (tags[i] & 1) != 0;
            bit1[i] = (tags[i] & 2) != 0;
        }
        const auto s = pair_discordance_serial(skills, ranking.rank_of(), tags);
        const auto p = pair_discordance_parallel(skills, ranking.rank_of(), tags);
        for (int slot = 0; slot < 3; ++slot) {
            REQUIRE(p[slot].discordant == Approx(s[slot].discordant).epsilon(1e-13).margin(1e-13));
            REQUIRE(p[slot].total == Approx(s[slot].total).epsilon(1e-13).margin(1e-13));
        }
        const std::vector<std::size_t> ranks(ranking.rank_of().begin(), ranking.rank_of().end());
        REQUIRE(std::sqrt(s[0].discordant / s[0].total) ==
                Approx(testing::kemeny_oracle(skills, ranks, everyone)).margin(1e-12));
        if (s[1].total > 0) {
            REQUIRE(std::sqrt(s[1].discordant / s[1].total) ==
                    Approx(testing::kemeny_oracle(skills, ranks, bit0)).margin(1e-12));
        }
        if (s[2].total > 0) {
            REQUIRE(std::sqrt(s[2].discordant / s[2].total) ==
                    Approx(testing::kemeny_oracle(skills, ranks, bit1)).margin(1e-12));
        }
    }
}
