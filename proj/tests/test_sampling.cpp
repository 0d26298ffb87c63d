#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "fairrank/sampling.hpp"
#include "support.hpp"

using namespace fairrank;
using Catch::Approx;

namespace {

Population halves(std::size_t n) {
    return testing::make_population(testing::alternating_groups(n), std::vector<double>(n, 0.0));
}

bool distinct(std::vector<NodeId> ids) {
    std::sort(ids.begin(), ids.end());
    return std::adjacent_find(ids.begin(), ids.end()) == ids.end();
}

// P(first two sequential weighted draws without replacement form {i, j}).
double pair_probability(const std::vector<double>& w, std::size_t i, std::size_t j) {
    double total = 0.0;
    for (double x : w) {
        total += x;
    }
    return w[i] / total * w[j] / (total - w[i]) + w[j] / total * w[i] / (total - w[j]);
}

} // namespace

TEST_CASE("random sampling draws a fifth of the population without repeats", "[sampling]") {
    const Population p = halves(400);
    SeededRng rng(1);
    const auto ids = sample_individuals({}, p, nullptr, rng);
    REQUIRE(ids.size() == 80);
    REQUIRE(distinct(ids));
    for (NodeId id : ids) {
        REQUIRE(id < 400);
    }
}

TEST_CASE("oversampling takes three unprivileged per privileged", "[sampling]") {
    const Population p = halves(400);
    SeededRng rng(2);
    const auto ids = sample_individuals({Oversampling{0.75}, 0.2}, p, nullptr, rng);
    REQUIRE(ids.size() == 80);
    REQUIRE(distinct(ids));
    const auto unpriv = std::count_if(ids.begin(), ids.end(),
                                      [&](NodeId i) { return p[i].group == Group::Unprivileged; });
    REQUIRE(unpriv == 60);
}

TEST_CASE("oversampling counts are clamped and refilled from the other group", "[sampling]") {
    std::vector<Group> groups(10, Group::Privileged);
    groups[3] = Group::Unprivileged;
    groups[8] = Group::Unprivileged;
    const Population p = testing::make_population(groups, std::vector<double>(10, 0.0));
    SeededRng rng(3);
    const auto ids = sample_individuals({Oversampling{0.75}, 0.6}, p, nullptr, rng);
    REQUIRE(ids.size() == 6);
    REQUIRE(distinct(ids));
    REQUIRE(std::count_if(ids.begin(), ids.end(),
                          [&](NodeId i) { return p[i].group == Group::Unprivileged; }) == 2);
}

TEST_CASE("odd sample sizes drop one id and tiny samples are rejected", "[sampling]") {
    const Population p = halves(15);
    SeededRng rng(4);
    // round(0.2 * 15) = 3
    REQUIRE(sample_individuals({}, p, nullptr, rng).size() == 2);
    REQUIRE_THROWS_AS(sample_individuals({RandomSampling{}, 0.05}, p, nullptr, rng), InvalidInput);
    REQUIRE_THROWS_AS(sample_individuals({RandomSampling{}, 0.0}, p, nullptr, rng), InvalidInput);
    REQUIRE_THROWS_AS(sample_individuals({RandomSampling{}, 1.5}, p, nullptr, rng), InvalidInput);
    REQUIRE_THROWS_AS(validate({Oversampling{1.0}, 0.2}, 400), InvalidInput);
    REQUIRE_THROWS_AS(validate({RankBasedSampling{0.0, 0.02}, 0.2}, 400), InvalidInput);
    REQUIRE_THROWS_AS(validate({RankBasedSampling{5.0, 0.0}, 0.2}, 400), InvalidInput);
}

TEST_CASE("rank weights favour the top by the stated ratio", "[sampling]") {
    const RankBasedSampling params{5.0, 0.02};
    const double ratio = rank_weight(0, 400, params) / rank_weight(399, 400, params);
    const double expected = 1.0 / (0.02 + 0.98 * std::exp(-5.0));
    REQUIRE(ratio == Approx(expected).epsilon(1e-14));
    REQUIRE(ratio == Approx(37.6).margin(0.05));
    for (std::size_t r = 0; r < 400; ++r) {
        REQUIRE(rank_weight(r, 400, params) > 0.0);
        if (r > 0) {
            REQUIRE(rank_weight(r, 400, params) < rank_weight(r - 1, 400, params));
        }
    }
}

TEST_CASE("rank-based sampling falls back to random without a ranking", "[sampling]") {
    const Population p = halves(100);
    SeededRng a(5);
    SeededRng b(5);
    const SamplingStrategy rb{RankBasedSampling{}, 0.2};
    REQUIRE(sample_individuals(rb, p, nullptr, a) == sample_individuals({}, p, nullptr, b));
    REQUIRE(selection_weights(rb, p, nullptr) == std::vector<double>(100, 1.0));

    const Ranking short_ranking = Ranking::from_order(std::vector<NodeId>{0, 1, 2});
    REQUIRE_THROWS_AS(sample_individuals(rb, p, &short_ranking, a), InvalidInput);
}

TEST_CASE("rank-based draws follow sequential weighted sampling", "[sampling]") {
    const Population p = halves(4);
    const Ranking ranking = Ranking::from_order(std::vector<NodeId>{2, 0, 3, 1});
    const SamplingStrategy rb{RankBasedSampling{2.0, 0.1}, 0.5};
    const std::vector<double> w = selection_weights(rb, p, &ranking);
    REQUIRE(w[2] == Approx(1.0));
    REQUIRE(w[1] == Approx(0.1 + 0.9 * std::exp(-2.0)));

    SeededRng rng(6);
    std::map<std::pair<NodeId, NodeId>, int> counts;
    const int runs = 40000;
    for (int r = 0; r < runs; ++r) {
        auto ids = sample_individuals(rb, p, &ranking, rng);
        REQUIRE(ids.size() == 2);
        std::sort(ids.begin(), ids.end());
        ++counts[{ids[0], ids[1]}];
    }
    for (NodeId i = 0; i < 4; ++i) {
        for (NodeId j = i + 1; j < 4; ++j) {
            const double expected = pair_probability(w, i, j);
            const double sd = std::sqrt(expected * (1 - expected) / runs);
            REQUIRE(static_cast<double>(counts[{i, j}]) / runs == Approx(expected).margin(4 * sd));
        }
    }
}

TEST_CASE("pairing is a uniform perfect matching", "[sampling]") {
    SeededRng rng(7);
    const std::vector<NodeId> two{3, 7};
    const auto only = pair_randomly(two, rng);
    REQUIRE(only.size() == 1);
    REQUIRE(std::min(only[0].first, only[0].second) == 3);
    REQUIRE(std::max(only[0].first, only[0].second) == 7);

    std::vector<NodeId> eighty(80);
    for (NodeId i = 0; i < 80; ++i) {
        eighty[i] = 2 * i;
    }
    const auto pairs = pair_randomly(eighty, rng);
    REQUIRE(pairs.size() == 40);
    std::multiset<NodeId> seen;
    for (const auto& [a, b] : pairs) {
        seen.insert(a);
        seen.insert(b);
    }
    REQUIRE(seen == std::multiset<NodeId>(eighty.begin(), eighty.end()));

    // Matchings of {0,1,2,3} are named by 0's partner.
    const std::vector<NodeId> four{0, 1, 2, 3};
    std::map<NodeId, int> partner;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        for (const auto& [a, b] : pair_randomly(four, rng)) {
            if (a == 0) {
                ++partner[b];
            } else if (b == 0) {
                ++partner[a];
            }
        }
    }
    REQUIRE(partner.size() == 3);
    for (const auto& [who, c] : partner) {
        REQUIRE(static_cast<double>(c) / runs == Approx(1.0 / 3.0).margin(0.02));
    }

    const std::vector<NodeId> odd{1, 2, 3};
    REQUIRE_THROWS_AS(pair_randomly(odd, rng), InvalidInput);
}

TEST_CASE("edge sampling examples", "[sampling]") {
    const Population p = halves(4);
    SeededRng rng(8);

    ComparisonGraph single(4);
    single.record(1, 2);
    for (const SamplingStrategy& s :
         {SamplingStrategy{}, SamplingStrategy{Oversampling{}, 0.5}, SamplingStrategy{RankBasedSampling{}, 0.5}}) {
        const auto e = sample_edges(s, single, p, nullptr, 1, rng);
        REQUIRE(e == std::vector<Pair>{{1, 2}});
    }

    ComparisonGraph three(4);
    three.record(0, 1);
    three.record(1, 2, 5);
    three.record(3, 0);
    std::map<Pair, int> counts;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        ++counts[sample_edges({}, three, p, nullptr, 1, rng).at(0)];
    }
    REQUIRE(counts.size() == 3);
    for (const auto& [edge, c] : counts) {
        REQUIRE(static_cast<double>(c) / runs == Approx(1.0 / 3.0).margin(0.02));
    }

    // 0 and 2 are privileged, 1 and 3 unprivileged.
    ComparisonGraph mixed(4);
    mixed.record(1, 3);
    mixed.record(0, 2);
    const SamplingStrategy over{Oversampling{0.75}, 0.5};
    const auto w = selection_weights(over, p, nullptr);
    REQUIRE(w[1] * w[3] / (w[0] * w[2]) == Approx(9.0));
    int unpriv_edge = 0;
    for (int r = 0; r < runs; ++r) {
        unpriv_edge += sample_edges(over, mixed, p, nullptr, 1, rng).at(0) == Pair{1, 3} ? 1 : 0;
    }
    REQUIRE(static_cast<double>(unpriv_edge) / runs == Approx(0.9).margin(0.015));

    REQUIRE(sample_edges({}, three, p, nullptr, 10, rng).size() == 3);
    REQUIRE_THROWS_AS(sample_edges({}, ComparisonGraph(4), p, nullptr, 1, rng), InvalidInput);
    REQUIRE_THROWS_AS(sample_edges({}, three, p, nullptr, 0, rng), InvalidInput);
}

TEST_CASE("edge keys reproduce sequential weighted draws", "[sampling]") {
    const Population p = halves(4);
    const Ranking ranking = Ranking::from_order(std::vector<NodeId>{3, 1, 0, 2});
    const SamplingStrategy rb{RankBasedSampling{3.0, 0.05}, 0.5};
    const std::vector<Pair> edges{{0, 1}, {0, 2}, {1, 3}, {2, 3}};
    const auto node_w = selection_weights(rb, p, &ranking);
    std::vector<double> w;
    for (const auto& [a, b] : edges) {
        w.push_back(node_w[a] * node_w[b]);
    }
    SeededRng rng(9);
    std::map<std::pair<std::size_t, std::size_t>, int> counts;
    const int runs = 40000;
    for (int r = 0; r < runs; ++r) {
        auto idx = sample_edge_indices(rb, edges, p, &ranking, 2, rng);
        std::sort(idx.begin(), idx.end());
        ++counts[{idx[0], idx[1]}];
    }
    for (std::size_t i = 0; i < edges.size(); ++i) {
        for (std::size_t j = i + 1; j < edges.size(); ++j) {
            const double expected = pair_probability(w, i, j);
            const double sd = std::sqrt(expected * (1 - expected) / runs);
            REQUIRE(static_cast<double>(counts[{i, j}]) / runs == Approx(expected).margin(4 * sd + 1e-4));
        }
    }
}

TEST_CASE("oversampling skews pair composition towards the unprivileged", "[sampling][property]") {
    const Population p = halves(400);
    SeededRng rng(10);
    long hetero = 0;
    long homo_unpriv = 0;
    for (int it = 0; it < 1000; ++it) {
        const auto ids = sample_individuals({Oversampling{}, 0.2}, p, nullptr, rng);
        for (const auto& [a, b] : pair_randomly(ids, rng)) {
            const bool ua = p[a].group == Group::Unprivileged;
            const bool ub = p[b].group == Group::Unprivileged;
            hetero += ua != ub ? 1 : 0;
            homo_unpriv += ua && ub ? 1 : 0;
        }
    }
    REQUIRE(hetero < homo_unpriv);
}

TEST_CASE("random sampling is group-blind", "[sampling][property]") {
    const Population p = halves(400);
    SeededRng rng(11);
    long unpriv = 0;
    const int iterations = 1000;
    for (int it = 0; it < iterations; ++it) {
        const auto ids = sample_individuals({}, p, nullptr, rng);
        REQUIRE(distinct(ids));
        unpriv += std::count_if(ids.begin(), ids.end(),
                                [&](NodeId i) { return p[i].group == Group::Unprivileged; });
    }
    const double draws = 80.0 * iterations;
    // Binomial bound; without-replacement draws only shrink the variance.
    REQUIRE(std::abs(unpriv - draws / 2) < 3 * std::sqrt(draws / 4));
}
