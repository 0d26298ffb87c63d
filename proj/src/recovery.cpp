#include "fairrank/recovery.hpp"

#include <numeric>
#include <string>

namespace fairrank {

std::string_view method_name(const RecoveryMethod& method) noexcept {
    struct Visitor {
        std::string_view operator()(const RandomBaseline&) const { return "random"; }
        std::string_view operator()(const DavidsScore&) const { return "davids_score"; }
        std::string_view operator()(const RankCentrality&) const { return "rank_centrality"; }
        std::string_view operator()(const SerialRank&) const { return "serial_rank"; }
        std::string_view operator()(const FairPageRank&) const { return "fair_pagerank"; }
    };
    return std::visit(Visitor{}, method);
}

std::string_view method_names() noexcept {
    return "random, davids_score, rank_centrality, serial_rank, fair_pagerank";
}

RecoveryMethod method_from_name(std::string_view name) {
    if (name == "random") return RandomBaseline{};
    if (name == "davids_score") return DavidsScore{};
    if (name == "rank_centrality") return RankCentrality{};
    if (name == "serial_rank") return SerialRank{};
    if (name == "fair_pagerank") return FairPageRank{};
    throw InvalidInput("unknown recovery method '" + std::string(name) +
                       "'; valid methods: " + std::string(method_names()));
}

std::vector<double> recover_random(std::size_t n, SeededRng& rng) {
    if (n == 0) {
        throw InvalidInput("random recovery needs at least one node");
    }
    std::vector<double> scores(n);
    std::iota(scores.begin(), scores.end(), 0.0);
    rng.shuffle(std::span<double>(scores));
    return scores;
}

std::vector<double> davids_score(const ComparisonGraph& graph) {
    const std::size_t n = graph.size();
    // w_i = sum_j A_ji (share of i's wins), l_i = sum_j A_ij (share of i's losses)
    std::vector<double> w(n, 0.0);
    std::vector<double> l(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            const double total = m.total();
            w[i] += m.wins / total;
            l[i] += m.losses / total;
        }
    }
    std::vector<double> ds(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        double w_bar = 0.0;
        double l_bar = 0.0;
        for (const Matchup& m : graph.matchups(i)) {
            const double total = m.total();
            w_bar += (m.wins / total) * w[m.opponent];
            l_bar += (m.losses / total) * l[m.opponent];
        }
        ds[i] = w[i] + w_bar - l[i] - l_bar;
    }
    return ds;
}

std::vector<double> recover(const RecoveryMethod& method, const ComparisonGraph& graph,
                            std::span<const Group> groups, SeededRng& rng,
                            std::span<const double> start) {
    struct Visitor {
        const ComparisonGraph& graph;
        std::span<const Group> groups;
        SeededRng& rng;
        std::span<const double> start;

        std::vector<double> operator()(const RandomBaseline&) const {
            return recover_random(graph.size(), rng);
        }
        std::vector<double> operator()(const DavidsScore&) const { return davids_score(graph); }
        std::vector<double> operator()(const RankCentrality& p) const {
            return rank_centrality(graph, p, start);
        }
        std::vector<double> operator()(const SerialRank& p) const { return serial_rank(graph, p); }
        std::vector<double> operator()(const FairPageRank& p) const {
            return fair_pagerank(graph, groups, p, start);
        }
    };
    return std::visit(Visitor{graph, groups, rng, start}, method);
}

} // namespace fairrank
