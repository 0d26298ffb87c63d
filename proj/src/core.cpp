#include "fairrank/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace fairrank {

std::string_view to_string(Group group) noexcept {
    return group == Group::Privileged ? "privileged" : "unprivileged";
}

Population::Population(std::vector<Individual> individuals)
    : individuals_(std::move(individuals)) {
    const std::size_t n = individuals_.size();
    groups_.resize(n);
    skills_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const Individual& ind = individuals_[i];
        if (ind.id != i) {
            throw InvalidInput("population ids must be contiguous 0..n-1; position " +
                               std::to_string(i) + " holds id " + std::to_string(ind.id));
        }
        if (ind.group == Group::Privileged && ind.perceived != ind.skill) {
            throw InvalidInput("privileged individual " + std::to_string(i) +
                               " has perceived score different from skill");
        }
        groups_[i] = ind.group;
        skills_[i] = ind.skill;
        (ind.group == Group::Privileged ? privileged_ : unprivileged_).push_back(ind.id);
    }
    if (privileged_.empty() || unprivileged_.empty()) {
        throw InvalidInput("population needs at least one member in each group");
    }
}

const Matchup* ComparisonGraph::find(NodeId i, NodeId j) const {
    const auto& row = adjacency_[i];
    auto it = std::lower_bound(row.begin(), row.end(), j,
                               [](const Matchup& m, NodeId id) { return m.opponent < id; });
    return (it != row.end() && it->opponent == j) ? &*it : nullptr;
}

void ComparisonGraph::record(NodeId winner, NodeId loser, std::uint32_t count) {
    const std::size_t n = size();
    if (winner >= n || loser >= n) {
        throw InvalidInput("comparison between " + std::to_string(winner) + " and " +
                           std::to_string(loser) + " is out of range for n=" + std::to_string(n));
    }
    if (winner == loser) {
        throw InvalidInput("self-comparison of node " + std::to_string(winner));
    }
    if (count == 0) {
        return;
    }

    auto upsert = [](std::vector<Matchup>& row, NodeId opponent) -> std::pair<Matchup&, bool> {
        auto it = std::lower_bound(row.begin(), row.end(), opponent,
                                   [](const Matchup& m, NodeId id) { return m.opponent < id; });
        if (it != row.end() && it->opponent == opponent) {
            return {*it, false};
        }
        it = row.insert(it, Matchup{opponent, 0, 0});
        return {*it, true};
    };

    auto [forward, inserted] = upsert(adjacency_[winner], loser);
    forward.wins += count;
    auto [backward, unused] = upsert(adjacency_[loser], winner);
    backward.losses += count;
    (void)unused;

    if (inserted) {
        ++pairs_;
    }
    total_ += count;
}

std::uint32_t ComparisonGraph::wins(NodeId i, NodeId j) const {
    const Matchup* m = find(i, j);
    return m ? m->wins : 0;
}

double ComparisonGraph::ratio(NodeId i, NodeId j) const {
    const Matchup* m = find(i, j);
    if (!m || m->total() == 0) {
        return 0.0;
    }
    return static_cast<double>(m->losses) / static_cast<double>(m->total());
}

std::size_t ComparisonGraph::max_opponents() const noexcept {
    std::size_t best = 0;
    for (const auto& row : adjacency_) {
        best = std::max(best, row.size());
    }
    return best;
}

Eigen::MatrixXd winning_ratio_matrix(const ComparisonGraph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.size());
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
    for (NodeId i = 0; i < graph.size(); ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            a(i, m.opponent) = static_cast<double>(m.losses) / static_cast<double>(m.total());
        }
    }
    return a;
}

Ranking::Ranking(std::vector<std::size_t> rank_of, std::vector<double> scores)
    : rank_of_(std::move(rank_of)), scores_(std::move(scores)) {
    const std::size_t n = rank_of_.size();
    if (scores_.size() != n) {
        throw InvalidInput("ranking has " + std::to_string(n) + " ranks but " +
                           std::to_string(scores_.size()) + " scores");
    }
    std::vector<NodeId> by_rank(n, 0);
    std::vector<bool> seen(n, false);
    for (std::size_t id = 0; id < n; ++id) {
        const std::size_t r = rank_of_[id];
        if (r >= n || seen[r]) {
            throw InvalidInput("rank_of is not a permutation of 0..n-1");
        }
        seen[r] = true;
        by_rank[r] = static_cast<NodeId>(id);
    }
    for (std::size_t r = 1; r < n; ++r) {
        if (scores_[by_rank[r]] > scores_[by_rank[r - 1]]) {
            throw InvalidInput("ranking places a higher score below a lower one at rank " +
                               std::to_string(r));
        }
    }
}

Ranking Ranking::from_order(std::span<const NodeId> order) {
    const std::size_t n = order.size();
    std::vector<std::size_t> rank_of(n, n);
    std::vector<double> scores(n, 0.0);
    for (std::size_t r = 0; r < n; ++r) {
        if (order[r] >= n) {
            throw InvalidInput("order contains id out of range");
        }
        rank_of[order[r]] = r;
        scores[order[r]] = static_cast<double>(n - r);
    }
    return Ranking(std::move(rank_of), std::move(scores));
}

std::vector<NodeId> Ranking::order() const {
    std::vector<NodeId> out(size());
    for (std::size_t id = 0; id < size(); ++id) {
        out[rank_of_[id]] = static_cast<NodeId>(id);
    }
    return out;
}

Ranking ranking_from_scores(std::span<const double> scores, SeededRng& rng) {
    const std::size_t n = scores.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (!std::isfinite(scores[i])) {
            throw InvalidInput("score of node " + std::to_string(i) + " is not finite");
        }
    }
    // Shuffling first and sorting stably leaves each tied block in uniformly random order.
    std::vector<NodeId> order(n);
    std::iota(order.begin(), order.end(), NodeId{0});
    rng.shuffle(std::span<NodeId>(order));
    std::stable_sort(order.begin(), order.end(),
                     [&](NodeId a, NodeId b) { return scores[a] > scores[b]; });

    std::vector<std::size_t> rank_of(n);
    for (std::size_t r = 0; r < n; ++r) {
        rank_of[order[r]] = r;
    }
    return Ranking(std::move(rank_of), std::vector<double>(scores.begin(), scores.end()));
}

} // namespace fairrank
