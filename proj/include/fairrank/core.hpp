#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

#include "fairrank/errors.hpp"
#include "fairrank/rng.hpp"

namespace fairrank {

using NodeId = std::uint32_t;

enum class Group : std::uint8_t { Privileged, Unprivileged };

std::string_view to_string(Group group) noexcept;

struct Individual {
    NodeId id = 0;
    Group group = Group::Privileged;
    double skill = 0.0;     // latent ground truth
    double perceived = 0.0; // drives the comparisons
};

/// Individuals with contiguous ids and both groups present.
class Population {
public:
    explicit Population(std::vector<Individual> individuals);

    std::size_t size() const noexcept { return individuals_.size(); }
    const Individual& operator[](NodeId id) const { return individuals_[id]; }
    std::span<const Individual> individuals() const noexcept { return individuals_; }

    std::span<const NodeId> members(Group group) const noexcept {
        return group == Group::Privileged ? privileged_ : unprivileged_;
    }
    std::span<const Group> groups() const noexcept { return groups_; }
    std::span<const double> skills() const noexcept { return skills_; }

private:
    std::vector<Individual> individuals_;
    std::vector<NodeId> privileged_;
    std::vector<NodeId> unprivileged_;
    std::vector<Group> groups_;
    std::vector<double> skills_;
};

/// One compared pair as seen from its owning node.
struct Matchup {
    NodeId opponent = 0;
    std::uint32_t wins = 0;   // owner beat opponent
    std::uint32_t losses = 0; // opponent beat owner

    std::uint32_t total() const noexcept { return wins + losses; }
    bool operator==(const Matchup&) const = default;
};

/**
 * Sparse record of pairwise outcomes.
 *
 * Counts are stored as integers per unordered pair (mirrored in both
 * endpoints' matchup lists, each list sorted by opponent). Winning ratios are
 * derived on demand: ratio(i, j) is the share of comparisons between i and j
 * won by j, zero for pairs never compared.
 */
class ComparisonGraph {
public:
    explicit ComparisonGraph(std::size_t n = 0) : adjacency_(n) {}

    void record(NodeId winner, NodeId loser, std::uint32_t count = 1);

    std::size_t size() const noexcept { return adjacency_.size(); }
    std::uint64_t total_comparisons() const noexcept { return total_; }
    std::size_t compared_pairs() const noexcept { return pairs_; }
    bool empty() const noexcept { return total_ == 0; }

    /// Number of times i beat j.
    std::uint32_t wins(NodeId i, NodeId j) const;
    double ratio(NodeId i, NodeId j) const;

    std::span<const Matchup> matchups(NodeId i) const { return adjacency_[i]; }

    /// Largest number of distinct opponents of any node.
    std::size_t max_opponents() const noexcept;

    bool operator==(const ComparisonGraph&) const = default;

private:
    const Matchup* find(NodeId i, NodeId j) const;

    std::vector<std::vector<Matchup>> adjacency_;
    std::uint64_t total_ = 0;
    std::size_t pairs_ = 0;
};

/// Dense winning-ratio matrix A with A(i, j) = share of j's wins against i.
Eigen::MatrixXd winning_ratio_matrix(const ComparisonGraph& graph);

/// A permutation with 0-indexed ranks (0 = best) plus the scores behind it.
class Ranking {
public:
    Ranking() = default;
    /// Validates that rank_of is a permutation and that ranks respect scores.
    Ranking(std::vector<std::size_t> rank_of, std::vector<double> scores);

    /// Builds a ranking from best-to-worst order; scores become n - rank.
    static Ranking from_order(std::span<const NodeId> order);

    std::size_t size() const noexcept { return rank_of_.size(); }
    std::span<const std::size_t> rank_of() const noexcept { return rank_of_; }
    std::span<const double> scores() const noexcept { return scores_; }
    std::size_t rank(NodeId id) const { return rank_of_[id]; }

    /// Ids from best to worst.
    std::vector<NodeId> order() const;

    bool operator==(const Ranking&) const = default;

private:
    std::vector<std::size_t> rank_of_;
    std::vector<double> scores_;
};

/// Descending sort by score; exact ties are ordered uniformly at random.
Ranking ranking_from_scores(std::span<const double> scores, SeededRng& rng);

} // namespace fairrank
