#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <variant>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

struct RandomSampling {};

/// Fixed share of each sample drawn from the unprivileged group.
struct Oversampling {
    double unpriv_share = 0.75;
};

/// Selection weight floor + (1 - floor) * exp(-decay * rank / (n - 1)).
struct RankBasedSampling {
    double decay = 5.0;
    double floor = 0.02;
};

using SamplingVariant = std::variant<RandomSampling, Oversampling, RankBasedSampling>;

struct SamplingStrategy {
    SamplingVariant variant = RandomSampling{};
    double sample_fraction = 0.2;
};

using Pair = std::pair<NodeId, NodeId>;

/// Throws InvalidInput when parameters are out of range for a population of size n.
void validate(const SamplingStrategy& strategy, std::size_t n);

double rank_weight(std::size_t rank, std::size_t n, const RankBasedSampling& params) noexcept;

/**
 * Per-node selection weight under a strategy: 1 everywhere for Random (and for
 * RankBased before any ranking exists), unpriv_share / 1 - unpriv_share by
 * group for Oversampling, rank_weight for RankBased.
 */
std::vector<double> selection_weights(const SamplingStrategy& strategy, const Population& population,
                                      const Ranking* last_ranking);

/**
 * Draws round(sample_fraction * n) distinct ids. An odd draw loses one
 * uniformly chosen id so pairing is total. last_ranking may be null; RankBased
 * then falls back to uniform selection.
 */
std::vector<NodeId> sample_individuals(const SamplingStrategy& strategy,
                                       const Population& population, const Ranking* last_ranking,
                                       SeededRng& rng);

/// Uniform perfect matching: shuffle, then consecutive pairs.
std::vector<Pair> pair_randomly(std::span<const NodeId> sampled, SeededRng& rng);

/**
 * Weighted sampling without replacement over candidate edges, edge weight
 * being the product of its endpoints' selection weights. Returns indices into
 * `candidates`, at most `budget` of them.
 */
std::vector<std::size_t> sample_edge_indices(const SamplingStrategy& strategy,
                                             std::span<const Pair> candidates,
                                             const Population& population,
                                             const Ranking* last_ranking, std::size_t budget,
                                             SeededRng& rng);

/// Draws up to `budget` distinct compared pairs of `graph` (pairs as (low id, high id)).
std::vector<Pair> sample_edges(const SamplingStrategy& strategy, const ComparisonGraph& graph,
                               const Population& population, const Ranking* last_ranking,
                               std::size_t budget, SeededRng& rng);

/// Every compared pair of the graph once, as (low id, high id), ordered.
std::vector<Pair> compared_pairs(const ComparisonGraph& graph);

} // namespace fairrank
