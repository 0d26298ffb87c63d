#include "fairrank/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace fairrank {
namespace {

std::size_t sample_size(const SamplingStrategy& strategy, std::size_t n) {
    return static_cast<std::size_t>(std::llround(strategy.sample_fraction * static_cast<double>(n)));
}

// Partial Fisher-Yates: k distinct elements of `pool`, uniformly.
void draw_uniform(std::vector<NodeId> pool, std::size_t k, SeededRng& rng,
                  std::vector<NodeId>& out) {
    for (std::size_t t = 0; t < k; ++t) {
        const std::size_t j = t + rng.uniform_index(pool.size() - t);
        std::swap(pool[t], pool[j]);
        out.push_back(pool[t]);
    }
}

// Sequential draws with renormalisation after each pick.
void draw_weighted(std::vector<double> weights, std::size_t k, SeededRng& rng,
                   std::vector<NodeId>& out) {
    for (std::size_t t = 0; t < k; ++t) {
        double total = 0.0;
        for (double w : weights) {
            total += w;
        }
        const double target = rng.uniform() * total;
        double running = 0.0;
        std::size_t pick = weights.size();
        std::size_t last_positive = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) {
                continue;
            }
            last_positive = i;
            running += weights[i];
            if (target < running) {
                pick = i;
                break;
            }
        }
        if (pick == weights.size()) {
            pick = last_positive; // rounding at the very top of the range
        }
        out.push_back(static_cast<NodeId>(pick));
        weights[pick] = 0.0;
    }
}

} // namespace

void validate(const SamplingStrategy& strategy, std::size_t n) {
    if (!(strategy.sample_fraction > 0.0 && strategy.sample_fraction <= 1.0)) {
        throw InvalidInput("sample_fraction must lie in (0, 1]");
    }
    const std::size_t k = sample_size(strategy, n);
    if (k > n) {
        throw InvalidInput("sample size exceeds population size");
    }
    if (k < 2) {
        std::ostringstream msg;
        msg << "sample_fraction " << strategy.sample_fraction << " of n=" << n
            << " selects fewer than two individuals";
        throw InvalidInput(msg.str());
    }
    if (const auto* over = std::get_if<Oversampling>(&strategy.variant)) {
        if (!(over->unpriv_share > 0.0 && over->unpriv_share < 1.0)) {
            throw InvalidInput("oversampling unpriv_share must lie in (0, 1)");
        }
    }
    if (const auto* rb = std::get_if<RankBasedSampling>(&strategy.variant)) {
        if (!(rb->decay > 0.0)) {
            throw InvalidInput("rank-based decay must be positive");
        }
        if (!(rb->floor > 0.0 && rb->floor < 1.0)) {
            throw InvalidInput("rank-based floor must lie in (0, 1)");
        }
    }
}

double rank_weight(std::size_t rank, std::size_t n, const RankBasedSampling& params) noexcept {
    const double position =
        n > 1 ? static_cast<double>(rank) / static_cast<double>(n - 1) : 0.0;
    return params.floor + (1.0 - params.floor) * std::exp(-params.decay * position);
}

std::vector<double> selection_weights(const SamplingStrategy& strategy, const Population& population,
                                      const Ranking* last_ranking) {
    const std::size_t n = population.size();
    std::vector<double> weights(n, 1.0);
    if (const auto* over = std::get_if<Oversampling>(&strategy.variant)) {
        for (NodeId i = 0; i < n; ++i) {
            weights[i] = population[i].group == Group::Unprivileged ? over->unpriv_share
                                                                    : 1.0 - over->unpriv_share;
        }
    } else if (const auto* rb = std::get_if<RankBasedSampling>(&strategy.variant)) {
        if (last_ranking) {
            if (last_ranking->size() != n) {
                throw InvalidInput("rank-based sampling needs a ranking covering the population");
            }
            for (NodeId i = 0; i < n; ++i) {
                weights[i] = rank_weight(last_ranking->rank(i), n, *rb);
            }
        }
    }
    return weights;
}

std::vector<NodeId> sample_individuals(const SamplingStrategy& strategy,
                                       const Population& population, const Ranking* last_ranking,
                                       SeededRng& rng) {
    const std::size_t n = population.size();
    validate(strategy, n);
    const std::size_t k = sample_size(strategy, n);

    std::vector<NodeId> sampled;
    sampled.reserve(k);

    if (const auto* over = std::get_if<Oversampling>(&strategy.variant)) {
        const auto unpriv = population.members(Group::Unprivileged);
        const auto priv = population.members(Group::Privileged);
        std::size_t k_unpriv = static_cast<std::size_t>(
            std::llround(over->unpriv_share * static_cast<double>(k)));
        k_unpriv = std::min(k_unpriv, unpriv.size());
        std::size_t k_priv = k - k_unpriv;
        if (k_priv > priv.size()) {
            k_priv = priv.size();
            k_unpriv = std::min(k - k_priv, unpriv.size());
        }
        draw_uniform({unpriv.begin(), unpriv.end()}, k_unpriv, rng, sampled);
        draw_uniform({priv.begin(), priv.end()}, k_priv, rng, sampled);
    } else if (std::holds_alternative<RankBasedSampling>(strategy.variant) && last_ranking) {
        draw_weighted(selection_weights(strategy, population, last_ranking), k, rng, sampled);
    } else {
        std::vector<NodeId> all(n);
        std::iota(all.begin(), all.end(), NodeId{0});
        draw_uniform(std::move(all), k, rng, sampled);
    }

    if (sampled.size() % 2 == 1) {
        sampled.erase(sampled.begin() + static_cast<std::ptrdiff_t>(rng.uniform_index(sampled.size())));
    }
    return sampled;
}

std::vector<Pair> pair_randomly(std::span<const NodeId> sampled, SeededRng& rng) {
    if (sampled.size() % 2 != 0) {
        throw InvalidInput("cannot pair an odd number of individuals (" +
                           std::to_string(sampled.size()) + ")");
    }
    std::vector<NodeId> order(sampled.begin(), sampled.end());
    rng.shuffle(std::span<NodeId>(order));
    std::vector<Pair> pairs;
    pairs.reserve(order.size() / 2);
    for (std::size_t t = 0; t + 1 < order.size(); t += 2) {
        pairs.emplace_back(order[t], order[t + 1]);
    }
    return pairs;
}

std::vector<std::size_t> sample_edge_indices(const SamplingStrategy& strategy,
                                             std::span<const Pair> candidates,
                                             const Population& population,
                                             const Ranking* last_ranking, std::size_t budget,
                                             SeededRng& rng) {
    if (candidates.empty()) {
        throw InvalidInput("cannot sample edges from an empty graph");
    }
    if (budget == 0) {
        throw InvalidInput("edge budget must be at least 1");
    }
    const std::vector<double> node_w = selection_weights(strategy, population, last_ranking);

    // Efraimidis-Spirakis keys log(u) / w: the top-k keys are distributed
    // exactly like k sequential weighted draws without replacement.
    std::vector<std::pair<double, std::size_t>> keyed(candidates.size());
    for (std::size_t e = 0; e < candidates.size(); ++e) {
        const auto [a, b] = candidates[e];
        const double w = node_w[a] * node_w[b];
        double u = rng.uniform();
        while (u <= 0.0) {
            u = rng.uniform();
        }
        keyed[e] = {std::log(u) / w, e};
    }
    const std::size_t take = std::min(budget, keyed.size());
    auto by_key = [](const auto& x, const auto& y) {
        return x.first > y.first || (x.first == y.first && x.second < y.second);
    };
    std::partial_sort(keyed.begin(), keyed.begin() + static_cast<std::ptrdiff_t>(take), keyed.end(),
                      by_key);
    std::vector<std::size_t> picked(take);
    for (std::size_t t = 0; t < take; ++t) {
        picked[t] = keyed[t].second;
    }
    return picked;
}

std::vector<Pair> compared_pairs(const ComparisonGraph& graph) {
    std::vector<Pair> pairs;
    pairs.reserve(graph.compared_pairs());
    for (NodeId i = 0; i < graph.size(); ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            if (i < m.opponent) {
                pairs.emplace_back(i, m.opponent);
            }
        }
    }
    return pairs;
}

std::vector<Pair> sample_edges(const SamplingStrategy& strategy, const ComparisonGraph& graph,
                               const Population& population, const Ranking* last_ranking,
                               std::size_t budget, SeededRng& rng) {
    if (graph.empty()) {
        throw InvalidInput("cannot sample edges from an empty graph");
    }
    const std::vector<Pair> candidates = compared_pairs(graph);
    const auto picked =
        sample_edge_indices(strategy, candidates, population, last_ranking, budget, rng);
    std::vector<Pair> out;
    out.reserve(picked.size());
    for (std::size_t idx : picked) {
        out.push_back(candidates[idx]);
    }
    return out;
}

} // namespace fairrank
