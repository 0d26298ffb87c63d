#include "fairrank/recovery.hpp"

#include <algorithm>
#include <sstream>

namespace fairrank {

std::vector<double> fair_pagerank(const ComparisonGraph& graph, std::span<const Group> groups,
                                  const FairPageRank& params, std::span<const double> start) {
    const std::size_t n = graph.size();
    if (groups.size() != n) {
        throw InvalidInput("group labels do not cover the graph");
    }
    if (!(params.phi > 0.0 && params.phi < 1.0) ||
        !(params.damping > 0.0 && params.damping < 1.0) || !(params.tol > 0.0) ||
        params.max_iters < 1) {
        throw InvalidInput("FairPageRank parameters out of range");
    }
    if (graph.empty()) {
        throw InvalidInput("FairPageRank needs at least one recorded comparison");
    }
    const auto unpriv_size = static_cast<std::size_t>(
        std::count(groups.begin(), groups.end(), Group::Unprivileged));
    const std::size_t priv_size = n - unpriv_size;
    if (unpriv_size == 0 || priv_size == 0) {
        throw InvalidInput("FairPageRank needs both groups to be non-empty");
    }

    auto share = [&](Group g) { return g == Group::Unprivileged ? params.phi : 1.0 - params.phi; };

    // Out-multiplicity of each node towards each group: one unit edge per loss.
    std::vector<double> out_unpriv(n, 0.0);
    std::vector<double> out_priv(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            (groups[m.opponent] == Group::Unprivileged ? out_unpriv : out_priv)[i] += m.losses;
        }
    }

    // A node with no out-edge into a group spreads that group's share uniformly over it.
    std::vector<double> residual_unpriv(n, 0.0);
    std::vector<double> residual_priv(n, 0.0);
    for (NodeId i = 0; i < n; ++i) {
        if (out_unpriv[i] == 0.0) residual_unpriv[i] = params.damping * params.phi;
        if (out_priv[i] == 0.0) residual_priv[i] = params.damping * (1.0 - params.phi);
    }

    kernels::PullMatrix op;
    op.offsets.assign(1, 0);
    for (NodeId j = 0; j < n; ++j) {
        const bool j_unpriv = groups[j] == Group::Unprivileged;
        for (const Matchup& m : graph.matchups(j)) {
            if (m.wins == 0) {
                continue; // j never beat this opponent, so no edge opponent -> j
            }
            const NodeId i = m.opponent;
            const double denom = j_unpriv ? out_unpriv[i] : out_priv[i];
            op.sources.push_back(i);
            op.weights.push_back(params.damping * share(groups[j]) * m.wins / denom);
        }
        op.offsets.push_back(op.sources.size());
    }

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    if (start.size() == n) {
        const double mass = kernels::sum_parallel(start);
        if (mass > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = std::max(start[i], 0.0) / mass;
            }
        }
    }
    std::vector<double> y(n);
    const double restart = 1.0 - params.damping;

    double change = 0.0;
    for (std::size_t it = 0; it < params.max_iters; ++it) {
        kernels::propagate_parallel(op, x, y);
        const double mass = kernels::sum_parallel(x);
        const double to_unpriv =
            (kernels::dot_parallel(x, residual_unpriv) + restart * params.phi * mass) /
            static_cast<double>(unpriv_size);
        const double to_priv =
            (kernels::dot_parallel(x, residual_priv) + restart * (1.0 - params.phi) * mass) /
            static_cast<double>(priv_size);
        for (std::size_t j = 0; j < n; ++j) {
            y[j] += groups[j] == Group::Unprivileged ? to_unpriv : to_priv;
        }
        change = kernels::l1_distance_parallel(x, y);
        std::swap(x, y);
        if (change < params.tol) {
            const double total = kernels::sum_parallel(x);
            for (double& v : x) {
                v /= total;
            }
            return x;
        }
    }
    std::ostringstream msg;
    msg << "FairPageRank did not converge in " << params.max_iters
        << " iterations (last L1 change " << change << ")";
    throw ConvergenceError(msg.str(), change, params.max_iters);
}

} // namespace fairrank
