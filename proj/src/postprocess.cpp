#include "fairrank/postprocess.hpp"

#include <cmath>
#include <string>

#include <boost/math/distributions/binomial.hpp>

namespace fairrank {
namespace {

void check_groups(const Ranking& ranking, std::span<const Group> groups) {
    if (groups.size() != ranking.size()) {
        throw InvalidInput("group labels do not cover the ranking");
    }
}

double position_exposure(std::size_t rank) noexcept {
    return 1.0 / std::log2(static_cast<double>(rank) + 2.0);
}

} // namespace

std::vector<std::size_t> fair_mtable(double p, double alpha, std::size_t k) {
    if (!(p > 0.0 && p < 1.0) || !(alpha > 0.0 && alpha < 1.0)) {
        throw InvalidInput("FA*IR needs p and alpha strictly inside (0, 1)");
    }
    std::vector<std::size_t> table(k, 0);
    std::size_t m = 0;
    for (std::size_t t = 1; t <= k; ++t) {
        const boost::math::binomial_distribution<double> dist(static_cast<double>(t), p);
        // CDF(m; t, p) falls as t grows, so the minimum never decreases.
        while (boost::math::cdf(dist, static_cast<double>(m)) <= alpha) {
            ++m;
        }
        table[t - 1] = m;
    }
    return table;
}

Ranking fair_rerank(const Ranking& ranking, std::span<const Group> groups, const FairConfig& config) {
    check_groups(ranking, groups);
    const std::size_t n = ranking.size();
    const std::size_t k = config.k.value_or(n);
    if (k > n) {
        throw InvalidInput("FA*IR prefix length k exceeds ranking length");
    }
    const std::vector<std::size_t> table = fair_mtable(config.p, config.alpha, k);

    std::vector<NodeId> protected_queue;
    std::vector<NodeId> other_queue;
    for (NodeId id : ranking.order()) {
        (groups[id] == Group::Unprivileged ? protected_queue : other_queue).push_back(id);
    }

    std::vector<NodeId> out;
    out.reserve(n);
    std::size_t next_protected = 0;
    std::size_t next_other = 0;
    for (std::size_t t = 1; t <= n; ++t) {
        const bool have_protected = next_protected < protected_queue.size();
        const bool have_other = next_other < other_queue.size();
        const bool short_of_table = t <= k && next_protected < table[t - 1];
        if (short_of_table && !have_protected && config.exhaustion == FairExhaustion::Fail) {
            throw ConstraintInfeasible("FA*IR needs " + std::to_string(table[t - 1]) +
                                           " protected candidates in the top " + std::to_string(t) +
                                           " but only " + std::to_string(protected_queue.size()) +
                                           " exist",
                                       t);
        }
        bool take_protected = (short_of_table && have_protected) || !have_other;
        if (!take_protected && have_protected) {
            take_protected = ranking.rank(protected_queue[next_protected]) <
                             ranking.rank(other_queue[next_other]);
        }
        out.push_back(take_protected ? protected_queue[next_protected++] : other_queue[next_other++]);
    }
    return Ranking::from_order(out);
}

double exposure_ratio(const Ranking& ranking, std::span<const Group> groups) {
    check_groups(ranking, groups);
    double unpriv = 0.0;
    double priv = 0.0;
    std::size_t n_unpriv = 0;
    std::size_t n_priv = 0;
    for (NodeId id = 0; id < ranking.size(); ++id) {
        const double e = position_exposure(ranking.rank(id));
        if (groups[id] == Group::Unprivileged) {
            unpriv += e;
            ++n_unpriv;
        } else {
            priv += e;
            ++n_priv;
        }
    }
    if (n_unpriv == 0 || n_priv == 0) {
        throw InvalidInput("exposure ratio needs both groups to be non-empty");
    }
    return (unpriv / static_cast<double>(n_unpriv)) / (priv / static_cast<double>(n_priv));
}

EpiraResult epira_rerank(const Ranking& ranking, std::span<const Group> groups,
                         const EpiraConfig& config) {
    check_groups(ranking, groups);
    if (!(config.bnd >= 0.0 && config.bnd <= 1.0)) {
        throw InvalidInput("EPIRA bnd must lie in [0, 1]");
    }
    std::vector<NodeId> order = ranking.order();
    const std::size_t n = order.size();

    double unpriv_sum = 0.0;
    double priv_sum = 0.0;
    std::size_t n_unpriv = 0;
    for (std::size_t r = 0; r < n; ++r) {
        if (groups[order[r]] == Group::Unprivileged) {
            unpriv_sum += position_exposure(r);
            ++n_unpriv;
        } else {
            priv_sum += position_exposure(r);
        }
    }
    const std::size_t n_priv = n - n_unpriv;
    if (n_unpriv == 0 || n_priv == 0) {
        throw InvalidInput("EPIRA needs both groups to be non-empty");
    }
    auto ratio = [&] {
        return (unpriv_sum / static_cast<double>(n_unpriv)) / (priv_sum / static_cast<double>(n_priv));
    };

    // Moving an unprivileged candidate from r+1 to r gains
    // 1/log2(r+2) - 1/log2(r+3), which shrinks with r, so the topmost
    // privileged-above-unprivileged pair is always the best swap.
    EpiraResult result;
    std::size_t scan = 0;
    double current = ratio();
    while (current < config.bnd && result.swaps < config.max_swaps) {
        while (scan + 1 < n && !(groups[order[scan]] == Group::Privileged &&
                                 groups[order[scan + 1]] == Group::Unprivileged)) {
            ++scan;
        }
        if (scan + 1 >= n) {
            break;
        }
        const double gain = position_exposure(scan) - position_exposure(scan + 1);
        std::swap(order[scan], order[scan + 1]);
        unpriv_sum += gain;
        priv_sum -= gain;
        ++result.swaps;
        current = ratio();
        scan = scan > 0 ? scan - 1 : 0;
    }
    result.ranking = Ranking::from_order(order);
    result.ratio = current;
    result.bound_reached = current >= config.bnd;
    return result;
}

PostprocessOutcome apply_postprocess(const Postprocess& config, const Ranking& ranking,
                                     std::span<const Group> groups) {
    if (const auto* fair = std::get_if<FairConfig>(&config)) {
        return {fair_rerank(ranking, groups, *fair), true};
    }
    if (const auto* epira = std::get_if<EpiraConfig>(&config)) {
        EpiraResult r = epira_rerank(ranking, groups, *epira);
        return {std::move(r.ranking), r.bound_reached};
    }
    return {ranking, true};
}

} // namespace fairrank
