#pragma once

#include <cstddef>
#include <span>

#include "fairrank/core.hpp"

namespace fairrank {

/// One evaluation row.
struct MetricsRecord {
    std::size_t iteration = 0;
    std::size_t trial = 0;
    double error_all = 0.0;
    double error_priv = 0.0;
    double error_unpriv = 0.0;
    double error_diff = 0.0; // error_unpriv - error_priv
    double exposure_priv = 0.0;
    double exposure_unpriv = 0.0;
    double exposure_diff = 0.0; // exposure_unpriv - exposure_priv

    bool operator==(const MetricsRecord&) const = default;
};

/**
 * Group-conditioned weighted Kemeny distance:
 *
 *   sqrt( sum (t_i - t_j)^2 [discordant] / sum (t_i - t_j)^2 )
 *
 * over unordered pairs {i, j} with at least one endpoint in `group`. With
 * rank 0 = best, the pair is discordant when (t_i - t_j)(r_i - r_j) > 0.
 * Throws UndefinedMetric when every relevant pair has equal skills.
 */
double group_weighted_kemeny(std::span<const double> skills, const Ranking& ranking,
                             std::span<const NodeId> group);

/// D(unprivileged) - D(privileged).
double error_difference(std::span<const double> skills, const Ranking& ranking,
                        std::span<const NodeId> privileged, std::span<const NodeId> unprivileged);

/// Mean of 1 / log2(rank + 2) over the group's members.
double exposure(const Ranking& ranking, std::span<const NodeId> group);

/// All metrics for one ranking in a single pass over the pairs.
MetricsRecord evaluate(const Population& population, const Ranking& ranking,
                       std::size_t iteration = 0, std::size_t trial = 0);

} // namespace fairrank
