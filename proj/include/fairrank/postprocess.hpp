#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <variant>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

/// What FA*IR does when the table asks for a protected candidate and none is left.
enum class FairExhaustion {
    Fail, // throw ConstraintInfeasible
    Fill, // continue with the remaining non-protected candidates, as the reference implementation does
};

/// FA*IR parameters; the unprivileged group is the protected one.
struct FairConfig {
    double p = 0.6;
    double alpha = 0.1;
    std::optional<std::size_t> k; // protected prefix length, whole ranking when empty
    FairExhaustion exhaustion = FairExhaustion::Fail;
};

struct EpiraConfig {
    double bnd = 0.9;
    std::size_t max_swaps = 10'000'000;
};

struct NoPostprocess {};

using Postprocess = std::variant<NoPostprocess, FairConfig, EpiraConfig>;

/**
 * Minimum protected count per prefix: m[t-1] = min{ m : BinomCDF(m; t, p) > alpha }
 * for t = 1..k. Unadjusted per-prefix test.
 */
std::vector<std::size_t> fair_mtable(double p, double alpha, std::size_t k);

/**
 * Greedy FA*IR merge. Each group keeps its recovered order; a protected
 * candidate is forced in whenever the prefix would otherwise fall below the
 * table, otherwise the better-ranked head goes next. Output scores are n - rank.
 * With FairExhaustion::Fill, prefixes past the point where the protected pool
 * runs dry are left short instead of throwing.
 */
Ranking fair_rerank(const Ranking& ranking, std::span<const Group> groups, const FairConfig& config);

/// Exp(unprivileged) / Exp(privileged) of a ranking.
double exposure_ratio(const Ranking& ranking, std::span<const Group> groups);

struct EpiraResult {
    Ranking ranking;
    double ratio = 0.0; // achieved exposure ratio
    std::size_t swaps = 0;
    bool bound_reached = false;
};

/**
 * Repairs the exposure ratio with adjacent privileged/unprivileged swaps,
 * always taking the swap with the largest ratio gain (the topmost one), until
 * the ratio reaches bnd, no swap is left, or the budget runs out. Not reaching
 * the bound is reported in the result, not thrown.
 */
EpiraResult epira_rerank(const Ranking& ranking, std::span<const Group> groups,
                         const EpiraConfig& config);

struct PostprocessOutcome {
    Ranking ranking;
    bool bound_reached = true; // false only for an EPIRA run that stopped short
};

/// Applies the configured post-processor (identity for NoPostprocess).
PostprocessOutcome apply_postprocess(const Postprocess& config, const Ranking& ranking,
                                     std::span<const Group> groups);

} // namespace fairrank
