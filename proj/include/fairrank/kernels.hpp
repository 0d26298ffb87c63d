#pragma once

// Data-parallel inner loops shared by recovery and metrics.
//
// Every kernel comes in two flavours: a plain serial reference kept for
// testing and benchmarking, and an OpenMP version. The parallel versions are
// deterministic for any thread count: per-row results are computed by a
// single thread in a fixed order, and reductions combine fixed-size blocks in
// index order.

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank::kernels {

/// Neumaier compensated accumulator.
class CompensatedSum {
public:
    void add(double value) noexcept;
    double value() const noexcept { return sum_ + compensation_; }

private:
    double sum_ = 0.0;
    double compensation_ = 0.0;
};

/**
 * Column-compressed sparse operator for pull-style propagation:
 * y[j] = sum over k in [offsets[j], offsets[j+1]) of x[sources[k]] * weights[k].
 */
struct PullMatrix {
    std::vector<std::size_t> offsets{0};
    std::vector<NodeId> sources;
    std::vector<double> weights;

    std::size_t size() const noexcept { return offsets.size() - 1; }
    std::size_t nonzeros() const noexcept { return sources.size(); }
};

void propagate_serial(const PullMatrix& m, std::span<const double> x, std::span<double> y);
void propagate_parallel(const PullMatrix& m, std::span<const double> x, std::span<double> y);

double sum_serial(std::span<const double> x);
double sum_parallel(std::span<const double> x);

double dot_serial(std::span<const double> a, std::span<const double> b);
double dot_parallel(std::span<const double> a, std::span<const double> b);

double l1_distance_serial(std::span<const double> a, std::span<const double> b);
double l1_distance_parallel(std::span<const double> a, std::span<const double> b);

/// Weighted discordance totals for pairs touching a node set.
struct DiscordanceTotals {
    double discordant = 0.0;
    double total = 0.0;
};

/**
 * Skill-gap-weighted discordance over all unordered pairs.
 *
 * Each node carries a bit tag; slot 0 accumulates every pair, slot 1 the
 * pairs with at least one endpoint tagged with bit 0, slot 2 the pairs with
 * at least one endpoint tagged with bit 1. A pair (i, j) is discordant when
 * (t_i - t_j)(r_i - r_j) > 0, i.e. higher skill sits at a worse rank.
 */
using DiscordanceSlots = std::array<DiscordanceTotals, 3>;

DiscordanceSlots pair_discordance_serial(std::span<const double> skills,
                                         std::span<const std::size_t> ranks,
                                         std::span<const std::uint8_t> tags);
DiscordanceSlots pair_discordance_parallel(std::span<const double> skills,
                                           std::span<const std::size_t> ranks,
                                           std::span<const std::uint8_t> tags);

} // namespace fairrank::kernels
