#include "fairrank/metrics.hpp"

#include <cmath>
#include <cstdint>
#include <vector>

#include "fairrank/kernels.hpp"

namespace fairrank {
namespace {

double normalised(const kernels::DiscordanceTotals& totals) {
    if (!(totals.total > 0.0)) {
        throw UndefinedMetric("weighted Kemeny distance is undefined: all relevant skills are equal");
    }
    return std::sqrt(totals.discordant / totals.total);
}

void check_sizes(std::span<const double> skills, const Ranking& ranking) {
    if (skills.size() != ranking.size()) {
        throw InvalidInput("skills and ranking differ in length");
    }
}

std::vector<std::uint8_t> membership(std::size_t n, std::span<const NodeId> group, std::uint8_t bit) {
    std::vector<std::uint8_t> tags(n, 0);
    for (NodeId id : group) {
        if (id >= n) {
            throw InvalidInput("group member out of range");
        }
        tags[id] |= bit;
    }
    return tags;
}

} // namespace

double group_weighted_kemeny(std::span<const double> skills, const Ranking& ranking,
                             std::span<const NodeId> group) {
    check_sizes(skills, ranking);
    if (group.empty()) {
        throw InvalidInput("group must be non-empty");
    }
    const auto tags = membership(skills.size(), group, 1);
    const auto slots = kernels::pair_discordance_parallel(skills, ranking.rank_of(), tags);
    return normalised(slots[1]);
}

double error_difference(std::span<const double> skills, const Ranking& ranking,
                        std::span<const NodeId> privileged, std::span<const NodeId> unprivileged) {
    check_sizes(skills, ranking);
    if (privileged.empty() || unprivileged.empty()) {
        throw InvalidInput("both groups must be non-empty");
    }
    std::vector<std::uint8_t> tags = membership(skills.size(), privileged, 1);
    for (NodeId id : unprivileged) {
        if (id >= tags.size()) {
            throw InvalidInput("group member out of range");
        }
        tags[id] |= 2;
    }
    const auto slots = kernels::pair_discordance_parallel(skills, ranking.rank_of(), tags);
    return normalised(slots[2]) - normalised(slots[1]);
}

double exposure(const Ranking& ranking, std::span<const NodeId> group) {
    if (group.empty()) {
        throw InvalidInput("group must be non-empty");
    }
    double acc = 0.0;
    for (NodeId id : group) {
        acc += 1.0 / std::log2(static_cast<double>(ranking.rank(id)) + 2.0);
    }
    return acc / static_cast<double>(group.size());
}

MetricsRecord evaluate(const Population& population, const Ranking& ranking, std::size_t iteration,
                       std::size_t trial) {
    const auto skills = population.skills();
    check_sizes(skills, ranking);
    std::vector<std::uint8_t> tags(population.size(), 0);
    for (NodeId i = 0; i < population.size(); ++i) {
        tags[i] = population[i].group == Group::Privileged ? 1 : 2;
    }
    const auto slots = kernels::pair_discordance_parallel(skills, ranking.rank_of(), tags);

    MetricsRecord rec;
    rec.iteration = iteration;
    rec.trial = trial;
    rec.error_all = normalised(slots[0]);
    rec.error_priv = normalised(slots[1]);
    rec.error_unpriv = normalised(slots[2]);
    rec.error_diff = rec.error_unpriv - rec.error_priv;
    rec.exposure_priv = exposure(ranking, population.members(Group::Privileged));
    rec.exposure_unpriv = exposure(ranking, population.members(Group::Unprivileged));
    rec.exposure_diff = rec.exposure_unpriv - rec.exposure_priv;
    return rec;
}

} // namespace fairrank
