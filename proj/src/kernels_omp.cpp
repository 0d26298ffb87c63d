#include "fairrank/kernels.hpp"

#include <algorithm>
#include <cmath>

namespace fairrank::kernels {
namespace {

// Reduction block length. Fixed so results do not depend on the thread count.
constexpr std::size_t kBlock = 4096;

template <class Term>
double blocked_sum(std::size_t n, Term term) {
    const std::size_t blocks = (n + kBlock - 1) / kBlock;
    std::vector<double> partial(blocks, 0.0);
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t b = 0; b < static_cast<std::ptrdiff_t>(blocks); ++b) {
        CompensatedSum s;
        const std::size_t begin = static_cast<std::size_t>(b) * kBlock;
        const std::size_t end = std::min(n, begin + kBlock);
        for (std::size_t i = begin; i < end; ++i) {
            s.add(term(i));
        }
        partial[static_cast<std::size_t>(b)] = s.value();
    }
    CompensatedSum total;
    for (double p : partial) {
        total.add(p);
    }
    return total.value();
}

} // namespace

void propagate_parallel(const PullMatrix& m, std::span<const double> x, std::span<double> y) {
    const auto n = static_cast<std::ptrdiff_t>(m.size());
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t jj = 0; jj < n; ++jj) {
        const auto j = static_cast<std::size_t>(jj);
        double acc = 0.0;
        for (std::size_t k = m.offsets[j]; k < m.offsets[j + 1]; ++k) {
            acc += x[m.sources[k]] * m.weights[k];
        }
        y[j] = acc;
    }
}

double sum_parallel(std::span<const double> x) {
    return blocked_sum(x.size(), [&](std::size_t i) { return x[i]; });
}

double dot_parallel(std::span<const double> a, std::span<const double> b) {
    return blocked_sum(a.size(), [&](std::size_t i) { return a[i] * b[i]; });
}

double l1_distance_parallel(std::span<const double> a, std::span<const double> b) {
    return blocked_sum(a.size(), [&](std::size_t i) { return std::abs(a[i] - b[i]); });
}

DiscordanceSlots pair_discordance_parallel(std::span<const double> skills,
                                           std::span<const std::size_t> ranks,
                                           std::span<const std::uint8_t> tags) {
    const std::size_t n = skills.size();
    // One row of partials per i; rows are combined serially in index order.
    std::vector<std::array<double, 6>> rows(n);

#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t ii = 0; ii < static_cast<std::ptrdiff_t>(n); ++ii) {
        const auto i = static_cast<std::size_t>(ii);
        std::array<CompensatedSum, 3> discordant;
        std::array<CompensatedSum, 3> total;
        const double ti = skills[i];
        const double ri = static_cast<double>(ranks[i]);
        const std::uint8_t tag_i = tags[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = ti - skills[j];
            const double weight = gap * gap;
            const bool is_discordant = gap * (ri - static_cast<double>(ranks[j])) > 0.0;
            const std::uint8_t touched = tag_i | tags[j];

            total[0].add(weight);
            if (is_discordant) {
                discordant[0].add(weight);
            }
            if (touched & 1u) {
                total[1].add(weight);
                if (is_discordant) {
                    discordant[1].add(weight);
                }
            }
            if (touched & 2u) {
                total[2].add(weight);
                if (is_discordant) {
                    discordant[2].add(weight);
                }
            }
        }
        for (int s = 0; s < 3; ++s) {
            rows[i][2 * s] = discordant[s].value();
            rows[i][2 * s + 1] = total[s].value();
        }
    }

    std::array<CompensatedSum, 6> acc;
    for (const auto& row : rows) {
        for (int k = 0; k < 6; ++k) {
            acc[k].add(row[k]);
        }
    }
    DiscordanceSlots out;
    for (int s = 0; s < 3; ++s) {
        out[s] = {acc[2 * s].value(), acc[2 * s + 1].value()};
    }
    return out;
}

} // namespace fairrank::kernels
