#include "fairrank/kernels.hpp"

#include <cmath>

namespace fairrank::kernels {

void CompensatedSum::add(double value) noexcept {
    const double t = sum_ + value;
    if (std::abs(sum_) >= std::abs(value)) {
        compensation_ += (sum_ - t) + value;
    } else {
        compensation_ += (value - t) + sum_;
    }
    sum_ = t;
}

void propagate_serial(const PullMatrix& m, std::span<const double> x, std::span<double> y) {
    const std::size_t n = m.size();
    for (std::size_t j = 0; j < n; ++j) {
        double acc = 0.0;
        for (std::size_t k = m.offsets[j]; k < m.offsets[j + 1]; ++k) {
            acc += x[m.sources[k]] * m.weights[k];
        }
        y[j] = acc;
    }
}

double sum_serial(std::span<const double> x) {
    CompensatedSum s;
    for (double v : x) {
        s.add(v);
    }
    return s.value();
}

double dot_serial(std::span<const double> a, std::span<const double> b) {
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.add(a[i] * b[i]);
    }
    return s.value();
}

double l1_distance_serial(std::span<const double> a, std::span<const double> b) {
    CompensatedSum s;
    for (std::size_t i = 0; i < a.size(); ++i) {
        s.add(std::abs(a[i] - b[i]));
    }
    return s.value();
}

DiscordanceSlots pair_discordance_serial(std::span<const double> skills,
                                         std::span<const std::size_t> ranks,
                                         std::span<const std::uint8_t> tags) {
    const std::size_t n = skills.size();
    std::array<CompensatedSum, 3> discordant;
    std::array<CompensatedSum, 3> total;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double gap = skills[i] - skills[j];
            const double weight = gap * gap;
            const double rank_gap =
                static_cast<double>(ranks[i]) - static_cast<double>(ranks[j]);
            const bool is_discordant = gap * rank_gap > 0.0;
            const std::uint8_t touched = tags[i] | tags[j];

            total[0].add(weight);
            if (is_discordant) {
                discordant[0].add(weight);
            }
            for (int bit = 0; bit < 2; ++bit) {
                if (touched & (1u << bit)) {
                    total[bit + 1].add(weight);
                    if (is_discordant) {
                        discordant[bit + 1].add(weight);
                    }
                }
            }
        }
    }
    DiscordanceSlots out;
    for (int s = 0; s < 3; ++s) {
        out[s] = {discordant[s].value(), total[s].value()};
    }
    return out;
}

} // namespace fairrank::kernels
