#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <utility>

namespace fairrank {

/// splitmix64 finaliser; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept;

/**
 * Seeded pseudo-random source.
 *
 * The engine is mt19937_64, whose output sequence is fixed by the C++
 * standard. The standard distributions are not, so every derived variate
 * (uniform reals, bounded integers, normals) is computed here from raw
 * engine output. Same seed, same stream, on every conforming platform.
 */
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : seed_(seed), engine_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [0, bound). bound must be positive.
    std::size_t uniform_index(std::size_t bound);

    double normal(double mean, double stddev);

    /// Independent generator for a named sub-stream.
    SeededRng child(std::uint64_t stream) const { return SeededRng(mix_seed(seed_, stream)); }

    template <class T>
    void shuffle(std::span<T> values) {
        for (std::size_t i = values.size(); i > 1; --i) {
            std::size_t j = uniform_index(i);
            std::swap(values[i - 1], values[j]);
        }
    }

private:
    std::uint64_t seed_;
    std::mt19937_64 engine_;
};

} // namespace fairrank
