#include "fairrank/rng.hpp"

#include <cmath>
#include <numbers>

#include "fairrank/errors.hpp"

namespace fairrank {
namespace {
__extension__ using u128 = unsigned __int128;
} // namespace

std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t stream) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

std::size_t SeededRng::uniform_index(std::size_t bound) {
    if (bound == 0) {
        throw InvalidInput("uniform_index needs a positive bound");
    }
    // Lemire's multiply-shift with rejection; unbiased.
    const auto range = static_cast<std::uint64_t>(bound);
    std::uint64_t x = engine_();
    auto m = static_cast<u128>(x) * range;
    auto low = static_cast<std::uint64_t>(m);
    if (low < range) {
        const std::uint64_t threshold = (0 - range) % range;
        while (low < threshold) {
            x = engine_();
            m = static_cast<u128>(x) * range;
            low = static_cast<std::uint64_t>(m);
        }
    }
    return static_cast<std::size_t>(m >> 64);
}

double SeededRng::normal(double mean, double stddev) {
    // Box-Muller, one variate per call so the stream position is easy to reason about.
    double u1 = uniform();
    while (u1 <= 0.0) {
        u1 = uniform();
    }
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    return mean + stddev * r * std::cos(2.0 * std::numbers::pi * u2);
}

} // namespace fairrank
