#pragma once

#include <cstddef>
#include <vector>

#include "fairrank/core.hpp"

namespace fairrank {

/// Normal skill and bias distributions for a synthetic population.
struct DistributionSpec {
    double mu_skill = 0.0;
    double sigma_skill = 1.0;
    double mu_bias = 0.0; // <= 0: lowers the unprivileged group's perceived scores
    double sigma_bias = 0.5;
};

/// Expected win probabilities that pin down a DistributionSpec.
struct CalibrationTarget {
    double p_stronger = 0.75; // stronger individual wins
    double p_discr = 0.75;    // privileged individual wins
};

struct CalibrationOptions {
    int quadrature_points = 64;
    double tolerance = 1e-6;       // on the probability scale
    double sigma_bias_ratio = 0.5; // sigma_bias = ratio * sigma_skill
};

/// Nodes and weights for integrals against exp(-x^2).
struct GaussHermiteRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

/// Golub-Welsch construction of an n-point Gauss-Hermite rule.
GaussHermiteRule gauss_hermite(int points);

/// E[f(X)] for X ~ Normal(mean, stddev^2) by Gauss-Hermite quadrature.
template <class F>
double expect_normal(const GaussHermiteRule& rule, double mean, double stddev, F&& f);

double logistic(double x) noexcept;

/// P(i beats j) = 1 / (1 + exp(s_j - s_i)).
double btl_win_probability(double s_i, double s_j) noexcept;

/// Expected probability that the stronger of two random individuals wins.
double expected_stronger_win(double sigma_skill, const GaussHermiteRule& rule);

/// Expected probability that a random privileged individual beats a random unprivileged one.
double expected_privileged_win(const DistributionSpec& spec, const GaussHermiteRule& rule);

/**
 * Solves for sigma_skill and then mu_bias so that the two expected win
 * probabilities hit the target. mu_skill is fixed at 0 and
 * sigma_bias = sigma_bias_ratio * sigma_skill.
 */
DistributionSpec calibrate(const CalibrationTarget& target, const CalibrationOptions& options = {});

/// Monte-Carlo estimate of both calibrated probabilities from simulated BTL outcomes.
CalibrationTarget estimate_probabilities(const DistributionSpec& spec, std::size_t pairs,
                                         SeededRng& rng);

/// floor(n * unpriv_fraction) unprivileged members, the rest privileged.
Population generate_population(std::size_t n, double unpriv_fraction, const DistributionSpec& spec,
                               SeededRng& rng);

/// Simulated judgement on perceived scores; consumes exactly one uniform draw.
NodeId btl_compare(const Individual& i, const Individual& j, SeededRng& rng);

// ---------------------------------------------------------------------------

template <class F>
double expect_normal(const GaussHermiteRule& rule, double mean, double stddev, F&& f) {
    constexpr double kInvSqrtPi = 0.56418958354775628695;
    constexpr double kSqrt2 = 1.41421356237309504880;
    double acc = 0.0;
    for (std::size_t k = 0; k < rule.nodes.size(); ++k) {
        acc += rule.weights[k] * f(mean + kSqrt2 * stddev * rule.nodes[k]);
    }
    return acc * kInvSqrtPi;
}

} // namespace fairrank
