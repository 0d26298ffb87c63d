#include "fairrank/synth.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fairrank {
namespace {

constexpr double kSigmaSkillMax = 1.0e3;
constexpr double kMuBiasMin = -1.0e3;
constexpr int kMaxBisections = 200;

void check_open_unit_half(double p, const char* name) {
    if (!(p > 0.5 && p < 1.0)) {
        std::ostringstream msg;
        msg << name << " must lie strictly between 0.5 and 1, got " << p;
        throw InvalidInput(msg.str());
    }
}

// Bisection on a monotone function; `increasing` tells which way it runs.
double bisect(double lo, double hi, double target, double tol, bool increasing,
              const auto& f) {
    double mid = 0.5 * (lo + hi);
    for (int it = 0; it < kMaxBisections; ++it) {
        mid = 0.5 * (lo + hi);
        const double value = f(mid);
        if (std::abs(value - target) < tol) {
            return mid;
        }
        if ((value < target) == increasing) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return mid;
}

// Beyond this spread the rule's nodes are too sparse around the logistic's
// unit-scale features; measured error stays under 5e-7 below it.
double resolved_spread(const GaussHermiteRule& rule) {
    return 2.5 * std::sqrt(static_cast<double>(rule.nodes.size()) / 64.0);
}

double logistic_density(double t) {
    const double e = std::exp(-std::abs(t));
    return e / ((1.0 + e) * (1.0 + e));
}

double normal_tail(double z) {
    return 0.5 * std::erfc(z / std::numbers::sqrt2);
}

// P(D + L > 0) with L standard logistic: the same expectation written as a
// smooth integral against the logistic density, for spreads the rule misses.
double integrate_logistic(const auto& f, double lo) {
    using boost::math::quadrature::gauss_kronrod;
    return gauss_kronrod<double, 61>::integrate(f, lo, std::numeric_limits<double>::infinity(), 15,
                                                1e-13);
}

} // namespace

GaussHermiteRule gauss_hermite(int points) {
    if (points < 1) {
        throw InvalidInput("quadrature needs at least one point");
    }
    const auto n = static_cast<Eigen::Index>(points);
    Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
    Eigen::VectorXd sub(std::max<Eigen::Index>(n - 1, 0));
    for (Eigen::Index k = 1; k < n; ++k) {
        sub(k - 1) = std::sqrt(static_cast<double>(k) / 2.0);
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
    solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericError("Gauss-Hermite eigen-solve failed");
    }

    GaussHermiteRule rule;
    rule.nodes.resize(points);
    rule.weights.resize(points);
    const double mu0 = std::sqrt(std::numbers::pi);
    for (Eigen::Index k = 0; k < n; ++k) {
        const double v0 = solver.eigenvectors()(0, k);
        rule.nodes[k] = solver.eigenvalues()(k);
        rule.weights[k] = mu0 * v0 * v0;
    }
    return rule;
}

double logistic(double x) noexcept {
    if (x >= 0.0) {
        return 1.0 / (1.0 + std::exp(-x));
    }
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double btl_win_probability(double s_i, double s_j) noexcept {
    return logistic(s_i - s_j);
}

double expected_stronger_win(double sigma_skill, const GaussHermiteRule& rule) {
    // logistic(|d|) has a kink at 0 that Gauss-Hermite resolves poorly. The kink
    // lives in the odd powers |d|, |d|^3, |d|^5 of the Taylor series, so a
    // damped copy of them is subtracted and integrated in closed form; the
    // quadrature only sees the remainder, which is C^6 at the origin.
    constexpr double kDamping = 0.125;
    constexpr std::array<int, 3> kPowers{1, 3, 5};
    std::array<double, 3> coeff{};
    coeff[0] = 0.25;
    coeff[1] = -1.0 / 48.0 + kDamping * coeff[0];
    coeff[2] = 1.0 / 480.0 + kDamping * coeff[1] - kDamping * kDamping * coeff[0] / 2.0;

    const double spread = std::sqrt(2.0) * sigma_skill;
    if (spread == 0.0) {
        return 0.5;
    }
    if (spread > resolved_spread(rule)) {
        // 1/2 + 2 * integral over t > 0 of logistic density times P(D > t).
        return 0.5 + 2.0 * integrate_logistic(
                               [&](double t) { return logistic_density(t) * normal_tail(t / spread); }, 0.0);
    }
    auto kink = [&](double a) {
        const double a2 = a * a;
        return a * (coeff[0] + a2 * (coeff[1] + a2 * coeff[2])) * std::exp(-kDamping * a2);
    };
    const double remainder = expect_normal(rule, 0.0, spread, [&](double d) {
        const double a = std::abs(d);
        return logistic(a) - 0.5 - kink(a);
    });

    // E[|D|^k exp(-c D^2)] for D ~ N(0, v) = sqrt(v'/v) * E|N(0, v')|^k, 1/v' = 1/v + 2c.
    const double var = spread * spread;
    const double damped_var = 1.0 / (1.0 / var + 2.0 * kDamping);
    double closed_form = 0.0;
    for (std::size_t k = 0; k < kPowers.size(); ++k) {
        const double p = kPowers[k];
        const double abs_moment = std::pow(2.0 * damped_var, p / 2.0) *
                                  std::tgamma((p + 1.0) / 2.0) / std::sqrt(std::numbers::pi);
        closed_form += coeff[k] * std::sqrt(damped_var / var) * abs_moment;
    }
    return 0.5 + closed_form + remainder;
}

double expected_privileged_win(const DistributionSpec& spec, const GaussHermiteRule& rule) {
    // skill_priv - (skill_unpriv + bias)
    const double mean = -spec.mu_bias;
    const double spread = std::sqrt(2.0 * spec.sigma_skill * spec.sigma_skill +
                                    spec.sigma_bias * spec.sigma_bias);
    if (spread > resolved_spread(rule)) {
        return integrate_logistic(
            [&](double l) { return logistic_density(l) * normal_tail(-(mean + l) / spread); },
            -std::numeric_limits<double>::infinity());
    }
    return expect_normal(rule, mean, spread, [](double d) { return logistic(d); });
}

DistributionSpec calibrate(const CalibrationTarget& target, const CalibrationOptions& options) {
    check_open_unit_half(target.p_stronger, "p_stronger");
    check_open_unit_half(target.p_discr, "p_discr");
    if (!(options.tolerance > 0.0)) {
        throw InvalidInput("calibration tolerance must be positive");
    }
    if (options.sigma_bias_ratio < 0.0) {
        throw InvalidInput("sigma_bias_ratio must be non-negative");
    }
    const GaussHermiteRule rule = gauss_hermite(options.quadrature_points);

    auto stronger = [&](double sigma) { return expected_stronger_win(sigma, rule); };
    if (stronger(kSigmaSkillMax) < target.p_stronger) {
        throw CalibrationFailure("p_stronger is not reachable for sigma_skill in [0, 1000]", 0.0,
                                 kSigmaSkillMax);
    }
    DistributionSpec spec;
    spec.mu_skill = 0.0;
    spec.sigma_skill =
        bisect(0.0, kSigmaSkillMax, target.p_stronger, options.tolerance, true, stronger);
    spec.sigma_bias = options.sigma_bias_ratio * spec.sigma_skill;

    auto discr = [&](double mu_bias) {
        DistributionSpec s = spec;
        s.mu_bias = mu_bias;
        return expected_privileged_win(s, rule);
    };
    if (discr(kMuBiasMin) < target.p_discr) {
        throw CalibrationFailure("p_discr is not reachable for mu_bias in [-1000, 0]", kMuBiasMin,
                                 0.0);
    }
    // p_discr falls as mu_bias rises towards 0.
    spec.mu_bias = bisect(kMuBiasMin, 0.0, target.p_discr, options.tolerance, false, discr);
    return spec;
}

CalibrationTarget estimate_probabilities(const DistributionSpec& spec, std::size_t pairs,
                                         SeededRng& rng) {
    std::size_t stronger_wins = 0;
    std::size_t decisive = 0;
    std::size_t privileged_wins = 0;
    for (std::size_t k = 0; k < pairs; ++k) {
        const double a = rng.normal(spec.mu_skill, spec.sigma_skill);
        const double b = rng.normal(spec.mu_skill, spec.sigma_skill);
        const bool a_wins = rng.uniform() < btl_win_probability(a, b);
        if (a != b) {
            ++decisive;
            if (a_wins == (a > b)) {
                ++stronger_wins;
            }
        }

        const double priv = rng.normal(spec.mu_skill, spec.sigma_skill);
        const double unpriv = rng.normal(spec.mu_skill, spec.sigma_skill) +
                              rng.normal(spec.mu_bias, spec.sigma_bias);
        if (rng.uniform() < btl_win_probability(priv, unpriv)) {
            ++privileged_wins;
        }
    }
    CalibrationTarget out;
    out.p_stronger = decisive ? static_cast<double>(stronger_wins) / static_cast<double>(decisive)
                              : 0.5;
    out.p_discr = pairs ? static_cast<double>(privileged_wins) / static_cast<double>(pairs) : 0.5;
    return out;
}

Population generate_population(std::size_t n, double unpriv_fraction, const DistributionSpec& spec,
                               SeededRng& rng) {
    if (n < 2) {
        throw InvalidInput("population needs at least two individuals");
    }
    if (!(unpriv_fraction > 0.0 && unpriv_fraction < 1.0)) {
        throw InvalidInput("unpriv_fraction must lie strictly between 0 and 1");
    }
    if (!(spec.sigma_skill > 0.0) || spec.sigma_bias < 0.0) {
        throw InvalidInput("sigma_skill must be positive and sigma_bias non-negative");
    }
    const auto unpriv_count =
        static_cast<std::size_t>(std::floor(static_cast<double>(n) * unpriv_fraction));
    if (unpriv_count == 0 || unpriv_count == n) {
        throw InvalidInput("group sizes are degenerate for n=" + std::to_string(n));
    }

    std::vector<Group> labels(n, Group::Privileged);
    std::fill_n(labels.begin(), unpriv_count, Group::Unprivileged);
    rng.shuffle(std::span<Group>(labels));

    std::vector<Individual> people(n);
    for (std::size_t i = 0; i < n; ++i) {
        Individual& ind = people[i];
        ind.id = static_cast<NodeId>(i);
        ind.group = labels[i];
        ind.skill = rng.normal(spec.mu_skill, spec.sigma_skill);
        ind.perceived = ind.skill;
        if (ind.group == Group::Unprivileged) {
            ind.perceived += spec.sigma_bias > 0.0 ? rng.normal(spec.mu_bias, spec.sigma_bias)
                                                   : spec.mu_bias;
        }
    }
    return Population(std::move(people));
}

NodeId btl_compare(const Individual& i, const Individual& j, SeededRng& rng) {
    return rng.uniform() < btl_win_probability(i.perceived, j.perceived) ? i.id : j.id;
}

} // namespace fairrank
