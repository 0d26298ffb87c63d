#pragma once

// Fixtures and brute-force oracles shared by the unit tests and the
// acceptance binary. Oracles here deliberately avoid the library's kernels.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "fairrank/core.hpp"
#include "fairrank/rng.hpp"

namespace fairrank::testing {

/// Population with the given groups and skills (perceived = skill).
inline Population make_population(const std::vector<Group>& groups, const std::vector<double>& skills) {
    std::vector<Individual> people;
    for (std::size_t i = 0; i < groups.size(); ++i) {
        people.push_back({static_cast<NodeId>(i), groups[i], skills[i], skills[i]});
    }
    return Population(std::move(people));
}

/// Alternating groups starting with Privileged.
inline std::vector<Group> alternating_groups(std::size_t n) {
    std::vector<Group> g(n);
    for (std::size_t i = 0; i < n; ++i) {
        g[i] = i % 2 == 0 ? Group::Privileged : Group::Unprivileged;
    }
    return g;
}

/// `comparisons` uniformly random pairs with fair-coin outcomes.
inline ComparisonGraph random_graph(std::size_t n, std::size_t comparisons, SeededRng& rng) {
    ComparisonGraph g(n);
    for (std::size_t c = 0; c < comparisons; ++c) {
        const auto a = static_cast<NodeId>(rng.uniform_index(n));
        auto b = static_cast<NodeId>(rng.uniform_index(n - 1));
        if (b >= a) {
            ++b;
        }
        g.record(a, b);
    }
    return g;
}

/// Every pair compared `rounds` times; the walk on it is irreducible when every node lost at least once.
inline ComparisonGraph complete_graph(std::size_t n, std::size_t rounds, SeededRng& rng) {
    ComparisonGraph g(n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            for (std::size_t r = 0; r < rounds; ++r) {
                if (rng.uniform() < 0.5) {
                    g.record(i, j);
                } else {
                    g.record(j, i);
                }
            }
        }
    }
    return g;
}

/// Deterministic chain: i beats every j > i once.
inline ComparisonGraph chain_graph(std::size_t n) {
    ComparisonGraph g(n);
    for (NodeId i = 0; i < n; ++i) {
        for (NodeId j = i + 1; j < n; ++j) {
            g.record(i, j);
        }
    }
    return g;
}

/// Plain O(n^2) group-conditioned weighted Kemeny distance, straight from its definition.
inline double kemeny_oracle(const std::vector<double>& skills, const std::vector<std::size_t>& ranks,
                            const std::vector<bool>& in_group) {
    long double discordant = 0.0L;
    long double total = 0.0L;
    const std::size_t n = skills.size();
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!in_group[i] && !in_group[j]) {
                continue;
            }
            const long double gap = static_cast<long double>(skills[i]) - skills[j];
            const long double w = gap * gap;
            total += w;
            const bool i_better_skill = skills[i] > skills[j];
            const bool j_better_skill = skills[j] > skills[i];
            const bool i_better_rank = ranks[i] < ranks[j];
            if ((i_better_skill && !i_better_rank) || (j_better_skill && i_better_rank)) {
                discordant += w;
            }
        }
    }
    return static_cast<double>(std::sqrt(discordant / total));
}

inline double exposure_oracle(const std::vector<std::size_t>& ranks, const std::vector<bool>& in_group) {
    double acc = 0.0;
    std::size_t count = 0;
    for (std::size_t i = 0; i < ranks.size(); ++i) {
        if (in_group[i]) {
            acc += 1.0 / std::log2(static_cast<double>(ranks[i]) + 2.0);
            ++count;
        }
    }
    return acc / static_cast<double>(count);
}

/// Regularised RankCentrality chain as a dense row-stochastic matrix.
inline Eigen::MatrixXd rank_centrality_matrix(const ComparisonGraph& g, double regularization) {
    const auto n = static_cast<Eigen::Index>(g.size());
    const Eigen::MatrixXd a = winning_ratio_matrix(g);
    double d_max = 0.0;
    for (NodeId i = 0; i < g.size(); ++i) {
        d_max = std::max(d_max, static_cast<double>(g.matchups(i).size()));
    }
    Eigen::MatrixXd p = a / d_max;
    for (Eigen::Index i = 0; i < n; ++i) {
        p(i, i) = 0.0;
        p(i, i) = 1.0 - p.row(i).sum();
    }
    return (1.0 - regularization) * p +
           Eigen::MatrixXd::Constant(n, n, regularization / static_cast<double>(n));
}

/// Left Perron vector of a row-stochastic matrix by dense eigen-decomposition.
inline std::vector<double> stationary_oracle(const Eigen::MatrixXd& p) {
    Eigen::EigenSolver<Eigen::MatrixXd> solver(p.transpose());
    Eigen::Index best = 0;
    for (Eigen::Index k = 1; k < p.rows(); ++k) {
        if (std::abs(solver.eigenvalues()(k) - 1.0) < std::abs(solver.eigenvalues()(best) - 1.0)) {
            best = k;
        }
    }
    Eigen::VectorXd v = solver.eigenvectors().col(best).real();
    v /= v.sum();
    return {v.data(), v.data() + v.size()};
}

/// Spearman rank correlation with average ranks for ties.
inline double spearman(const std::vector<double>& a, const std::vector<double>& b) {
    auto ranks = [](const std::vector<double>& v) {
        std::vector<std::size_t> idx(v.size());
        for (std::size_t i = 0; i < v.size(); ++i) {
            idx[i] = i;
        }
        std::sort(idx.begin(), idx.end(), [&](std::size_t x, std::size_t y) { return v[x] < v[y]; });
        std::vector<double> r(v.size());
        for (std::size_t i = 0; i < idx.size();) {
            std::size_t j = i;
            while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
                ++j;
            }
            const double avg = 0.5 * static_cast<double>(i + j);
            for (std::size_t k = i; k <= j; ++k) {
                r[idx[k]] = avg;
            }
            i = j + 1;
        }
        return r;
    };
    const auto ra = ranks(a);
    const auto rb = ranks(b);
    const double n = static_cast<double>(a.size());
    double ma = 0.0;
    double mb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double sab = 0.0;
    double saa = 0.0;
    double sbb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        sab += (ra[i] - ma) * (rb[i] - mb);
        saa += (ra[i] - ma) * (ra[i] - ma);
        sbb += (rb[i] - mb) * (rb[i] - mb);
    }
    return sab / std::sqrt(saa * sbb);
}

} // namespace fairrank::testing
