#include "fairrank/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Sparse>
#include <boost/graph/adjacency_list.hpp>
#include <boost/graph/strong_components.hpp>

namespace fairrank {
namespace {

// Clips round-off negatives and rescales to a distribution; empty if the solve went wrong.
std::vector<double> normalised(const Eigen::VectorXd& sol) {
    const auto n = static_cast<std::size_t>(sol.size());
    std::vector<double> x(n);
    double mass = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double v = sol(static_cast<Eigen::Index>(i));
        if (!std::isfinite(v) || v < -1e-9) {
            return {};
        }
        x[i] = std::max(v, 0.0);
        mass += x[i];
    }
    if (!(mass > 0.0)) {
        return {};
    }
    for (double& v : x) {
        v /= mass;
    }
    return x;
}

// Solves a square system in place; the solution ends up in rhs.
bool dense_solve(const Eigen::MatrixXd& a, Eigen::VectorXd& rhs) {
    rhs = a.partialPivLu().solve(rhs).eval();
    return rhs.allFinite();
}

bool sparse_solve(const std::vector<Eigen::Triplet<double>>& entries, Eigen::Index size, Eigen::VectorXd& rhs) {
    Eigen::SparseMatrix<double> a(size, size);
    a.setFromTriplets(entries.begin(), entries.end());
    Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::COLAMDOrdering<int>> lu;
    lu.compute(a);
    if (lu.info() != Eigen::Success) {
        return false;
    }
    rhs = lu.solve(rhs).eval();
    return lu.info() == Eigen::Success;
}

/**
 * Exact stationary distribution of the regularised chain, i.e. the solution of
 * (I - keep P^T) x = teleport 1.
 *
 * That matrix is nearly singular (condition ~ 1/teleport) whenever the walk has
 * a closed class, so it is solved one strongly connected component at a time in
 * topological order. A leaking component gives a well-conditioned block. A
 * closed one has its mass fixed by summing its equations,
 * (1 - keep) mass = sum of the right-hand side, and that sum replaces one
 * equation. Blocks up to dense_limit use a dense LU, larger ones a sparse LU.
 * Empty on failure, or with no teleport and more than one closed class.
 */
std::vector<double> direct_stationary(const kernels::PullMatrix& op, std::size_t n, double keep,
                                      double teleport, std::size_t dense_limit) {
    // Walk edges i -> j wherever P_ij > 0.
    using Digraph = boost::adjacency_list<boost::vecS, boost::vecS, boost::directedS>;
    Digraph walk(n);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = op.offsets[j]; k < op.offsets[j + 1]; ++k) {
            if (op.sources[k] != j && op.weights[k] > 0.0) {
                boost::add_edge(op.sources[k], j, walk);
            }
        }
    }
    std::vector<std::size_t> comp(n);
    const std::size_t count = boost::strong_components(
        walk, boost::make_iterator_property_map(comp.begin(), boost::get(boost::vertex_index, walk)));

    std::vector<std::vector<NodeId>> members(count);
    for (NodeId i = 0; i < n; ++i) {
        members[comp[i]].push_back(i);
    }
    std::vector<bool> leaks(count, false);
    for (std::size_t j = 0; j < n; ++j) {
        for (std::size_t k = op.offsets[j]; k < op.offsets[j + 1]; ++k) {
            const NodeId i = op.sources[k];
            if (op.weights[k] > 0.0 && comp[i] != comp[j]) {
                // Tarjan numbers components in reverse topological order.
                if (comp[i] < comp[j]) {
                    return {};
                }
                leaks[comp[i]] = true;
            }
        }
    }
    if (teleport == 0.0 && std::count(leaks.begin(), leaks.end(), false) != 1) {
        return {};
    }

    std::vector<double> x(n, 0.0);
    std::vector<std::size_t> local(n);
    for (std::size_t c = count; c-- > 0;) {
        const auto& block = members[c];
        const auto size = static_cast<Eigen::Index>(block.size());
        for (std::size_t l = 0; l < block.size(); ++l) {
            local[block[l]] = l;
        }
        const bool dense = block.size() <= dense_limit;
        Eigen::MatrixXd a;
        std::vector<Eigen::Triplet<double>> entries;
        if (dense) {
            a = Eigen::MatrixXd::Identity(size, size);
        }
        Eigen::VectorXd rhs = Eigen::VectorXd::Constant(size, teleport);
        for (std::size_t l = 0; l < block.size(); ++l) {
            const NodeId j = block[l];
            const auto row = static_cast<Eigen::Index>(l);
            if (!dense) {
                entries.emplace_back(row, row, 1.0);
            }
            for (std::size_t k = op.offsets[j]; k < op.offsets[j + 1]; ++k) {
                const NodeId i = op.sources[k];
                const double w = keep * op.weights[k];
                if (comp[i] != c) {
                    rhs(row) += w * x[i];
                    continue;
                }
                // A closed block swaps its first equation for the mass constraint.
                if (!leaks[c] && l == 0) {
                    continue;
                }
                const auto col = static_cast<Eigen::Index>(local[i]);
                if (dense) {
                    a(row, col) -= w;
                } else {
                    entries.emplace_back(row, col, -w);
                }
            }
        }
        if (!leaks[c]) {
            const double mass = teleport == 0.0 ? 1.0 : rhs.sum() / (1.0 - keep);
            if (dense) {
                a.row(0).setOnes();
            } else {
                for (Eigen::Index col = 0; col < size; ++col) {
                    entries.emplace_back(0, col, col == 0 ? 0.0 : 1.0);
                }
            }
            rhs(0) = mass;
        }
        if (!(dense ? dense_solve(a, rhs) : sparse_solve(entries, size, rhs))) {
            return {};
        }
        for (std::size_t l = 0; l < block.size(); ++l) {
            x[block[l]] = rhs(static_cast<Eigen::Index>(l));
        }
    }
    return normalised(Eigen::Map<const Eigen::VectorXd>(x.data(), static_cast<Eigen::Index>(n)));
}

} // namespace

kernels::PullMatrix rank_centrality_operator(const ComparisonGraph& graph,
                                             DegreeNormalization normalization) {
    const std::size_t n = graph.size();
    const double d_max = static_cast<double>(std::max<std::size_t>(graph.max_opponents(), 1));

    // Row i of P: P_ij = A_ij / d for j != i, P_ii = 1 - sum_j P_ij.
    std::vector<double> self_loop(n, 1.0);
    auto scale = [&](NodeId i) {
        if (normalization == DegreeNormalization::MaxDegree) {
            return d_max;
        }
        return static_cast<double>(std::max<std::size_t>(graph.matchups(i).size(), 1));
    };
    for (NodeId i = 0; i < n; ++i) {
        const double d = scale(i);
        for (const Matchup& m : graph.matchups(i)) {
            self_loop[i] -= (static_cast<double>(m.losses) / m.total()) / d;
        }
    }

    // Column j gathers P_ij from every neighbour i; the neighbour sets are symmetric.
    kernels::PullMatrix op;
    op.offsets.assign(1, 0);
    op.sources.reserve(2 * graph.compared_pairs() + n);
    op.weights.reserve(2 * graph.compared_pairs() + n);
    for (NodeId j = 0; j < n; ++j) {
        bool self_done = false;
        for (const Matchup& m : graph.matchups(j)) {
            if (!self_done && m.opponent > j) {
                op.sources.push_back(j);
                op.weights.push_back(std::max(self_loop[j], 0.0));
                self_done = true;
            }
            const NodeId i = m.opponent;
            // From i's side, j beat i m.wins times out of m.total().
            op.sources.push_back(i);
            op.weights.push_back((static_cast<double>(m.wins) / m.total()) / scale(i));
        }
        if (!self_done) {
            op.sources.push_back(j);
            op.weights.push_back(std::max(self_loop[j], 0.0));
        }
        op.offsets.push_back(op.sources.size());
    }
    return op;
}

std::vector<double> rank_centrality(const ComparisonGraph& graph, const RankCentrality& params,
                                    std::span<const double> start) {
    const std::size_t n = graph.size();
    if (graph.empty()) {
        throw InvalidInput("RankCentrality needs at least one recorded comparison");
    }
    if (!(params.tol > 0.0) || params.max_iters < 1 ||
        !(params.regularization >= 0.0 && params.regularization < 1.0)) {
        throw InvalidInput("RankCentrality parameters out of range");
    }
    const kernels::PullMatrix op = rank_centrality_operator(graph, params.normalization);

    const double keep = 1.0 - params.regularization;
    const double teleport = params.regularization / static_cast<double>(n);

    std::vector<double> x(n, 1.0 / static_cast<double>(n));
    if (start.empty() && params.direct_limit > 0) {
        if (auto exact = direct_stationary(op, n, keep, teleport, params.direct_limit); !exact.empty()) {
            x = std::move(exact);
        }
    } else if (start.size() == n) {
        const double mass = kernels::sum_parallel(start);
        if (mass > 0.0) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] = std::max(start[i], 0.0) / mass;
            }
        }
    }
    std::vector<double> y(n);

    double change = 0.0;
    for (std::size_t it = 0; it < params.max_iters; ++it) {
        kernels::propagate_parallel(op, x, y);
        for (std::size_t j = 0; j < n; ++j) {
            y[j] = keep * y[j] + teleport;
        }
        change = kernels::l1_distance_parallel(x, y);
        std::swap(x, y);
        if (change < params.tol) {
            const double mass = kernels::sum_parallel(x);
            for (double& v : x) {
                v /= mass;
            }
            return x;
        }
    }
    std::ostringstream msg;
    msg << "RankCentrality did not converge in " << params.max_iters
        << " iterations (last L1 change " << change << ")";
    throw ConvergenceError(msg.str(), change, params.max_iters);
}

} // namespace fairrank
