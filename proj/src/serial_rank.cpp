#include "fairrank/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include <Eigen/Eigenvalues>
#include <Eigen/SparseCore>

namespace fairrank {
namespace {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

// C_ij = +1 when i won the majority of its comparisons with j, -1 when it
// lost the majority, 0 on a tie or when never compared.
SparseMatrix match_matrix(const ComparisonGraph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.size());
    std::vector<Eigen::Triplet<double>> entries;
    entries.reserve(2 * graph.compared_pairs());
    for (NodeId i = 0; i < graph.size(); ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            if (m.wins != m.losses) {
                entries.emplace_back(i, m.opponent, m.wins > m.losses ? 1.0 : -1.0);
            }
        }
    }
    SparseMatrix c(n, n);
    c.setFromTriplets(entries.begin(), entries.end());
    return c;
}

// Win-ratio sums w_i, used to fix the eigenvector's sign.
std::vector<double> win_ratio_sums(const ComparisonGraph& graph) {
    std::vector<double> w(graph.size(), 0.0);
    for (NodeId i = 0; i < graph.size(); ++i) {
        for (const Matchup& m : graph.matchups(i)) {
            w[i] += static_cast<double>(m.wins) / m.total();
        }
    }
    return w;
}

std::vector<double> orient(const Eigen::VectorXd& v, const ComparisonGraph& graph) {
    const std::vector<double> w = win_ratio_sums(graph);
    const auto n = static_cast<double>(w.size());
    double w_mean = 0.0;
    for (double x : w) {
        w_mean += x;
    }
    w_mean /= n;
    const double v_mean = v.mean();
    double cov = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        cov += (v(static_cast<Eigen::Index>(i)) - v_mean) * (w[i] - w_mean);
    }
    const double sign = cov < 0.0 ? -1.0 : 1.0;
    std::vector<double> out(w.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        out[i] = sign * v(static_cast<Eigen::Index>(i));
    }
    return out;
}

void check_size(const ComparisonGraph& graph) {
    if (graph.size() < 3) {
        throw InvalidInput("SerialRank needs at least three nodes");
    }
}

} // namespace

Eigen::MatrixXd similarity_laplacian(const ComparisonGraph& graph) {
    const auto n = static_cast<Eigen::Index>(graph.size());
    const SparseMatrix c = match_matrix(graph);
    const SparseMatrix cct = c * SparseMatrix(c.transpose());
    Eigen::MatrixXd s = Eigen::MatrixXd::Constant(n, n, static_cast<double>(n));
    s += Eigen::MatrixXd(cct);
    s *= 0.5;
    Eigen::MatrixXd laplacian = -s;
    laplacian.diagonal() += s.rowwise().sum();
    return laplacian;
}

std::vector<double> serial_rank_dense(const ComparisonGraph& graph) {
    check_size(graph);
    const Eigen::MatrixXd laplacian = similarity_laplacian(graph);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(laplacian);
    if (solver.info() != Eigen::Success) {
        throw NumericError("SerialRank eigen-decomposition failed");
    }
    return orient(solver.eigenvectors().col(1), graph);
}

std::vector<double> serial_rank_lanczos(const ComparisonGraph& graph, const SerialRank& params) {
    check_size(graph);
    const auto n = static_cast<Eigen::Index>(graph.size());
    const double nd = static_cast<double>(n);
    const SparseMatrix c = match_matrix(graph);
    const SparseMatrix ct = c.transpose();

    // L x = d .* x - (n * sum(x) * 1 + C (C^T x)) / 2, with d = S 1.
    const Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
    const Eigen::VectorXd degree = 0.5 * (nd * nd * ones + c * (ct * ones));
    auto apply = [&](const Eigen::VectorXd& x) -> Eigen::VectorXd {
        Eigen::VectorXd y = degree.cwiseProduct(x);
        y -= 0.5 * (nd * x.sum() * ones + c * (ct * x));
        return y;
    };
    const double norm_bound = 2.0 * degree.maxCoeff();
    auto deflate = [&](Eigen::VectorXd& x) { x.array() -= x.mean(); };

    // Start from the centred win-ratio sums, which already correlate with the
    // Fiedler vector, plus a fixed perturbation so no direction is missed.
    const std::vector<double> w = win_ratio_sums(graph);
    Eigen::VectorXd v(n);
    SeededRng perturb(0x5e1a1ULL);
    for (Eigen::Index i = 0; i < n; ++i) {
        v(i) = w[static_cast<std::size_t>(i)] + 1e-3 * (perturb.uniform() - 0.5);
    }
    deflate(v);
    if (v.norm() == 0.0) {
        v.setLinSpaced(n, -1.0, 1.0);
        deflate(v);
    }
    v.normalize();

    const Eigen::Index steps = std::min<Eigen::Index>(static_cast<Eigen::Index>(params.lanczos_steps), n - 1);
    double residual = 0.0;
    for (std::size_t restart = 0; restart <= params.max_restarts; ++restart) {
        Eigen::MatrixXd basis(n, steps);
        Eigen::VectorXd alpha(steps);
        Eigen::VectorXd beta(steps);
        Eigen::Index built = 0;
        Eigen::VectorXd q = v;
        for (Eigen::Index k = 0; k < steps; ++k) {
            basis.col(k) = q;
            ++built;
            Eigen::VectorXd z = apply(q);
            alpha(k) = q.dot(z);
            // Full reorthogonalisation, twice, keeps the basis clean.
            for (int pass = 0; pass < 2; ++pass) {
                z -= basis.leftCols(built) * (basis.leftCols(built).transpose() * z);
                deflate(z);
            }
            beta(k) = z.norm();
            if (beta(k) <= 1e-14 * norm_bound || k + 1 == steps) {
                break;
            }
            q = z / beta(k);
        }

        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(alpha.head(built), beta.head(std::max<Eigen::Index>(built - 1, 0)),
                                   Eigen::ComputeEigenvectors);
        if (tri.info() != Eigen::Success) {
            throw NumericError("SerialRank Lanczos tridiagonal solve failed");
        }
        const double theta = tri.eigenvalues()(0);
        v = basis.leftCols(built) * tri.eigenvectors().col(0);
        deflate(v);
        v.normalize();

        residual = (apply(v) - theta * v).norm() / norm_bound;
        if (residual < params.tol) {
            return orient(v, graph);
        }
    }
    std::ostringstream msg;
    msg << "SerialRank Lanczos did not converge (relative residual " << residual << ")";
    throw NumericError(msg.str());
}

std::vector<double> serial_rank(const ComparisonGraph& graph, const SerialRank& params) {
    if (graph.size() <= params.dense_limit) {
        return serial_rank_dense(graph);
    }
    return serial_rank_lanczos(graph, params);
}

} // namespace fairrank
