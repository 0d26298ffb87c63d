#pragma once

#include <cstddef>
#include <span>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "fairrank/core.hpp"
#include "fairrank/kernels.hpp"

namespace fairrank {

/// Uniformly random permutation used as scores.
struct RandomBaseline {};

struct DavidsScore {};

enum class DegreeNormalization {
    MaxDegree, // divide by the largest distinct-opponent count (original construction)
    PerNode,   // divide by each node's own distinct-opponent count
};

struct RankCentrality {
    std::size_t max_iters = 200000;
    double tol = 1e-10;             // L1 change between sweeps
    double regularization = 1e-8;   // uniform teleport rate
    DegreeNormalization normalization = DegreeNormalization::MaxDegree;
    /// Without a caller start the sweeps start from a direct solve of the chain: dense up to
    /// this size, sparse LU above it. 0 disables the seed.
    std::size_t direct_limit = 7000;
};

struct SerialRank {
    std::size_t dense_limit = 2000; // dense eigen-decomposition up to this size, Lanczos above
    std::size_t lanczos_steps = 96;
    std::size_t max_restarts = 300;
    double tol = 1e-9; // relative residual of the Fiedler pair (Lanczos path)
};

/// Locally fair PageRank on the loser -> winner multigraph.
struct FairPageRank {
    double phi = 0.5; // mass share routed to the unprivileged group
    double damping = 0.85;
    std::size_t max_iters = 10000;
    double tol = 1e-12;
};

using RecoveryMethod =
    std::variant<RandomBaseline, DavidsScore, RankCentrality, SerialRank, FairPageRank>;

std::string_view method_name(const RecoveryMethod& method) noexcept;

/// Method with default parameters from its CLI name; throws InvalidInput listing valid names.
RecoveryMethod method_from_name(std::string_view name);

/// "random, davids_score, rank_centrality, serial_rank, fair_pagerank"
std::string_view method_names() noexcept;

std::vector<double> recover_random(std::size_t n, SeededRng& rng);

/// DS_i = w_i + wbar_i - l_i - lbar_i over the winning-ratio matrix.
std::vector<double> davids_score(const ComparisonGraph& graph);

/// Transition operator of the RankCentrality walk, laid out for pull propagation.
kernels::PullMatrix rank_centrality_operator(const ComparisonGraph& graph,
                                             DegreeNormalization normalization);

/**
 * Stationary distribution of the RankCentrality walk by power iteration.
 * `start` (optional) seeds the iteration; it does not change the fixed point.
 * A seed far from it can stall, since mass moves between weakly linked parts
 * of the graph only at the regularization rate.
 */
std::vector<double> rank_centrality(const ComparisonGraph& graph, const RankCentrality& params = {},
                                    std::span<const double> start = {});

/// Laplacian of the SerialRank similarity S = (n J + C C^T) / 2.
Eigen::MatrixXd similarity_laplacian(const ComparisonGraph& graph);

/// Fiedler vector of the similarity Laplacian, oriented to agree with win-ratio sums.
std::vector<double> serial_rank(const ComparisonGraph& graph, const SerialRank& params = {});

/// The dense and iterative Fiedler paths, exposed for cross-checking.
std::vector<double> serial_rank_dense(const ComparisonGraph& graph);
std::vector<double> serial_rank_lanczos(const ComparisonGraph& graph, const SerialRank& params = {});

std::vector<double> fair_pagerank(const ComparisonGraph& graph, std::span<const Group> groups,
                                  const FairPageRank& params = {},
                                  std::span<const double> start = {});

/// Dispatches on the method; `start` is forwarded to the iterative walks.
std::vector<double> recover(const RecoveryMethod& method, const ComparisonGraph& graph,
                            std::span<const Group> groups, SeededRng& rng,
                            std::span<const double> start = {});

} // namespace fairrank
