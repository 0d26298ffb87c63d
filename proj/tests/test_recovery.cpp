#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "fairrank/recovery.hpp"
#include "fairrank/synth.hpp"
#include "support.hpp"

using namespace fairrank;
using Catch::Approx;

namespace {

// BTL outcomes on a random graph so every method has signal to find.
ComparisonGraph btl_graph(const std::vector<double>& skills, std::size_t comparisons, SeededRng& rng) {
    const std::size_t n = skills.size();
    ComparisonGraph g(n);
    for (std::size_t c = 0; c < comparisons; ++c) {
        const auto a = static_cast<NodeId>(rng.uniform_index(n));
        auto b = static_cast<NodeId>(rng.uniform_index(n - 1));
        if (b >= a) {
            ++b;
        }
        if (rng.uniform() < logistic(skills[a] - skills[b])) {
            g.record(a, b);
        } else {
            g.record(b, a);
        }
    }
    return g;
}

std::vector<double> normal_skills(std::size_t n, SeededRng& rng) {
    std::vector<double> s(n);
    for (double& x : s) {
        x = rng.normal(0.0, 1.5);
    }
    return s;
}

ComparisonGraph relabel(const ComparisonGraph& g, const std::vector<NodeId>& perm) {
    ComparisonGraph out(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
        for (const Matchup& m : g.matchups(i)) {
            if (m.wins > 0) {
                out.record(perm[i], perm[m.opponent], m.wins);
            }
        }
    }
    return out;
}

ComparisonGraph reversed(const ComparisonGraph& g) {
    ComparisonGraph out(g.size());
    for (NodeId i = 0; i < g.size(); ++i) {
        for (const Matchup& m : g.matchups(i)) {
            if (m.wins > 0) {
                out.record(m.opponent, i, m.wins);
            }
        }
    }
    return out;
}

// Locally fair PageRank written out as a dense column-stochastic matrix and
// solved directly for its fixed point.
std::vector<double> fair_pagerank_oracle(const ComparisonGraph& g, const std::vector<Group>& groups,
                                         double phi, double damping) {
    const auto n = static_cast<Eigen::Index>(g.size());
    std::vector<Eigen::Index> unpriv;
    std::vector<Eigen::Index> priv;
    for (Eigen::Index i = 0; i < n; ++i) {
        (groups[i] == Group::Unprivileged ? unpriv : priv).push_back(i);
    }
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (int side = 0; side < 2; ++side) {
            const auto& members = side == 0 ? unpriv : priv;
            const double share = side == 0 ? phi : 1.0 - phi;
            double out = 0.0;
            for (Eigen::Index j : members) {
                if (j != i) {
                    out += g.wins(static_cast<NodeId>(j), static_cast<NodeId>(i));
                }
            }
            for (Eigen::Index j : members) {
                const double link =
                    j != i ? g.wins(static_cast<NodeId>(j), static_cast<NodeId>(i)) : 0.0;
                const double walk = out > 0 ? link / out : 1.0 / static_cast<double>(members.size());
                m(j, i) += damping * share * walk + (1 - damping) * share / static_cast<double>(members.size());
            }
        }
    }
    Eigen::MatrixXd a = Eigen::MatrixXd::Identity(n, n) - m;
    Eigen::VectorXd b = Eigen::VectorXd::Zero(n);
    a.row(0).setOnes();
    b(0) = 1.0;
    const Eigen::VectorXd x = a.fullPivLu().solve(b);
    return {x.data(), x.data() + x.size()};
}

double group_mass(const std::vector<double>& scores, const std::vector<Group>& groups, Group g) {
    double s = 0.0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (groups[i] == g) {
            s += scores[i];
        }
    }
    return s;
}

double linf(const std::vector<double>& a, const std::vector<double>& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
    }
    return d;
}

} // namespace

TEST_CASE("random baseline is a uniform permutation", "[recovery]") {
    SeededRng rng(1);
    REQUIRE(recover_random(1, rng) == std::vector<double>{0.0});
    SeededRng a(2);
    SeededRng b(2);
    REQUIRE(recover_random(50, a) == recover_random(50, b));

    std::map<std::vector<double>, int> counts;
    const int runs = 10000;
    for (int r = 0; r < runs; ++r) {
        auto s = recover_random(3, rng);
        std::vector<double> sorted = s;
        std::sort(sorted.begin(), sorted.end());
        REQUIRE(sorted == std::vector<double>{0.0, 1.0, 2.0});
        ++counts[s];
    }
    REQUIRE(counts.size() == 6);
    for (const auto& [perm, c] : counts) {
        REQUIRE(static_cast<double>(c) / runs == Approx(1.0 / 6.0).margin(0.02));
    }
}

TEST_CASE("David's score examples", "[recovery]") {
    REQUIRE(davids_score(ComparisonGraph(3)) == std::vector<double>{0.0, 0.0, 0.0});
    const auto chain = davids_score(testing::chain_graph(3));
    REQUIRE(chain[0] == Approx(3.0));
    REQUIRE(chain[1] == Approx(0.0).margin(1e-15));
    REQUIRE(chain[2] == Approx(-3.0));

    ComparisonGraph cliques(4);
    cliques.record(0, 1);
    cliques.record(2, 3);
    const auto ds = davids_score(cliques);
    REQUIRE(ds == std::vector<double>{1.0, -1.0, 1.0, -1.0});

    // Win shares, not raw counts: 3 of 4 against 1.
    ComparisonGraph shares(2);
    shares.record(0, 1, 3);
    shares.record(1, 0);
    const auto s = davids_score(shares);
    REQUIRE(s[0] == Approx(0.75 + 0.75 * 0.25 - 0.25 - 0.25 * 0.75));
}

TEST_CASE("David's score matches its formula on random graphs", "[recovery]") {
    SeededRng rng(3);
    const ComparisonGraph g = testing::random_graph(30, 200, rng);
    const Eigen::MatrixXd a = winning_ratio_matrix(g);
    // w_i = sum_j A_ji, l_i = sum_j A_ij.
    const Eigen::VectorXd w = a.colwise().sum().transpose();
    const Eigen::VectorXd l = a.rowwise().sum();
    const Eigen::VectorXd wbar = a.transpose() * w;
    const Eigen::VectorXd lbar = a * l;
    const auto ds = davids_score(g);
    for (Eigen::Index i = 0; i < 30; ++i) {
        REQUIRE(ds[i] == Approx(w(i) + wbar(i) - l(i) - lbar(i)).margin(1e-12));
    }
}

TEST_CASE("RankCentrality examples", "[recovery]") {
    ComparisonGraph two(2);
    two.record(0, 1, 3);
    two.record(1, 0);
    RankCentrality exact;
    exact.regularization = 0.0;
    const auto pi = rank_centrality(two, exact);
    REQUIRE(pi[0] == Approx(0.75).margin(1e-9));
    REQUIRE(pi[1] == Approx(0.25).margin(1e-9));

    ComparisonGraph even(5);
    for (NodeId i = 0; i < 5; ++i) {
        for (NodeId j = i + 1; j < 5; ++j) {
            even.record(i, j);
            even.record(j, i);
        }
    }
    for (double x : rank_centrality(even)) {
        REQUIRE(x == Approx(0.2).margin(1e-10));
    }
}

TEST_CASE("RankCentrality agrees with a dense eigenvector oracle", "[recovery]") {
    SeededRng rng(4);
    for (std::size_t comparisons : {12ul, 40ul, 200ul}) {
        const ComparisonGraph g = btl_graph(normal_skills(10, rng), comparisons, rng);
        const auto oracle = testing::stationary_oracle(testing::rank_centrality_matrix(g, 1e-8));
        RankCentrality power;
        power.direct_limit = 0;
        power.tol = 1e-13;
        power.max_iters = 2'000'000;
        const auto iterated = rank_centrality(g, power);
        const auto seeded = rank_centrality(g);
        REQUIRE(linf(iterated, oracle) < 1e-8);
        REQUIRE(linf(seeded, oracle) < 1e-8);
    }
}

TEST_CASE("RankCentrality scores are a distribution on sparse graphs", "[recovery][property]") {
    SeededRng rng(5);
    for (std::size_t comparisons : {5ul, 40ul, 400ul, 4000ul}) {
        const ComparisonGraph g = btl_graph(normal_skills(200, rng), comparisons, rng);
        const auto pi = rank_centrality(g);
        double sum = 0.0;
        for (double x : pi) {
            REQUIRE(x >= 0.0);
            sum += x;
        }
        REQUIRE(sum == Approx(1.0).margin(1e-10));
        // With a 1e-8 teleport the spectral gap is about 1e-8 on split graphs,
        // so either solver carries roughly eps / 1e-8 of error.
        const auto oracle = testing::stationary_oracle(testing::rank_centrality_matrix(g, 1e-8));
        REQUIRE(linf(pi, oracle) < 1e-6);
        // Sparse LU seed, as used above the dense limit.
        RankCentrality sparse;
        sparse.direct_limit = 1;
        REQUIRE(linf(rank_centrality(g, sparse), oracle) < 1e-6);
    }
}

TEST_CASE("RankCentrality per-node normalisation and convergence failure", "[recovery]") {
    SeededRng rng(6);
    const ComparisonGraph g = btl_graph(normal_skills(12, rng), 80, rng);
    RankCentrality per_node;
    per_node.normalization = DegreeNormalization::PerNode;
    const auto pi = rank_centrality(g, per_node);
    REQUIRE(std::accumulate(pi.begin(), pi.end(), 0.0) == Approx(1.0).margin(1e-10));

    RankCentrality capped;
    capped.direct_limit = 0;
    capped.max_iters = 2;
    capped.tol = 1e-15;
    try {
        (void)rank_centrality(g, capped);
        FAIL("expected a convergence error");
    } catch (const ConvergenceError& e) {
        REQUIRE(e.iterations() == 2);
        REQUIRE(e.residual() > 0.0);
    }
    REQUIRE_THROWS_AS(rank_centrality(ComparisonGraph(3)), InvalidInput);
}

TEST_CASE("SerialRank on the 3-chain", "[recovery]") {
    const ComparisonGraph g = testing::chain_graph(3);
    const Eigen::MatrixXd lap = similarity_laplacian(g);
    Eigen::MatrixXd expected(3, 3);
    expected << 3, -2, -1, -2, 4, -2, -1, -2, 3;
    REQUIRE((lap - expected).cwiseAbs().maxCoeff() < 1e-12);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(lap);
    REQUIRE(solver.eigenvalues()(0) == Approx(0.0).margin(1e-12));
    REQUIRE(solver.eigenvalues()(1) == Approx(4.0));
    REQUIRE(solver.eigenvalues()(2) == Approx(6.0));

    const auto f = serial_rank(g);
    REQUIRE(f[0] > 0.0);
    REQUIRE(f[1] == Approx(0.0).margin(1e-12));
    REQUIRE(f[2] == Approx(-f[0]));
}

TEST_CASE("SerialRank degenerate and reversed inputs", "[recovery]") {
    ComparisonGraph ties(6);
    ties.record(0, 1);
    ties.record(1, 0);
    ties.record(2, 3);
    ties.record(3, 2);
    REQUIRE(serial_rank(ties) == serial_rank(ties));

    SeededRng rng(7);
    const auto skills = normal_skills(40, rng);
    const ComparisonGraph g = btl_graph(skills, 2000, rng);
    const auto forward = serial_rank(g);
    const auto backward = serial_rank(reversed(g));
    std::vector<NodeId> fo(40);
    std::vector<NodeId> bo(40);
    std::iota(fo.begin(), fo.end(), NodeId{0});
    std::iota(bo.begin(), bo.end(), NodeId{0});
    std::sort(fo.begin(), fo.end(), [&](NodeId a, NodeId b) { return forward[a] > forward[b]; });
    std::sort(bo.begin(), bo.end(), [&](NodeId a, NodeId b) { return backward[a] < backward[b]; });
    REQUIRE(fo == bo);
    REQUIRE_THROWS_AS(serial_rank(ComparisonGraph(2)), InvalidInput);
}

TEST_CASE("Lanczos Fiedler vector matches the dense one", "[recovery]") {
    SeededRng rng(8);
    for (std::size_t n : {60ul, 250ul}) {
        const ComparisonGraph g = btl_graph(normal_skills(n, rng), 20 * n, rng);
        const auto dense = serial_rank_dense(g);
        const auto lanczos = serial_rank_lanczos(g);
        double dot = 0.0;
        double nd = 0.0;
        double nl = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += dense[i] * lanczos[i];
            nd += dense[i] * dense[i];
            nl += lanczos[i] * lanczos[i];
        }
        // Same orientation rule, so the vectors agree in sign too.
        REQUIRE(dot / std::sqrt(nd * nl) > 1.0 - 1e-8);
    }
}

TEST_CASE("consistent complete tournaments are recovered exactly", "[recovery][property]") {
    const std::size_t n = 15;
    const ComparisonGraph g = testing::chain_graph(n);
    for (const auto& scores : {davids_score(g), serial_rank(g)}) {
        for (std::size_t i = 1; i < n; ++i) {
            REQUIRE(scores[i - 1] > scores[i]);
        }
    }
}

TEST_CASE("FairPageRank examples", "[recovery]") {
    ComparisonGraph two(2);
    two.record(0, 1);
    two.record(1, 0);
    const std::vector<Group> pu{Group::Privileged, Group::Unprivileged};
    const auto s = fair_pagerank(two, pu);
    REQUIRE(s[0] == Approx(0.5).margin(1e-10));
    REQUIRE(s[1] == Approx(0.5).margin(1e-10));

    // Unprivileged 1 and 3 never compared.
    ComparisonGraph isolated(4);
    isolated.record(0, 2, 3);
    isolated.record(2, 0);
    const auto groups = testing::alternating_groups(4);
    const auto iso = fair_pagerank(isolated, groups);
    REQUIRE(group_mass(iso, groups, Group::Unprivileged) == Approx(0.5).margin(1e-8));
    REQUIRE(iso[1] == Approx(iso[3]).margin(1e-12));
    REQUIRE(linf(iso, fair_pagerank_oracle(isolated, groups, 0.5, 0.85)) < 1e-9);

    const std::vector<Group> one_group(4, Group::Privileged);
    REQUIRE_THROWS_AS(fair_pagerank(isolated, one_group), InvalidInput);
    REQUIRE_THROWS_AS(fair_pagerank(ComparisonGraph(4), groups), InvalidInput);
}

TEST_CASE("FairPageRank agrees with a dense fixed-point oracle", "[recovery]") {
    SeededRng rng(9);
    for (double phi : {0.5, 0.3, 0.8}) {
        std::vector<Group> groups(25);
        for (auto& g : groups) {
            g = rng.uniform() < 0.4 ? Group::Unprivileged : Group::Privileged;
        }
        groups[0] = Group::Unprivileged;
        groups[1] = Group::Privileged;
        const ComparisonGraph g = btl_graph(normal_skills(25, rng), 60, rng);
        FairPageRank params;
        params.phi = phi;
        const auto s = fair_pagerank(g, groups, params);
        REQUIRE(linf(s, fair_pagerank_oracle(g, groups, phi, 0.85)) < 1e-9);
        REQUIRE(group_mass(s, groups, Group::Unprivileged) == Approx(phi).margin(1e-8));
    }
}

TEST_CASE("FairPageRank keeps the unprivileged mass at phi", "[recovery][property]") {
    SeededRng rng(10);
    for (int rep = 0; rep < 20; ++rep) {
        const std::size_t n = 10 + rng.uniform_index(100);
        std::vector<Group> groups(n);
        for (auto& g : groups) {
            g = rng.uniform() < 0.5 ? Group::Unprivileged : Group::Privileged;
        }
        groups[0] = Group::Unprivileged;
        groups[1] = Group::Privileged;
        const ComparisonGraph g = testing::random_graph(n, 1 + rng.uniform_index(5 * n), rng);
        FairPageRank params;
        params.phi = 0.1 + 0.8 * rng.uniform();
        const auto s = fair_pagerank(g, groups, params);
        REQUIRE(group_mass(s, groups, Group::Unprivileged) == Approx(params.phi).margin(1e-6));
        REQUIRE(std::accumulate(s.begin(), s.end(), 0.0) == Approx(1.0).margin(1e-10));
    }
}

TEST_CASE("recovery methods are permutation-equivariant", "[recovery][property]") {
    SeededRng rng(11);
    for (int rep = 0; rep < 10; ++rep) {
        const ComparisonGraph g = btl_graph(normal_skills(8, rng), 60, rng);
        const auto groups = testing::alternating_groups(8);
        std::vector<NodeId> perm(8);
        std::iota(perm.begin(), perm.end(), NodeId{0});
        rng.shuffle(std::span<NodeId>(perm));
        const ComparisonGraph h = relabel(g, perm);
        std::vector<Group> hgroups(8);
        for (NodeId i = 0; i < 8; ++i) {
            hgroups[perm[i]] = groups[i];
        }
        SeededRng unused(0);
        for (const RecoveryMethod& method :
             {RecoveryMethod{DavidsScore{}}, RecoveryMethod{RankCentrality{}},
              RecoveryMethod{SerialRank{}}, RecoveryMethod{FairPageRank{}}}) {
            const auto a = recover(method, g, groups, unused);
            const auto b = recover(method, h, hgroups, unused);
            for (NodeId i = 0; i < 8; ++i) {
                REQUIRE(b[perm[i]] == Approx(a[i]).margin(1e-9));
            }
        }
    }
}

TEST_CASE("methods are looked up by name", "[recovery]") {
    for (std::string_view name : {"random", "davids_score", "rank_centrality", "serial_rank", "fair_pagerank"}) {
        REQUIRE(method_name(method_from_name(name)) == name);
    }
    REQUIRE_THROWS_AS(method_from_name("gnnrank"), InvalidInput);
}
