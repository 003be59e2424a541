#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "dckm/baselines.hpp"
#include "dckm/data_io.hpp"
#include "dckm/decorrelation.hpp"
#include "dckm/errors.hpp"
#include "dckm/solver.hpp"
#include "oracles.hpp"

using namespace dckm;

namespace {

HyperParams zero_lambdas(std::size_t k) {
    HyperParams hp;
    hp.lambda1 = hp.lambda2 = hp.lambda3 = 0.0;
    hp.k = k;
    return hp;
}

Vector vec(std::initializer_list<double> v) {
    Vector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (double e : v) out(i++) = e;
    return out;
}

}  // namespace

TEST(Objective, PerfectReconstructionIsZero) {
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}});
    const AssignmentMatrix g({0, 1}, 2);
    Matrix f(2, 2);
    f << 1, 0, 0, 1;
    EXPECT_EQ(objective(x, SampleWeights::from_weights(Vector::Ones(2)), f, g, zero_lambdas(2)), 0.0);
}

TEST(Objective, SumPenaltySatisfiedByUniformWeights) {
    const auto x = DataMatrix::from_rows({{1, 0}, {1, 0}, {1, 0}, {1, 0}});
    const AssignmentMatrix g({0, 0, 0, 0}, 1);
    Matrix f(2, 1);
    f << 1, 0;
    HyperParams hp = zero_lambdas(1);
    hp.lambda3 = 1.0;
    EXPECT_NEAR(objective(x, SampleWeights::uniform(4), f, g, hp), 0.0, 1e-15);
}

TEST(Objective, SingleCentroidExample) {
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}});
    const AssignmentMatrix g({0, 0}, 1);
    Matrix f(2, 1);
    f << 0.5, 0.5;
    EXPECT_DOUBLE_EQ(objective(x, SampleWeights::from_weights(Vector::Ones(2)), f, g, zero_lambdas(1)), 1.0);
}

TEST(Objective, MatchesTermByTermOracle) {
    Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = DataMatrix(oracle::random_binary(rng, 20, 5));
        const std::size_t k = 1 + rng.index(3);
        const AssignmentMatrix g(rng.labels(20, k), k);
        Matrix f(5, static_cast<Eigen::Index>(k));
        for (auto& v : f.reshaped()) v = rng.uniform();
        Vector omega(20);
        for (auto& v : omega) v = rng.uniform(0.1, 1.0);
        HyperParams hp;
        hp.k = k;
        hp.lambda1 = rng.uniform(0, 2);
        hp.lambda2 = rng.uniform(0, 2);
        hp.lambda3 = rng.uniform(0, 2);
        const double expected =
            oracle::omega_objective(x.values(), f, g.labels(), omega, hp.lambda1, hp.lambda2, hp.lambda3);
        EXPECT_NEAR(objective(x, SampleWeights::from_omega(omega), f, g, hp), expected, 1e-12 * expected);
        EXPECT_NEAR(omega_objective(x, f, g, omega, hp), expected, 1e-12 * expected);
    }
}

TEST(UpdateF, SingleClusterGivesColumnMeans) {
    const auto x = DataMatrix::from_rows({{1, 0, 1}, {1, 1, 0}, {0, 1, 0}, {1, 1, 1}});
    const auto f = update_F(x, SampleWeights::uniform(4), AssignmentMatrix({0, 0, 0, 0}, 1));
    EXPECT_TRUE(f.col(0).isApprox(vec({0.75, 0.75, 0.5})));
}

TEST(UpdateF, SingletonsReproducePoints) {
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}});
    const auto f = update_F(x, vec({0.3, 5.0}), AssignmentMatrix({0, 1}, 2));
    EXPECT_EQ(f, (Matrix(2, 2) << 1, 0, 0, 1).finished());
}

TEST(UpdateF, WeightedMeanExample) {
    const auto x = DataMatrix::from_rows({{1, 0}, {1, 1}, {0, 1}});
    const auto f = update_F(x, vec({1, 3, 1}), AssignmentMatrix({0, 0, 1}, 2));
    EXPECT_TRUE(f.col(0).isApprox(vec({1, 0.75})));
    EXPECT_TRUE(f.col(1).isApprox(vec({0, 1})));
}

TEST(UpdateF, EmptyClusterThrows) {
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}});
    try {
        update_F(x, Vector::Ones(2), AssignmentMatrix({0, 0}, 3));
        FAIL() << "expected EmptyCluster";
    } catch (const EmptyCluster& e) {
        EXPECT_EQ(e.cluster(), 1u);
    }
}

TEST(UpdateF, StationaryForWeightedLoss) {
    Rng rng(103);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = DataMatrix(oracle::random_binary(rng, 40, 6));
        const AssignmentMatrix g(rng.labels(40, 3), 3);
        const auto sizes = g.cluster_sizes();
        if (std::ranges::find(sizes, 0u) != sizes.end()) continue;
        Vector w(40);
        for (auto& v : w) v = rng.uniform(0.01, 1.0);
        const Matrix f = update_F(x, w, g);
        // dL/dF = -2 (X - G F^T)^T diag(w) G
        const Matrix gd = g.dense();
        const Matrix grad = -2.0 * (x.values() - gd * f.transpose()).transpose() * w.asDiagonal() * gd;
        EXPECT_LE(grad.cwiseAbs().maxCoeff(), 1e-8);
    }
}

TEST(UpdateG, Examples) {
    Matrix f(2, 2);
    f << 1, 0, 0, 1;
    EXPECT_EQ(update_G(DataMatrix::from_rows({{1, 0}}), f).label(0), 0);
    EXPECT_EQ(update_G(DataMatrix::from_rows({{0, 1}}), f).label(0), 1);
    EXPECT_EQ(update_G(DataMatrix::from_rows({{1, 1}}), f).label(0), 0);
}

TEST(UpdateG, MatchesEnumerationOracle) {
    Rng rng(107);
    for (int trial = 0; trial < 100; ++trial) {
        const auto n = static_cast<Eigen::Index>(1 + rng.index(12));
        const auto k = static_cast<Eigen::Index>(1 + rng.index(3));
        const auto x = DataMatrix(oracle::random_binary(rng, n, 4));
        Matrix f(4, k);
        // Quarter-grid centroids make exact ties common.
        for (auto& v : f.reshaped()) v = 0.25 * static_cast<double>(rng.index(5));
        const auto g = update_G(x, f);
        EXPECT_EQ(g.labels(), oracle::assign_by_enumeration(x.values(), f)) << "trial " << trial;
        const double loss = weighted_kmeans_loss(x, Vector::Ones(n), f, g);
        if (n <= 8) EXPECT_NEAR(loss, oracle::min_assignment_loss(x.values(), f), 1e-12);
    }
}

TEST(UpdateG, IndependentOfWeights) {
    // update_G has no weight argument; check the weighted loss it minimizes
    // is still minimized for arbitrary positive weights.
    Rng rng(109);
    const auto x = DataMatrix(oracle::random_binary(rng, 15, 4));
    Matrix f(4, 3);
    for (auto& v : f.reshaped()) v = rng.uniform();
    const auto g = update_G(x, f);
    Vector w(15);
    for (auto& v : w) v = rng.uniform(0.1, 5.0);
    const double best = weighted_kmeans_loss(x, w, f, g);
    for (int trial = 0; trial < 50; ++trial) {
        const AssignmentMatrix other(rng.labels(15, 3), 3);
        EXPECT_LE(best, weighted_kmeans_loss(x, w, f, other) + 1e-12);
    }
}

TEST(UpdateG, RejectsNonFiniteCentroids) {
    Matrix f(2, 1);
    f << std::nan(""), 0;
    EXPECT_THROW(update_G(DataMatrix::from_rows({{1, 0}}), f), InvalidArgument);
}

TEST(OmegaGradient, MatchesFiniteDifferences) {
    Rng rng(113);
    for (int trial = 0; trial < 30; ++trial) {
        const auto n = static_cast<Eigen::Index>(4 + rng.index(27));
        const auto d = static_cast<Eigen::Index>(2 + rng.index(7));
        const std::size_t k = 1 + rng.index(3);
        const auto x = DataMatrix(oracle::random_binary(rng, n, d));
        const AssignmentMatrix g(rng.labels(static_cast<std::size_t>(n), k), k);
        Matrix f(d, static_cast<Eigen::Index>(k));
        for (auto& v : f.reshaped()) v = rng.uniform();
        Vector omega(n);
        for (auto& v : omega) v = rng.uniform(0.2, 1.2);
        HyperParams hp;
        hp.k = k;
        hp.lambda1 = rng.uniform(0.1, 3.0);
        hp.lambda2 = rng.uniform(0.1, 3.0);
        hp.lambda3 = rng.uniform(0.1, 3.0);
        const Vector analytic = omega_gradient(x, f, g, omega, hp);
        const Vector numeric = oracle::central_difference(
            [&](const Vector& o) {
                return oracle::omega_objective(x.values(), f, g.labels(), o, hp.lambda1, hp.lambda2, hp.lambda3);
            },
            omega);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double denom = std::max(std::abs(numeric(i)), 1e-6);
            EXPECT_LE(std::abs(analytic(i) - numeric(i)) / denom, 1e-4) << "trial " << trial << " i " << i;
        }
    }
}

TEST(UpdateW, StationaryPointIsKept) {
    // Perfect reconstruction, lambda1 = lambda2 = 0 and uniform weights
    // summing to one: every term of the gradient vanishes.
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
    const AssignmentMatrix g({0, 1, 0, 1}, 2);
    Matrix f(2, 2);
    f << 1, 0, 0, 1;
    HyperParams hp = zero_lambdas(2);
    hp.lambda3 = 1.0;
    const Vector omega = Vector::Constant(4, 0.5);
    const auto upd = update_w(x, f, g, omega, hp);
    EXPECT_EQ(upd.weights.omega(), omega);
    EXPECT_EQ(upd.steps, 0u);
}

TEST(UpdateW, SumPenaltyPullsTowardUnitMass) {
    const auto x = DataMatrix::from_rows({{1, 0}, {0, 1}, {1, 0}, {0, 1}});
    const AssignmentMatrix g({0, 1, 0, 1}, 2);
    Matrix f(2, 2);
    f << 1, 0, 0, 1;
    HyperParams hp = zero_lambdas(2);
    hp.lambda3 = 10.0;
    hp.max_w_iters = 200;
    const auto upd = update_w(x, f, g, Vector::Constant(4, 1.0), hp);
    EXPECT_NEAR(upd.weights.sum(), 1.0, 1e-3);
}

TEST(UpdateW, NeverIncreasesObjective) {
    Rng rng(127);
    for (int trial = 0; trial < 20; ++trial) {
        const auto x = DataMatrix(oracle::random_binary(rng, 30, 6));
        const AssignmentMatrix g(rng.labels(30, 3), 3);
        Matrix f(6, 3);
        for (auto& v : f.reshaped()) v = rng.uniform();
        Vector omega(30);
        for (auto& v : omega) v = rng.uniform(0.05, 0.5);
        HyperParams hp;
        hp.k = 3;
        hp.lambda1 = std::pow(10.0, rng.uniform(-2, 3));
        hp.lambda2 = std::pow(10.0, rng.uniform(-2, 3));
        const double before = omega_objective(x, f, g, omega, hp);
        const auto upd = update_w(x, f, g, omega, hp);
        EXPECT_LE(upd.objective_after, before);
        EXPECT_NEAR(omega_objective(x, f, g, upd.weights.omega(), hp), upd.objective_after,
                    1e-12 * std::max(1.0, before));
    }
}

TEST(Fit, ObjectiveHistoryNonIncreasing) {
    Rng rng(131);
    for (int trial = 0; trial < 5; ++trial) {
        const auto x = DataMatrix(oracle::random_binary(rng, 80, 10));
        HyperParams hp;
        hp.k = 3;
        hp.seed = static_cast<std::uint64_t>(trial);
        hp.max_outer_iters = 30;
        hp.outer_tol = 1e-15;
        const auto r = fit(x, hp);
        for (std::size_t t = 1; t < r.objective_history.size(); ++t) {
            const double prev = r.objective_history[t - 1];
            EXPECT_LE(r.objective_history[t], prev + 1e-8 * std::max(1.0, std::abs(prev)));
            EXPECT_TRUE(std::isfinite(r.objective_history[t]));
        }
    }
}

TEST(Fit, LloydReductionMatchesKMeans) {
    Rng rng(137);
    for (int trial = 0; trial < 5; ++trial) {
        const auto x = DataMatrix(oracle::random_binary(rng, 60, 8));
        HyperParams hp = zero_lambdas(4);
        hp.learn_weights = false;
        hp.record_assignments = true;
        hp.seed = 40 + static_cast<std::uint64_t>(trial);
        const auto r = fit(x, hp);
        const auto km = kmeans(x, 4, hp.seed, {.max_iters = 100, .record_assignments = true});
        const std::size_t common = std::min(r.assignment_history.size(), km.assignment_history.size());
        ASSERT_GT(common, 0u);
        for (std::size_t t = 0; t < common; ++t) EXPECT_EQ(r.assignment_history[t], km.assignment_history[t]);
        EXPECT_EQ(r.assignment.labels(), km.assignment.labels());
    }
}

TEST(Fit, SaturatedClustering) {
    const auto x = DataMatrix::from_rows({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}});
    HyperParams hp = zero_lambdas(4);
    hp.learn_weights = false;
    const auto r = fit(x, hp, Labels{0, 1, 2, 3});
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(weighted_kmeans_loss(x, r.weights.w(), r.centroids, r.assignment), 0.0);
}

TEST(Fit, ReducesBalanceLossOnBiasedData) {
    BiasSpec spec;
    spec.n = 200;
    spec.seed = 5;
    const auto ds = generate_biased(spec);
    HyperParams hp;
    hp.k = 3;
    hp.lambda1 = 1.0;
    hp.max_outer_iters = 20;
    const auto r = fit(ds.x, hp);
    EXPECT_LT(balance_loss(ds.x, r.weights).value, balance_loss(ds.x, SampleWeights::uniform(spec.n)).value);
}

TEST(Fit, RejectsInvalidInput) {
    HyperParams hp;
    hp.k = 5;
    EXPECT_THROW(fit(DataMatrix::from_rows({{1, 0}, {0, 1}}), hp), InvalidArgument);
    hp.k = 2;
    EXPECT_THROW(fit(DataMatrix::from_rows({{1, 0.5}, {0, 1}}), hp), DataError);
}

TEST(Fit, EmptyClusterIsRecovered) {
    // All samples start in cluster 0; clusters 1 and 2 are re-seeded.
    const auto x = DataMatrix::from_rows({{1, 0, 0}, {1, 0, 0}, {0, 1, 0}, {0, 1, 0}, {0, 0, 1}, {0, 0, 1}});
    HyperParams hp = zero_lambdas(3);
    hp.learn_weights = false;
    const auto r = fit(x, hp, Labels(6, 0));
    for (auto s : r.assignment.cluster_sizes()) EXPECT_GT(s, 0u);
}

TEST(FitRestarts, SingleRestartEqualsFit) {
    Rng rng(139);
    const auto x = DataMatrix(oracle::random_binary(rng, 50, 6));
    HyperParams hp;
    hp.k = 3;
    hp.seed = 9;
    hp.max_outer_iters = 10;
    const auto single = fit(x, hp);
    const auto rr = fit_restarts(x, hp);
    ASSERT_EQ(rr.runs.size(), 1u);
    EXPECT_EQ(rr.best_fit().objective_history, single.objective_history);
    EXPECT_EQ(rr.best_fit().weights.omega(), single.weights.omega());
}

TEST(FitRestarts, DeterministicAndBestIsLowest) {
    Rng rng(149);
    const auto x = DataMatrix(oracle::random_binary(rng, 50, 6));
    HyperParams hp;
    hp.k = 3;
    hp.seed = 3;
    hp.restarts = 4;
    hp.max_outer_iters = 10;
    const auto a = fit_restarts(x, hp);
    const auto b = fit_restarts(x, hp);
    ASSERT_EQ(a.runs.size(), 4u);
    for (std::size_t r = 0; r < 4; ++r) {
        EXPECT_EQ(a.runs[r].seed, 3 + r);
        EXPECT_EQ(a.runs[r].objective_history, b.runs[r].objective_history);
        EXPECT_EQ(a.runs[r].assignment.labels(), b.runs[r].assignment.labels());
        EXPECT_LE(a.best_fit().final_objective(), a.runs[r].final_objective());
    }
    EXPECT_EQ(a.best, b.best);
}
