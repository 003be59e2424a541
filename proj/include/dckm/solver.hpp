#ifndef DCKM_SOLVER_HPP
#define DCKM_SOLVER_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dckm/core_types.hpp"

namespace dckm {

/// Smallest step the backtracking line search will try before giving up.
inline constexpr double kMinLineSearchStep = 1e-16;
/// Sufficient-decrease constant of the backtracking line search.
inline constexpr double kArmijoConstant = 1e-4;
/// Empty-cluster re-seeds attempted before a fit fails.
inline constexpr int kMaxReseedAttempts = 3;

struct ObjectiveTerms {
    double reconstruction = 0.0;  // sum_i w_i ||x_i - f_{g_i}||^2
    double balance = 0.0;         // unscaled decorrelation loss
    double weight_norm = 0.0;     // ||w||^2
    double sum_penalty = 0.0;     // (sum w - 1)^2
    double total = 0.0;
    std::size_t skipped_features = 0;
};

ObjectiveTerms objective_terms(const DataMatrix& x, const Vector& w, const CentroidMatrix& f,
                               const AssignmentMatrix& g, const HyperParams& hp);

/// Full penalized DCKM objective J(w, F, G).
double objective(const DataMatrix& x, const SampleWeights& w, const CentroidMatrix& f,
                 const AssignmentMatrix& g, const HyperParams& hp);

/// ||x_i - f_{g_i}||^2 per sample.
Vector sample_residuals(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g);

/// sum_i w_i ||x_i - f_{g_i}||^2
double weighted_kmeans_loss(const DataMatrix& x, const Vector& w, const CentroidMatrix& f,
                            const AssignmentMatrix& g);

/**
 * Per-cluster weighted means. Equivalent to the closed-form least-squares
 * centroid update for one-hot G. Throws EmptyCluster for the first cluster
 * whose weight mass is <= kGroupMassEpsilon.
 */
CentroidMatrix update_F(const DataMatrix& x, const Vector& w, const AssignmentMatrix& g);
CentroidMatrix update_F(const DataMatrix& x, const SampleWeights& w, const AssignmentMatrix& g);

/// Nearest centroid per row by squared Euclidean distance; ties go to the lowest index.
AssignmentMatrix update_G(const DataMatrix& x, const CentroidMatrix& f);

/**
 * update_F with empty-cluster recovery: an empty centroid is re-seeded at
 * the sample with the largest weighted residual (among clusters that can
 * spare a member), G is recomputed, and the update retried. Throws
 * EmptyCluster after kMaxReseedAttempts failures. `g` is updated in place
 * when a re-seed happens.
 */
CentroidMatrix update_F_with_recovery(const DataMatrix& x, const Vector& w, AssignmentMatrix& g,
                                      std::size_t* reseeds = nullptr);

/// J(omega) for fixed F, G given the per-sample squared residuals.
/// An empty `residuals` vector drops the k-means term entirely.
double omega_objective(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                       const HyperParams& hp);
Vector omega_gradient(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                      const HyperParams& hp);

double omega_objective(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                       const Vector& omega, const HyperParams& hp);
Vector omega_gradient(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                      const Vector& omega, const HyperParams& hp);

struct WeightUpdate {
    SampleWeights weights;
    std::size_t steps = 0;
    bool stalled = false;  // no step >= kMinLineSearchStep decreased J
    double objective_before = 0.0;
    double objective_after = 0.0;
};

/// Gradient descent with backtracking on J(omega); never increases it.
WeightUpdate descend_omega(const DataMatrix& x, const Vector& residuals, const Vector& omega,
                           const HyperParams& hp, std::size_t max_steps);

/// hp.max_w_iters descent steps with F and G fixed.
WeightUpdate update_w(const DataMatrix& x, const CentroidMatrix& f, const AssignmentMatrix& g,
                      const Vector& omega, const HyperParams& hp);

struct FitState {
    SampleWeights weights;
    CentroidMatrix centroids;
    AssignmentMatrix assignment;
};

struct SweepReport {
    double objective = 0.0;
    bool assignment_changed = false;
    bool weights_changed = false;
    bool stalled = false;
    std::size_t weight_steps = 0;
    std::size_t reseeds = 0;
    std::size_t skipped_features = 0;
};

/// One F -> G -> w block sweep.
SweepReport sweep(const DataMatrix& x, FitState& state, const HyperParams& hp);

struct FitResult {
    CentroidMatrix centroids;
    AssignmentMatrix assignment;
    SampleWeights weights;
    std::vector<double> objective_history;  // one entry per sweep
    std::vector<Labels> assignment_history;  // filled when hp.record_assignments
    bool converged = false;
    std::size_t iterations = 0;
    std::size_t skipped_features_last = 0;
    std::size_t line_search_stalls = 0;
    std::uint64_t seed = 0;

    double final_objective() const { return objective_history.back(); }
};

/// Seeded uniform random labels used to initialize every clusterer here.
Labels initial_labels(std::size_t n, std::size_t k, std::uint64_t seed);

/**
 * Alternating minimization of J(w, F, G) from init_labels (or a seeded
 * random labeling) with uniform weights summing to one. Stops when the
 * relative objective change falls to hp.outer_tol, when an exact fixed
 * point is reached, or after hp.max_outer_iters sweeps.
 */
FitResult fit(const DataMatrix& x, const HyperParams& hp,
              const std::optional<Labels>& init_labels = std::nullopt);

struct RestartResults {
    std::vector<FitResult> runs;  // runs[r] used seed hp.seed + r
    std::size_t best = 0;         // lowest final objective, ties to lowest r

    const FitResult& best_fit() const { return runs[best]; }
};

/// hp.restarts independent fits; runs execute concurrently.
RestartResults fit_restarts(const DataMatrix& x, const HyperParams& hp);

}  // namespace dckm

#endif  // DCKM_SOLVER_HPP
