#ifndef DCKM_BASELINES_HPP
#define DCKM_BASELINES_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "dckm/core_types.hpp"
#include "dckm/decorrelation.hpp"

namespace dckm {

struct KMeansOptions {
    std::size_t max_iters = 100;
    bool record_assignments = false;
};

struct ClusteringResult {
    CentroidMatrix centroids;
    AssignmentMatrix assignment;
    double loss = 0.0;                    // (weighted) within-cluster sum of squares
    std::vector<double> loss_history;     // after each sweep
    std::vector<Labels> assignment_history;
    std::size_t iterations = 0;
    bool converged = false;               // reached an assignment fixed point
};

/**
 * Lloyd iterations on the factorization form, starting from the same
 * seeded random labeling as fit(). Runs until the assignment is a fixed
 * point or opts.max_iters sweeps. Uses uniform weights summing to one, so
 * the loss is the mean within-cluster squared distance.
 */
ClusteringResult kmeans(const DataMatrix& x, std::size_t k, std::uint64_t seed,
                        const KMeansOptions& opts = {});

/// Weighted Lloyd iterations with frozen weights.
ClusteringResult weighted_kmeans(const DataMatrix& x, const SampleWeights& w, std::size_t k,
                                 std::uint64_t seed, const KMeansOptions& opts = {});
ClusteringResult weighted_kmeans_from(const DataMatrix& x, const SampleWeights& w, Labels init,
                                      std::size_t k, const KMeansOptions& opts = {});

struct DecKMResult {
    ClusteringResult clustering;
    SampleWeights weights;
    double stage1_objective = 0.0;
    std::size_t stage1_steps = 0;
};

/// Two-step baseline: learn weights from the decorrelation terms alone,
/// then run weighted k-means with them frozen.
DecKMResult dec_km(const DataMatrix& x, const HyperParams& hp);

struct PcaKMResult {
    ClusteringResult clustering;
    Matrix basis;            // d x components, orthonormal columns
    Vector singular_values;  // all singular values of the centered data
    std::size_t components = 0;
    bool rank_deficient = false;
};

/// Center columns, project onto the top `dims` (default K-1) right singular
/// vectors, run kmeans in the projected space.
PcaKMResult pca_km(const DataMatrix& x, std::size_t k, std::uint64_t seed,
                   std::optional<std::size_t> dims = std::nullopt, const KMeansOptions& opts = {});

/// Pearson correlation between columns; zero-variance columns correlate 0 with everything.
Matrix column_correlation(const DataMatrix& x);

/// Greedy index-order scan keeping a feature unless |corr| with an already
/// kept feature exceeds `threshold`.
std::vector<std::size_t> select_uncorrelated(const DataMatrix& x, double threshold);

struct DropKMResult {
    ClusteringResult clustering;
    std::vector<std::size_t> kept;
};

DropKMResult drop_km(const DataMatrix& x, std::size_t k, double threshold, std::uint64_t seed,
                     const KMeansOptions& opts = {});

struct BaselineSpec {
    enum class Kind { KMeans, DecKM, PcaKM, DropKM };
    Kind kind = Kind::KMeans;
    double drop_threshold = 0.7;
    std::optional<std::size_t> pca_dims;  // default K - 1

    void validate(std::size_t d) const;
};

}  // namespace dckm

#endif  // DCKM_BASELINES_HPP
