#include "dckm/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "dckm/errors.hpp"
#include "dckm/solver.hpp"

namespace dckm {

ClusteringResult weighted_kmeans_from(const DataMatrix& x, const SampleWeights& w, Labels init,
                                      std::size_t k, const KMeansOptions& opts) {
    if (w.size() != x.n()) throw ShapeMismatch("weight vector length does not match sample count");
    if (k < 1 || k > x.n()) throw InvalidArgument("k must lie in [1, n]");
    if (init.size() != x.n()) throw ShapeMismatch("initial labels do not match sample count");

    ClusteringResult out{CentroidMatrix(), AssignmentMatrix(std::move(init), k)};
    for (std::size_t it = 0; it < opts.max_iters; ++it) {
        AssignmentMatrix g = out.assignment;
        out.centroids = update_F_with_recovery(x, w.w(), g);
        AssignmentMatrix next = update_G(x, out.centroids);
        const bool changed = !(next == out.assignment);
        out.assignment = std::move(next);
        out.loss = weighted_kmeans_loss(x, w.w(), out.centroids, out.assignment);
        out.loss_history.push_back(out.loss);
        if (opts.record_assignments) out.assignment_history.push_back(out.assignment.labels());
        ++out.iterations;
        if (!changed) {
            out.converged = true;
            break;
        }
    }
    return out;
}

ClusteringResult weighted_kmeans(const DataMatrix& x, const SampleWeights& w, std::size_t k,
                                 std::uint64_t seed, const KMeansOptions& opts) {
    return weighted_kmeans_from(x, w, initial_labels(x.n(), k, seed), k, opts);
}

ClusteringResult kmeans(const DataMatrix& x, std::size_t k, std::uint64_t seed, const KMeansOptions& opts) {
    return weighted_kmeans(x, SampleWeights::uniform(x.n()), k, seed, opts);
}

DecKMResult dec_km(const DataMatrix& x, const HyperParams& hp) {
    hp.validate();
    const auto report = validate_data(x);
    if (!report.ok) throw DataError("invalid data: " + report.messages.front());

    // Stage 1: decorrelation, norm and sum penalties only.
    Vector omega = SampleWeights::uniform(x.n()).omega();
    const Vector no_residuals;
    double previous = omega_objective(x, no_residuals, omega, hp);
    std::size_t steps = 0;
    for (std::size_t outer = 0; outer < hp.max_outer_iters; ++outer) {
        auto upd = descend_omega(x, no_residuals, omega, hp, hp.max_w_iters);
        steps += upd.steps;
        omega = upd.weights.omega();
        const double change = std::abs(previous - upd.objective_after);
        previous = upd.objective_after;
        if (upd.steps == 0 || change <= hp.outer_tol * std::max(1.0, std::abs(upd.objective_before))) break;
    }
    auto weights = SampleWeights::from_omega(omega);
    KMeansOptions opts;
    opts.max_iters = hp.max_outer_iters;
    opts.record_assignments = hp.record_assignments;
    auto clustering = weighted_kmeans(x, weights, hp.k, hp.seed, opts);
    return DecKMResult{std::move(clustering), std::move(weights), previous, steps};
}

PcaKMResult pca_km(const DataMatrix& x, std::size_t k, std::uint64_t seed,
                   std::optional<std::size_t> dims, const KMeansOptions& opts) {
    if (k < 2) throw InvalidArgument("pca_km needs k >= 2");
    const std::size_t wanted = dims.value_or(k - 1);
    if (wanted < 1 || wanted > x.d()) throw InvalidArgument("pca dimension must lie in [1, d]");

    const Matrix& v = x.values();
    const Matrix centered = v.rowwise() - v.colwise().mean();
    Eigen::BDCSVD<Matrix> svd(centered, Eigen::ComputeThinV);
    const Vector sv = svd.singularValues();

    PcaKMResult out{ClusteringResult{CentroidMatrix(), AssignmentMatrix(Labels(x.n(), 0), k)}};
    out.singular_values = sv;
    const double cutoff =
        sv.size() > 0 ? sv(0) * static_cast<double>(std::max(v.rows(), v.cols())) * 1e-12 : 0.0;
    std::size_t rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i) rank += sv(i) > cutoff ? 1 : 0;
    if (rank == 0) throw DataError("pca_km: data has no variance");
    out.components = std::min(wanted, rank);
    out.rank_deficient = out.components < wanted;
    out.basis = svd.matrixV().leftCols(static_cast<Eigen::Index>(out.components));
    const DataMatrix projected(centered * out.basis);
    out.clustering = kmeans(projected, k, seed, opts);
    return out;
}

Matrix column_correlation(const DataMatrix& x) {
    const Matrix& v = x.values();
    const Matrix centered = v.rowwise() - v.colwise().mean();
    const Matrix cov = centered.transpose() * centered;
    const Vector sd = cov.diagonal().cwiseMax(0.0).cwiseSqrt();
    Matrix corr = Matrix::Zero(cov.rows(), cov.cols());
    for (Eigen::Index a = 0; a < cov.rows(); ++a) {
        for (Eigen::Index b = 0; b < cov.cols(); ++b) {
            const double denom = sd(a) * sd(b);
            corr(a, b) = denom > 0.0 ? cov(a, b) / denom : 0.0;
        }
    }
    return corr;
}

std::vector<std::size_t> select_uncorrelated(const DataMatrix& x, double threshold) {
    if (!(threshold > 0.0 && threshold <= 1.0)) throw InvalidArgument("drop threshold must lie in (0, 1]");
    const Matrix corr = column_correlation(x);
    std::vector<std::size_t> kept;
    for (std::size_t j = 0; j < x.d(); ++j) {
        const bool correlated = std::any_of(kept.begin(), kept.end(), [&](std::size_t k) {
            return std::abs(corr(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k))) > threshold;
        });
        if (!correlated) kept.push_back(j);
    }
    return kept;
}

DropKMResult drop_km(const DataMatrix& x, std::size_t k, double threshold, std::uint64_t seed,
                     const KMeansOptions& opts) {
    auto kept = select_uncorrelated(x, threshold);
    if (kept.empty()) throw DataError("drop_km: every feature was dropped");
    Matrix reduced(x.values().rows(), static_cast<Eigen::Index>(kept.size()));
    for (std::size_t c = 0; c < kept.size(); ++c) {
        reduced.col(static_cast<Eigen::Index>(c)) = x.values().col(static_cast<Eigen::Index>(kept[c]));
    }
    auto clustering = kmeans(DataMatrix(std::move(reduced)), k, seed, opts);
    return DropKMResult{std::move(clustering), std::move(kept)};
}

void BaselineSpec::validate(std::size_t d) const {
    if (!(drop_threshold > 0.0 && drop_threshold <= 1.0)) {
        throw InvalidArgument("drop threshold must lie in (0, 1]");
    }
    if (pca_dims && (*pca_dims < 1 || *pca_dims >= d)) {
        throw InvalidArgument("pca dimension must lie in [1, d)");
    }
}

}  // namespace dckm
