#ifndef DCKM_CORE_TYPES_HPP
#define DCKM_CORE_TYPES_HPP

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace dckm {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using Labels = std::vector<int>;

/**
 * n x d sample-by-feature matrix.
 *
 * Construction only requires a non-empty matrix. The stricter invariants
 * (n, d >= 2, binary entries, no NaN) are checked by validate_data().
 */
class DataMatrix {
public:
    explicit DataMatrix(Matrix values);

    static DataMatrix from_rows(const std::vector<std::vector<double>>& rows);

    std::size_t n() const noexcept { return static_cast<std::size_t>(values_.rows()); }
    std::size_t d() const noexcept { return static_cast<std::size_t>(values_.cols()); }

    const Matrix& values() const noexcept { return values_; }
    double operator()(std::size_t i, std::size_t j) const {
        return values_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j));
    }

    bool operator==(const DataMatrix& other) const {
        return values_.rows() == other.values_.rows() &&
               values_.cols() == other.values_.cols() && values_ == other.values_;
    }

private:
    Matrix values_;
};

/**
 * Non-negative sample weights held through their square-root
 * parameterization: w = omega * omega element-wise, recomputed on every
 * mutation.
 */
class SampleWeights {
public:
    static SampleWeights from_omega(Vector omega);
    /// omega = sqrt(w); w is then recomputed from omega.
    static SampleWeights from_weights(const Vector& w);
    /// omega_i = sqrt(1/n), so sum(w) == 1 up to rounding.
    static SampleWeights uniform(std::size_t n);

    std::size_t size() const noexcept { return static_cast<std::size_t>(omega_.size()); }
    const Vector& omega() const noexcept { return omega_; }
    const Vector& w() const noexcept { return w_; }
    double sum() const { return w_.sum(); }

    void set_omega(Vector omega);

private:
    explicit SampleWeights(Vector omega);
    Vector omega_;
    Vector w_;
};

/// d x K centroid matrix; column k is the centroid of cluster k.
using CentroidMatrix = Matrix;

/**
 * 1-of-K assignment. Stored as a label per row; dense() materializes G.
 */
class AssignmentMatrix {
public:
    AssignmentMatrix(Labels labels, std::size_t k);

    std::size_t n() const noexcept { return labels_.size(); }
    std::size_t k() const noexcept { return k_; }
    int label(std::size_t i) const { return labels_[i]; }
    const Labels& labels() const noexcept { return labels_; }

    /// Dense n x K 0/1 matrix.
    Matrix dense() const;
    std::vector<std::size_t> cluster_sizes() const;

    bool operator==(const AssignmentMatrix& other) const = default;

private:
    Labels labels_;
    std::size_t k_;
};

struct HyperParams {
    double lambda1 = 1.0;  // decorrelation
    double lambda2 = 1.0;  // ||w||^2
    double lambda3 = 1.0;  // (sum w - 1)^2
    std::size_t k = 2;
    std::size_t max_outer_iters = 100;
    std::size_t max_w_iters = 5;
    double outer_tol = 1e-6;
    double grad_step = 0.1;
    double backtrack_shrink = 0.5;
    std::uint64_t seed = 0;
    std::size_t restarts = 1;
    /// When false the weights stay at their initial value (k-means reduction).
    bool learn_weights = true;
    /// Keep every sweep's labels in FitResult::assignment_history.
    bool record_assignments = false;

    /// Throws InvalidArgument on any violated invariant.
    void validate() const;
};

struct ColumnFlag {
    enum class Kind { NonBinary, NonFinite, Constant };
    Kind kind;
    std::size_t column;
    std::size_t row;  // first offending row; 0 for Constant
    bool fatal;
};

struct ValidationReport {
    bool ok = true;
    std::vector<ColumnFlag> flags;
    std::vector<std::string> messages;

    std::size_t fatal_count() const;
    std::size_t warning_count() const;
};

/// Checks shape, finiteness, exact 0/1 entries and constant columns.
/// Constant columns are warnings only.
ValidationReport validate_data(const DataMatrix& x);

AssignmentMatrix one_hot_rows(std::span<const int> labels, std::size_t k);

}  // namespace dckm

#endif  // DCKM_CORE_TYPES_HPP
