#include "dckm/core_types.hpp"

#include <cmath>
#include <sstream>

#include "dckm/errors.hpp"

namespace dckm {

DataMatrix::DataMatrix(Matrix values) : values_(std::move(values)) {
    if (values_.rows() < 1 || values_.cols() < 1) {
        throw InvalidArgument("data matrix must have at least one row and one column");
    }
}

DataMatrix DataMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
    if (rows.empty() || rows.front().empty()) {
        throw InvalidArgument("data matrix must have at least one row and one column");
    }
    const auto d = rows.front().size();
    Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(d));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != d) {
            throw ShapeMismatch("row " + std::to_string(i) + " has " +
                                std::to_string(rows[i].size()) + " entries, expected " +
                                std::to_string(d));
        }
        for (std::size_t j = 0; j < d; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return DataMatrix(std::move(m));
}

SampleWeights::SampleWeights(Vector omega) { set_omega(std::move(omega)); }

SampleWeights SampleWeights::from_omega(Vector omega) { return SampleWeights(std::move(omega)); }

SampleWeights SampleWeights::from_weights(const Vector& w) {
    if ((w.array() < 0.0).any()) {
        throw InvalidArgument("sample weights must be non-negative");
    }
    return SampleWeights(w.array().sqrt().matrix());
}

SampleWeights SampleWeights::uniform(std::size_t n) {
    if (n == 0) throw InvalidArgument("uniform weights need n >= 1");
    return SampleWeights(
        Vector::Constant(static_cast<Eigen::Index>(n), std::sqrt(1.0 / static_cast<double>(n))));
}

void SampleWeights::set_omega(Vector omega) {
    if (omega.size() == 0) throw InvalidArgument("sample weights must be non-empty");
    if (!omega.allFinite()) throw InvalidArgument("omega has non-finite entries");
    Vector w = omega.array().square().matrix();
    if (!(w.sum() > 0.0)) throw InvalidArgument("sample weights sum to zero");
    omega_ = std::move(omega);
    w_ = std::move(w);
}

AssignmentMatrix::AssignmentMatrix(Labels labels, std::size_t k) : labels_(std::move(labels)), k_(k) {
    if (k_ == 0) throw InvalidArgument("cluster count must be positive");
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        if (labels_[i] < 0 || static_cast<std::size_t>(labels_[i]) >= k_) {
            throw InvalidArgument("label " + std::to_string(labels_[i]) + " at row " +
                                  std::to_string(i) + " out of range [0," + std::to_string(k_) +
                                  ")");
        }
    }
}

Matrix AssignmentMatrix::dense() const {
    Matrix g = Matrix::Zero(static_cast<Eigen::Index>(labels_.size()), static_cast<Eigen::Index>(k_));
    for (std::size_t i = 0; i < labels_.size(); ++i) {
        g(static_cast<Eigen::Index>(i), labels_[i]) = 1.0;
    }
    return g;
}

std::vector<std::size_t> AssignmentMatrix::cluster_sizes() const {
    std::vector<std::size_t> sizes(k_, 0);
    for (int l : labels_) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
}

void HyperParams::validate() const {
    auto fail = [](const std::string& msg) { throw InvalidArgument(msg); };
    if (!(lambda1 >= 0.0) || !(lambda2 >= 0.0) || !(lambda3 >= 0.0)) {
        fail("lambda1, lambda2, lambda3 must be non-negative");
    }
    if (k < 1) fail("k must be at least 1");
    if (max_outer_iters < 1 || max_w_iters < 1) fail("iteration caps must be positive");
    if (!(outer_tol > 0.0)) fail("outer_tol must be positive");
    if (!(grad_step > 0.0)) fail("grad_step must be positive");
    if (!(backtrack_shrink > 0.0 && backtrack_shrink < 1.0)) fail("backtrack_shrink must lie in (0,1)");
    if (restarts < 1) fail("restarts must be positive");
}

std::size_t ValidationReport::fatal_count() const {
    std::size_t c = 0;
    for (const auto& f : flags) c += f.fatal ? 1 : 0;
    return c;
}

std::size_t ValidationReport::warning_count() const { return flags.size() - fatal_count(); }

ValidationReport validate_data(const DataMatrix& x) {
    ValidationReport report;
    const auto& v = x.values();
    if (x.n() < 2 || x.d() < 2) {
        report.ok = false;
        report.messages.push_back("need n >= 2 and d >= 2, got " + std::to_string(x.n()) + "x" +
                                  std::to_string(x.d()));
    }
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        const auto col = static_cast<std::size_t>(j);
        bool column_fatal = false;
        for (Eigen::Index i = 0; i < v.rows() && !column_fatal; ++i) {
            const double e = v(i, j);
            const auto row = static_cast<std::size_t>(i);
            std::ostringstream msg;
            if (!std::isfinite(e)) {
                report.flags.push_back({ColumnFlag::Kind::NonFinite, col, row, true});
                msg << "entry (" << row << "," << col << ") is not finite";
                column_fatal = true;
            } else if (e != 0.0 && e != 1.0) {
                report.flags.push_back({ColumnFlag::Kind::NonBinary, col, row, true});
                msg << "entry (" << row << "," << col << ") is non-binary: " << e;
                column_fatal = true;
            }
            if (column_fatal) report.messages.push_back(msg.str());
        }
        if (column_fatal) {
            report.ok = false;
            continue;
        }
        if ((v.col(j).array() == v(0, j)).all()) {
            report.flags.push_back({ColumnFlag::Kind::Constant, col, 0, false});
            report.messages.push_back("column " + std::to_string(col) + " is constant");
        }
    }
    return report;
}

AssignmentMatrix one_hot_rows(std::span<const int> labels, std::size_t k) {
    return AssignmentMatrix(Labels(labels.begin(), labels.end()), k);
}

}  // namespace dckm
