#include "dckm/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "dckm/errors.hpp"

namespace dckm {

namespace {

std::vector<std::size_t> compact(std::span<const int> labels, std::size_t& count) {
    std::map<int, std::size_t> ids;
    for (int l : labels) ids.emplace(l, 0);
    std::size_t next = 0;
    for (auto& [label, id] : ids) id = next++;
    count = next;
    std::vector<std::size_t> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids.at(l));
    return out;
}

double choose2(std::uint64_t m) {
    const auto v = static_cast<double>(m);
    return v * (v - 1.0) / 2.0;
}

double entropy(const std::vector<std::uint64_t>& sums, double n) {
    double h = 0.0;
    for (auto c : sums) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

ContingencyTable contingency(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() != labels_b.size()) {
        throw ShapeMismatch("label vectors differ in length: " + std::to_string(labels_a.size()) +
                            " vs " + std::to_string(labels_b.size()));
    }
    std::size_t ka = 0;
    std::size_t kb = 0;
    const auto a = compact(labels_a, ka);
    const auto b = compact(labels_b, kb);
    ContingencyTable t;
    t.counts.assign(ka, std::vector<std::uint64_t>(kb, 0));
    t.row_sums.assign(ka, 0);
    t.col_sums.assign(kb, 0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++t.counts[a[i]][b[i]];
        ++t.row_sums[a[i]];
        ++t.col_sums[b[i]];
    }
    t.n = a.size();
    return t;
}

double nmi(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.empty()) throw InvalidArgument("nmi needs at least one label");
    const auto t = contingency(labels_a, labels_b);
    const auto n = static_cast<double>(t.n);
    const double ha = entropy(t.row_sums, n);
    const double hb = entropy(t.col_sums, n);
    const bool single_a = t.row_sums.size() == 1;
    const bool single_b = t.col_sums.size() == 1;
    if (single_a && single_b) return 1.0;
    if (single_a || single_b) return 0.0;

    double mi = 0.0;
    for (std::size_t r = 0; r < t.counts.size(); ++r) {
        for (std::size_t c = 0; c < t.counts[r].size(); ++c) {
            const auto nij = t.counts[r][c];
            if (nij == 0) continue;
            const double joint = static_cast<double>(nij);
            mi += joint / n *
                  std::log(joint * n / (static_cast<double>(t.row_sums[r]) * static_cast<double>(t.col_sums[c])));
        }
    }
    const double value = mi / std::sqrt(ha * hb);
    return std::clamp(value, 0.0, 1.0);
}

double ari(std::span<const int> labels_a, std::span<const int> labels_b) {
    if (labels_a.size() < 2) throw InvalidArgument("ari needs at least two labels");
    const auto t = contingency(labels_a, labels_b);
    double index = 0.0;
    for (const auto& row : t.counts) {
        for (auto c : row) index += choose2(c);
    }
    double sum_a = 0.0;
    double sum_b = 0.0;
    for (auto c : t.row_sums) sum_a += choose2(c);
    for (auto c : t.col_sums) sum_b += choose2(c);
    const double total = choose2(t.n);
    const double expected = sum_a * sum_b / total;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    if (denom == 0.0) {
        // Equal partitions have a one-to-one contingency structure.
        bool same = t.row_sums.size() == t.col_sums.size();
        for (const auto& row : t.counts) {
            std::size_t nonzero = 0;
            for (auto c : row) nonzero += c > 0 ? 1 : 0;
            same = same && nonzero == 1;
        }
        return same ? 1.0 : 0.0;
    }
    return (index - expected) / denom;
}

Matrix weighted_covariance(const DataMatrix& x, const Vector& w) {
    if (static_cast<std::size_t>(w.size()) != x.n()) {
        throw ShapeMismatch("weight vector length " + std::to_string(w.size()) +
                            " does not match sample count " + std::to_string(x.n()));
    }
    if ((w.array() < 0.0).any()) throw InvalidArgument("weights must be non-negative");
    const double total = w.sum();
    if (!(total > 0.0)) throw InvalidArgument("weights sum to zero");
    const Vector p = w / total;
    const Matrix& v = x.values();
    const Eigen::RowVectorXd mean = p.transpose() * v;
    const Matrix centered = v.rowwise() - mean;
    return centered.transpose() * (centered.array().colwise() * p.array()).matrix();
}

double correlation_amount(const DataMatrix& x, const std::optional<Vector>& w, bool include_diagonal) {
    if (x.n() < 2) throw InvalidArgument("correlation_amount needs n >= 2");
    const Vector weights = w ? *w : Vector::Ones(static_cast<Eigen::Index>(x.n()));
    Matrix cov = weighted_covariance(x, weights);
    if (!include_diagonal) cov.diagonal().setZero();
    return cov.norm();
}

}  // namespace dckm
