#ifndef DCKM_TESTS_ORACLES_HPP
#define DCKM_TESTS_ORACLES_HPP

// Reference implementations used only by tests. They follow the textbook
// definitions with explicit loops and share no code with the library.

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include <Eigen/Dense>

#include "dckm/rng.hpp"

namespace dckm::oracle {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;

/// Sum over targets j of || treated moment - control moment ||^2 with the
/// target column excluded. Targets with a group mass <= eps contribute 0.
inline double balance_loss(const Mat& x, const Vec& w, double eps = 1e-12) {
    double total = 0.0;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        double treated_mass = 0.0;
        double control_mass = 0.0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            treated_mass += w(i) * x(i, j);
            control_mass += w(i) * (1.0 - x(i, j));
        }
        if (treated_mass <= eps || control_mass <= eps) continue;
        for (Eigen::Index t = 0; t < x.cols(); ++t) {
            if (t == j) continue;
            double treated = 0.0;
            double control = 0.0;
            for (Eigen::Index i = 0; i < x.rows(); ++i) {
                treated += w(i) * x(i, j) * x(i, t);
                control += w(i) * (1.0 - x(i, j)) * x(i, t);
            }
            const double r = treated / treated_mass - control / control_mass;
            total += r * r;
        }
    }
    return total;
}

/// Central finite differences of f at v.
inline Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& v, double h = 1e-6) {
    Vec g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        Vec plus = v;
        Vec minus = v;
        plus(i) += h;
        minus(i) -= h;
        g(i) = (f(plus) - f(minus)) / (2.0 * h);
    }
    return g;
}

/// Full w-subproblem objective in omega, written out term by term.
inline double omega_objective(const Mat& x, const Mat& f, const std::vector<int>& labels, const Vec& omega,
                              double l1, double l2, double l3) {
    const Vec w = omega.array().square();
    double recon = 0.0;
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        for (Eigen::Index j = 0; j < x.cols(); ++j) {
            const double diff = x(i, j) - f(j, labels[static_cast<std::size_t>(i)]);
            recon += w(i) * diff * diff;
        }
    }
    double norm = 0.0;
    double sum = 0.0;
    for (Eigen::Index i = 0; i < w.size(); ++i) {
        norm += w(i) * w(i);
        sum += w(i);
    }
    return recon + l1 * balance_loss(x, w) + l2 * norm + l3 * (sum - 1.0) * (sum - 1.0);
}

/// Per-row exhaustive search over the K one-hot candidates e_k, scoring
/// ||x_i - e_k F^T||^2; strict '<' keeps the lowest index on ties.
inline std::vector<int> assign_by_enumeration(const Mat& x, const Mat& f) {
    const auto k = f.cols();
    std::vector<int> labels(static_cast<std::size_t>(x.rows()));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        int best_k = 0;
        for (Eigen::Index c = 0; c < k; ++c) {
            Eigen::RowVectorXd e = Eigen::RowVectorXd::Zero(k);
            e(c) = 1.0;
            const Eigen::RowVectorXd recon = e * f.transpose();
            double dist = 0.0;
            for (Eigen::Index j = 0; j < x.cols(); ++j) {
                const double diff = x(i, j) - recon(j);
                dist += diff * diff;
            }
            if (dist < best) {
                best = dist;
                best_k = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best_k;
    }
    return labels;
}

/// Minimum of sum_i ||x_i - F g_i||^2 over all K^n assignments (small n only).
inline double min_assignment_loss(const Mat& x, const Mat& f) {
    const auto n = x.rows();
    const auto k = f.cols();
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    double best = std::numeric_limits<double>::infinity();
    for (;;) {
        double loss = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            loss += (x.row(i).transpose() - f.col(labels[static_cast<std::size_t>(i)])).squaredNorm();
        }
        best = std::min(best, loss);
        Eigen::Index pos = 0;
        while (pos < n && ++labels[static_cast<std::size_t>(pos)] == k) labels[static_cast<std::size_t>(pos++)] = 0;
        if (pos == n) break;
    }
    return best;
}

/// Within-cluster sum of squares of a labeling (unweighted means).
inline double wcss(const Mat& x, const std::vector<int>& labels, int k) {
    double total = 0.0;
    for (int c = 0; c < k; ++c) {
        Vec mean = Vec::Zero(x.cols());
        int count = 0;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == c) {
                mean += x.row(i).transpose();
                ++count;
            }
        }
        if (count == 0) continue;
        mean /= count;
        for (Eigen::Index i = 0; i < x.rows(); ++i) {
            if (labels[static_cast<std::size_t>(i)] == c) total += (x.row(i).transpose() - mean).squaredNorm();
        }
    }
    return total;
}

/// Pair-counting Rand statistics straight from the definition.
inline double ari_by_pairs(const std::vector<int>& a, const std::vector<int>& b) {
    const auto n = a.size();
    double both = 0, same_a = 0, same_b = 0, pairs = 0;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const bool sa = a[i] == a[j];
            const bool sb = b[i] == b[j];
            both += sa && sb;
            same_a += sa;
            same_b += sb;
            pairs += 1;
        }
    }
    const double expected = same_a * same_b / pairs;
    return (both - expected) / (0.5 * (same_a + same_b) - expected);
}

inline Mat random_binary(dckm::Rng& rng, Eigen::Index n, Eigen::Index d, double p = 0.5) {
    Mat x(n, d);
    for (Eigen::Index i = 0; i < n; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) x(i, j) = rng.bernoulli(p) ? 1.0 : 0.0;
    }
    return x;
}

}  // namespace dckm::oracle

#endif  // DCKM_TESTS_ORACLES_HPP
