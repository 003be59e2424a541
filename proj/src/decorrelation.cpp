#include "dckm/decorrelation.hpp"

#include "dckm/errors.hpp"

namespace dckm {

namespace {

void check_feature(const DataMatrix& x, std::size_t j) {
    if (j >= x.d()) {
        throw InvalidArgument("feature index " + std::to_string(j) + " out of range [0," +
                              std::to_string(x.d()) + ")");
    }
}

void check_weights(const DataMatrix& x, const Vector& w) {
    if (static_cast<std::size_t>(w.size()) != x.n()) {
        throw ShapeMismatch("weight vector has length " + std::to_string(w.size()) +
                            ", expected " + std::to_string(x.n()));
    }
}

// Per-target-feature quantities derived from the weighted Gram matrix
// M = X^T diag(w) X and the column masses S = X^T w.
struct GroupStats {
    Matrix residuals;  // d x d, column j = balance residual of target j (zero if skipped)
    Vector treated_mass;
    Vector control_mass;
    std::vector<bool> active;
    Vector treated_dot;  // treated moment . residual, per target
    Vector control_dot;
    std::size_t skipped = 0;
    double loss = 0.0;
};

GroupStats group_stats(const Matrix& x, const Vector& w) {
    const Eigen::Index d = x.cols();
    GroupStats s;
    const Matrix weighted_x = x.array().colwise() * w.array();
    const Matrix gram = x.transpose() * weighted_x;
    const Vector col_mass = weighted_x.colwise().sum().transpose();
    s.treated_mass = col_mass;
    s.control_mass = ((1.0 - x.array()).colwise() * w.array()).colwise().sum().transpose();
    s.residuals = Matrix::Zero(d, d);
    s.treated_dot = Vector::Zero(d);
    s.control_dot = Vector::Zero(d);
    s.active.assign(static_cast<std::size_t>(d), false);

    for (Eigen::Index j = 0; j < d; ++j) {
        const double a = s.treated_mass(j);
        const double b = s.control_mass(j);
        if (!(a > kGroupMassEpsilon) || !(b > kGroupMassEpsilon)) {
            ++s.skipped;
            continue;
        }
        s.active[static_cast<std::size_t>(j)] = true;
        Vector treated = gram.col(j) / a;
        Vector control = (col_mass - gram.col(j)) / b;
        treated(j) = 0.0;
        control(j) = 0.0;
        s.residuals.col(j) = treated - control;
        s.treated_dot(j) = treated.dot(s.residuals.col(j));
        s.control_dot(j) = control.dot(s.residuals.col(j));
    }
    // Ordered reduction over targets.
    for (Eigen::Index j = 0; j < d; ++j) s.loss += s.residuals.col(j).squaredNorm();
    return s;
}

}  // namespace

DataMatrix remaining_features(const DataMatrix& x, std::size_t j) {
    check_feature(x, j);
    Matrix v = x.values();
    v.col(static_cast<Eigen::Index>(j)).setZero();
    return DataMatrix(std::move(v));
}

Vector weighted_treated_moment(const DataMatrix& x, std::size_t j, const Vector& w) {
    check_feature(x, j);
    check_weights(x, w);
    const Vector target = x.values().col(static_cast<Eigen::Index>(j));
    const double mass = w.dot(target);
    if (!(mass > kGroupMassEpsilon)) throw DegenerateGroup(j, "treated");
    const Vector group_w = w.cwiseProduct(target);
    return remaining_features(x, j).values().transpose() * group_w / mass;
}

Vector weighted_treated_moment(const DataMatrix& x, std::size_t j, const SampleWeights& w) {
    return weighted_treated_moment(x, j, w.w());
}

Vector weighted_control_moment(const DataMatrix& x, std::size_t j, const Vector& w) {
    check_feature(x, j);
    check_weights(x, w);
    const Vector control = (1.0 - x.values().col(static_cast<Eigen::Index>(j)).array()).matrix();
    const double mass = w.dot(control);
    if (!(mass > kGroupMassEpsilon)) throw DegenerateGroup(j, "control");
    const Vector group_w = w.cwiseProduct(control);
    return remaining_features(x, j).values().transpose() * group_w / mass;
}

Vector weighted_control_moment(const DataMatrix& x, std::size_t j, const SampleWeights& w) {
    return weighted_control_moment(x, j, w.w());
}

BalanceResidual balance_residual(const DataMatrix& x, std::size_t j, const Vector& w) {
    Vector r = weighted_treated_moment(x, j, w) - weighted_control_moment(x, j, w);
    return {j, std::move(r)};
}

BalanceResidual balance_residual(const DataMatrix& x, std::size_t j, const SampleWeights& w) {
    return balance_residual(x, j, w.w());
}

BalanceLoss balance_loss(const DataMatrix& x, const Vector& w) {
    check_weights(x, w);
    const GroupStats s = group_stats(x.values(), w);
    return {s.loss, s.skipped};
}

BalanceLoss balance_loss(const DataMatrix& x, const SampleWeights& w) {
    return balance_loss(x, w.w());
}

BalanceGradient balance_gradient(const DataMatrix& x, const Vector& omega) {
    check_weights(x, omega);
    const Matrix& v = x.values();
    const Vector w = omega.array().square().matrix();
    const GroupStats s = group_stats(v, w);

    // d r_j[t] / d w_i = x_ij (x_it - m_j[t]) / a_j - (1 - x_ij)(x_it - c_j[t]) / b_j,
    // contracted with 2 r_j[t] over t; P = X R holds x_i . r_j.
    const Matrix projected = v * s.residuals;
    Vector dloss_dw = Vector::Zero(v.rows());
    for (Eigen::Index j = 0; j < v.cols(); ++j) {
        if (!s.active[static_cast<std::size_t>(j)]) continue;
        const double a = s.treated_mass(j);
        const double b = s.control_mass(j);
        const auto xj = v.col(j).array();
        const auto pj = projected.col(j).array();
        dloss_dw.array() += xj * (pj - s.treated_dot(j)) / a - (1.0 - xj) * (pj - s.control_dot(j)) / b;
    }
    BalanceGradient out;
    out.gradient = (4.0 * omega.array() * dloss_dw.array()).matrix();
    out.loss = s.loss;
    out.skipped = s.skipped;
    return out;
}

}  // namespace dckm
