#ifndef DCKM_DECORRELATION_HPP
#define DCKM_DECORRELATION_HPP

#include <cstddef>

#include "dckm/core_types.hpp"

namespace dckm {

/// Treated/control groups whose weight mass is at or below this are skipped.
inline constexpr double kGroupMassEpsilon = 1e-12;

/// Copy of x with column j zeroed.
DataMatrix remaining_features(const DataMatrix& x, std::size_t j);

/**
 * Weighted first moment of the remaining features over the treated group of
 * feature j (rows with x_ij = 1):
 *
 *   X_{.-j}^T (w * X_{.j}) / (w^T X_{.j})
 *
 * Throws DegenerateGroup when the treated mass is <= kGroupMassEpsilon.
 */
Vector weighted_treated_moment(const DataMatrix& x, std::size_t j, const Vector& w);
Vector weighted_treated_moment(const DataMatrix& x, std::size_t j, const SampleWeights& w);

/// Same as weighted_treated_moment over the control group (weights w * (1 - X_{.j})).
Vector weighted_control_moment(const DataMatrix& x, std::size_t j, const Vector& w);
Vector weighted_control_moment(const DataMatrix& x, std::size_t j, const SampleWeights& w);

struct BalanceResidual {
    std::size_t feature;
    Vector residual;  // residual[feature] == 0
};

/// treated moment - control moment for target feature j.
BalanceResidual balance_residual(const DataMatrix& x, std::size_t j, const Vector& w);
BalanceResidual balance_residual(const DataMatrix& x, std::size_t j, const SampleWeights& w);

struct BalanceLoss {
    double value = 0.0;
    std::size_t skipped = 0;  // target features with a degenerate group
};

/// Sum over every target feature of the squared balance residual norm.
BalanceLoss balance_loss(const DataMatrix& x, const Vector& w);
BalanceLoss balance_loss(const DataMatrix& x, const SampleWeights& w);

struct BalanceGradient {
    Vector gradient;  // d loss / d omega
    double loss = 0.0;
    std::size_t skipped = 0;
};

/// Analytic gradient of balance_loss(x, omega * omega) with respect to omega.
BalanceGradient balance_gradient(const DataMatrix& x, const Vector& omega);

}  // namespace dckm

#endif  // DCKM_DECORRELATION_HPP
