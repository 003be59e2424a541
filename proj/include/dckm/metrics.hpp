#ifndef DCKM_METRICS_HPP
#define DCKM_METRICS_HPP

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dckm/core_types.hpp"

namespace dckm {

struct ContingencyTable {
    std::vector<std::vector<std::uint64_t>> counts;  // rows: ids of a, cols: ids of b
    std::vector<std::uint64_t> row_sums;
    std::vector<std::uint64_t> col_sums;
    std::uint64_t n = 0;
};

/// Cluster ids are compacted, so any integer labels are accepted.
ContingencyTable contingency(std::span<const int> labels_a, std::span<const int> labels_b);

/**
 * Normalized mutual information, MI / sqrt(H(a) H(b)).
 *
 * 1.0 when both labelings are a single cluster; 0.0 when exactly one of them
 * is (zero entropy on one side only).
 */
double nmi(std::span<const int> labels_a, std::span<const int> labels_b);

/// Adjusted Rand index. A zero denominator yields 1.0 for identical
/// partitions and 0.0 otherwise.
double ari(std::span<const int> labels_a, std::span<const int> labels_b);

/**
 * Frobenius norm of the (weighted) feature cross-covariance matrix.
 * Weights are normalized to sum to one; absent means uniform. The diagonal
 * (per-feature variance) is excluded unless include_diagonal is set.
 */
double correlation_amount(const DataMatrix& x, const std::optional<Vector>& w = std::nullopt,
                          bool include_diagonal = false);

/// Weighted population covariance of the columns of x.
Matrix weighted_covariance(const DataMatrix& x, const Vector& w);

}  // namespace dckm

#endif  // DCKM_METRICS_HPP
