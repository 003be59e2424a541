#ifndef DCKM_ERRORS_HPP
#define DCKM_ERRORS_HPP

#include <cstddef>
#include <stdexcept>
#include <string>

namespace dckm {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad argument: out-of-range index, invalid hyperparameter, malformed spec.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

/// Input data rejected by validation or by a loader.
class DataError : public Error {
public:
    using Error::Error;
};

/// The treated or control group of a target feature carries no weight.
class DegenerateGroup : public Error {
public:
    DegenerateGroup(std::size_t feature, const std::string& which)
        : Error("feature " + std::to_string(feature) + ": " + which +
                " group has no weight mass"),
          feature_(feature) {}

    std::size_t feature() const noexcept { return feature_; }

private:
    std::size_t feature_;
};

/// A cluster has no (weighted) members, so its centroid is undefined.
class EmptyCluster : public Error {
public:
    explicit EmptyCluster(std::size_t cluster)
        : Error("cluster " + std::to_string(cluster) + " has no weight mass"),
          cluster_(cluster) {}

    std::size_t cluster() const noexcept { return cluster_; }

private:
    std::size_t cluster_;
};

}  // namespace dckm

#endif  // DCKM_ERRORS_HPP
