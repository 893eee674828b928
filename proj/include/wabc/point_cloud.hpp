#pragma once

#include <optional>
#include <string>

#include "wabc/types.hpp"

namespace wabc {

// Empirical distribution: n points in R^d with equal weight 1/n.
struct PointCloud {
  Matrix points;  // n x d

  PointCloud() = default;
  explicit PointCloud(Matrix p) : points(std::move(p)) {}

  Eigen::Index n() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

// Returns the first violated invariant (n >= 1, d >= 1, all entries finite),
// or nullopt when the cloud is well formed.
std::optional<std::string> validate_cloud(const PointCloud& c);

// Throwing wrapper around validate_cloud.
void require_valid(const PointCloud& c, const char* who);

}  // namespace wabc
