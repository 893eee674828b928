#include "wabc/point_cloud.hpp"

#include <cmath>
#include <stdexcept>

namespace wabc {

std::optional<std::string> validate_cloud(const PointCloud& c) {
  if (c.n() < 1) return "point cloud has no rows";
  if (c.dim() < 1) return "point cloud has no columns";
  for (Eigen::Index i = 0; i < c.n(); ++i)
    for (Eigen::Index j = 0; j < c.dim(); ++j)
      if (!std::isfinite(c.points(i, j)))
        return "non-finite entry at row " + std::to_string(i) + ", column " +
               std::to_string(j);
  return std::nullopt;
}

void require_valid(const PointCloud& c, const char* who) {
  if (auto err = validate_cloud(c))
    throw std::invalid_argument(std::string(who) + ": " + *err);
}

}  // namespace wabc
