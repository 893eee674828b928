#pragma once

#include <string>

#include "wabc/types.hpp"

namespace wabc {

enum class MetricKind { euclidean, l1, curve_match };

// Ground distance rho on R^d plus the transport exponent p.  For curve_match
// the first coordinate of each point is a time index and
//   rho((t, y), (s, z)) = ||y - z||_2 + lambda * |t - s|.
struct GroundMetric {
  MetricKind kind = MetricKind::euclidean;
  double p = 1.0;
  double lambda = 0.0;  // curve_match only, >= 0
};

GroundMetric parse_metric_kind(const std::string& name, double p, double lambda);
std::string metric_kind_name(MetricKind k);

// rho(a, b); a and b must have equal dimension >= 1 (>= 2 for curve_match).
double ground_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                       const Eigen::Ref<const Eigen::RowVectorXd>& b,
                       const GroundMetric& m);

void validate_metric(const GroundMetric& m);

}  // namespace wabc
