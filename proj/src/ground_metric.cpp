#include "wabc/ground_metric.hpp"

#include <cmath>
#include <stdexcept>

namespace wabc {

void validate_metric(const GroundMetric& m) {
  if (!(m.p >= 1.0) || !std::isfinite(m.p))
    throw std::invalid_argument("ground metric: p must be finite and >= 1");
  if (m.kind == MetricKind::curve_match &&
      (!(m.lambda >= 0.0) || !std::isfinite(m.lambda)))
    throw std::invalid_argument("ground metric: lambda must be finite and >= 0");
}

GroundMetric parse_metric_kind(const std::string& name, double p, double lambda) {
  GroundMetric m;
  if (name == "euclidean")
    m.kind = MetricKind::euclidean;
  else if (name == "l1")
    m.kind = MetricKind::l1;
  else if (name == "curve_match")
    m.kind = MetricKind::curve_match;
  else
    throw std::invalid_argument("unknown ground metric: " + name);
  m.p = p;
  m.lambda = lambda;
  validate_metric(m);
  return m;
}

std::string metric_kind_name(MetricKind k) {
  switch (k) {
    case MetricKind::euclidean: return "euclidean";
    case MetricKind::l1: return "l1";
    case MetricKind::curve_match: return "curve_match";
  }
  return "?";
}

double ground_distance(const Eigen::Ref<const Eigen::RowVectorXd>& a,
                       const Eigen::Ref<const Eigen::RowVectorXd>& b,
                       const GroundMetric& m) {
  if (a.size() != b.size() || a.size() < 1)
    throw std::invalid_argument("ground_distance: dimension mismatch");
  switch (m.kind) {
    case MetricKind::euclidean:
      return (a - b).norm();
    case MetricKind::l1:
      return (a - b).cwiseAbs().sum();
    case MetricKind::curve_match: {
      if (a.size() < 2)
        throw std::invalid_argument(
            "ground_distance: curve_match needs a time coordinate plus values");
      const double dt = std::fabs(a(0) - b(0));
      const double dv = (a.tail(a.size() - 1) - b.tail(b.size() - 1)).norm();
      return dv + m.lambda * dt;
    }
  }
  throw std::logic_error("ground_distance: unreachable");
}

}  // namespace wabc
