#include <cmath>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

Vector mg1_recursion(const Vector& service, const Vector& arrival_gaps) {
  if (service.size() != arrival_gaps.size() || service.size() < 1)
    throw std::invalid_argument("mg1_recursion: equal nonzero lengths required");
  const Eigen::Index n = service.size();
  Vector y(n);
  double arrival_sum = 0.0, departure_sum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    arrival_sum += arrival_gaps(i);
    y(i) = service(i) + std::max(0.0, arrival_sum - departure_sum);
    departure_sum += y(i);
  }
  return y;
}

GenerativeModel make_mg1_model(double theta1_upper) {
  if (!(theta1_upper > 0.0))
    throw std::invalid_argument("make_mg1_model: theta1 upper bound must be > 0");
  GenerativeModel m;
  m.name = "mg1";
  m.space.names = {"theta1", "theta2_minus_theta1", "theta3"};
  m.space.supports = {Interval{0.0, theta1_upper}, Interval{0.0, 10.0},
                      Interval{0.0, 1.0 / 3.0}};
  m.is_series = false;
  m.out_dim = 1;
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 3)
      throw std::invalid_argument("mg1 simulate: theta must have 3 entries");
    const double t1 = theta(0), gap = theta(1), rate = theta(2);
    if (!(rate > 0.0))
      throw std::invalid_argument("mg1 simulate: arrival rate must be > 0");
    Vector service(n), arrivals(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      service(i) = rng.uniform(t1, t1 + gap);
      arrivals(i) = rng.exponential(rate);
    }
    const Vector y = mg1_recursion(service, arrivals);
    Matrix out(n, 1);
    out.col(0) = y;
    return out;
  };
  const double upper = theta1_upper;
  m.prior_sample = [upper](RandomStream& rng) {
    Vector t(3);
    t(0) = rng.uniform(0.0, upper);
    t(1) = rng.uniform(0.0, 10.0);
    t(2) = rng.uniform(0.0, 1.0 / 3.0);
    return t;
  };
  ParamSpace space = m.space;
  const double log_vol = std::log(upper) + std::log(10.0) + std::log(1.0 / 3.0);
  m.prior_logdensity = [space, log_vol](const Vector& theta) {
    if (!space.contains(theta)) return -std::numeric_limits<double>::infinity();
    return -log_vol;
  };
  return m;
}

}  // namespace wabc
