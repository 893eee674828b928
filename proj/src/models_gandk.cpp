#include <cmath>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

namespace {

// c(z) = 1 + 0.8 * (1 - e^{-g z}) / (1 + e^{-g z}) = 1 + 0.8 * tanh(g z / 2)
double skew_factor(double z, double g) { return 1.0 + 0.8 * std::tanh(0.5 * g * z); }

double q_of_z(double z, double a, double b, double g, double k) {
  return a + b * skew_factor(z, g) * std::pow(1.0 + z * z, k) * z;
}

// dQ/dz; positive for b > 0, k > -1/2 (the 0.8 bound keeps the skew term tame).
double dq_dz(double z, double b, double g, double k) {
  const double c = skew_factor(z, g);
  const double sech = 1.0 / std::cosh(0.5 * g * z);
  const double cprime = 0.4 * g * sech * sech;
  const double z2 = 1.0 + z * z;
  return b * (cprime * std::pow(z2, k) * z +
              c * std::pow(z2, k - 1.0) * (2.0 * k * z * z + z2));
}

void check_theta4(const Vector& theta, const char* who) {
  if (theta.size() != 4)
    throw std::invalid_argument(std::string(who) + ": theta must be (a, b, g, k)");
}

ParamSpace box_space(const std::vector<std::string>& names, double lo, double hi) {
  ParamSpace s;
  s.names = names;
  s.supports.assign(names.size(), Interval{lo, hi});
  return s;
}

double uniform_box_logdensity(const ParamSpace& space, const Vector& theta,
                              double log_volume) {
  if (!space.contains(theta)) return -std::numeric_limits<double>::infinity();
  return -log_volume;
}

}  // namespace

double gandk_from_normal(double z, const Vector& theta) {
  check_theta4(theta, "gandk_from_normal");
  return q_of_z(z, theta(0), theta(1), theta(2), theta(3));
}

double gandk_quantile(double r, const Vector& theta) {
  check_theta4(theta, "gandk_quantile");
  if (!(r > 0.0) || !(r < 1.0))
    throw std::invalid_argument("gandk_quantile: r must lie in (0, 1)");
  return gandk_from_normal(normal_quantile(r), theta);
}

double gandk_logpdf(double y, const Vector& theta) {
  check_theta4(theta, "gandk_logpdf");
  if (!(theta(1) > 0.0))
    throw std::invalid_argument("gandk_logpdf: b must be > 0");
  constexpr double r_lo = 1e-12, r_hi = 1.0 - 1e-12;
  double lo = r_lo, hi = r_hi;
  double q_lo = gandk_quantile(lo, theta), q_hi = gandk_quantile(hi, theta);
  if (y <= q_lo || y >= q_hi) return -std::numeric_limits<double>::infinity();
  // Bisection on r until the quantile matches y to 1e-10.
  double r = 0.5, q = 0.0;
  for (int it = 0; it < 200; ++it) {
    r = 0.5 * (lo + hi);
    q = gandk_quantile(r, theta);
    if (std::fabs(q - y) <= 1e-10) break;
    if (q < y)
      lo = r;
    else
      hi = r;
  }
  const double z = normal_quantile(r);
  const double dq = dq_dz(z, theta(1), theta(2), theta(3));
  // dz/dr = 1 / phi(z); log f(y) = -log(dQ/dz) + log phi(z).
  const double log_phi = -0.5 * z * z - 0.5 * std::log(2.0 * M_PI);
  return -std::log(dq) + log_phi;
}

GenerativeModel make_gandk_model() {
  GenerativeModel m;
  m.name = "gandk";
  m.space = box_space({"a", "b", "g", "k"}, 0.0, 10.0);
  m.is_series = false;
  m.out_dim = 1;
  const double log_vol = 4.0 * std::log(10.0);
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    check_theta4(theta, "gandk simulate");
    Matrix out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i)
      out(i, 0) = gandk_from_normal(rng.normal(), theta);
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(4);
    for (int j = 0; j < 4; ++j) t(j) = rng.uniform(0.0, 10.0);
    return t;
  };
  ParamSpace space = m.space;
  m.prior_logdensity = [space, log_vol](const Vector& theta) {
    return uniform_box_logdensity(space, theta, log_vol);
  };
  m.loglik = [](const Vector& theta, const Matrix& data) {
    if (data.cols() != 1)
      throw std::invalid_argument("gandk loglik: univariate data required");
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i)
      ll += gandk_logpdf(data(i, 0), theta);
    return ll;
  };
  return m;
}

GenerativeModel make_bivariate_gandk_model() {
  GenerativeModel m;
  m.name = "bigandk";
  m.space = box_space({"a1", "b1", "g1", "k1", "a2", "b2", "g2", "k2"}, 0.0, 10.0);
  m.space.names.push_back("rho");
  m.space.supports.push_back(Interval{-1.0, 1.0});
  m.is_series = false;
  m.out_dim = 2;
  const double log_vol = 8.0 * std::log(10.0) + std::log(2.0);
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 9)
      throw std::invalid_argument("bigandk simulate: theta must have 9 entries");
    const Vector t1 = theta.segment(0, 4);
    const Vector t2 = theta.segment(4, 4);
    const double rho = theta(8);
    const double c = std::sqrt(std::max(0.0, 1.0 - rho * rho));
    Matrix out(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z1 = rng.normal();
      const double z2 = rho * z1 + c * rng.normal();
      out(i, 0) = gandk_from_normal(z1, t1);
      out(i, 1) = gandk_from_normal(z2, t2);
    }
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(9);
    for (int j = 0; j < 8; ++j) t(j) = rng.uniform(0.0, 10.0);
    t(8) = rng.uniform(-1.0, 1.0);
    return t;
  };
  ParamSpace space = m.space;
  m.prior_logdensity = [space, log_vol](const Vector& theta) {
    return uniform_box_logdensity(space, theta, log_vol);
  };
  return m;
}

}  // namespace wabc
