#include <cmath>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

namespace {

// Truncated-Normal innovation: redraw until the update stays >= 0, clamp to
// the boundary after 100 rejections.
double step_nonnegative(double drift, double noise_scale, RandomStream& rng) {
  if (noise_scale == 0.0) return std::max(drift, 0.0);
  for (int tries = 0; tries < 100; ++tries) {
    const double candidate = drift + noise_scale * rng.normal();
    if (candidate >= 0.0) return candidate;
  }
  return 0.0;
}

}  // namespace

double toggle_switch_terminal_u(const Vector& theta, int horizon,
                                double noise_scale, RandomStream& rng) {
  if (theta.size() != 7)
    throw std::invalid_argument(
        "toggle_switch: theta must be (alpha1, alpha2, beta1, beta2, mu, sigma, gamma)");
  if (horizon < 1)
    throw std::invalid_argument("toggle_switch: horizon must be >= 1");
  const double a1 = theta(0), a2 = theta(1), b1 = theta(2), b2 = theta(3);
  double u = 10.0, v = 10.0;
  for (int t = 0; t < horizon; ++t) {
    const double du = u + a1 / (1.0 + std::pow(v, b1)) - (1.0 + 0.03 * u);
    const double dv = v + a2 / (1.0 + std::pow(u, b2)) - (1.0 + 0.03 * v);
    u = step_nonnegative(du, 0.5 * noise_scale, rng);
    v = step_nonnegative(dv, 0.5 * noise_scale, rng);
  }
  return u;
}

GenerativeModel make_toggle_switch_model(int horizon) {
  if (horizon < 1)
    throw std::invalid_argument("make_toggle_switch_model: horizon must be >= 1");
  GenerativeModel m;
  m.name = "toggleswitch";
  m.space.names = {"alpha1", "alpha2", "beta1", "beta2", "mu", "sigma", "gamma"};
  m.space.supports = {Interval{0.0, 50.0}, Interval{0.0, 50.0}, Interval{0.0, 5.0},
                      Interval{0.0, 5.0},  Interval{250.0, 450.0},
                      Interval{0.0, 0.5},  Interval{0.0, 0.4}};
  m.is_series = false;
  m.out_dim = 1;
  m.simulate = [horizon](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 7)
      throw std::invalid_argument("toggleswitch simulate: theta must have 7 entries");
    const double mu = theta(4), sigma = theta(5), gamma = theta(6);
    Matrix out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u_t = toggle_switch_terminal_u(theta, horizon, 1.0, rng);
      // Observation scale mu * sigma / u^gamma; tiny floor keeps a clamped
      // zero state from dividing by zero.
      const double sd = mu * sigma / std::pow(std::max(u_t, 1e-12), gamma);
      const double mean = mu + u_t;
      // Truncated observation: redraw, clamp to the boundary after 100 tries.
      if (sd == 0.0) {
        out(i, 0) = std::max(mean, 0.0);
        continue;
      }
      double y = -1.0;
      int tries = 0;
      for (; tries < 100; ++tries) {
        y = mean + sd * rng.normal();
        if (y >= 0.0) break;
      }
      out(i, 0) = tries == 100 ? 0.0 : y;
    }
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(7);
    t(0) = rng.uniform(0.0, 50.0);
    t(1) = rng.uniform(0.0, 50.0);
    t(2) = rng.uniform(0.0, 5.0);
    t(3) = rng.uniform(0.0, 5.0);
    t(4) = rng.uniform(250.0, 450.0);
    t(5) = rng.uniform(0.0, 0.5);
    t(6) = rng.uniform(0.0, 0.4);
    return t;
  };
  ParamSpace space = m.space;
  double log_vol = 0.0;
  for (const Interval& s : space.supports) log_vol += std::log(s.hi - s.lo);
  m.prior_logdensity = [space, log_vol](const Vector& theta) {
    if (!space.contains(theta)) return -std::numeric_limits<double>::infinity();
    return -log_vol;
  };
  return m;
}

}  // namespace wabc
