#include <cmath>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

namespace {

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

}  // namespace

GenerativeModel make_ar1_model() {
  GenerativeModel m;
  m.name = "ar1";
  m.space.names = {"phi", "log_sigma"};
  m.space.supports = {Interval{-1.0, 1.0}, Interval{}};
  m.is_series = true;
  m.out_dim = 1;
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 2)
      throw std::invalid_argument("ar1 simulate: theta must be (phi, log sigma)");
    const double phi = theta(0);
    const double sigma = std::exp(theta(1));
    if (!(std::fabs(phi) < 1.0))
      throw std::invalid_argument("ar1 simulate: |phi| must be < 1");
    Matrix out(n, 1);
    double y = std::sqrt(sigma * sigma / (1.0 - phi * phi)) * rng.normal();
    out(0, 0) = y;
    for (Eigen::Index t = 1; t < n; ++t) {
      y = phi * y + sigma * rng.normal();
      out(t, 0) = y;
    }
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(2);
    t(0) = rng.uniform(-1.0, 1.0);
    t(1) = rng.normal();
    return t;
  };
  m.prior_logdensity = [](const Vector& theta) {
    if (theta.size() != 2 || !(theta(0) > -1.0 && theta(0) < 1.0))
      return -std::numeric_limits<double>::infinity();
    return -std::log(2.0) + log_normal_pdf(theta(1), 0.0, 1.0);
  };
  m.loglik = [](const Vector& theta, const Matrix& data) {
    return ar1_loglik(theta, data);
  };
  m.default_embedding.kind = EmbeddingKind::delay;
  m.default_embedding.lags = {1};
  m.default_embedding.stride = 2;
  return m;
}

double ar1_loglik(const Vector& theta, const Matrix& series) {
  if (theta.size() != 2 || series.cols() != 1 || series.rows() < 1)
    throw std::invalid_argument("ar1_loglik: bad shapes");
  const double phi = theta(0);
  const double sigma = std::exp(theta(1));
  if (!(std::fabs(phi) < 1.0)) return -std::numeric_limits<double>::infinity();
  const double s2 = sigma * sigma;
  double ll = log_normal_pdf(series(0, 0), 0.0, s2 / (1.0 - phi * phi));
  for (Eigen::Index t = 1; t < series.rows(); ++t)
    ll += log_normal_pdf(series(t, 0), phi * series(t - 1, 0), s2);
  return ll;
}

GenerativeModel make_cosine_model() {
  GenerativeModel m;
  m.name = "cosine";
  m.space.names = {"omega", "phi", "log_sigma", "log_A"};
  m.space.supports = {Interval{0.0, 0.1}, Interval{0.0, 2.0 * M_PI}, Interval{},
                      Interval{}};
  m.is_series = true;
  m.out_dim = 1;
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 4)
      throw std::invalid_argument(
          "cosine simulate: theta must be (omega, phi, log sigma, log A)");
    const double omega = theta(0), phase = theta(1);
    const double sigma = std::exp(theta(2)), amp = std::exp(theta(3));
    Matrix out(n, 1);
    for (Eigen::Index t = 0; t < n; ++t)
      out(t, 0) = amp * std::cos(2.0 * M_PI * omega * (t + 1) + phase) +
                  sigma * rng.normal();
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(4);
    t(0) = rng.uniform(0.0, 0.1);
    t(1) = rng.uniform(0.0, 2.0 * M_PI);
    t(2) = rng.normal();
    t(3) = rng.normal();
    return t;
  };
  m.prior_logdensity = [](const Vector& theta) {
    if (theta.size() != 4 || !(theta(0) >= 0.0 && theta(0) <= 0.1) ||
        !(theta(1) >= 0.0 && theta(1) <= 2.0 * M_PI))
      return -std::numeric_limits<double>::infinity();
    return -std::log(0.1) - std::log(2.0 * M_PI) +
           log_normal_pdf(theta(2), 0.0, 1.0) + log_normal_pdf(theta(3), 0.0, 1.0);
  };
  m.loglik = [](const Vector& theta, const Matrix& data) {
    return cosine_loglik(theta, data);
  };
  m.default_embedding.kind = EmbeddingKind::curve;
  m.default_embedding.use_aspect = true;
  return m;
}

double cosine_loglik(const Vector& theta, const Matrix& series) {
  if (theta.size() != 4 || series.cols() != 1)
    throw std::invalid_argument("cosine_loglik: bad shapes");
  const double omega = theta(0), phase = theta(1);
  const double sigma = std::exp(theta(2)), amp = std::exp(theta(3));
  const double s2 = sigma * sigma;
  double ll = 0.0;
  for (Eigen::Index t = 0; t < series.rows(); ++t) {
    const double mean = amp * std::cos(2.0 * M_PI * omega * (t + 1) + phase);
    ll += log_normal_pdf(series(t, 0), mean, s2);
  }
  return ll;
}

void levy_sv_transition(double z, double lambda, const std::vector<double>& jump_times,
                        const std::vector<double>& jump_sizes, double t0,
                        double* z_next, double* v_next) {
  if (jump_times.size() != jump_sizes.size())
    throw std::invalid_argument("levy_sv_transition: jump arrays differ in length");
  if (!(lambda > 0.0))
    throw std::invalid_argument("levy_sv_transition: lambda must be > 0");
  // z' = e^{-lambda} z + sum_j e^{-lambda (t0 + 1 - c_j)} e_j
  // v' = (z - z' + sum_j e_j) / lambda, computed with expm1 for small lambda.
  double zn = std::exp(-lambda) * z;
  double v = z * (-std::expm1(-lambda));
  for (size_t j = 0; j < jump_times.size(); ++j) {
    const double age = t0 + 1.0 - jump_times[j];
    zn += std::exp(-lambda * age) * jump_sizes[j];
    v += jump_sizes[j] * (-std::expm1(-lambda * age));
  }
  *z_next = zn;
  *v_next = v / lambda;
}

GenerativeModel make_levy_sv_model() {
  GenerativeModel m;
  m.name = "levy_sv";
  m.space.names = {"mu", "beta", "xi", "omega2", "lambda"};
  const Interval positive{0.0, std::numeric_limits<double>::infinity()};
  m.space.supports = {Interval{}, Interval{}, positive, positive, positive};
  m.is_series = true;
  m.out_dim = 1;
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 5)
      throw std::invalid_argument(
          "levy_sv simulate: theta must be (mu, beta, xi, omega2, lambda)");
    const double mu = theta(0), beta = theta(1);
    const double xi = theta(2), omega2 = theta(3), lambda = theta(4);
    if (!(xi > 0.0) || !(omega2 > 0.0) || !(lambda > 0.0))
      throw std::invalid_argument("levy_sv simulate: xi, omega2, lambda must be > 0");
    const double shape = xi * xi / omega2;
    const double rate = xi / omega2;
    double z = rng.gamma(shape, rate);
    Matrix out(n, 1);
    std::vector<double> times, sizes;
    for (Eigen::Index t = 0; t < n; ++t) {
      const long k = rng.poisson(lambda * shape);
      times.clear();
      sizes.clear();
      for (long j = 0; j < k; ++j) {
        times.push_back(static_cast<double>(t) + rng.uniform01());
        sizes.push_back(rng.exponential(rate));
      }
      double zn, v;
      levy_sv_transition(z, lambda, times, sizes, static_cast<double>(t), &zn, &v);
      z = zn;
      out(t, 0) = mu + beta * v + std::sqrt(v) * rng.normal();
    }
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(5);
    t(0) = std::sqrt(2.0) * rng.normal();
    t(1) = std::sqrt(2.0) * rng.normal();
    t(2) = rng.exponential(0.2);
    t(3) = rng.exponential(0.2);
    t(4) = rng.exponential(1.0);
    return t;
  };
  m.prior_logdensity = [](const Vector& theta) {
    if (theta.size() != 5 || !(theta(2) > 0.0) || !(theta(3) > 0.0) ||
        !(theta(4) > 0.0))
      return -std::numeric_limits<double>::infinity();
    double ll = log_normal_pdf(theta(0), 0.0, 2.0) + log_normal_pdf(theta(1), 0.0, 2.0);
    ll += std::log(0.2) - 0.2 * theta(2);
    ll += std::log(0.2) - 0.2 * theta(3);
    ll += -theta(4);
    return ll;
  };
  m.default_embedding.kind = EmbeddingKind::delay;
  m.default_embedding.lags = {1};
  m.default_embedding.stride = 1;
  return m;
}

double acf_summary(const Matrix& series, int n_lags) {
  if (series.cols() != 1)
    throw std::invalid_argument("acf_summary: univariate series required");
  const Eigen::Index T = series.rows();
  if (n_lags < 1 || T <= n_lags)
    throw std::invalid_argument("acf_summary: need 1 <= n_lags < length");
  Vector x = series.col(0).array().square();
  const double mean = x.mean();
  x.array() -= mean;
  const double gamma0 = x.squaredNorm() / static_cast<double>(T);
  if (!(gamma0 > 0.0))
    throw std::invalid_argument("acf_summary: squared series is constant");
  double sum = 0.0;
  for (int l = 1; l <= n_lags; ++l) {
    double g = 0.0;
    for (Eigen::Index t = l; t < T; ++t) g += x(t) * x(t - l);
    sum += (g / static_cast<double>(T)) / gamma0;
  }
  return sum;
}

}  // namespace wabc
