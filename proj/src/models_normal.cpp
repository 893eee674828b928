#include <cmath>
#include <stdexcept>

#include "wabc/models.hpp"

namespace wabc {

namespace {

constexpr double kPriorVar = 25.0;
// Observation covariance [[1, .5], [.5, 1]] and its Cholesky factor.
const double kChol10 = 0.5;
const double kChol11 = 0.8660254037844386;  // sqrt(3)/2

double log_normal_pdf(double x, double mean, double var) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * M_PI * var) + d * d / var);
}

}  // namespace

GenerativeModel make_normal_location_model() {
  GenerativeModel m;
  m.name = "normal_location";
  m.space.names = {"theta1", "theta2"};
  m.space.supports = {Interval{}, Interval{}};
  m.is_series = false;
  m.out_dim = 2;
  m.simulate = [](const Vector& theta, Eigen::Index n, RandomStream& rng) {
    if (theta.size() != 2)
      throw std::invalid_argument("normal_location: theta must have 2 entries");
    Matrix out(n, 2);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double z1 = rng.normal();
      const double z2 = rng.normal();
      out(i, 0) = theta(0) + z1;
      out(i, 1) = theta(1) + kChol10 * z1 + kChol11 * z2;
    }
    return out;
  };
  m.prior_sample = [](RandomStream& rng) {
    Vector t(2);
    t(0) = std::sqrt(kPriorVar) * rng.normal();
    t(1) = std::sqrt(kPriorVar) * rng.normal();
    return t;
  };
  m.prior_logdensity = [](const Vector& theta) {
    if (theta.size() != 2) return -std::numeric_limits<double>::infinity();
    return log_normal_pdf(theta(0), 0.0, kPriorVar) +
           log_normal_pdf(theta(1), 0.0, kPriorVar);
  };
  m.loglik = [](const Vector& theta, const Matrix& data) {
    if (theta.size() != 2 || data.cols() != 2)
      throw std::invalid_argument("normal_location loglik: bad shapes");
    // S^-1 = (1 / 0.75) * [[1, -.5], [-.5, 1]], det S = 0.75.
    const double inv_det = 1.0 / 0.75;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < data.rows(); ++i) {
      const double d1 = data(i, 0) - theta(0);
      const double d2 = data(i, 1) - theta(1);
      const double q = inv_det * (d1 * d1 - d1 * d2 + d2 * d2);
      ll += -0.5 * q - 0.5 * std::log(0.75) - std::log(2.0 * M_PI);
    }
    return ll;
  };
  return m;
}

GaussianPosterior normal_location_posterior(const Matrix& data) {
  if (data.cols() != 2 || data.rows() < 1)
    throw std::invalid_argument("normal_location_posterior: n x 2 data required");
  const double n = static_cast<double>(data.rows());
  Matrix sigma(2, 2);
  sigma << 1.0, 0.5, 0.5, 1.0;
  const Matrix sigma_inv = sigma.inverse();
  const Matrix prior_prec = Matrix::Identity(2, 2) / kPriorVar;
  const Matrix post_prec = prior_prec + n * sigma_inv;
  Vector ybar(2);
  ybar << data.col(0).mean(), data.col(1).mean();
  GaussianPosterior post;
  post.cov = post_prec.inverse();
  post.mean = post.cov * (n * (sigma_inv * ybar));
  return post;
}

}  // namespace wabc
