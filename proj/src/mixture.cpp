#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

#include "wabc/smc.hpp"

namespace wabc {

namespace {

Matrix regularize(Matrix cov, const Matrix& fallback) {
  const Eigen::Index d = cov.rows();
  const double tr = cov.trace();
  if (!(tr > 0.0) || !cov.allFinite()) return fallback;
  cov.diagonal().array() += 1e-8 * tr / static_cast<double>(d);
  return cov;
}

Matrix cholesky_or_throw(const Matrix& cov, const char* who) {
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(cov)};
  if (llt.info() != Eigen::Success)
    throw std::runtime_error(std::string(who) + ": covariance not SPD");
  return Matrix(llt.matrixL());
}

}  // namespace

MixtureProposal::MixtureProposal(std::vector<double> weights, std::vector<Vector> means,
                                 std::vector<Matrix> covariances)
    : weights_(std::move(weights)), means_(std::move(means)) {
  if (weights_.empty() || weights_.size() != means_.size() ||
      weights_.size() != covariances.size())
    throw std::invalid_argument("MixtureProposal: component count mismatch");
  double sum = 0.0;
  for (double w : weights_) {
    if (!(w >= 0.0)) throw std::invalid_argument("MixtureProposal: negative weight");
    sum += w;
  }
  if (!(std::fabs(sum - 1.0) <= 1e-9))
    throw std::invalid_argument("MixtureProposal: weights must sum to 1");
  const Eigen::Index d = means_[0].size();
  for (size_t k = 0; k < covariances.size(); ++k) {
    if (means_[k].size() != d || covariances[k].rows() != d ||
        covariances[k].cols() != d)
      throw std::invalid_argument("MixtureProposal: dimension mismatch");
    chol_.push_back(cholesky_or_throw(covariances[k], "MixtureProposal"));
    double log_det = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) log_det += std::log(chol_.back()(j, j));
    log_norm_.push_back(-0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) -
                        log_det);
  }
}

Vector MixtureProposal::sample(RandomStream& rng) const {
  const double u = rng.uniform01();
  size_t k = 0;
  double acc = 0.0;
  for (; k + 1 < weights_.size(); ++k) {
    acc += weights_[k];
    if (u < acc) break;
  }
  const Eigen::Index d = means_[k].size();
  Vector z(d);
  for (Eigen::Index j = 0; j < d; ++j) z(j) = rng.normal();
  return means_[k] + chol_[k] * z;
}

double MixtureProposal::logpdf(const Vector& theta) const {
  if (theta.size() != means_[0].size())
    throw std::invalid_argument("MixtureProposal::logpdf: dimension mismatch");
  double mx = -std::numeric_limits<double>::infinity();
  std::vector<double> terms(weights_.size());
  for (size_t k = 0; k < weights_.size(); ++k) {
    if (weights_[k] <= 0.0) {
      terms[k] = -std::numeric_limits<double>::infinity();
      continue;
    }
    const Vector diff = theta - means_[k];
    const Vector w = chol_[k].triangularView<Eigen::Lower>().solve(diff);
    terms[k] = std::log(weights_[k]) + log_norm_[k] - 0.5 * w.squaredNorm();
    mx = std::max(mx, terms[k]);
  }
  if (!std::isfinite(mx)) return -std::numeric_limits<double>::infinity();
  double s = 0.0;
  for (double t : terms) s += std::exp(t - mx);
  return mx + std::log(s);
}

MixtureProposal fit_mixture_proposal(const Matrix& thetas, const Vector& weights,
                                     int k, RandomStream& rng,
                                     const Matrix& fallback_cov) {
  const Eigen::Index n = thetas.rows();
  const Eigen::Index d = thetas.cols();
  if (n < 1 || d < 1)
    throw std::invalid_argument("fit_mixture_proposal: empty population");
  if (weights.size() != n)
    throw std::invalid_argument("fit_mixture_proposal: weight length mismatch");
  if (k < 1) throw std::invalid_argument("fit_mixture_proposal: k must be >= 1");
  double wsum = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(weights(i) >= 0.0))
      throw std::invalid_argument("fit_mixture_proposal: negative weight");
    wsum += weights(i);
  }
  if (!(wsum > 0.0))
    throw std::invalid_argument("fit_mixture_proposal: all weights are zero");
  const Vector w = weights / wsum;

  // Count distinct support points (weight > 0).
  std::set<std::vector<double>> distinct;
  for (Eigen::Index i = 0; i < n; ++i)
    if (w(i) > 0.0)
      distinct.insert(std::vector<double>(thetas.row(i).begin(), thetas.row(i).end()));
  const int n_distinct = static_cast<int>(distinct.size());

  Vector mean = Vector::Zero(d);
  for (Eigen::Index i = 0; i < n; ++i) mean += w(i) * thetas.row(i).transpose();

  if (n_distinct < 2) {
    return MixtureProposal({1.0}, {mean}, {fallback_cov});
  }
  const int k_eff = std::min(k, n_distinct);

  Matrix pooled = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector diff = thetas.row(i).transpose() - mean;
    pooled += w(i) * (diff * diff.transpose());
  }
  pooled = regularize(std::move(pooled), fallback_cov);

  // k-means++ seeding on the weighted support.
  std::vector<Vector> centers;
  {
    double u = rng.uniform01();
    double acc = 0.0;
    Eigen::Index first = n - 1;
    for (Eigen::Index i = 0; i < n; ++i) {
      acc += w(i);
      if (u < acc) {
        first = i;
        break;
      }
    }
    centers.push_back(thetas.row(first).transpose());
    Vector d2(n);
    while (static_cast<int>(centers.size()) < k_eff) {
      double total = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (const Vector& c : centers)
          best = std::min(best, (thetas.row(i).transpose() - c).squaredNorm());
        d2(i) = w(i) * best;
        total += d2(i);
      }
      if (!(total > 0.0)) break;  // all mass already covered
      double v = rng.uniform01() * total;
      Eigen::Index pick = n - 1;
      double run = 0.0;
      for (Eigen::Index i = 0; i < n; ++i) {
        run += d2(i);
        if (v < run) {
          pick = i;
          break;
        }
      }
      centers.push_back(thetas.row(pick).transpose());
    }
  }
  const int kc = static_cast<int>(centers.size());

  std::vector<double> comp_w(kc, 1.0 / kc);
  std::vector<Vector> comp_mu = centers;
  std::vector<Matrix> comp_cov(kc, pooled);

  // Weighted EM.
  Matrix resp(n, kc);
  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int it = 0; it < 50; ++it) {
    // Factor every component once per iteration.
    std::vector<Matrix> chol(kc);
    std::vector<double> log_norm(kc);
    for (int c = 0; c < kc; ++c) {
      chol[c] = cholesky_or_throw(comp_cov[c], "fit_mixture_proposal");
      double log_det = 0.0;
      for (Eigen::Index j = 0; j < d; ++j) log_det += std::log(chol[c](j, j));
      log_norm[c] =
          -0.5 * static_cast<double>(d) * std::log(2.0 * M_PI) - log_det;
    }
    // E step: responsibilities via per-component log densities.
    double ll = 0.0;
    std::vector<double> lp(kc);
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (int c = 0; c < kc; ++c) {
        const Vector diff = thetas.row(i).transpose() - comp_mu[c];
        const Vector z = chol[c].triangularView<Eigen::Lower>().solve(diff);
        lp[c] = std::log(std::max(comp_w[c], 1e-300)) + log_norm[c] -
                0.5 * z.squaredNorm();
        mx = std::max(mx, lp[c]);
      }
      double s = 0.0;
      for (int c = 0; c < kc; ++c) s += std::exp(lp[c] - mx);
      for (int c = 0; c < kc; ++c) resp(i, c) = std::exp(lp[c] - mx) / s;
      ll += w(i) * (mx + std::log(s));
    }
    // M step.
    for (int c = 0; c < kc; ++c) {
      double nc = 0.0;
      Vector mu = Vector::Zero(d);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = w(i) * resp(i, c);
        nc += wi;
        mu += wi * thetas.row(i).transpose();
      }
      if (!(nc > 1e-12)) {
        comp_w[c] = 1e-12;
        comp_cov[c] = pooled;
        continue;
      }
      mu /= nc;
      Matrix cov = Matrix::Zero(d, d);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double wi = w(i) * resp(i, c);
        if (wi == 0.0) continue;
        const Vector diff = thetas.row(i).transpose() - mu;
        cov += wi * (diff * diff.transpose());
      }
      cov /= nc;
      comp_w[c] = nc;
      comp_mu[c] = mu;
      comp_cov[c] = regularize(std::move(cov), fallback_cov);
    }
    double sw = std::accumulate(comp_w.begin(), comp_w.end(), 0.0);
    for (double& x : comp_w) x /= sw;
    if (std::isfinite(prev_ll) &&
        std::fabs(ll - prev_ll) <= 1e-8 * std::max(1.0, std::fabs(prev_ll)))
      break;
    prev_ll = ll;
  }
  return MixtureProposal(comp_w, comp_mu, comp_cov);
}

}  // namespace wabc
