#include "wabc/reference.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "wabc/transport.hpp"

namespace wabc {

namespace {

Matrix sample_covariance(const Matrix& draws) {
  const Eigen::Index n = draws.rows(), d = draws.cols();
  const Vector mean = draws.colwise().mean().transpose();
  Matrix cov = Matrix::Zero(d, d);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector diff = draws.row(i).transpose() - mean;
    cov += diff * diff.transpose();
  }
  cov /= static_cast<double>(n - 1);
  return cov;
}

// One chain of random-walk Metropolis; returns kept draws and accept count.
void run_chain(const GenerativeModel& model, const Matrix& data, const Matrix& chol,
               long iterations, long burnin, int thin, RandomStream& rng,
               Matrix* kept, long* accepts) {
  const int d = model.space.dim();
  Vector theta = model.prior_sample(rng);
  double log_post = model.prior_logdensity(theta) + model.loglik(theta, data);
  // A prior draw can land where the likelihood is degenerate; retry a few times.
  for (int tries = 0; !std::isfinite(log_post) && tries < 100; ++tries) {
    theta = model.prior_sample(rng);
    log_post = model.prior_logdensity(theta) + model.loglik(theta, data);
  }
  if (!std::isfinite(log_post))
    throw std::runtime_error("metropolis_hastings: cannot initialize chain");

  const long total = burnin + iterations;
  long kept_rows = 0;
  *accepts = 0;
  for (long it = 0; it < total; ++it) {
    Vector z(d);
    for (int j = 0; j < d; ++j) z(j) = rng.normal();
    const Vector prop = theta + chol * z;
    const double lp_prior = model.prior_logdensity(prop);
    double log_alpha = -std::numeric_limits<double>::infinity();
    if (std::isfinite(lp_prior)) {
      const double lp = lp_prior + model.loglik(prop, data);
      log_alpha = lp - log_post;
      if (std::log(rng.uniform01()) < log_alpha) {
        theta = prop;
        log_post = lp;
        if (it >= burnin) ++*accepts;
      }
    }
    if (it >= burnin && (it - burnin) % thin == 0) {
      kept->row(kept_rows) = theta.transpose();
      ++kept_rows;
    }
  }
}

}  // namespace

MhResult metropolis_hastings(const GenerativeModel& model, const Matrix& data,
                             const MhConfig& cfg) {
  if (!model.has_loglik())
    throw std::invalid_argument("metropolis_hastings: model has no likelihood");
  if (cfg.iterations < 1 || cfg.burnin < 0 || cfg.chains < 1 || cfg.thin < 1)
    throw std::invalid_argument("metropolis_hastings: bad chain configuration");
  const int d = model.space.dim();

  Matrix proposal_cov;
  const RandomStream root(cfg.seed);
  if (cfg.proposal_cov) {
    proposal_cov = *cfg.proposal_cov;
    if (proposal_cov.rows() != d || proposal_cov.cols() != d)
      throw std::invalid_argument("metropolis_hastings: proposal covariance shape");
  } else {
    // Pilot adaptation, starting from the prior scale.  Two rounds: the first
    // chain mostly travels from its prior start into the bulk, which inflates
    // its sample covariance; the second round, run at the first round's
    // estimate, measures the target scale itself.
    Matrix cov = [&] {
      RandomStream rng = root.substream({100});
      Matrix draws(512, d);
      for (int i = 0; i < 512; ++i) draws.row(i) = model.prior_sample(rng).transpose();
      return sample_covariance(draws);
    }();
    for (std::uint64_t round = 0; round < 2; ++round) {
      Matrix scaled = cov * (2.38 * 2.38 / d);
      scaled.diagonal().array() += 1e-12 * std::max(scaled.trace(), 1e-12);
      const Matrix pilot_chol =
          Matrix(Eigen::LLT<Eigen::MatrixXd>(Eigen::MatrixXd(scaled)).matrixL());
      Matrix pilot_draws(2000, d);
      long acc = 0;
      RandomStream rng = root.substream({101, round});
      run_chain(model, data, pilot_chol, 2000, round == 0 ? 0 : 500, 1, rng,
                &pilot_draws, &acc);
      cov = sample_covariance(pilot_draws);
    }
    proposal_cov = cov * (2.38 * 2.38 / d);
  }

  const double tr = proposal_cov.trace();
  if (!(tr > 0.0))
    throw std::invalid_argument("metropolis_hastings: zero-variance proposal");
  proposal_cov.diagonal().array() += 1e-12 * tr;
  Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(proposal_cov)};
  if (llt.info() != Eigen::Success)
    throw std::invalid_argument("metropolis_hastings: proposal covariance not SPD");
  const Matrix chol = Matrix(llt.matrixL());

  const long per_chain = (cfg.iterations + cfg.thin - 1) / cfg.thin;
  MhResult out;
  out.draws.resize(per_chain * cfg.chains, d);
  long total_accepts = 0;
  for (int c = 0; c < cfg.chains; ++c) {
    RandomStream rng = root.substream({1, static_cast<std::uint64_t>(c)});
    Matrix kept(per_chain, d);
    long acc = 0;
    run_chain(model, data, chol, cfg.iterations, cfg.burnin, cfg.thin, rng, &kept,
              &acc);
    out.draws.middleRows(c * per_chain, per_chain) = kept;
    total_accepts += acc;
  }
  out.acceptance_rate = static_cast<double>(total_accepts) /
                        static_cast<double>(cfg.iterations * cfg.chains);
  return out;
}

double cloud_w1(const PointCloud& a, const PointCloud& b, RandomStream& rng) {
  require_valid(a, "cloud_w1");
  require_valid(b, "cloud_w1");
  if (a.dim() != b.dim())
    throw std::invalid_argument("cloud_w1: dimension mismatch");
  const Eigen::Index m = std::min(a.n(), b.n());
  const PointCloud aa = a.n() == m ? a : subsample(a, m, rng);
  const PointCloud bb = b.n() == m ? b : subsample(b, m, rng);
  GroundMetric metric;
  if (aa.dim() == 1) return wasserstein_1d(aa, bb, 1.0).value;
  return exact_wasserstein(aa, bb, metric).value;
}

}  // namespace wabc
