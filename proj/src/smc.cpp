#include "wabc/smc.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <mutex>
#include <numeric>
#include <stdexcept>
#include <thread>

#include "wabc/hilbert.hpp"

namespace wabc {

namespace {

// Substream purposes; (purpose, step, particle) tuples key all randomness.
enum StreamPurpose : std::uint64_t {
  kPrior = 1,
  kInitSim = 2,
  kResample = 3,
  kMixture = 4,
  kMove = 5,
  kPriorScale = 6,
  kStageTwo = 7,
};

void parallel_for(Eigen::Index count, int workers,
                  const std::function<void(Eigen::Index)>& body) {
  if (workers <= 1 || count < 2) {
    for (Eigen::Index i = 0; i < count; ++i) body(i);
    return;
  }
  const int t = std::min<Eigen::Index>(workers, count);
  std::vector<std::thread> pool;
  std::exception_ptr error;
  std::mutex error_mu;
  // Dynamic scheduling: per-index work is heavy-tailed (a single move can
  // dominate a whole static block). body(i) depends only on i, so the
  // schedule cannot change results.
  std::atomic<Eigen::Index> next{0};
  for (int w = 0; w < t; ++w) {
    pool.emplace_back([&] {
      try {
        for (Eigen::Index i = next.fetch_add(1); i < count; i = next.fetch_add(1))
          body(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!error) error = std::current_exception();
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

Series to_series(const Matrix& data) { return Series(Matrix(data)); }

}  // namespace

DistanceMethod parse_distance_method(const std::string& name) {
  if (name == "wasserstein") return DistanceMethod::wasserstein;
  if (name == "hilbert") return DistanceMethod::hilbert;
  if (name == "swap") return DistanceMethod::swap;
  if (name == "sinkhorn") return DistanceMethod::sinkhorn;
  if (name == "mmd") return DistanceMethod::mmd;
  if (name == "euclidean") return DistanceMethod::euclidean;
  if (name == "summary") return DistanceMethod::summary;
  throw std::invalid_argument("unknown distance method: " + name);
}

std::string distance_method_name(DistanceMethod m) {
  switch (m) {
    case DistanceMethod::wasserstein: return "wasserstein";
    case DistanceMethod::hilbert: return "hilbert";
    case DistanceMethod::swap: return "swap";
    case DistanceMethod::sinkhorn: return "sinkhorn";
    case DistanceMethod::mmd: return "mmd";
    case DistanceMethod::euclidean: return "euclidean";
    case DistanceMethod::summary: return "summary";
  }
  return "?";
}

DistanceEvaluator::DistanceEvaluator(const GenerativeModel& model,
                                     const Matrix& observed, DistanceSpec spec)
    : model_(&model), observed_(observed), spec_(std::move(spec)) {
  if (observed_.rows() < 1 || observed_.cols() < 1)
    throw std::invalid_argument("DistanceEvaluator: empty observed data");
  if (!model.is_series && spec_.embedding.kind != EmbeddingKind::none)
    throw std::invalid_argument(
        "DistanceEvaluator: embeddings require a time-series model");
  if (spec_.method == DistanceMethod::summary && observed_.cols() != 1)
    throw std::invalid_argument(
        "DistanceEvaluator: summary distance needs a scalar series");
  validate_metric(spec_.metric);

  // Resolve the curve-matching weight from the observed series if requested.
  if (spec_.embedding.kind == EmbeddingKind::curve) {
    if (spec_.embedding.use_aspect)
      spec_.embedding.lambda = aspect_ratio_lambda(
          to_series(observed_), spec_.embedding.aspect_h, spec_.embedding.aspect_v);
    spec_.metric.kind = MetricKind::curve_match;
    spec_.metric.lambda = spec_.embedding.lambda;
  } else if (spec_.metric.kind == MetricKind::curve_match) {
    throw std::invalid_argument(
        "DistanceEvaluator: curve_match metric requires the curve embedding");
  }

  if (spec_.embedding.kind != EmbeddingKind::residual) {
    observed_cloud_ = embed(observed_, Vector());
    observed_cloud_ready_ = true;
  }
  if (spec_.method == DistanceMethod::mmd) {
    if (!observed_cloud_ready_)
      throw std::invalid_argument(
          "DistanceEvaluator: mmd with residual embedding is not supported");
    mmd_bandwidth_ = median_heuristic_bandwidth(observed_cloud_);
  }
  if (spec_.method == DistanceMethod::summary)
    observed_summary_ = acf_summary(observed_, spec_.acf_lags);
}

PointCloud DistanceEvaluator::embed(const Matrix& data, const Vector& theta) const {
  if (!model_->is_series) return PointCloud(Matrix(data));
  return embed_series(to_series(data), spec_.embedding, theta);
}

double DistanceEvaluator::stage_one(const Matrix& simulated, const Vector& theta) const {
  if (spec_.method == DistanceMethod::summary)
    return std::fabs(acf_summary(simulated, spec_.acf_lags) - observed_summary_);
  if (spec_.method == DistanceMethod::euclidean) {
    if (simulated.rows() != observed_.rows() || simulated.cols() != observed_.cols())
      throw std::invalid_argument(
          "DistanceEvaluator: euclidean distance needs equal data shapes");
    double acc = 0.0;
    for (Eigen::Index i = 0; i < observed_.rows(); ++i) {
      const double rho =
          ground_distance(observed_.row(i), simulated.row(i), spec_.metric);
      acc += spec_.metric.p == 1.0 ? rho : std::pow(rho, spec_.metric.p);
    }
    const double mean = acc / static_cast<double>(observed_.rows());
    return spec_.metric.p == 1.0 ? mean : std::pow(mean, 1.0 / spec_.metric.p);
  }

  const PointCloud sim_cloud = embed(simulated, theta);
  const PointCloud* obs = &observed_cloud_;
  PointCloud obs_local;
  if (!observed_cloud_ready_) {
    obs_local = embed(observed_, theta);
    obs = &obs_local;
  }
  switch (spec_.method) {
    case DistanceMethod::wasserstein:
      if (obs->dim() == 1 && obs->n() == sim_cloud.n())
        return wasserstein_1d(*obs, sim_cloud, spec_.metric.p).value;
      return exact_wasserstein(*obs, sim_cloud, spec_.metric).value;
    case DistanceMethod::hilbert:
      return hilbert_distance(*obs, sim_cloud, spec_.metric, spec_.hilbert_bits).value;
    case DistanceMethod::swap:
      return swapping_distance(*obs, sim_cloud, spec_.metric).value;
    case DistanceMethod::sinkhorn: {
      const double v =
          sinkhorn_divergence(*obs, sim_cloud, spec_.metric, spec_.sinkhorn_zeta)
              .result.value;
      return spec_.metric.p == 1.0 ? v : std::pow(v, 1.0 / spec_.metric.p);
    }
    case DistanceMethod::mmd:
      return std::sqrt(mmd_squared(*obs, sim_cloud, mmd_bandwidth_));
    default:
      throw std::logic_error("DistanceEvaluator: unreachable");
  }
}

void DistanceEvaluator::freeze_stage_one(double epsilon_h) {
  if (!(epsilon_h > 0.0) || !std::isfinite(epsilon_h))
    throw std::invalid_argument("freeze_stage_one: threshold must be finite and > 0");
  if (observed_.cols() != 1)
    throw std::invalid_argument("freeze_stage_one: scalar series required");
  stage_two_ = true;
  epsilon_h_ = epsilon_h;
  observed_summary_ = acf_summary(observed_, spec_.acf_lags);
}

double DistanceEvaluator::operator()(const Matrix& simulated,
                                     const Vector& theta) const {
  const double d1 = stage_one(simulated, theta);
  if (!stage_two_) return d1;
  if (!(d1 < epsilon_h_)) return std::numeric_limits<double>::infinity();
  return std::fabs(acf_summary(simulated, spec_.acf_lags) - observed_summary_);
}

void validate_config(const SmcConfig& cfg) {
  if (cfg.n_particles < 2)
    throw std::invalid_argument("smc config: need at least 2 particles");
  if (!(cfg.alpha > 0.0 && cfg.alpha <= 1.0))
    throw std::invalid_argument("smc config: alpha must lie in (0, 1]");
  if (cfg.r < 2) throw std::invalid_argument("smc config: r must be >= 2");
  if (cfg.mix_components < 1)
    throw std::invalid_argument("smc config: mix_components must be >= 1");
  if (cfg.budget < cfg.n_particles)
    throw std::invalid_argument("smc config: budget smaller than initialization cost");
  if (cfg.workers < 1) throw std::invalid_argument("smc config: workers must be >= 1");
  if (cfg.trial_cap < 2)
    throw std::invalid_argument("smc config: trial_cap must be >= 2");
  if (cfg.epsilon_target < 0.0 || !std::isfinite(cfg.epsilon_target))
    throw std::invalid_argument("smc config: epsilon_target must be finite and >= 0");
}

int count_unique(const std::vector<Particle>& particles) {
  std::vector<const Particle*> ptr;
  ptr.reserve(particles.size());
  for (const auto& p : particles) ptr.push_back(&p);
  auto less = [](const Particle* a, const Particle* b) {
    return std::lexicographical_compare(a->theta.begin(), a->theta.end(),
                                        b->theta.begin(), b->theta.end());
  };
  std::sort(ptr.begin(), ptr.end(), less);
  int unique = 0;
  for (size_t i = 0; i < ptr.size(); ++i)
    if (i == 0 || less(ptr[i - 1], ptr[i])) ++unique;
  return unique;
}

std::optional<double> adapt_threshold(const std::vector<Particle>& particles,
                                      double alpha, double prev_epsilon) {
  if (particles.empty())
    throw std::invalid_argument("adapt_threshold: empty population");
  if (!(alpha > 0.0 && alpha <= 1.0))
    throw std::invalid_argument("adapt_threshold: alpha must lie in (0, 1]");
  // Distances of distinct parameter vectors; duplicates keep their smallest.
  std::vector<int> order(particles.size());
  std::iota(order.begin(), order.end(), 0);
  auto less = [&](int a, int b) {
    return std::lexicographical_compare(
        particles[a].theta.begin(), particles[a].theta.end(),
        particles[b].theta.begin(), particles[b].theta.end());
  };
  std::sort(order.begin(), order.end(), less);
  std::vector<double> dists;
  for (size_t i = 0; i < order.size(); ++i) {
    if (i > 0 && !less(order[i - 1], order[i]))
      dists.back() = std::min(dists.back(), particles[order[i]].dist);
    else
      dists.push_back(particles[order[i]].dist);
  }
  const size_t k = static_cast<size_t>(
      std::ceil(alpha * static_cast<double>(particles.size())));
  if (dists.size() < k) return std::nullopt;
  std::nth_element(dists.begin(), dists.begin() + (k - 1), dists.end());
  const double eps = dists[k - 1];
  if (!(eps < prev_epsilon) || !std::isfinite(eps)) return std::nullopt;
  return eps;
}

std::vector<int> systematic_resample(const std::vector<double>& weights,
                                     RandomStream& rng) {
  const size_t n = weights.size();
  if (n == 0) throw std::invalid_argument("systematic_resample: no weights");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w))
      throw std::invalid_argument("systematic_resample: weights must be >= 0");
    sum += w;
  }
  if (std::fabs(sum - 1.0) > 1e-9)
    throw std::invalid_argument("systematic_resample: weights must sum to 1");
  const double u0 = rng.uniform01() / static_cast<double>(n);
  std::vector<int> out;
  out.reserve(n);
  double cum = 0.0;
  size_t i = 0;
  for (size_t k = 0; k < n; ++k) {
    const double point = u0 + static_cast<double>(k) / static_cast<double>(n);
    while (cum + weights[i] <= point * sum && i + 1 < n) {
      cum += weights[i];
      ++i;
    }
    out.push_back(static_cast<int>(i));
  }
  return out;
}

RhitResult rhit_mcmc_step(const Particle& current, double eps,
                          const GenerativeModel& model, Eigen::Index n_obs,
                          const DistanceEvaluator& eval, const Proposal& prop,
                          int r, long trial_cap, RandomStream& rng) {
  if (r < 2) throw std::invalid_argument("rhit_mcmc_step: r must be >= 2");
  if (!(current.dist <= eps))
    throw std::invalid_argument("rhit_mcmc_step: current particle misses threshold");
  RhitResult out;
  out.particle = current;

  const Vector proposed = prop.sample(rng);
  const double log_prior_prop = model.prior_logdensity(proposed);
  if (!std::isfinite(log_prior_prop)) return out;  // outside support, 0 sims

  // Phase 1: simulate at the proposal until r hits.
  std::vector<Matrix> hit_data;
  std::vector<double> hit_dist;
  long n_prop = 0;
  while (static_cast<int>(hit_data.size()) < r) {
    if (n_prop >= trial_cap) {
      out.capped = true;
      out.sims = n_prop;
      return out;
    }
    Matrix data = model.simulate(proposed, n_obs, rng);
    ++n_prop;
    const double d = eval(data, proposed);
    if (d <= eps) {
      hit_data.push_back(std::move(data));
      hit_dist.push_back(d);
    }
  }

  // Phase 2: simulate at the current value until r - 1 hits.
  long m_cur = 0;
  int hits_cur = 0;
  while (hits_cur < r - 1) {
    if (m_cur >= trial_cap) {
      out.capped = true;
      out.sims = n_prop + m_cur;
      return out;
    }
    Matrix data = model.simulate(current.theta, n_obs, rng);
    ++m_cur;
    if (eval(data, current.theta) <= eps) ++hits_cur;
  }
  out.sims = n_prop + m_cur;

  const double log_prior_cur = model.prior_logdensity(current.theta);
  const double log_ratio = log_prior_prop - log_prior_cur +
                           prop.logpdf(current.theta) - prop.logpdf(proposed) +
                           std::log(static_cast<double>(m_cur)) -
                           std::log(static_cast<double>(n_prop - 1));
  if (std::log(rng.uniform01()) < log_ratio) {
    const std::uint64_t pick = rng.uniform_int(static_cast<std::uint64_t>(r));
    out.particle.theta = proposed;
    out.particle.data = hit_data[pick];
    out.particle.dist = hit_dist[pick];
    out.accepted = true;
  }
  return out;
}

namespace {

Matrix prior_scale_covariance(const GenerativeModel& model, RandomStream rng) {
  const int draws = 1024;
  const int d = model.space.dim();
  Matrix samples(draws, d);
  for (int i = 0; i < draws; ++i)
    samples.row(i) = model.prior_sample(rng).transpose();
  const Vector mean = samples.colwise().mean().transpose();
  Matrix cov = Matrix::Zero(d, d);
  for (int i = 0; i < draws; ++i) {
    const Vector diff = samples.row(i).transpose() - mean;
    cov += diff * diff.transpose();
  }
  cov /= static_cast<double>(draws - 1);
  cov.diagonal().array() += 1e-8 * std::max(cov.trace(), 1e-8) / d;
  return cov;
}

Matrix theta_matrix(const std::vector<Particle>& particles) {
  Matrix out(particles.size(), particles[0].theta.size());
  for (size_t i = 0; i < particles.size(); ++i)
    out.row(i) = particles[i].theta.transpose();
  return out;
}

// Shared main loop for both stages.  stage_tag keeps stage-two substreams
// disjoint from stage-one ones.
void advance_population(SmcState& state, const GenerativeModel& model,
                        Eigen::Index n_obs, const DistanceEvaluator& eval,
                        const SmcConfig& cfg, long budget,
                        const RandomStream& root, const Matrix& fallback_cov,
                        const StepCallback& on_step,
                        std::chrono::steady_clock::time_point t0) {
  const int n = cfg.n_particles;
  while (state.total_sims < budget) {
    if (cfg.epsilon_target > 0.0 && state.epsilon <= cfg.epsilon_target) break;
    const auto eps_next = adapt_threshold(state.particles, cfg.alpha, state.epsilon);
    if (!eps_next) {
      state.terminated_early = true;
      break;
    }
    state.epsilon = *eps_next;
    const std::uint64_t step_id = static_cast<std::uint64_t>(state.step + 1);

    std::vector<double> weights(n);
    int survivors = 0;
    for (int i = 0; i < n; ++i) {
      weights[i] = state.particles[i].dist <= state.epsilon ? 1.0 : 0.0;
      survivors += weights[i] > 0.0;
    }
    if (survivors == 0)
      throw std::runtime_error("smc: no particle satisfies the new threshold");
    for (double& w : weights) w /= survivors;

    Vector wv = Eigen::Map<const Vector>(weights.data(), n);
    RandomStream mix_rng = root.substream({kMixture, step_id});
    const MixtureProposal proposal = fit_mixture_proposal(
        theta_matrix(state.particles), wv, cfg.mix_components, mix_rng, fallback_cov);

    RandomStream res_rng = root.substream({kResample, step_id});
    const std::vector<int> idx = systematic_resample(weights, res_rng);
    std::vector<Particle> resampled;
    resampled.reserve(n);
    for (int id : idx) resampled.push_back(state.particles[id]);
    state.particles = std::move(resampled);

    std::vector<RhitResult> results(n);
    parallel_for(n, cfg.workers, [&](Eigen::Index i) {
      RandomStream move_rng =
          root.substream({kMove, step_id, static_cast<std::uint64_t>(i)});
      results[i] = rhit_mcmc_step(state.particles[i], state.epsilon, model, n_obs,
                                  eval, proposal, cfg.r, cfg.trial_cap, move_rng);
    });
    for (int i = 0; i < n; ++i) {
      state.particles[i] = std::move(results[i].particle);
      state.total_sims += results[i].sims;
    }
    ++state.step;

    ThresholdTraceRow row;
    row.step = state.step;
    row.epsilon = state.epsilon;
    row.cumulative_sims = state.total_sims;
    row.unique_count = count_unique(state.particles);
    row.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    state.trace.push_back(row);
    if (on_step) on_step(state);
  }
}

}  // namespace

SmcState run_smc(const GenerativeModel& model, const Matrix& observed,
                 const DistanceSpec& spec, const SmcConfig& cfg,
                 const StepCallback& on_step) {
  validate_config(cfg);
  if (observed.rows() < 1)
    throw std::invalid_argument("run_smc: empty observed data");
  const Eigen::Index n_obs = cfg.n_obs > 0 ? cfg.n_obs : observed.rows();
  const DistanceEvaluator eval(model, observed, spec);
  const RandomStream root(cfg.seed);
  const Matrix fallback_cov =
      prior_scale_covariance(model, root.substream({kPriorScale}));
  const auto t0 = std::chrono::steady_clock::now();

  SmcState state;
  state.epsilon = std::numeric_limits<double>::infinity();
  state.particles.resize(cfg.n_particles);
  std::atomic<long> sim_count{0};
  parallel_for(cfg.n_particles, cfg.workers, [&](Eigen::Index i) {
    RandomStream prior_rng = root.substream({kPrior, static_cast<std::uint64_t>(i)});
    Particle p;
    p.theta = model.prior_sample(prior_rng);
    long used = 0;
    for (int attempt = 0;; ++attempt) {
      RandomStream sim_rng = root.substream(
          {kInitSim, static_cast<std::uint64_t>(i), static_cast<std::uint64_t>(attempt)});
      p.data = model.simulate(p.theta, n_obs, sim_rng);
      ++used;
      p.dist = eval(p.data, p.theta);
      if (std::isfinite(p.dist)) break;
      if (attempt >= 1)
        throw std::runtime_error("run_smc: non-finite distance at initialization");
    }
    sim_count += used;
    state.particles[i] = std::move(p);
  });
  state.total_sims = sim_count.load();

  ThresholdTraceRow row;
  row.step = 0;
  row.epsilon = state.epsilon;
  row.cumulative_sims = state.total_sims;
  row.unique_count = count_unique(state.particles);
  row.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  state.trace.push_back(row);
  if (on_step) on_step(state);

  advance_population(state, model, n_obs, eval, cfg, cfg.budget, root, fallback_cov,
                     on_step, t0);
  return state;
}

TwoStageResult run_two_stage(const GenerativeModel& model, const Matrix& observed,
                             const DistanceSpec& stage1_spec, const SmcConfig& cfg,
                             long stage2_budget, const StepCallback& on_step1,
                             const StepCallback& on_step2) {
  if (stage2_budget < 1)
    throw std::invalid_argument("run_two_stage: stage-two budget must be >= 1");
  TwoStageResult out;
  out.stage1 = run_smc(model, observed, stage1_spec, cfg, on_step1);
  if (!std::isfinite(out.stage1.epsilon))
    throw std::runtime_error("run_two_stage: stage one never adapted its threshold");
  out.epsilon_h = out.stage1.epsilon;

  DistanceEvaluator eval(model, observed, stage1_spec);
  eval.freeze_stage_one(out.epsilon_h);
  const Eigen::Index n_obs = cfg.n_obs > 0 ? cfg.n_obs : observed.rows();

  SmcState state;
  state.particles = out.stage1.particles;
  state.epsilon = std::numeric_limits<double>::infinity();
  state.total_sims = 0;
  for (auto& p : state.particles) p.dist = eval(p.data, p.theta);

  const RandomStream root = RandomStream(cfg.seed).substream({kStageTwo});
  const Matrix fallback_cov =
      prior_scale_covariance(model, root.substream({kPriorScale}));
  const auto t0 = std::chrono::steady_clock::now();

  ThresholdTraceRow row;
  row.step = 0;
  row.epsilon = state.epsilon;
  row.cumulative_sims = 0;
  row.unique_count = count_unique(state.particles);
  row.wall_seconds = 0.0;
  state.trace.push_back(row);
  if (on_step2) on_step2(state);

  advance_population(state, model, n_obs, eval, cfg, stage2_budget, root,
                     fallback_cov, on_step2, t0);
  out.stage2 = std::move(state);
  return out;
}

}  // namespace wabc
