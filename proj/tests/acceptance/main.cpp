// Acceptance suite: exercises the full stack end to end and prints one
// PASS/FAIL line per criterion.  Exit code is nonzero when a gating
// criterion fails; the scaling report is informational only.
//
// Every tolerance is pinned here, next to the check it guards.  Run with a
// list of criterion numbers to execute a subset, e.g. `wabc_acceptance 4 10`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <functional>
#include <limits>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "wabc/hilbert.hpp"
#include "wabc/models.hpp"
#include "wabc/random.hpp"
#include "wabc/reference.hpp"
#include "wabc/run_config.hpp"
#include "wabc/smc.hpp"
#include "wabc/transport.hpp"

using wabc::DistanceEvaluator;
using wabc::DistanceMethod;
using wabc::DistanceSpec;
using wabc::GenerativeModel;
using wabc::GroundMetric;
using wabc::Matrix;
using wabc::MixtureProposal;
using wabc::PointCloud;
using wabc::RandomStream;
using wabc::SmcConfig;
using wabc::SmcState;
using wabc::Vector;

namespace {

const double kInf = std::numeric_limits<double>::infinity();

double now_seconds() {
  static const auto start = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
      .count();
}

PointCloud gaussian_cloud(Eigen::Index n, int d, RandomStream& rng,
                          double shift = 0.0) {
  Matrix m(n, d);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < d; ++j) m(i, j) = rng.normal() + shift;
  return PointCloud(std::move(m));
}

// Exhaustive minimum over all pairings, written independently of the library
// solver: the oracle for small instances.
double oracle_min_cost(const PointCloud& x, const PointCloud& y,
                       const GroundMetric& metric) {
  const int n = static_cast<int>(x.n());
  std::vector<int> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  double best = kInf;
  do {
    double cost = 0.0;
    for (int i = 0; i < n; ++i) {
      const double rho = wabc::ground_distance(x.points.row(i),
                                               y.points.row(perm[i]), metric);
      cost += metric.p == 1.0 ? rho : std::pow(rho, metric.p);
    }
    best = std::min(best, cost);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::pow(best / n, 1.0 / metric.p);
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

double mean_of(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sd_of(const std::vector<double>& v) {
  const double m = mean_of(v);
  double acc = 0.0;
  for (double x : v) acc += (x - m) * (x - m);
  return std::sqrt(acc / (static_cast<double>(v.size()) - 1.0));
}

std::vector<double> particle_column(const std::vector<wabc::Particle>& ps, int j) {
  std::vector<double> out(ps.size());
  for (size_t i = 0; i < ps.size(); ++i) out[i] = ps[i].theta(j);
  return out;
}

PointCloud particle_cloud(const std::vector<wabc::Particle>& ps) {
  Matrix m(ps.size(), ps[0].theta.size());
  for (size_t i = 0; i < ps.size(); ++i) m.row(i) = ps[i].theta.transpose();
  return PointCloud(std::move(m));
}

// Central interval covering the middle 90% of a sample.
std::pair<double, double> central_interval_90(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t n = v.size();
  const size_t lo = static_cast<size_t>(std::floor(0.05 * (n - 1)));
  const size_t hi = static_cast<size_t>(std::ceil(0.95 * (n - 1)));
  return {v[lo], v[hi]};
}

// Bit-exact serialization of a sampler run: particle table plus the
// scheduling-independent trace columns (wall-clock times excluded).
std::string serialize_state(const GenerativeModel& model, const SmcState& s) {
  std::ostringstream os;
  os << wabc::particles_to_csv_string(model, s.particles);
  os << std::hexfloat;
  os << "epsilon " << s.epsilon << " sims " << s.total_sims << " early "
     << s.terminated_early << "\n";
  for (const auto& row : s.trace)
    os << row.step << ',' << row.epsilon << ',' << row.cumulative_sims << ','
       << row.unique_count << '\n';
  return os.str();
}

// Experiments register a closure that reruns them at a given worker count;
// criterion 10 replays each one with 8 workers and compares bitwise against
// the canonical single-worker result.
struct WorkerRerun {
  std::string label;
  std::function<std::string(int workers)> run;
  std::string canonical;
};
std::vector<WorkerRerun> g_reruns;

void register_rerun(std::string label, const GenerativeModel& registry_model,
                    Matrix observed, DistanceSpec spec, SmcConfig cfg,
                    const SmcState& canonical_state) {
  GenerativeModel model = registry_model;  // keep a stable copy
  WorkerRerun r;
  r.label = std::move(label);
  r.canonical = serialize_state(model, canonical_state);
  r.run = [model = std::move(model), observed = std::move(observed),
           spec = std::move(spec), cfg](int workers) {
    SmcConfig c = cfg;
    c.workers = workers;
    return serialize_state(model, wabc::run_smc(model, observed, spec, c));
  };
  g_reruns.push_back(std::move(r));
}

// ---------------------------------------------------------------------------
// 1. Exact solver versus an exhaustive oracle, and the 1-d sorting path
//    versus the assignment solver.
bool criterion_exact_vs_oracle(std::string& detail) {
  const double t0 = now_seconds();
  RandomStream rng(101);
  double worst = 0.0;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 2 + static_cast<int>(rng.uniform_int(6));   // 2..7
    const int d = 1 + static_cast<int>(rng.uniform_int(3));   // 1..3
    GroundMetric metric;
    metric.kind = rng.uniform01() < 0.5 ? wabc::MetricKind::euclidean
                                        : wabc::MetricKind::l1;
    metric.p = rng.uniform01() < 0.5 ? 1.0 : 2.0;
    const PointCloud x = gaussian_cloud(n, d, rng);
    const PointCloud y = gaussian_cloud(n, d, rng, 0.5);
    const double exact = wabc::exact_wasserstein(x, y, metric).value;
    worst = std::max(worst, std::fabs(exact - oracle_min_cost(x, y, metric)));
  }
  if (worst > 1e-9) {
    detail = "assignment solver drifts from the exhaustive oracle by " +
             std::to_string(worst);
    return false;
  }

  double worst1d = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    GroundMetric metric;
    metric.p = trial % 2 == 0 ? 1.0 : 2.0;
    const PointCloud x = gaussian_cloud(100, 1, rng);
    const PointCloud y = gaussian_cloud(100, 1, rng, 1.0);
    worst1d = std::max(worst1d,
                       std::fabs(wabc::wasserstein_1d(x, y, metric.p).value -
                                 wabc::exact_wasserstein(x, y, metric).value));
  }
  if (worst1d > 1e-10) {
    detail = "sorting path differs from the assignment solver by " +
             std::to_string(worst1d);
    return false;
  }
  const double dt = now_seconds() - t0;
  if (dt > 30.0) {
    detail = "oracle block took " + std::to_string(dt) + "s (limit 30s)";
    return false;
  }
  std::ostringstream os;
  os << "max oracle gap " << worst << " (200 instances), max 1-d gap "
     << worst1d << " (100 pairs, n=100), " << dt << "s";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------------------
// 2. Ordering of the distance family, curve-distance triangle inequality, and
//    entropic upper bound at small regularization.
bool criterion_distance_relations(std::string& detail) {
  const double t0 = now_seconds();
  RandomStream rng(202);
  const GroundMetric metric;  // euclidean, p = 1

  for (int d : {2, 4}) {
    for (int trial = 0; trial < 100; ++trial) {
      const PointCloud x = gaussian_cloud(32, d, rng);
      const PointCloud y = gaussian_cloud(32, d, rng, 0.7);
      const double exact = wabc::exact_wasserstein(x, y, metric).value;
      const double swap = wabc::swapping_distance(x, y, metric).value;
      const double curve = wabc::hilbert_distance(x, y, metric).value;
      if (!(exact <= swap + 1e-12 && swap <= curve + 1e-12)) {
        std::ostringstream os;
        os << "ordering violated (d=" << d << "): exact " << exact << " swap "
           << swap << " curve " << curve;
        detail = os.str();
        return false;
      }
    }
  }

  // Triangle inequality of the curve distance under a shared box.
  wabc::HilbertBox box;
  box.lo = Vector::Constant(2, -8.0);
  box.hi = Vector::Constant(2, 8.0);
  for (int trial = 0; trial < 1000; ++trial) {
    const PointCloud a = gaussian_cloud(12, 2, rng, -0.5);
    const PointCloud b = gaussian_cloud(12, 2, rng);
    const PointCloud c = gaussian_cloud(12, 2, rng, 0.5);
    const double ab = wabc::hilbert_distance(a, b, metric, box).value;
    const double bc = wabc::hilbert_distance(b, c, metric, box).value;
    const double ac = wabc::hilbert_distance(a, c, metric, box).value;
    if (ac > ab + bc + 1e-12) {
      std::ostringstream os;
      os << "triangle inequality violated: " << ac << " > " << ab << " + " << bc;
      detail = os.str();
      return false;
    }
  }

  // Entropic transport: never below the exact cost, and within 5% of it once
  // the regularization drops to 1% of the median pairwise cost.
  double worst_rel = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const PointCloud x = gaussian_cloud(10, 2, rng);
    const PointCloud y = gaussian_cloud(10, 2, rng, 3.0);
    const double exact = wabc::exact_wasserstein(x, y, metric).value;
    const Matrix costs = wabc::pairwise_cost(x, y, metric);
    std::vector<double> flat(costs.data(), costs.data() + costs.size());
    const double zeta = 0.01 * median_of(flat);
    const wabc::SinkhornResult ent =
        wabc::sinkhorn_divergence(x, y, metric, zeta, 1e-8, 200000);
    if (!ent.result.converged) {
      detail = "entropic solver failed to converge at small regularization";
      return false;
    }
    const double value = ent.result.value;  // p = 1: same scale as the distance
    if (value < exact - 1e-9) {
      std::ostringstream os;
      os << "entropic value " << value << " below exact " << exact;
      detail = os.str();
      return false;
    }
    worst_rel = std::max(worst_rel, (value - exact) / exact);
  }
  if (worst_rel > 0.05) {
    detail = "entropic value exceeds exact by " + std::to_string(100 * worst_rel) +
             "% (limit 5%)";
    return false;
  }
  const double dt = now_seconds() - t0;
  if (dt > 120.0) {
    detail = "relations block took " + std::to_string(dt) + "s (limit 120s)";
    return false;
  }
  std::ostringstream os;
  os << "ordering held on 200 pairs (d=2,4); 1000 triangles; worst entropic "
     << "excess " << 100 * worst_rel << "%; " << dt << "s";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------------------
// 3. The hit-based kernel preserves its target on a fully enumerable toy:
//    three parameter values, four data outcomes, threshold hits enumerated
//    exactly.
class AtomProposal : public wabc::Proposal {
 public:
  Vector sample(RandomStream& rng) const override {
    Vector t(1);
    t(0) = static_cast<double>(rng.uniform_int(3));
    return t;
  }
  double logpdf(const Vector&) const override { return -std::log(3.0); }
};

bool criterion_kernel_invariance(std::string& detail) {
  const double t0 = now_seconds();

  // Outcome distributions per parameter atom; observed outcome 1 and
  // threshold 1 make every outcome except 3 a hit (distance |y - 1|).
  static const double probs[3][4] = {{0.10, 0.20, 0.30, 0.40},
                                     {0.25, 0.25, 0.25, 0.25},
                                     {0.40, 0.30, 0.20, 0.10}};
  auto atom_of = [](const Vector& t) {
    const int a = static_cast<int>(std::lround(t(0)));
    return (a >= 0 && a <= 2 && std::fabs(t(0) - a) < 1e-9) ? a : -1;
  };

  GenerativeModel toy;
  toy.name = "toy_categorical";
  toy.space.names = {"theta"};
  toy.space.supports = {wabc::Interval{0.0, 2.0}};
  toy.out_dim = 1;
  toy.simulate = [atom_of](const Vector& theta, Eigen::Index n,
                           RandomStream& rng) {
    const int a = atom_of(theta);
    Matrix out(n, 1);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double u = rng.uniform01();
      double cum = 0.0;
      int y = 3;
      for (int k = 0; k < 4; ++k) {
        cum += probs[a][k];
        if (u < cum) {
          y = k;
          break;
        }
      }
      out(i, 0) = static_cast<double>(y);
    }
    return out;
  };
  toy.prior_sample = [](RandomStream& rng) {
    Vector t(1);
    t(0) = static_cast<double>(rng.uniform_int(3));
    return t;
  };
  toy.prior_logdensity = [atom_of](const Vector& t) {
    return atom_of(t) >= 0 ? -std::log(3.0) : -kInf;
  };

  Matrix observed(1, 1);
  observed(0, 0) = 1.0;
  const DistanceEvaluator eval(toy, observed, DistanceSpec{});
  const double eps = 1.0;

  // Exactly enumerated target: prior times hit probability, normalized.
  double target[3];
  double total = 0.0;
  for (int a = 0; a < 3; ++a) {
    target[a] = (1.0 / 3.0) * (1.0 - probs[a][3]);
    total += target[a];
  }
  for (double& p : target) p /= total;

  wabc::Particle p;
  p.theta = Vector::Constant(1, 1.0);
  RandomStream init_rng(7);
  do {
    p.data = toy.simulate(p.theta, 1, init_rng);
    p.dist = eval(p.data, p.theta);
  } while (p.dist > eps);

  const AtomProposal prop;
  const long iterates = 100000;
  double counts[3] = {0.0, 0.0, 0.0};
  RandomStream rng(303);
  for (long it = 0; it < iterates; ++it) {
    p = wabc::rhit_mcmc_step(p, eps, toy, 1, eval, prop, 2, 10000, rng).particle;
    counts[atom_of(p.theta)] += 1.0;
  }
  double tv = 0.0;
  for (int a = 0; a < 3; ++a) tv += std::fabs(counts[a] / iterates - target[a]);
  tv *= 0.5;

  const double dt = now_seconds() - t0;
  std::ostringstream os;
  os << "law (" << counts[0] / iterates << ", " << counts[1] / iterates << ", "
     << counts[2] / iterates << ") vs enumerated (" << target[0] << ", "
     << target[1] << ", " << target[2] << "), TV " << tv << ", " << dt << "s";
  detail = os.str();
  if (tv > 0.05) return false;
  if (dt > 60.0) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 4. Location model: the particle cloud approaches an exact posterior sample
//    in transport distance, mostly monotonically.
bool criterion_location_recovery(std::string& detail) {
  const GenerativeModel& model = wabc::model_registry("normal_location");
  RandomStream data_rng(404);
  const Matrix observed = model.simulate(Vector::Constant(2, 1.0), 100, data_rng);

  // Exact posterior sample via the conjugate form.
  const wabc::GaussianPosterior post = wabc::normal_location_posterior(observed);
  const Eigen::LLT<Eigen::MatrixXd> llt{Eigen::MatrixXd(post.cov)};
  const Matrix chol = Matrix(llt.matrixL());
  RandomStream ref_rng(4242);
  Matrix ref(512, 2);
  for (int i = 0; i < 512; ++i) {
    Vector z(2);
    z << ref_rng.normal(), ref_rng.normal();
    ref.row(i) = (post.mean + chol * z).transpose();
  }
  const PointCloud ref_cloud{Matrix(ref)};

  DistanceSpec spec;  // exact transport distance, p = 1
  SmcConfig cfg;
  cfg.n_particles = 512;
  cfg.budget = 100000;
  cfg.seed = 11;
  cfg.trial_cap = 500;

  std::vector<double> w1;
  const auto snapshot = [&](const SmcState& state) {
    RandomStream rng(9000 + static_cast<std::uint64_t>(state.step));
    w1.push_back(wabc::cloud_w1(particle_cloud(state.particles), ref_cloud, rng));
  };
  const SmcState state = wabc::run_smc(model, observed, spec, cfg, snapshot);
  register_rerun("location model", model, observed, spec, cfg, state);

  if (w1.size() < 4) {
    detail = "sampler made too few steps (" + std::to_string(w1.size()) + ")";
    return false;
  }
  const double final_w1 = w1.back();
  const double step1_w1 = w1[1];
  int excursions = 0;
  double worst_excursion = 0.0;
  for (size_t i = 1; i < w1.size(); ++i)
    if (w1[i] > w1[i - 1]) {
      ++excursions;
      worst_excursion = std::max(worst_excursion, w1[i] / w1[i - 1] - 1.0);
    }

  std::ostringstream os;
  os << "final transport gap " << final_w1 << " (limit 0.4), step-1 gap "
     << step1_w1 << ", worst excursion " << 100 * worst_excursion << "% over "
     << (w1.size() - 1) << " steps, sims " << state.total_sims;
  detail = os.str();
  if (final_w1 >= 0.4) return false;
  if (!(final_w1 < 0.2 * step1_w1)) return false;
  if (worst_excursion > 0.10) return false;  // non-increasing up to 10%
  return true;
}

// ---------------------------------------------------------------------------
// 5. Autoregression: comparing marginals identifies the stationary variance
//    but leaves the dependence parameter on a ridge; a delay embedding
//    recovers both parameters.
bool criterion_autoregression(std::string& detail) {
  const GenerativeModel& model = wabc::model_registry("ar1");
  const double phi_true = 0.7, logsig_true = 0.9;
  const double v_true = std::exp(2.0 * logsig_true) / (1.0 - phi_true * phi_true);
  Vector theta_true(2);
  theta_true << phi_true, logsig_true;
  RandomStream data_rng(505);
  const Matrix observed = model.simulate(theta_true, 1000, data_rng);

  SmcConfig cfg;
  cfg.n_particles = 512;
  cfg.budget = 100000;
  cfg.seed = 21;
  cfg.trial_cap = 500;

  // (a) Marginal comparison: order-free transport on the value distribution.
  DistanceSpec marginal;  // no embedding -> T x 1 cloud, sorting path
  const SmcState ms = wabc::run_smc(model, observed, marginal, cfg);
  register_rerun("autoregression, marginal", model, observed, marginal, cfg, ms);
  std::vector<double> rel_v_err(ms.particles.size());
  for (size_t i = 0; i < ms.particles.size(); ++i) {
    const double phi = ms.particles[i].theta(0);
    const double v = std::exp(2.0 * ms.particles[i].theta(1)) / (1.0 - phi * phi);
    rel_v_err[i] = std::fabs(v - v_true) / v_true;
  }
  const double med_v_err = median_of(rel_v_err);
  const double sd_phi_marginal = sd_of(particle_column(ms.particles, 0));

  // (b) Delay embedding: pairs (y_t, y_{t-1}) carry the dependence.
  DistanceSpec delay;
  delay.method = DistanceMethod::hilbert;
  delay.embedding.kind = wabc::EmbeddingKind::delay;
  delay.embedding.lags = {1};
  delay.embedding.stride = 2;
  cfg.seed = 22;
  const SmcState ds = wabc::run_smc(model, observed, delay, cfg);
  register_rerun("autoregression, delay", model, observed, delay, cfg, ds);
  const double mean_phi = mean_of(particle_column(ds.particles, 0));
  const double mean_logsig = mean_of(particle_column(ds.particles, 1));

  std::ostringstream os;
  os << "marginal: median |v-v*|/v* " << med_v_err << " (limit 0.25), sd(phi) "
     << sd_phi_marginal << " (floor 0.15); delay: mean phi " << mean_phi
     << " (target 0.7 +- 0.10), mean log sigma " << mean_logsig
     << " (target 0.9 +- 0.15)";
  detail = os.str();
  if (med_v_err > 0.25) return false;
  if (sd_phi_marginal <= 0.15) return false;
  if (std::fabs(mean_phi - phi_true) > 0.10) return false;
  if (std::fabs(mean_logsig - logsig_true) > 0.15) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 6. Quantile-defined model: central 90% intervals cover the generating
//    location, scale and kurtosis parameters, and the threshold contracts.
bool criterion_quantile_model(std::string& detail) {
  const GenerativeModel& model = wabc::model_registry("gandk");
  Vector theta_true(4);
  theta_true << 3.0, 1.0, 2.0, 0.5;
  RandomStream data_rng(601);
  const Matrix observed = model.simulate(theta_true, 250, data_rng);

  DistanceSpec spec;  // 1-d sorting path
  SmcConfig cfg;
  // 512 particles: larger populations exhaust the budget before the
  // threshold can descend to the target.  Stop at the target rather than
  // spending the rest of the budget overfitting the one observed draw.
  cfg.n_particles = 512;
  cfg.budget = 200000;
  cfg.seed = 33;
  cfg.trial_cap = 500;
  cfg.epsilon_target = 0.25;
  const SmcState state = wabc::run_smc(model, observed, spec, cfg);
  register_rerun("quantile model", model, observed, spec, cfg, state);

  const char* names[4] = {"a", "b", "g", "k"};
  std::ostringstream os;
  bool covered = true;
  for (int j : {0, 1, 3}) {  // the skewness g is only weakly identified here
    const auto [lo, hi] = central_interval_90(particle_column(state.particles, j));
    os << names[j] << " in [" << lo << ", " << hi << "] ";
    if (theta_true(j) < lo || theta_true(j) > hi) covered = false;
  }
  os << "; final threshold " << state.epsilon << " (limit 0.25)";
  detail = os.str();
  return covered && state.epsilon <= 0.25;
}

// ---------------------------------------------------------------------------
// 7. Queueing model: the data-derived support bound holds exactly and the
//    minimum-service parameter contracts well beyond its prior spread.
bool criterion_queueing_model(std::string& detail) {
  Vector theta_true(3);
  theta_true << 4.0, 3.0, 0.15;  // service U[4, 7], arrival rate 0.15
  RandomStream data_rng(707);
  const GenerativeModel unconstrained = wabc::make_mg1_model();
  const Matrix observed = unconstrained.simulate(theta_true, 50, data_rng);
  const double min_y = observed.col(0).minCoeff();
  const GenerativeModel model = wabc::make_mg1_model(min_y);

  DistanceSpec spec;  // 1-d sorting path
  SmcConfig cfg;
  // As in the quantile-model run, 512 particles trade population size for
  // enough threshold steps to contract theta1 against the support bound.
  cfg.n_particles = 512;
  cfg.budget = 500000;
  cfg.seed = 44;
  cfg.trial_cap = 500;
  const SmcState state = wabc::run_smc(model, observed, spec, cfg);
  register_rerun("queueing model", model, observed, spec, cfg, state);

  const std::vector<double> theta1 = particle_column(state.particles, 0);
  const double max_theta1 = *std::max_element(theta1.begin(), theta1.end());
  const double sd_theta1 = sd_of(theta1);
  const double prior_sd = min_y / std::sqrt(12.0);  // restricted prior U[0, min y]

  std::ostringstream os;
  os << "max theta1 " << max_theta1 << " vs min y " << min_y << "; sd(theta1) "
     << sd_theta1 << " (limit " << prior_sd / 3.0 << ")";
  detail = os.str();
  if (max_theta1 > min_y) return false;
  if (!(sd_theta1 < prior_sd / 3.0)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 8. Trend model: matching curves as point sets (time paired with value, unit
//    aspect ratio) estimates the noise scale less badly than matching time
//    points directly.
bool criterion_trend_model(std::string& detail) {
  const GenerativeModel& model = wabc::model_registry("cosine");
  Vector theta_true(4);
  theta_true << 1.0 / 80.0, M_PI / 4.0, 0.0, std::log(2.0);
  RandomStream data_rng(808);
  const Matrix observed = model.simulate(theta_true, 100, data_rng);

  SmcConfig cfg;
  cfg.n_particles = 512;
  cfg.budget = 100000;
  cfg.seed = 55;
  cfg.trial_cap = 500;

  DistanceSpec pointwise;
  pointwise.method = DistanceMethod::euclidean;
  const SmcState ps = wabc::run_smc(model, observed, pointwise, cfg);
  register_rerun("trend model, pointwise", model, observed, pointwise, cfg, ps);
  const double logsig_pointwise = mean_of(particle_column(ps.particles, 2));

  DistanceSpec shape;
  shape.method = DistanceMethod::hilbert;
  shape.embedding.kind = wabc::EmbeddingKind::curve;
  shape.embedding.use_aspect = true;  // time weight from the observed series
  cfg.seed = 56;
  const SmcState ss = wabc::run_smc(model, observed, shape, cfg);
  register_rerun("trend model, curve", model, observed, shape, cfg, ss);
  const double logsig_shape = mean_of(particle_column(ss.particles, 2));

  std::ostringstream os;
  os << "mean log sigma: curve matching " << logsig_shape << ", pointwise "
     << logsig_pointwise << " (true 0)";
  detail = os.str();
  return std::fabs(logsig_shape) < std::fabs(logsig_pointwise);
}

// ---------------------------------------------------------------------------
// 9. Volatility model: the first stage barely constrains the jump rate; the
//    second stage, driven by the autocorrelation summary, pulls its median
//    down by at least half.
bool criterion_volatility_two_stage(std::string& detail) {
  const GenerativeModel& model = wabc::model_registry("levy_sv");
  Vector theta_true(5);
  theta_true << 0.0, 0.0, 0.5, 0.0625, 0.01;  // (mu, beta, xi, omega2, lambda)
  RandomStream data_rng(909);
  const Matrix observed = model.simulate(theta_true, 2000, data_rng);

  DistanceSpec spec;
  spec.method = DistanceMethod::hilbert;
  spec.embedding.kind = wabc::EmbeddingKind::delay;
  spec.embedding.lags = {1};
  spec.embedding.stride = 1;
  spec.acf_lags = 50;

  SmcConfig cfg;
  cfg.n_particles = 512;
  cfg.budget = 100000;
  cfg.seed = 66;
  cfg.trial_cap = 500;
  const long stage2_budget = 50000;
  const wabc::TwoStageResult ts =
      wabc::run_two_stage(model, observed, spec, cfg, stage2_budget);

  {
    GenerativeModel copy = model;
    WorkerRerun r;
    r.label = "volatility model, two-stage";
    r.canonical = serialize_state(model, ts.stage1) + "--\n" +
                  serialize_state(model, ts.stage2);
    r.run = [copy = std::move(copy), observed, spec, cfg,
             stage2_budget](int workers) {
      SmcConfig c = cfg;
      c.workers = workers;
      const wabc::TwoStageResult t =
          wabc::run_two_stage(copy, observed, spec, c, stage2_budget);
      return serialize_state(copy, t.stage1) + "--\n" +
             serialize_state(copy, t.stage2);
    };
    g_reruns.push_back(std::move(r));
  }

  // Stage one leaves the jump-rate marginal close to its unit-rate
  // exponential prior (spread 1): transport gap below 0.3 of that spread.
  RandomStream prior_rng(6161);
  Matrix prior_lambda(512, 1);
  for (int i = 0; i < 512; ++i) prior_lambda(i, 0) = prior_rng.exponential(1.0);
  Matrix s1_lambda(ts.stage1.particles.size(), 1);
  for (size_t i = 0; i < ts.stage1.particles.size(); ++i)
    s1_lambda(i, 0) = ts.stage1.particles[i].theta(4);
  RandomStream w1_rng(6262);
  const double w1_vs_prior = wabc::cloud_w1(
      PointCloud(std::move(s1_lambda)), PointCloud(std::move(prior_lambda)), w1_rng);

  const double med1 = median_of(particle_column(ts.stage1.particles, 4));
  const double med2 = median_of(particle_column(ts.stage2.particles, 4));

  std::ostringstream os;
  os << "stage-1 jump-rate marginal vs prior: transport gap " << w1_vs_prior
     << " (limit 0.3); median " << med1 << " -> stage 2 " << med2
     << " (need at most half; true 0.01)";
  detail = os.str();
  if (w1_vs_prior >= 0.3) return false;
  if (!(med2 <= 0.5 * med1)) return false;
  return true;
}

// ---------------------------------------------------------------------------
// 10. Bitwise determinism: every experiment above, rerun with 8 workers,
//     reproduces its single-worker particle table and trace exactly.
bool criterion_worker_determinism(std::string& detail) {
  if (g_reruns.empty()) {
    detail = "no experiments registered (run criteria 4-9 in the same session)";
    return false;
  }
  std::vector<std::string> mismatched;
  for (const auto& r : g_reruns) {
    if (r.run(8) != r.canonical) mismatched.push_back(r.label);
  }
  if (!mismatched.empty()) {
    detail = "differs with 8 workers: ";
    for (const auto& m : mismatched) detail += m + "; ";
    return false;
  }
  std::ostringstream os;
  os << g_reruns.size() << " experiment runs identical with 1 and 8 workers";
  detail = os.str();
  return true;
}

// ---------------------------------------------------------------------------
// 11. Informational scaling report: the curve distance should roughly follow
//     n log n (ratio <= 3 per doubling from 4096 points up) while the
//     assignment solver shows its cubic growth (ratio >= 6 from 512 up).
bool criterion_scaling(std::string& detail) {
  RandomStream rng(1111);
  const GroundMetric metric;
  auto median_time = [&](auto&& op, Eigen::Index n) {
    std::vector<double> times;
    for (int rep = 0; rep < 3; ++rep) {
      const PointCloud x = gaussian_cloud(n, 2, rng);
      const PointCloud y = gaussian_cloud(n, 2, rng, 0.5);
      const auto t0 = std::chrono::steady_clock::now();
      op(x, y);
      times.push_back(
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
              .count());
    }
    std::sort(times.begin(), times.end());
    return times[1];
  };

  auto curve = [&](const PointCloud& x, const PointCloud& y) {
    wabc::hilbert_distance(x, y, metric);
  };
  auto exact = [&](const PointCloud& x, const PointCloud& y) {
    wabc::exact_wasserstein(x, y, metric);
  };
  const double h4096 = median_time(curve, 4096);
  const double h8192 = median_time(curve, 8192);
  const double h16384 = median_time(curve, 16384);
  const double e512 = median_time(exact, 512);
  const double e1024 = median_time(exact, 1024);

  const double r1 = h8192 / h4096, r2 = h16384 / h8192, r3 = e1024 / e512;
  std::ostringstream os;
  os << "curve distance doubling ratios " << r1 << ", " << r2
     << " (target <= 3); assignment doubling ratio " << r3 << " (target >= 6)";
  detail = os.str();
  return r1 <= 3.0 && r2 <= 3.0 && r3 >= 6.0;
}

struct Criterion {
  std::string description;
  std::function<bool(std::string&)> run;
  bool gating = true;
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria{
      {"exact transport distance matches an exhaustive oracle",
       criterion_exact_vs_oracle},
      {"distance family ordering, triangle inequality, entropic bound",
       criterion_distance_relations},
      {"hit-based kernel preserves its target on an enumerable toy",
       criterion_kernel_invariance},
      {"location model: particles approach the exact posterior in transport "
       "distance",
       criterion_location_recovery},
      {"autoregression: marginal comparison finds the variance, delay "
       "embedding finds the dependence",
       criterion_autoregression},
      {"quantile model: central intervals cover the generating parameters",
       criterion_quantile_model},
      {"queueing model: support bound holds exactly and the posterior "
       "contracts",
       criterion_queueing_model},
      {"trend model: curve matching reduces noise-parameter bias",
       criterion_trend_model},
      {"volatility model: second stage sharpens the jump-rate estimate",
       criterion_volatility_two_stage},
      {"identical results with 1 and 8 workers for every experiment",
       criterion_worker_determinism},
      {"distance computations scale as documented", criterion_scaling,
       /*gating=*/false},
  };

  std::vector<bool> selected(criteria.size(), argc <= 1);
  for (int a = 1; a < argc; ++a) {
    const int k = std::atoi(argv[a]);
    if (k >= 1 && k <= static_cast<int>(criteria.size())) selected[k - 1] = true;
  }

  int failures = 0;
  for (size_t i = 0; i < criteria.size(); ++i) {
    if (!selected[i]) continue;
    const auto& c = criteria[i];
    std::string note;
    bool ok = false;
    const double t0 = now_seconds();
    try {
      ok = c.run(note);
    } catch (const std::exception& e) {
      note = std::string("exception: ") + e.what();
    }
    const double dt = now_seconds() - t0;
    std::printf("%s %2zu/11 %s%s [%.1fs]%s\n", ok ? "PASS" : "FAIL", i + 1,
                c.description.c_str(), c.gating ? "" : " (informational)", dt,
                note.empty() ? "" : ("\n        " + note).c_str());
    std::fflush(stdout);
    if (!ok && c.gating) ++failures;
  }
  if (failures > 0) {
    std::printf("%d gating criteria failed\n", failures);
    return 1;
  }
  std::printf("all selected gating criteria passed\n");
  return 0;
}
