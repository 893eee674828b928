#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "wabc/hilbert.hpp"
#include "wabc/models.hpp"
#include "wabc/random.hpp"
#include "wabc/series.hpp"
#include "wabc/transport.hpp"
#include "wabc/types.hpp"

namespace wabc {

enum class DistanceMethod { wasserstein, hilbert, swap, sinkhorn, mmd, euclidean, summary };

DistanceMethod parse_distance_method(const std::string& name);
std::string distance_method_name(DistanceMethod m);

// How observed and simulated data are compared inside the sampler.
struct DistanceSpec {
  DistanceMethod method = DistanceMethod::wasserstein;
  EmbeddingSpec embedding;
  GroundMetric metric;
  double sinkhorn_zeta = -1.0;  // <= 0: 0.05 * median pairwise cost per call
  int acf_lags = 50;            // summary method / stage two
  int hilbert_bits = kHilbertDefaultBits;
};

// Evaluates the distance between the observed data (fixed at construction)
// and a simulated data set.  The mmd bandwidth and the curve-matching lambda
// are resolved from the observed data once.  After freeze_stage_one the
// distance becomes |acf(y) - acf(z)| gated by the stage-one distance being
// strictly below the frozen threshold (+inf otherwise).
class DistanceEvaluator {
 public:
  DistanceEvaluator(const GenerativeModel& model, const Matrix& observed,
                    DistanceSpec spec);

  double operator()(const Matrix& simulated, const Vector& theta) const;
  double stage_one(const Matrix& simulated, const Vector& theta) const;

  void freeze_stage_one(double epsilon_h);
  bool two_stage() const { return stage_two_; }
  const DistanceSpec& spec() const { return spec_; }

 private:
  PointCloud embed(const Matrix& data, const Vector& theta) const;

  const GenerativeModel* model_;
  Matrix observed_;
  DistanceSpec spec_;
  PointCloud observed_cloud_;       // empty for residual embeddings
  bool observed_cloud_ready_ = false;
  double mmd_bandwidth_ = 0.0;
  double observed_summary_ = 0.0;
  bool stage_two_ = false;
  double epsilon_h_ = 0.0;
};

struct Particle {
  Vector theta;
  Matrix data;
  double dist = 0.0;
};

struct SmcConfig {
  int n_particles = 2048;
  double alpha = 0.5;        // unique-particle survival fraction
  int r = 2;                 // hits per proposal in the MCMC kernel
  int mix_components = 5;
  long budget = 100000;      // total model simulations
  std::uint64_t seed = 1;
  int workers = 1;
  long trial_cap = 10000;    // per-proposal simulation cap in the kernel
  double epsilon_target = 0.0;  // stop once the threshold reaches this value
  Eigen::Index n_obs = 0;    // filled from the observed data
};

void validate_config(const SmcConfig& cfg);

struct ThresholdTraceRow {
  int step = 0;
  double epsilon = 0.0;
  long cumulative_sims = 0;
  int unique_count = 0;
  double wall_seconds = 0.0;
};

struct SmcState {
  std::vector<Particle> particles;
  std::vector<ThresholdTraceRow> trace;
  double epsilon = 0.0;
  long total_sims = 0;
  int step = 0;
  bool terminated_early = false;  // threshold could no longer decrease
};

// Independence proposal used by the MCMC kernel.
class Proposal {
 public:
  virtual ~Proposal() = default;
  virtual Vector sample(RandomStream& rng) const = 0;
  virtual double logpdf(const Vector& theta) const = 0;
};

// Gaussian mixture with full covariances, strictly positive everywhere.
class MixtureProposal : public Proposal {
 public:
  MixtureProposal(std::vector<double> weights, std::vector<Vector> means,
                  std::vector<Matrix> covariances);
  Vector sample(RandomStream& rng) const override;
  double logpdf(const Vector& theta) const override;
  int components() const { return static_cast<int>(weights_.size()); }
  const std::vector<double>& weights() const { return weights_; }
  const std::vector<Vector>& means() const { return means_; }

 private:
  std::vector<double> weights_;
  std::vector<Vector> means_;
  std::vector<Matrix> chol_;       // lower Cholesky factors
  std::vector<double> log_norm_;   // -log((2 pi)^{d/2} |L|)
};

// Weighted EM fit (k-means++ seeding, <= 50 iterations or relative
// log-likelihood change < 1e-8, diagonal regularization 1e-8 * trace / d).
// Falls back to fewer components when the population has fewer distinct
// points, and to a single Gaussian with fallback_cov when it is degenerate.
MixtureProposal fit_mixture_proposal(const Matrix& thetas, const Vector& weights,
                                     int k, RandomStream& rng,
                                     const Matrix& fallback_cov);

// Next threshold: smallest value that keeps at least ceil(alpha * N) unique
// particles at or below it, i.e. the ceil(alpha*N)-th smallest distance among
// distinct particles.  Returns nullopt (terminate) when no strictly smaller
// threshold achieves that.
std::optional<double> adapt_threshold(const std::vector<Particle>& particles,
                                      double alpha, double prev_epsilon);

// Systematic resampling; deterministic given the stream.  Output indices are
// nondecreasing and each index i appears between floor(N w_i) and
// ceil(N w_i) times.
std::vector<int> systematic_resample(const std::vector<double>& weights,
                                     RandomStream& rng);

struct RhitResult {
  Particle particle;
  long sims = 0;
  bool accepted = false;
  bool capped = false;
};

// One r-hit MCMC step targeting the ABC posterior at threshold eps.
// A proposal theta' is drawn from prop; simulation repeats until r hits at
// theta' (N' trials) and r-1 hits at the current theta (M trials); acceptance
// probability min{1, [pi(theta') q(theta) M] / [pi(theta) q(theta') (N'-1)]}.
// On acceptance the particle carries one of the r hit data sets, chosen
// uniformly.  Proposals outside the prior support cost zero simulations.
RhitResult rhit_mcmc_step(const Particle& current, double eps,
                          const GenerativeModel& model, Eigen::Index n_obs,
                          const DistanceEvaluator& eval, const Proposal& prop,
                          int r, long trial_cap, RandomStream& rng);

using StepCallback = std::function<void(const SmcState&)>;

// Adaptive ABC sampler: prior initialization, threshold adaptation,
// systematic resampling and one r-hit rejuvenation pass per step, until the
// simulation budget is spent or the threshold stops decreasing.
SmcState run_smc(const GenerativeModel& model, const Matrix& observed,
                 const DistanceSpec& spec, const SmcConfig& cfg,
                 const StepCallback& on_step = nullptr);

struct TwoStageResult {
  SmcState stage1;
  SmcState stage2;
  double epsilon_h = 0.0;  // stage-one threshold frozen into stage two
};

// Stage one runs the given spec; stage two freezes the final stage-one
// threshold as a gate and continues with the |acf(y)-acf(z)| distance under
// a fresh threshold schedule and its own budget.
TwoStageResult run_two_stage(const GenerativeModel& model, const Matrix& observed,
                             const DistanceSpec& stage1_spec, const SmcConfig& cfg,
                             long stage2_budget,
                             const StepCallback& on_step1 = nullptr,
                             const StepCallback& on_step2 = nullptr);

// Number of distinct parameter vectors.
int count_unique(const std::vector<Particle>& particles);

}  // namespace wabc
