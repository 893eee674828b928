#pragma once

#include <optional>

#include "wabc/models.hpp"
#include "wabc/point_cloud.hpp"
#include "wabc/random.hpp"
#include "wabc/types.hpp"

namespace wabc {

struct MhConfig {
  long iterations = 10000;     // post burn-in draws per chain
  long burnin = 1000;
  int chains = 5;
  int thin = 1;
  std::uint64_t seed = 1;
  // Proposal covariance; when absent it is (2.38^2 / d) times the sample
  // covariance of a 2000-iteration pilot run.
  std::optional<Matrix> proposal_cov;
};

struct MhResult {
  Matrix draws;           // kept draws from all chains, concatenated
  double acceptance_rate; // across kept portion of all chains
};

// Random-walk Metropolis targeting prior x likelihood; the model must supply
// loglik.  Chains start from prior draws and are concatenated after per-chain
// burn-in.
MhResult metropolis_hastings(const GenerativeModel& model, const Matrix& data,
                             const MhConfig& cfg);

// Exact transport distance (p = 1, Euclidean ground metric) between two
// parameter clouds; the larger cloud is subsampled to the smaller size first.
double cloud_w1(const PointCloud& a, const PointCloud& b, RandomStream& rng);

}  // namespace wabc
