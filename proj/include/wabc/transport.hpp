#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wabc/ground_metric.hpp"
#include "wabc/point_cloud.hpp"
#include "wabc/random.hpp"
#include "wabc/types.hpp"

namespace wabc {

// Matching between equal-size clouds: x_i is paired with y_{sigma[i]}.
struct Assignment {
  std::vector<int> sigma;
};

// Coupling between clouds of size n and m; rows sum to 1/n, columns to 1/m.
struct TransportPlan {
  Matrix gamma;
};

struct DistanceResult {
  double value = 0.0;             // the distance (see per-op docs for scale)
  std::string method;
  long iterations = 0;            // sweeps / Sinkhorn iterations where relevant
  bool converged = true;          // Sinkhorn only
  double marginal_error = 0.0;    // Sinkhorn only: final L-inf violation
  std::optional<Assignment> assignment;
};

// Exact transport distance between equal-size 1-d clouds by sorting:
// value = (n^-1 sum |x_(i) - y_(i)|^p)^(1/p).
DistanceResult wasserstein_1d(const PointCloud& x, const PointCloud& y, double p = 1.0);

// Exact transport distance between equal-size clouds via the assignment
// problem on costs rho(x_i, y_j)^p; value = (cost / n)^(1/p).
DistanceResult exact_wasserstein(const PointCloud& x, const PointCloud& y,
                                 const GroundMetric& m);

// Exhaustive minimum over all n! pairings; oracle for small n (<= 9).
DistanceResult brute_force_wasserstein(const PointCloud& x, const PointCloud& y,
                                       const GroundMetric& m);

// Local improvement of the curve-sorted pairing: sweep all pairs (i, j) and
// swap assignments whenever that lowers the cost by more than 1e-12; stops
// after a sweep with no swap or after max_sweeps.  Sits between the exact
// distance and the curve-sorted distance.
DistanceResult swapping_distance(const PointCloud& x, const PointCloud& y,
                                 const GroundMetric& m, int max_sweeps = 100);

struct SinkhornResult {
  DistanceResult result;  // value = sum_ij rho(x_i, y_j)^p * gamma_ij  (p-th power scale)
  TransportPlan plan;
};

// Entropy-regularized transport solved with log-domain scaling iterations.
// zeta <= 0 selects the default 0.05 * median pairwise cost.  Iterates until
// the worst marginal violation is <= tol or max_iter is hit (reported via
// converged / marginal_error, not an exception).
SinkhornResult sinkhorn_divergence(const PointCloud& x, const PointCloud& y,
                                   const GroundMetric& m, double zeta = -1.0,
                                   double tol = 1e-9, long max_iter = 10000);

// Squared maximum mean discrepancy with a Gaussian kernel
// k(a, b) = exp(-||a - b||^2 / (2 h^2)); biased V-statistic, always >= 0.
double mmd_squared(const PointCloud& x, const PointCloud& y, double bandwidth);

// Median of pairwise L1 distances ||x_i - x_j||_1.  By default only pairs
// i < j enter; include_diagonal adds the n zero self-distances.
double median_heuristic_bandwidth(const PointCloud& x, bool include_diagonal = false);

// m rows drawn without replacement, original order preserved; m = n returns
// the cloud unchanged.
PointCloud subsample(const PointCloud& x, Eigen::Index m, RandomStream& rng);

// Helper shared by several ops: rho(x_i, y_j)^p for all pairs.
Matrix pairwise_cost(const PointCloud& x, const PointCloud& y, const GroundMetric& m);

}  // namespace wabc
