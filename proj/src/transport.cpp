#include "wabc/transport.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wabc/assignment.hpp"
#include "wabc/hilbert.hpp"

namespace wabc {

namespace {

void require_pair(const PointCloud& x, const PointCloud& y, const char* who,
                  bool equal_sizes) {
  require_valid(x, who);
  require_valid(y, who);
  if (x.dim() != y.dim())
    throw std::invalid_argument(std::string(who) + ": dimension mismatch");
  if (equal_sizes && x.n() != y.n())
    throw std::invalid_argument(std::string(who) + ": clouds must have equal size");
}

double cost_to_value(double mean_cost, double p) {
  return p == 1.0 ? mean_cost : std::pow(mean_cost, 1.0 / p);
}

}  // namespace

Matrix pairwise_cost(const PointCloud& x, const PointCloud& y, const GroundMetric& m) {
  Matrix c(x.n(), y.n());
  for (Eigen::Index i = 0; i < x.n(); ++i)
    for (Eigen::Index j = 0; j < y.n(); ++j) {
      const double rho = ground_distance(x.points.row(i), y.points.row(j), m);
      c(i, j) = m.p == 1.0 ? rho : std::pow(rho, m.p);
    }
  return c;
}

DistanceResult wasserstein_1d(const PointCloud& x, const PointCloud& y, double p) {
  require_pair(x, y, "wasserstein_1d", true);
  if (x.dim() != 1)
    throw std::invalid_argument("wasserstein_1d: 1-d clouds required");
  if (!(p >= 1.0)) throw std::invalid_argument("wasserstein_1d: p must be >= 1");
  std::vector<double> xs(x.points.data(), x.points.data() + x.n());
  std::vector<double> ys(y.points.data(), y.points.data() + y.n());
  std::sort(xs.begin(), xs.end());
  std::sort(ys.begin(), ys.end());
  double acc = 0.0;
  for (size_t i = 0; i < xs.size(); ++i) {
    const double d = std::fabs(xs[i] - ys[i]);
    acc += p == 1.0 ? d : std::pow(d, p);
  }
  DistanceResult r;
  r.method = "wasserstein_1d";
  r.value = cost_to_value(acc / static_cast<double>(x.n()), p);
  return r;
}

DistanceResult exact_wasserstein(const PointCloud& x, const PointCloud& y,
                                 const GroundMetric& m) {
  require_pair(x, y, "exact_wasserstein", true);
  validate_metric(m);
  const Matrix cost = pairwise_cost(x, y, m);
  std::vector<int> row_to_col;
  const double total = solve_assignment(cost, row_to_col);
  DistanceResult r;
  r.method = "wasserstein";
  r.value = cost_to_value(total / static_cast<double>(x.n()), m.p);
  r.assignment = Assignment{std::move(row_to_col)};
  return r;
}

DistanceResult brute_force_wasserstein(const PointCloud& x, const PointCloud& y,
                                       const GroundMetric& m) {
  require_pair(x, y, "brute_force_wasserstein", true);
  validate_metric(m);
  const Eigen::Index n = x.n();
  if (n > 9)
    throw std::invalid_argument("brute_force_wasserstein: n must be <= 9");
  const Matrix cost = pairwise_cost(x, y, m);
  std::vector<int> perm(n), best(n);
  std::iota(perm.begin(), perm.end(), 0);
  best = perm;
  double best_total = std::numeric_limits<double>::infinity();
  do {
    double total = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) total += cost(i, perm[i]);
    if (total < best_total) {
      best_total = total;
      best = perm;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  DistanceResult r;
  r.method = "brute_force";
  r.value = cost_to_value(best_total / static_cast<double>(n), m.p);
  r.assignment = Assignment{std::move(best)};
  return r;
}

DistanceResult swapping_distance(const PointCloud& x, const PointCloud& y,
                                 const GroundMetric& m, int max_sweeps) {
  require_pair(x, y, "swapping_distance", true);
  validate_metric(m);
  if (max_sweeps < 1)
    throw std::invalid_argument("swapping_distance: max_sweeps must be >= 1");
  const Eigen::Index n = x.n();
  const HilbertBox box = joint_bounding_box({&x, &y});
  const std::vector<int> ox = hilbert_sort_order(x, box);
  const std::vector<int> oy = hilbert_sort_order(y, box);
  // sigma[i] = partner of x_i, initialized from the curve-sorted pairing.
  std::vector<int> sigma(n);
  for (Eigen::Index k = 0; k < n; ++k) sigma[ox[k]] = oy[k];

  auto pair_cost = [&](Eigen::Index i, int j) {
    const double rho = ground_distance(x.points.row(i), y.points.row(j), m);
    return m.p == 1.0 ? rho : std::pow(rho, m.p);
  };
  std::vector<double> c(n);
  for (Eigen::Index i = 0; i < n; ++i) c[i] = pair_cost(i, sigma[i]);

  constexpr double kImprove = 1e-12;
  long sweeps = 0;
  bool changed = true;
  while (changed && sweeps < max_sweeps) {
    changed = false;
    ++sweeps;
    for (Eigen::Index i = 0; i + 1 < n; ++i)
      for (Eigen::Index j = i + 1; j < n; ++j) {
        const double cij = pair_cost(i, sigma[j]);
        const double cji = pair_cost(j, sigma[i]);
        if (c[i] + c[j] - (cij + cji) > kImprove) {
          std::swap(sigma[i], sigma[j]);
          c[i] = cij;
          c[j] = cji;
          changed = true;
        }
      }
  }
  DistanceResult r;
  r.method = "swap";
  r.iterations = sweeps;
  r.value = cost_to_value(std::accumulate(c.begin(), c.end(), 0.0) /
                              static_cast<double>(n),
                          m.p);
  r.assignment = Assignment{std::move(sigma)};
  return r;
}

double mmd_squared(const PointCloud& x, const PointCloud& y, double bandwidth) {
  require_pair(x, y, "mmd_squared", false);
  if (!(bandwidth > 0.0) || !std::isfinite(bandwidth))
    throw std::invalid_argument("mmd_squared: bandwidth must be finite and > 0");
  const double inv = 1.0 / (2.0 * bandwidth * bandwidth);
  auto kxx = [&](const PointCloud& a, const PointCloud& b) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < a.n(); ++i)
      for (Eigen::Index j = 0; j < b.n(); ++j)
        s += std::exp(-(a.points.row(i) - b.points.row(j)).squaredNorm() * inv);
    return s;
  };
  const double n = static_cast<double>(x.n());
  const double m = static_cast<double>(y.n());
  const double v = kxx(x, x) / (n * n) + kxx(y, y) / (m * m) - 2.0 * kxx(x, y) / (n * m);
  return std::max(v, 0.0);  // V-statistic; clamp fp noise at the boundary
}

double median_heuristic_bandwidth(const PointCloud& x, bool include_diagonal) {
  require_valid(x, "median_heuristic_bandwidth");
  if (x.n() < 2)
    throw std::invalid_argument("median_heuristic_bandwidth: need >= 2 points");
  std::vector<double> d;
  d.reserve(static_cast<size_t>(x.n()) * (x.n() - 1) / 2 +
            (include_diagonal ? x.n() : 0));
  for (Eigen::Index i = 0; i < x.n(); ++i) {
    if (include_diagonal) d.push_back(0.0);
    for (Eigen::Index j = i + 1; j < x.n(); ++j)
      d.push_back((x.points.row(i) - x.points.row(j)).cwiseAbs().sum());
  }
  std::sort(d.begin(), d.end());
  const size_t k = d.size();
  const double med = k % 2 ? d[k / 2] : 0.5 * (d[k / 2 - 1] + d[k / 2]);
  if (!(med > 0.0))
    throw std::invalid_argument(
        "median_heuristic_bandwidth: degenerate cloud (median distance is 0)");
  return med;
}

PointCloud subsample(const PointCloud& x, Eigen::Index m, RandomStream& rng) {
  require_valid(x, "subsample");
  if (m < 1 || m > x.n())
    throw std::invalid_argument("subsample: m must lie in [1, n]");
  // Partial Fisher-Yates over an index array, then restore original order.
  std::vector<Eigen::Index> idx(x.n());
  std::iota(idx.begin(), idx.end(), 0);
  for (Eigen::Index i = 0; i < m; ++i) {
    const Eigen::Index j =
        i + static_cast<Eigen::Index>(rng.uniform_int(static_cast<std::uint64_t>(x.n() - i)));
    std::swap(idx[i], idx[j]);
  }
  std::vector<Eigen::Index> keep(idx.begin(), idx.begin() + m);
  std::sort(keep.begin(), keep.end());
  Matrix out(m, x.dim());
  for (Eigen::Index i = 0; i < m; ++i) out.row(i) = x.points.row(keep[i]);
  return PointCloud(std::move(out));
}

}  // namespace wabc
