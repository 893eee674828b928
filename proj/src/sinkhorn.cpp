#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "wabc/transport.hpp"

namespace wabc {

namespace {

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const size_t k = v.size();
  return k % 2 ? v[k / 2] : 0.5 * (v[k / 2 - 1] + v[k / 2]);
}

}  // namespace

SinkhornResult sinkhorn_divergence(const PointCloud& x, const PointCloud& y,
                                   const GroundMetric& m, double zeta, double tol,
                                   long max_iter) {
  require_valid(x, "sinkhorn_divergence");
  require_valid(y, "sinkhorn_divergence");
  if (x.dim() != y.dim())
    throw std::invalid_argument("sinkhorn_divergence: dimension mismatch");
  validate_metric(m);
  if (!(tol > 0.0)) throw std::invalid_argument("sinkhorn_divergence: tol must be > 0");
  if (max_iter < 1)
    throw std::invalid_argument("sinkhorn_divergence: max_iter must be >= 1");

  const Eigen::Index n = x.n(), mm = y.n();
  const Matrix C = pairwise_cost(x, y, m);
  if (zeta <= 0.0) {
    std::vector<double> entries(C.data(), C.data() + C.size());
    const double med = median_of(std::move(entries));
    zeta = 0.05 * med;
    if (!(zeta > 0.0))
      throw std::invalid_argument(
          "sinkhorn_divergence: cannot derive zeta (median cost is 0)");
  }

  const double log_a = -std::log(static_cast<double>(n));
  const double log_b = -std::log(static_cast<double>(mm));
  Vector f = Vector::Zero(n), g = Vector::Zero(mm);

  auto lse_rows = [&](const Vector& gv, Vector& out) {
    // out_i = log sum_j exp((g_j - C_ij) / zeta)
    for (Eigen::Index i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index j = 0; j < mm; ++j)
        mx = std::max(mx, (gv(j) - C(i, j)) / zeta);
      double s = 0.0;
      for (Eigen::Index j = 0; j < mm; ++j)
        s += std::exp((gv(j) - C(i, j)) / zeta - mx);
      out(i) = mx + std::log(s);
    }
  };
  auto lse_cols = [&](const Vector& fv, Vector& out) {
    for (Eigen::Index j = 0; j < mm; ++j) {
      double mx = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < n; ++i)
        mx = std::max(mx, (fv(i) - C(i, j)) / zeta);
      double s = 0.0;
      for (Eigen::Index i = 0; i < n; ++i)
        s += std::exp((fv(i) - C(i, j)) / zeta - mx);
      out(j) = mx + std::log(s);
    }
  };

  Vector tmp_n(n), tmp_m(mm);
  long it = 0;
  double err = std::numeric_limits<double>::infinity();
  for (; it < max_iter; ++it) {
    lse_rows(g, tmp_n);
    f = zeta * (Vector::Constant(n, log_a) - tmp_n);
    lse_cols(f, tmp_m);
    g = zeta * (Vector::Constant(mm, log_b) - tmp_m);
    // Columns are exact after the g update; measure row violation.
    err = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double row = 0.0;
      for (Eigen::Index j = 0; j < mm; ++j)
        row += std::exp((f(i) + g(j) - C(i, j)) / zeta);
      err = std::max(err, std::fabs(row - std::exp(log_a)));
    }
    if (err <= tol) {
      ++it;
      break;
    }
  }

  SinkhornResult out;
  out.plan.gamma.resize(n, mm);
  double total = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < mm; ++j) {
      const double gij = std::exp((f(i) + g(j) - C(i, j)) / zeta);
      out.plan.gamma(i, j) = gij;
      total += C(i, j) * gij;
    }
  out.result.method = "sinkhorn";
  out.result.value = total;
  out.result.iterations = it;
  out.result.converged = err <= tol;
  out.result.marginal_error = err;
  return out;
}

}  // namespace wabc
