#include "wabc/hilbert.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "wabc/transport.hpp"

namespace wabc {

namespace {

void check_dims(int d, int bits) {
  if (d < 1 || d > kHilbertMaxDim)
    throw std::invalid_argument("hilbert: dimension must lie in [1, 8]");
  if (bits < 1 || bits > 32 || d * bits > 128)
    throw std::invalid_argument(
        "hilbert: need 1 <= bits <= 32 and d * bits <= 128");
}

// Skilling's AxestoTranspose: in-place conversion of cell coordinates to the
// transposed Hilbert representation (d words of 'bits' significant bits).
void axes_to_transpose(std::uint32_t* X, int bits, int d) {
  const std::uint32_t M = 1u << (bits - 1);
  // Inverse undo.
  for (std::uint32_t Q = M; Q > 1; Q >>= 1) {
    const std::uint32_t P = Q - 1;
    for (int i = 0; i < d; ++i) {
      if (X[i] & Q) {
        X[0] ^= P;
      } else {
        const std::uint32_t t = (X[0] ^ X[i]) & P;
        X[0] ^= t;
        X[i] ^= t;
      }
    }
  }
  // Gray encode.
  for (int i = 1; i < d; ++i) X[i] ^= X[i - 1];
  std::uint32_t t = 0;
  for (std::uint32_t Q = M; Q > 1; Q >>= 1)
    if (X[d - 1] & Q) t ^= Q - 1;
  for (int i = 0; i < d; ++i) X[i] ^= t;
}

}  // namespace

HilbertBox joint_bounding_box(const std::vector<const PointCloud*>& clouds) {
  if (clouds.empty())
    throw std::invalid_argument("joint_bounding_box: no clouds");
  const Eigen::Index d = clouds[0]->dim();
  Vector lo = Vector::Constant(d, std::numeric_limits<double>::infinity());
  Vector hi = Vector::Constant(d, -std::numeric_limits<double>::infinity());
  for (const PointCloud* c : clouds) {
    require_valid(*c, "joint_bounding_box");
    if (c->dim() != d)
      throw std::invalid_argument("joint_bounding_box: dimension mismatch");
    lo = lo.cwiseMin(c->points.colwise().minCoeff().transpose());
    hi = hi.cwiseMax(c->points.colwise().maxCoeff().transpose());
  }
  for (Eigen::Index j = 0; j < d; ++j) {
    const double span = hi(j) - lo(j);
    const double margin = 1e-9 * std::max({std::fabs(lo(j)), std::fabs(hi(j)), span});
    lo(j) -= margin;
    hi(j) += margin;
  }
  return HilbertBox{std::move(lo), std::move(hi)};
}

HilbertIndex hilbert_index(const Eigen::Ref<const Eigen::RowVectorXd>& point,
                           const HilbertBox& box, int bits) {
  const int d = static_cast<int>(point.size());
  check_dims(d, bits);
  if (box.lo.size() != d || box.hi.size() != d)
    throw std::invalid_argument("hilbert_index: box dimension mismatch");
  const std::uint32_t cells = (bits == 32) ? 0xFFFFFFFFu : ((1u << bits) - 1u);
  std::uint32_t X[kHilbertMaxDim] = {0};
  for (int j = 0; j < d; ++j) {
    const double span = box.hi(j) - box.lo(j);
    if (!(span > 0.0)) {
      X[j] = 1u << (bits - 1);  // degenerate axis: middle cell
      continue;
    }
    const double u = (point(j) - box.lo(j)) / span;
    if (u < 0.0 || u > 1.0)
      throw std::invalid_argument("hilbert_index: point outside box");
    const double scaled = u * std::ldexp(1.0, bits);
    std::uint32_t cell = scaled >= static_cast<double>(cells)
                             ? cells
                             : static_cast<std::uint32_t>(scaled);
    X[j] = cell;
  }
  if (d > 1) axes_to_transpose(X, bits, d);
  HilbertIndex h = 0;
  for (int b = bits - 1; b >= 0; --b)
    for (int j = 0; j < d; ++j)
      h = (h << 1) | ((X[j] >> b) & 1u);
  return h;
}

std::vector<int> hilbert_sort_order(const PointCloud& c, const HilbertBox& box,
                                    int bits) {
  require_valid(c, "hilbert_sort_order");
  std::vector<HilbertIndex> key(c.n());
  for (Eigen::Index i = 0; i < c.n(); ++i)
    key[i] = hilbert_index(c.points.row(i), box, bits);
  std::vector<int> order(c.n());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    if (key[a] != key[b]) return key[a] < key[b];
    for (Eigen::Index j = 0; j < c.dim(); ++j) {
      if (c.points(a, j) != c.points(b, j)) return c.points(a, j) < c.points(b, j);
    }
    return a < b;
  });
  return order;
}

DistanceResult hilbert_distance(const PointCloud& x, const PointCloud& y,
                                const GroundMetric& m, const HilbertBox& box,
                                int bits) {
  require_valid(x, "hilbert_distance");
  require_valid(y, "hilbert_distance");
  if (x.dim() != y.dim())
    throw std::invalid_argument("hilbert_distance: dimension mismatch");
  if (x.n() != y.n())
    throw std::invalid_argument("hilbert_distance: clouds must have equal size");
  validate_metric(m);
  const std::vector<int> ox = hilbert_sort_order(x, box, bits);
  const std::vector<int> oy = hilbert_sort_order(y, box, bits);
  double acc = 0.0;
  std::vector<int> sigma(x.n());
  for (Eigen::Index k = 0; k < x.n(); ++k) {
    sigma[ox[k]] = oy[k];
    const double rho =
        ground_distance(x.points.row(ox[k]), y.points.row(oy[k]), m);
    acc += m.p == 1.0 ? rho : std::pow(rho, m.p);
  }
  DistanceResult r;
  r.method = "hilbert";
  const double mean_cost = acc / static_cast<double>(x.n());
  r.value = m.p == 1.0 ? mean_cost : std::pow(mean_cost, 1.0 / m.p);
  r.assignment = Assignment{std::move(sigma)};
  return r;
}

DistanceResult hilbert_distance(const PointCloud& x, const PointCloud& y,
                                const GroundMetric& m, int bits) {
  const HilbertBox box = joint_bounding_box({&x, &y});
  return hilbert_distance(x, y, m, box, bits);
}

}  // namespace wabc
