#pragma once

#include <string>
#include <vector>

#include "wabc/point_cloud.hpp"
#include "wabc/types.hpp"

namespace wabc {

// Ordered observations y_1..y_T, each in R^{d_y}.  Unlike a point cloud the
// row order is meaningful.
struct Series {
  Matrix values;  // T x d_y

  Series() = default;
  explicit Series(Matrix v) : values(std::move(v)) {}

  Eigen::Index length() const { return values.rows(); }
  Eigen::Index ydim() const { return values.cols(); }
};

enum class EmbeddingKind { none, curve, delay, residual };

// How a simulated/observed data set is turned into a point cloud before a
// transport distance is computed.
struct EmbeddingSpec {
  EmbeddingKind kind = EmbeddingKind::none;

  // curve: time penalty weight; when use_aspect is set, lambda is derived from
  // the observed series via aspect_ratio_lambda(aspect_h, aspect_v).
  double lambda = 1.0;
  bool use_aspect = false;
  double aspect_h = 1.0;
  double aspect_v = 1.0;

  // delay
  std::vector<int> lags;  // strictly increasing, >= 1
  int stride = 1;

  // residual: parametric form selected by model tag ("ar1" or "cosine")
  std::string residual_tag;
};

// Augments each observation with its time index: row t -> (t, y_t), t = 1..T.
PointCloud curve_embed(const Series& s);

// lambda = ((max y - min y) / v) * (h / T) so that a plot window with aspect
// h:v weighs time and value displacements comparably.  Scalar series only.
double aspect_ratio_lambda(const Series& s, double h, double v);

// Delay embedding with newest coordinate first:
//   point(t) = (y_t, y_{t-lags[0]}, ..., y_{t-lags[k-1]})
// for t = max(lags)+1, max(lags)+1+stride, ... <= T.
PointCloud delay_embed(const Series& s, const std::vector<int>& lags, int stride);

// Model-specific residual reconstruction; see model docs for the forms.
//   ar1:    w_t = (y_t - phi * y_{t-1}) / sigma,           t = 2..T
//   cosine: w_t = (y_t - A cos(2 pi omega t + phi)) / sigma, t = 1..T
PointCloud residual_reconstruct(const Series& s, const std::string& model_tag,
                                const Vector& theta);

// Applies an embedding spec; lambda must already be resolved (use_aspect is
// handled by the caller, which knows the observed series).
PointCloud embed_series(const Series& s, const EmbeddingSpec& spec,
                        const Vector& theta);

}  // namespace wabc
