#include "wabc/series.hpp"

#include <cmath>
#include <stdexcept>

namespace wabc {

PointCloud curve_embed(const Series& s) {
  if (s.length() < 1) throw std::invalid_argument("curve_embed: empty series");
  Matrix out(s.length(), s.ydim() + 1);
  for (Eigen::Index t = 0; t < s.length(); ++t) {
    out(t, 0) = static_cast<double>(t + 1);
    out.row(t).tail(s.ydim()) = s.values.row(t);
  }
  return PointCloud(std::move(out));
}

double aspect_ratio_lambda(const Series& s, double h, double v) {
  if (s.ydim() != 1)
    throw std::invalid_argument("aspect_ratio_lambda: scalar series required");
  if (s.length() < 2)
    throw std::invalid_argument("aspect_ratio_lambda: need at least 2 values");
  if (!(h > 0.0) || !(v > 0.0))
    throw std::invalid_argument("aspect_ratio_lambda: aspect sides must be > 0");
  const double range = s.values.maxCoeff() - s.values.minCoeff();
  if (!(range > 0.0))
    throw std::invalid_argument("aspect_ratio_lambda: series is constant");
  return (range / v) * (h / static_cast<double>(s.length()));
}

PointCloud delay_embed(const Series& s, const std::vector<int>& lags, int stride) {
  if (lags.empty()) throw std::invalid_argument("delay_embed: no lags");
  for (size_t i = 0; i < lags.size(); ++i) {
    if (lags[i] < 1) throw std::invalid_argument("delay_embed: lags must be >= 1");
    if (i > 0 && lags[i] <= lags[i - 1])
      throw std::invalid_argument("delay_embed: lags must be strictly increasing");
  }
  if (stride < 1) throw std::invalid_argument("delay_embed: stride must be >= 1");
  const int max_lag = lags.back();
  const Eigen::Index T = s.length();
  if (T <= max_lag)
    throw std::invalid_argument("delay_embed: series shorter than max lag + 1");
  const Eigen::Index d = s.ydim();
  const Eigen::Index count = (T - max_lag + stride - 1) / stride;
  Matrix out(count, d * static_cast<Eigen::Index>(lags.size() + 1));
  Eigen::Index row = 0;
  // 1-based time: t = max_lag + 1, max_lag + 1 + stride, ...
  for (Eigen::Index t = max_lag; t < T; t += stride) {
    out.row(row).segment(0, d) = s.values.row(t);
    for (size_t k = 0; k < lags.size(); ++k)
      out.row(row).segment(d * static_cast<Eigen::Index>(k + 1), d) =
          s.values.row(t - lags[k]);
    ++row;
  }
  return PointCloud(std::move(out));
}

PointCloud residual_reconstruct(const Series& s, const std::string& model_tag,
                                const Vector& theta) {
  if (s.ydim() != 1)
    throw std::invalid_argument("residual_reconstruct: scalar series required");
  const Eigen::Index T = s.length();
  if (model_tag == "ar1") {
    if (theta.size() != 2)
      throw std::invalid_argument("residual_reconstruct: ar1 needs (phi, log sigma)");
    const double phi = theta(0);
    const double sigma = std::exp(theta(1));
    if (!(sigma > 0.0))
      throw std::invalid_argument("residual_reconstruct: sigma must be > 0");
    if (T < 2) throw std::invalid_argument("residual_reconstruct: series too short");
    Matrix out(T - 1, 1);
    for (Eigen::Index t = 1; t < T; ++t)
      out(t - 1, 0) = (s.values(t, 0) - phi * s.values(t - 1, 0)) / sigma;
    return PointCloud(std::move(out));
  }
  if (model_tag == "cosine") {
    if (theta.size() != 4)
      throw std::invalid_argument(
          "residual_reconstruct: cosine needs (omega, phi, log sigma, log A)");
    const double omega = theta(0);
    const double phase = theta(1);
    const double sigma = std::exp(theta(2));
    const double amp = std::exp(theta(3));
    if (!(sigma > 0.0))
      throw std::invalid_argument("residual_reconstruct: sigma must be > 0");
    Matrix out(T, 1);
    for (Eigen::Index t = 0; t < T; ++t) {
      const double mean = amp * std::cos(2.0 * M_PI * omega * (t + 1) + phase);
      out(t, 0) = (s.values(t, 0) - mean) / sigma;
    }
    return PointCloud(std::move(out));
  }
  throw std::invalid_argument("residual_reconstruct: unknown model tag '" +
                              model_tag + "'");
}

PointCloud embed_series(const Series& s, const EmbeddingSpec& spec,
                        const Vector& theta) {
  switch (spec.kind) {
    case EmbeddingKind::none:
      return PointCloud(s.values);
    case EmbeddingKind::curve:
      return curve_embed(s);
    case EmbeddingKind::delay:
      return delay_embed(s, spec.lags, spec.stride);
    case EmbeddingKind::residual:
      return residual_reconstruct(s, spec.residual_tag, theta);
  }
  throw std::logic_error("embed_series: unreachable");
}

}  // namespace wabc
