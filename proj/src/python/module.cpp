// Python bindings for the core operations: distances, embeddings, model
// simulation, the adaptive sampler, and the reference MCMC sampler.

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <cstdint>
#include <map>
#include <string>

#include "wabc/hilbert.hpp"
#include "wabc/models.hpp"
#include "wabc/reference.hpp"
#include "wabc/run_config.hpp"
#include "wabc/series.hpp"
#include "wabc/smc.hpp"
#include "wabc/transport.hpp"

namespace py = pybind11;

namespace {

wabc::GroundMetric make_metric(const std::string& kind, double p, double lambda) {
  return wabc::parse_metric_kind(kind, p, lambda);
}

py::dict result_to_dict(const wabc::DistanceResult& r) {
  py::dict d;
  d["value"] = r.value;
  d["method"] = r.method;
  d["iterations"] = r.iterations;
  d["converged"] = r.converged;
  d["marginal_error"] = r.marginal_error;
  return d;
}

}  // namespace

PYBIND11_MODULE(_wabc, m) {
  m.doc() = "transport-distance ABC core operations";

  m.def(
      "wasserstein",
      [](const wabc::Matrix& x, const wabc::Matrix& y, const std::string& metric,
         double p, double lambda) {
        const wabc::PointCloud cx(x), cy(y);
        if (cx.dim() == 1 && cx.n() == cy.n())
          return result_to_dict(wabc::wasserstein_1d(cx, cy, p));
        return result_to_dict(
            wabc::exact_wasserstein(cx, cy, make_metric(metric, p, lambda)));
      },
      py::arg("x"), py::arg("y"), py::arg("metric") = "euclidean",
      py::arg("p") = 1.0, py::arg("lambda") = 0.0);

  m.def(
      "hilbert_distance",
      [](const wabc::Matrix& x, const wabc::Matrix& y, const std::string& metric,
         double p, double lambda, int bits) {
        return result_to_dict(wabc::hilbert_distance(
            wabc::PointCloud(x), wabc::PointCloud(y), make_metric(metric, p, lambda),
            bits));
      },
      py::arg("x"), py::arg("y"), py::arg("metric") = "euclidean",
      py::arg("p") = 1.0, py::arg("lambda") = 0.0,
      py::arg("bits") = wabc::kHilbertDefaultBits);

  m.def(
      "swapping_distance",
      [](const wabc::Matrix& x, const wabc::Matrix& y, const std::string& metric,
         double p, double lambda, int max_sweeps) {
        return result_to_dict(wabc::swapping_distance(
            wabc::PointCloud(x), wabc::PointCloud(y), make_metric(metric, p, lambda),
            max_sweeps));
      },
      py::arg("x"), py::arg("y"), py::arg("metric") = "euclidean",
      py::arg("p") = 1.0, py::arg("lambda") = 0.0, py::arg("max_sweeps") = 100);

  m.def(
      "sinkhorn",
      [](const wabc::Matrix& x, const wabc::Matrix& y, double zeta, double tol,
         long max_iter, const std::string& metric, double p, double lambda) {
        return result_to_dict(
            wabc::sinkhorn_divergence(wabc::PointCloud(x), wabc::PointCloud(y),
                                      make_metric(metric, p, lambda), zeta, tol,
                                      max_iter)
                .result);
      },
      py::arg("x"), py::arg("y"), py::arg("zeta") = -1.0, py::arg("tol") = 1e-9,
      py::arg("max_iter") = 10000, py::arg("metric") = "euclidean",
      py::arg("p") = 2.0, py::arg("lambda") = 0.0);

  m.def(
      "mmd_squared",
      [](const wabc::Matrix& x, const wabc::Matrix& y, double bandwidth) {
        const wabc::PointCloud cx(x), cy(y);
        const double h =
            bandwidth > 0.0 ? bandwidth : wabc::median_heuristic_bandwidth(cx);
        return wabc::mmd_squared(cx, cy, h);
      },
      py::arg("x"), py::arg("y"), py::arg("bandwidth") = -1.0);

  m.def(
      "hilbert_index",
      [](const wabc::Vector& u, const wabc::Vector& lo, const wabc::Vector& hi,
         int bits) {
        const wabc::HilbertIndex h =
            wabc::hilbert_index(u, wabc::HilbertBox{lo, hi}, bits);
        // Convert the 128-bit key through a python integer.
        const auto high = static_cast<std::uint64_t>(h >> 64);
        const auto low = static_cast<std::uint64_t>(h);
        return (py::int_(high) << py::int_(64)) | py::int_(low);
      },
      py::arg("u"), py::arg("lo"), py::arg("hi"),
      py::arg("bits") = wabc::kHilbertDefaultBits);

  m.def(
      "embed",
      [](const wabc::Matrix& series, const std::string& kind, double lambda,
         const std::vector<int>& lags, int stride) {
        wabc::EmbeddingSpec spec;
        if (kind == "curve") {
          spec.kind = wabc::EmbeddingKind::curve;
          spec.lambda = lambda;
        } else if (kind == "delay") {
          spec.kind = wabc::EmbeddingKind::delay;
          spec.lags = lags;
          spec.stride = stride;
        } else if (kind == "none") {
          spec.kind = wabc::EmbeddingKind::none;
        } else {
          throw std::invalid_argument("unknown embedding kind: " + kind);
        }
        return wabc::embed_series(wabc::Series(series), spec, wabc::Vector()).points;
      },
      py::arg("series"), py::arg("kind"), py::arg("lambda") = 1.0,
      py::arg("lags") = std::vector<int>{1}, py::arg("stride") = 1);

  m.def("model_names", &wabc::model_names);

  m.def(
      "simulate",
      [](const std::string& model, const wabc::Vector& theta, long n,
         std::uint64_t seed) {
        const wabc::GenerativeModel& mod = wabc::model_registry(model);
        if (!mod.space.contains(theta))
          throw std::invalid_argument("theta lies outside the prior support");
        wabc::RandomStream rng(seed);
        return mod.simulate(theta, n, rng);
      },
      py::arg("model"), py::arg("theta"), py::arg("n"), py::arg("seed") = 1);

  m.def(
      "prior_sample",
      [](const std::string& model, long n, std::uint64_t seed) {
        const wabc::GenerativeModel& mod = wabc::model_registry(model);
        wabc::RandomStream rng(seed);
        wabc::Matrix draws(n, mod.space.dim());
        for (long i = 0; i < n; ++i) draws.row(i) = mod.prior_sample(rng).transpose();
        return draws;
      },
      py::arg("model"), py::arg("n"), py::arg("seed") = 1);

  m.def(
      "smc_run",
      [](const std::string& config_json, const std::string& out_dir, int workers) {
        wabc::RunConfig cfg = wabc::parse_run_config_json(config_json);
        if (!out_dir.empty()) cfg.output_dir = out_dir;
        const wabc::SmcState state =
            wabc::execute_run(cfg, workers, config_json);
        py::dict d;
        d["final_epsilon"] = state.epsilon;
        d["steps"] = state.step;
        d["total_simulations"] = state.total_sims;
        d["terminated_early"] = state.terminated_early;
        wabc::Matrix thetas(static_cast<long>(state.particles.size()),
                            state.particles.empty()
                                ? 0
                                : state.particles[0].theta.size());
        for (size_t i = 0; i < state.particles.size(); ++i)
          thetas.row(static_cast<long>(i)) = state.particles[i].theta.transpose();
        d["particles"] = thetas;
        return d;
      },
      py::arg("config_json"), py::arg("out_dir") = std::string(),
      py::arg("workers") = 1);

  m.def(
      "mh",
      [](const std::string& model, const wabc::Matrix& data, long iterations,
         long burnin, int chains, int thin, std::uint64_t seed) {
        const wabc::GenerativeModel& mod = wabc::model_registry(model);
        if (!mod.has_loglik())
          throw std::invalid_argument("model '" + model + "' has no likelihood");
        wabc::MhConfig cfg;
        cfg.iterations = iterations;
        cfg.burnin = burnin;
        cfg.chains = chains;
        cfg.thin = thin;
        cfg.seed = seed;
        return wabc::metropolis_hastings(mod, data, cfg).draws;
      },
      py::arg("model"), py::arg("data"), py::arg("iterations") = 10000,
      py::arg("burnin") = 1000, py::arg("chains") = 5, py::arg("thin") = 1,
      py::arg("seed") = 1);

  m.def(
      "cloud_w1",
      [](const wabc::Matrix& x, const wabc::Matrix& y, std::uint64_t seed) {
        wabc::RandomStream rng(seed);
        return wabc::cloud_w1(wabc::PointCloud(x), wabc::PointCloud(y), rng);
      },
      py::arg("x"), py::arg("y"), py::arg("seed") = 1);
}
