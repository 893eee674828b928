// Command line front end: simulate | distance | smc | mh | evaluate | bench.
// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "wabc/csv.hpp"
#include "wabc/hilbert.hpp"
#include "wabc/models.hpp"
#include "wabc/reference.hpp"
#include "wabc/run_config.hpp"
#include "wabc/smc.hpp"
#include "wabc/transport.hpp"

namespace {

using nlohmann::json;

int resolve_workers(int flag_value) {
  if (flag_value > 0) return flag_value;
  if (const char* env = std::getenv("WABC_WORKERS")) {
    const int w = std::atoi(env);
    if (w > 0) return w;
  }
  return 1;
}

wabc::Matrix load_data(const std::string& path) {
  std::vector<std::string> header;
  wabc::Matrix m = wabc::read_matrix_csv(path, &header);
  if (!header.empty() && header[0] == "t") return m.rightCols(m.cols() - 1).eval();
  return m;
}

int cmd_simulate(const std::string& model_name, const std::vector<double>& theta,
                 long n, std::uint64_t seed, const std::string& out,
                 int toggle_horizon) {
  const wabc::GenerativeModel model =
      model_name == "toggleswitch" && toggle_horizon != 300
          ? wabc::make_toggle_switch_model(toggle_horizon)
          : wabc::model_registry(model_name);
  wabc::Vector t = Eigen::Map<const wabc::Vector>(theta.data(), theta.size());
  if (!model.space.contains(t))
    throw std::invalid_argument("theta lies outside the prior support");
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  wabc::RandomStream rng(seed);
  const wabc::Matrix data = model.simulate(t, n, rng);
  if (model.is_series)
    wabc::write_series_csv(out, wabc::Series(data));
  else
    wabc::write_cloud_csv(out, wabc::PointCloud(data));
  std::cout << "wrote " << data.rows() << " observations to " << out << "\n";
  return 0;
}

int cmd_distance(const std::string& method, const std::string& x_path,
                 const std::string& y_path, const std::string& metric_name,
                 double p, double lambda, double zeta, double tol, long max_iter,
                 double bandwidth, int sweeps, int bits) {
  const wabc::PointCloud x(load_data(x_path));
  const wabc::PointCloud y(load_data(y_path));
  const wabc::GroundMetric metric = wabc::parse_metric_kind(metric_name, p, lambda);
  const auto t0 = std::chrono::steady_clock::now();
  wabc::DistanceResult r;
  if (method == "wasserstein") {
    r = (x.dim() == 1 && x.n() == y.n()) ? wabc::wasserstein_1d(x, y, p)
                                         : wabc::exact_wasserstein(x, y, metric);
  } else if (method == "hilbert") {
    r = wabc::hilbert_distance(x, y, metric, bits);
  } else if (method == "swap") {
    r = wabc::swapping_distance(x, y, metric, sweeps);
  } else if (method == "sinkhorn") {
    r = wabc::sinkhorn_divergence(x, y, metric, zeta, tol, max_iter).result;
  } else if (method == "mmd") {
    const double h =
        bandwidth > 0.0 ? bandwidth : wabc::median_heuristic_bandwidth(x);
    r.method = "mmd";
    r.value = wabc::mmd_squared(x, y, h);
  } else {
    throw std::invalid_argument("unknown distance method: " + method);
  }
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cout << wabc::format_double(r.value) << "\n";
  json record{{"method", r.method},
              {"value", r.value},
              {"iterations", r.iterations},
              {"converged", r.converged},
              {"wall_seconds", wall}};
  std::cout << record.dump() << "\n";
  return 0;
}

int cmd_smc(const std::string& config_path, int workers) {
  std::ifstream in(config_path);
  if (!in) throw std::invalid_argument("cannot open config: " + config_path);
  std::stringstream ss;
  ss << in.rdbuf();
  const std::string text = ss.str();
  const wabc::RunConfig cfg = wabc::parse_run_config_json(text);
  const wabc::SmcState state = wabc::execute_run(cfg, resolve_workers(workers), text);
  std::cout << "final epsilon " << wabc::format_double(state.epsilon) << " after "
            << state.total_sims << " simulations in " << state.step << " steps\n";
  return 0;
}

int cmd_mh(const std::string& model_name, const std::string& data_path,
           long iterations, long burnin, int chains, int thin, std::uint64_t seed,
           const std::string& out) {
  const wabc::GenerativeModel& model = wabc::model_registry(model_name);
  if (!model.has_loglik())
    throw std::invalid_argument("model '" + model_name + "' has no likelihood");
  const wabc::Matrix data = load_data(data_path);
  wabc::MhConfig cfg;
  cfg.iterations = iterations;
  cfg.burnin = burnin;
  cfg.chains = chains;
  cfg.thin = thin;
  cfg.seed = seed;
  const wabc::MhResult result = wabc::metropolis_hastings(model, data, cfg);
  wabc::write_matrix_csv(out, result.draws, model.space.names);
  std::cout << "kept " << result.draws.rows() << " draws, acceptance rate "
            << wabc::format_double(result.acceptance_rate) << "\n";
  return 0;
}

int cmd_evaluate(const std::string& particles_path, const std::string& reference_path,
                 const std::string& trace_dir, std::uint64_t seed) {
  // Particle tables carry a trailing distance column; references may not.
  auto load_thetas = [](const std::string& path) {
    std::vector<std::string> header;
    wabc::Matrix m = wabc::read_matrix_csv(path, &header);
    if (!header.empty() && header.back() == "distance")
      return wabc::Matrix(m.leftCols(m.cols() - 1));
    return m;
  };
  const wabc::PointCloud reference(load_thetas(reference_path));
  wabc::RandomStream rng(seed);
  const wabc::PointCloud particles(load_thetas(particles_path));
  const double w1 = wabc::cloud_w1(particles, reference, rng);
  std::cout << wabc::format_double(w1) << "\n";
  if (trace_dir.empty()) return 0;

  // Per-step report over particles_step_K.csv files.
  std::vector<std::pair<int, double>> rows;
  for (int step = 0;; ++step) {
    const std::filesystem::path p =
        std::filesystem::path(trace_dir) / ("particles_step_" + std::to_string(step) + ".csv");
    if (!std::filesystem::exists(p)) {
      if (step == 0) throw std::invalid_argument("no particles_step_0.csv in " + trace_dir);
      break;
    }
    wabc::RandomStream step_rng(seed + step + 1);
    rows.emplace_back(step,
                      wabc::cloud_w1(wabc::PointCloud(load_thetas(p.string())),
                                     reference, step_rng));
  }
  int excursions = 0;
  for (size_t i = 1; i < rows.size(); ++i)
    if (rows[i].second > rows[i - 1].second * 1.10) ++excursions;
  json report;
  report["per_step_w1"] = json::array();
  for (const auto& [step, w] : rows)
    report["per_step_w1"].push_back({{"step", step}, {"w1", w}});
  report["excursions_over_10_percent"] = excursions;
  report["monotone_within_10_percent"] = excursions == 0;
  std::cout << report.dump(2) << "\n";
  return 0;
}

int cmd_bench(const std::string& method, const std::vector<long>& n_grid, int d,
              int reps, std::uint64_t seed, const std::string& out) {
  if (n_grid.empty()) throw std::invalid_argument("empty n grid");
  if (d < 1 || reps < 1) throw std::invalid_argument("d and reps must be >= 1");
  wabc::GroundMetric metric;
  wabc::RandomStream root(seed);
  std::ofstream csv;
  if (!out.empty()) {
    csv.open(out);
    if (!csv) throw std::runtime_error("cannot open for writing: " + out);
    csv << "method,n,d,rep,seconds\n";
  }
  std::vector<double> medians;
  for (size_t gi = 0; gi < n_grid.size(); ++gi) {
    const long n = n_grid[gi];
    std::vector<double> times;
    for (int rep = 0; rep < reps; ++rep) {
      wabc::RandomStream rng = root.substream({gi, static_cast<std::uint64_t>(rep)});
      wabc::Matrix a(n, d), b(n, d);
      for (long i = 0; i < n; ++i)
        for (int j = 0; j < d; ++j) {
          a(i, j) = rng.normal();
          b(i, j) = rng.normal();
        }
      const wabc::PointCloud x(std::move(a)), y(std::move(b));
      const auto t0 = std::chrono::steady_clock::now();
      double value = 0.0;
      if (method == "wasserstein")
        value = wabc::exact_wasserstein(x, y, metric).value;
      else if (method == "hilbert")
        value = wabc::hilbert_distance(x, y, metric).value;
      else if (method == "swap")
        value = wabc::swapping_distance(x, y, metric).value;
      else if (method == "sinkhorn")
        value = wabc::sinkhorn_divergence(x, y, metric).result.value;
      else if (method == "mmd")
        value = wabc::mmd_squared(x, y, wabc::median_heuristic_bandwidth(x));
      else
        throw std::invalid_argument("unknown distance method: " + method);
      const double dt =
          std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      (void)value;
      times.push_back(dt);
      if (csv.is_open())
        csv << method << ',' << n << ',' << d << ',' << rep << ','
            << wabc::format_double(dt) << '\n';
    }
    std::sort(times.begin(), times.end());
    const double median = times[times.size() / 2];
    medians.push_back(median);
    std::cout << method << " n=" << n << " d=" << d
              << " median_seconds=" << wabc::format_double(median);
    if (gi > 0 && n == 2 * n_grid[gi - 1] && medians[gi - 1] > 0.0)
      std::cout << " ratio_vs_prev=" << wabc::format_double(median / medians[gi - 1]);
    std::cout << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"transport-distance ABC toolkit"};
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "draw a data set from a model");
  std::string sim_model, sim_out = "data.csv";
  std::vector<double> sim_theta;
  long sim_n = 100;
  std::uint64_t sim_seed = 1;
  int sim_horizon = 300;
  sim->add_option("--model", sim_model)->required();
  sim->add_option("--theta", sim_theta)->required();
  sim->add_option("--n", sim_n)->required();
  sim->add_option("--seed", sim_seed);
  sim->add_option("--out", sim_out);
  sim->add_option("--toggle-horizon", sim_horizon);

  // distance
  auto* dist = app.add_subcommand("distance", "distance between two data files");
  std::string d_method, d_x, d_y, d_metric = "euclidean";
  double d_p = 1.0, d_lambda = 0.0, d_zeta = -1.0, d_tol = 1e-9, d_bandwidth = -1.0;
  long d_max_iter = 10000;
  int d_sweeps = 100, d_bits = wabc::kHilbertDefaultBits;
  dist->add_option("--method", d_method)->required();
  dist->add_option("--x", d_x)->required();
  dist->add_option("--y", d_y)->required();
  dist->add_option("--metric", d_metric);
  dist->add_option("--p", d_p);
  dist->add_option("--lambda", d_lambda);
  dist->add_option("--zeta", d_zeta);
  dist->add_option("--tol", d_tol);
  dist->add_option("--max-iter", d_max_iter);
  dist->add_option("--bandwidth", d_bandwidth);
  dist->add_option("--sweeps", d_sweeps);
  dist->add_option("--bits", d_bits);

  // smc
  auto* smc = app.add_subcommand("smc", "adaptive ABC sampler from a json config");
  std::string smc_config;
  int smc_workers = 0;
  smc->add_option("--config", smc_config)->required();
  smc->add_option("--workers", smc_workers);

  // mh
  auto* mh = app.add_subcommand("mh", "random-walk Metropolis reference sampler");
  std::string mh_model, mh_data, mh_out = "chain.csv";
  long mh_iters = 10000, mh_burnin = 1000;
  int mh_chains = 5, mh_thin = 1;
  std::uint64_t mh_seed = 1;
  mh->add_option("--model", mh_model)->required();
  mh->add_option("--data", mh_data)->required();
  mh->add_option("--iterations", mh_iters);
  mh->add_option("--burnin", mh_burnin);
  mh->add_option("--chains", mh_chains);
  mh->add_option("--thin", mh_thin);
  mh->add_option("--seed", mh_seed);
  mh->add_option("--out", mh_out);

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "transport distance between particle sets");
  std::string ev_particles, ev_reference, ev_trace_dir;
  std::uint64_t ev_seed = 1;
  ev->add_option("--particles", ev_particles)->required();
  ev->add_option("--reference", ev_reference)->required();
  ev->add_option("--trace-dir", ev_trace_dir);
  ev->add_option("--seed", ev_seed);

  // bench
  auto* bench = app.add_subcommand("bench", "distance timing across sizes");
  std::string b_method, b_out;
  std::vector<long> b_grid;
  int b_d = 2, b_reps = 3;
  std::uint64_t b_seed = 1;
  bench->add_option("--method", b_method)->required();
  bench->add_option("--n-grid", b_grid)->required();
  bench->add_option("--d", b_d);
  bench->add_option("--reps", b_reps);
  bench->add_option("--seed", b_seed);
  bench->add_option("--out", b_out);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (sim->parsed())
      return cmd_simulate(sim_model, sim_theta, sim_n, sim_seed, sim_out, sim_horizon);
    if (dist->parsed())
      return cmd_distance(d_method, d_x, d_y, d_metric, d_p, d_lambda, d_zeta, d_tol,
                          d_max_iter, d_bandwidth, d_sweeps, d_bits);
    if (smc->parsed()) return cmd_smc(smc_config, smc_workers);
    if (mh->parsed())
      return cmd_mh(mh_model, mh_data, mh_iters, mh_burnin, mh_chains, mh_thin,
                    mh_seed, mh_out);
    if (ev->parsed()) return cmd_evaluate(ev_particles, ev_reference, ev_trace_dir, ev_seed);
    if (bench->parsed())
      return cmd_bench(b_method, b_grid, b_d, b_reps, b_seed, b_out);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
