#include "wabc/run_config.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "wabc/csv.hpp"

namespace wabc {

namespace {

using nlohmann::json;

void require_keys(const json& obj, const std::set<std::string>& allowed,
                  const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it)
    if (!allowed.count(it.key()))
      throw std::invalid_argument("unknown key '" + it.key() + "' in " + where);
}

EmbeddingSpec parse_embedding(const json& e) {
  require_keys(e, {"kind", "lambda", "aspect_h", "aspect_v", "lags", "stride"},
               "embedding");
  EmbeddingSpec spec;
  const std::string kind = e.at("kind").get<std::string>();
  if (kind == "none") {
    spec.kind = EmbeddingKind::none;
  } else if (kind == "curve") {
    spec.kind = EmbeddingKind::curve;
    if (e.contains("lambda")) {
      spec.lambda = e.at("lambda").get<double>();
      spec.use_aspect = false;
    } else {
      spec.use_aspect = true;
      spec.aspect_h = e.value("aspect_h", 1.0);
      spec.aspect_v = e.value("aspect_v", 1.0);
    }
  } else if (kind == "delay") {
    spec.kind = EmbeddingKind::delay;
    if (!e.contains("lags"))
      throw std::invalid_argument("delay embedding requires 'lags'");
    spec.lags = e.at("lags").get<std::vector<int>>();
    spec.stride = e.value("stride", 1);
  } else if (kind == "residual") {
    spec.kind = EmbeddingKind::residual;
  } else {
    throw std::invalid_argument("unknown embedding kind: " + kind);
  }
  return spec;
}

json dump_trace_free_meta(const RunConfig& cfg, const std::string& config_text,
                          const SmcState& state, double wall_seconds) {
  json meta;
  meta["config_hash"] = config_hash(config_text);
  meta["model"] = cfg.model;
  meta["method"] = distance_method_name(cfg.spec.method);
  meta["total_simulations"] = state.total_sims;
  meta["final_epsilon"] = state.epsilon;
  meta["steps"] = state.step;
  meta["terminated_early"] = state.terminated_early;
  meta["wall_seconds"] = wall_seconds;
  return meta;
}

}  // namespace

std::string config_hash(const std::string& json_text) {
  // FNV-1a over the canonical (parsed and re-dumped) form.
  const std::string canonical = json::parse(json_text).dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : canonical) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream out;
  out << std::hex << h;
  return out.str();
}

RunConfig parse_run_config_json(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("config is not valid json: ") + e.what());
  }
  require_keys(j,
               {"model", "n", "observed", "theta_true", "observed_seed", "method",
                "embedding", "metric", "sinkhorn_zeta", "acf_lags", "hilbert_bits",
                "particles", "alpha", "r", "mix_components", "budget", "seed",
                "trial_cap", "epsilon_target", "output_dir", "save_steps", "stage2_budget",
                "toggle_horizon", "constrain_mg1_theta1"},
               "config");
  RunConfig cfg;
  cfg.model = j.at("model").get<std::string>();
  if (j.contains("n")) cfg.n = j.at("n").get<Eigen::Index>();
  if (j.contains("observed"))
    cfg.observed_path = j.at("observed").get<std::string>();
  if (j.contains("theta_true")) {
    const auto v = j.at("theta_true").get<std::vector<double>>();
    cfg.theta_true = Eigen::Map<const Vector>(v.data(), v.size());
  }
  cfg.observed_seed = j.value("observed_seed", 0ULL);
  cfg.spec.method = parse_distance_method(j.at("method").get<std::string>());
  if (j.contains("embedding")) cfg.spec.embedding = parse_embedding(j.at("embedding"));
  if (j.contains("metric")) {
    const json& m = j.at("metric");
    require_keys(m, {"kind", "p", "lambda"}, "metric");
    cfg.spec.metric = parse_metric_kind(m.value("kind", std::string("euclidean")),
                                        m.value("p", 1.0), m.value("lambda", 0.0));
  }
  cfg.spec.sinkhorn_zeta = j.value("sinkhorn_zeta", -1.0);
  cfg.spec.acf_lags = j.value("acf_lags", 50);
  cfg.spec.hilbert_bits = j.value("hilbert_bits", kHilbertDefaultBits);
  cfg.smc.n_particles = j.value("particles", 2048);
  cfg.smc.alpha = j.value("alpha", 0.5);
  cfg.smc.r = j.value("r", 2);
  cfg.smc.mix_components = j.value("mix_components", 5);
  cfg.smc.budget = j.value("budget", 100000L);
  cfg.smc.seed = j.value("seed", 1ULL);
  cfg.smc.trial_cap = j.value("trial_cap", 10000L);
  cfg.smc.epsilon_target = j.value("epsilon_target", 0.0);
  cfg.stage2_budget = j.value("stage2_budget", 0L);
  cfg.output_dir = j.value("output_dir", std::string());
  cfg.save_steps = j.value("save_steps", true);
  cfg.toggle_horizon = j.value("toggle_horizon", 300);
  cfg.constrain_mg1_theta1 = j.value("constrain_mg1_theta1", false);

  if (!cfg.observed_path && !cfg.theta_true)
    throw std::invalid_argument("config needs 'observed' or 'theta_true'");
  if (!cfg.observed_path && cfg.n < 1)
    throw std::invalid_argument("config needs 'n' when the data are simulated");
  if (cfg.toggle_horizon != 300 && cfg.model != "toggleswitch")
    throw std::invalid_argument("'toggle_horizon' only applies to toggleswitch");
  if (cfg.constrain_mg1_theta1 && cfg.model != "mg1")
    throw std::invalid_argument("'constrain_mg1_theta1' only applies to mg1");
  return cfg;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_run_config_json(ss.str());
}

GenerativeModel resolve_model(const RunConfig& cfg, const Matrix* observed) {
  if (cfg.model == "toggleswitch" && cfg.toggle_horizon != 300)
    return make_toggle_switch_model(cfg.toggle_horizon);
  if (cfg.model == "mg1" && cfg.constrain_mg1_theta1) {
    if (!observed)
      throw std::invalid_argument(
          "mg1 constraint needs the observed data to bound theta1");
    return make_mg1_model(observed->col(0).minCoeff());
  }
  return model_registry(cfg.model);
}

Matrix resolve_observed(const RunConfig& cfg, const GenerativeModel& model) {
  if (cfg.observed_path) {
    std::vector<std::string> header;
    Matrix m = read_matrix_csv(*cfg.observed_path, &header);
    if (!header.empty() && header[0] == "t") m = m.rightCols(m.cols() - 1).eval();
    if (m.cols() != model.out_dim)
      throw std::invalid_argument("observed data width does not match the model");
    return m;
  }
  if (!model.space.contains(*cfg.theta_true))
    throw std::invalid_argument("theta_true lies outside the prior support");
  const std::uint64_t seed =
      cfg.observed_seed ? cfg.observed_seed : cfg.smc.seed + 0x9E3779B9ULL;
  RandomStream rng(seed);
  return model.simulate(*cfg.theta_true, cfg.n, rng);
}

std::string particles_to_csv_string(const GenerativeModel& model,
                                    const std::vector<Particle>& particles) {
  std::ostringstream out;
  for (const std::string& name : model.space.names) out << name << ',';
  out << "distance\n";
  for (const Particle& p : particles) {
    for (Eigen::Index j = 0; j < p.theta.size(); ++j)
      out << format_double(p.theta(j)) << ',';
    out << format_double(p.dist) << '\n';
  }
  return out.str();
}

void write_particles_csv(const std::string& path, const GenerativeModel& model,
                         const std::vector<Particle>& particles) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << particles_to_csv_string(model, particles);
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_trace_csv(const std::string& path,
                     const std::vector<ThresholdTraceRow>& trace) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "step,epsilon,cumulative_simulations,unique_count,wall_seconds\n";
  for (const auto& row : trace)
    out << row.step << ',' << format_double(row.epsilon) << ','
        << row.cumulative_sims << ',' << row.unique_count << ','
        << format_double(row.wall_seconds) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

void write_stage_outputs(const std::filesystem::path& dir, const RunConfig& cfg,
                         const GenerativeModel& model, const SmcState& state,
                         const std::string& config_text, double wall_seconds) {
  std::filesystem::create_directories(dir);
  write_particles_csv((dir / "particles.csv").string(), model, state.particles);
  write_trace_csv((dir / "trace.csv").string(), state.trace);
  std::ofstream meta(dir / "meta.json");
  meta << dump_trace_free_meta(cfg, config_text, state, wall_seconds).dump(2)
       << '\n';
}

StepCallback snapshot_writer(const std::filesystem::path& dir,
                             const GenerativeModel& model, bool enabled) {
  if (!enabled) return nullptr;
  return [dir, &model](const SmcState& state) {
    std::ostringstream name;
    name << "particles_step_" << state.step << ".csv";
    write_particles_csv((dir / name.str()).string(), model, state.particles);
  };
}

}  // namespace

SmcState execute_run(const RunConfig& cfg, int workers,
                     const std::string& config_text) {
  if (cfg.output_dir.empty())
    throw std::invalid_argument("config needs 'output_dir'");
  RunConfig local = cfg;
  local.smc.workers = workers;

  // The mg1 constraint derives the prior bound from data simulated under the
  // unconstrained model, so resolve that model first and rebuild once the
  // data exists.
  RunConfig unconstrained = local;
  unconstrained.constrain_mg1_theta1 = false;
  GenerativeModel model = resolve_model(unconstrained, nullptr);
  Matrix observed = resolve_observed(local, model);
  if (local.model == "mg1" && local.constrain_mg1_theta1)
    model = resolve_model(local, &observed);
  local.smc.n_obs = observed.rows();

  const std::filesystem::path dir(local.output_dir);
  std::filesystem::create_directories(dir);
  if (model.is_series)
    write_series_csv((dir / "observed.csv").string(), Series(observed));
  else
    write_cloud_csv((dir / "observed.csv").string(), PointCloud(observed));

  const auto t0 = std::chrono::steady_clock::now();
  if (local.stage2_budget > 0) {
    const std::filesystem::path dir2 = dir / "stage2";
    std::filesystem::create_directories(dir2);
    TwoStageResult result = run_two_stage(
        model, observed, local.spec, local.smc, local.stage2_budget,
        snapshot_writer(dir, model, local.save_steps),
        snapshot_writer(dir2, model, local.save_steps));
    const double wall =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    write_stage_outputs(dir, local, model, result.stage1, config_text, wall);
    write_stage_outputs(dir2, local, model, result.stage2, config_text, wall);
    std::ofstream gate(dir2 / "gate.json");
    gate << json{{"epsilon_h", result.epsilon_h}}.dump(2) << '\n';
    return result.stage2;
  }
  SmcState state = run_smc(model, observed, local.spec, local.smc,
                           snapshot_writer(dir, model, local.save_steps));
  const double wall =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  write_stage_outputs(dir, local, model, state, config_text, wall);
  return state;
}

}  // namespace wabc
