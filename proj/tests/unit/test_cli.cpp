// End-to-end checks of the command line tool: exit codes, file round trips
// and reproducibility.  The binary path arrives as the first positional
// argument (wired up by ctest).
#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "wabc/csv.hpp"
#include "wabc/point_cloud.hpp"

namespace {

std::string g_cli;
std::filesystem::path g_scratch;

struct CmdResult {
  int code = -1;
  std::string output;  // stdout and stderr combined
};

CmdResult run_cli(const std::string& args) {
  const std::string capture = (g_scratch / "last_output.txt").string();
  const std::string cmd = g_cli + " " + args + " > " + capture + " 2>&1";
  const int status = std::system(cmd.c_str());
  CmdResult res;
  if (WIFEXITED(status)) res.code = WEXITSTATUS(status);
  std::ifstream in(capture);
  std::stringstream ss;
  ss << in.rdbuf();
  res.output = ss.str();
  return res;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path(const std::string& name) { return (g_scratch / name).string(); }

double first_line_value(const std::string& text) {
  return std::stod(text.substr(0, text.find('\n')));
}

}  // namespace

TEST_CASE("usage errors exit with code 2 and help with 0") {
  CHECK(run_cli("").code == 2);
  CHECK(run_cli("--help").code == 0);
  CHECK(run_cli("simulate").code == 2);               // missing required flags
  CHECK(run_cli("frobnicate --x 1").code == 2);       // unknown subcommand
  CHECK(run_cli("distance --method wasserstein").code == 2);
}

TEST_CASE("simulate writes readable files and honors the seed") {
  const std::string out = path("cloud.csv");
  const CmdResult r = run_cli("simulate --model normal_location --theta 1 1 --n 50 "
                              "--seed 3 --out " + out);
  CHECK(r.code == 0);
  std::vector<std::string> header;
  const wabc::Matrix m = wabc::read_matrix_csv(out, &header);
  CHECK(m.rows() == 50);
  CHECK(m.cols() == 2);
  CHECK(header == std::vector<std::string>{"x1", "x2"});

  // Identical seeds give identical bytes; a new seed changes them.
  const std::string again = path("cloud2.csv"), other = path("cloud3.csv");
  run_cli("simulate --model normal_location --theta 1 1 --n 50 --seed 3 --out " + again);
  run_cli("simulate --model normal_location --theta 1 1 --n 50 --seed 4 --out " + other);
  CHECK(slurp(out) == slurp(again));
  CHECK(slurp(out) != slurp(other));

  // Time series gain a time column.
  const std::string series = path("series.csv");
  CHECK(run_cli("simulate --model ar1 --theta 0.5 0 --n 30 --out " + series).code == 0);
  std::vector<std::string> sh;
  const wabc::Matrix sm = wabc::read_matrix_csv(series, &sh);
  CHECK(sh.front() == "t");
  CHECK(sm.rows() == 30);
  CHECK(sm(0, 0) == 1.0);
  CHECK(sm(29, 0) == 30.0);

  CHECK(run_cli("simulate --model nope --theta 1 --n 5 --out " + path("x.csv")).code == 2);
  // Outside the prior support.
  CHECK(run_cli("simulate --model mg1 --theta 11 1 0.1 --n 5 --out " + path("x.csv")).code == 2);
  CHECK(run_cli("simulate --model mg1 --theta 1 1 0.1 --n 0 --out " + path("x.csv")).code == 2);
}

TEST_CASE("distance command computes values and a machine-readable record") {
  // Two clouds offset by exactly (2, 0): the transport distance is 2.
  wabc::Matrix a(40, 2);
  for (int i = 0; i < 40; ++i) {
    a(i, 0) = 0.1 * i;
    a(i, 1) = std::sin(0.3 * i);
  }
  wabc::Matrix b = a;
  b.col(0).array() += 2.0;
  wabc::write_cloud_csv(path("a.csv"), wabc::PointCloud(wabc::Matrix(a)));
  wabc::write_cloud_csv(path("b.csv"), wabc::PointCloud(wabc::Matrix(b)));

  const std::string common = " --x " + path("a.csv") + " --y " + path("b.csv");
  const CmdResult w = run_cli("distance --method wasserstein" + common);
  CHECK(w.code == 0);
  CHECK(first_line_value(w.output) == doctest::Approx(2.0).epsilon(1e-12));

  // Second stdout line: a json record with the solver diagnostics.
  const std::string json_line = w.output.substr(w.output.find('\n') + 1);
  const nlohmann::json rec = nlohmann::json::parse(json_line);
  CHECK(rec.at("method") == "wasserstein");
  CHECK(rec.at("value").get<double>() == doctest::Approx(2.0));
  CHECK(rec.contains("wall_seconds"));
  CHECK(rec.contains("converged"));

  // The screening distances upper-bound the exact one.
  const CmdResult h = run_cli("distance --method hilbert" + common);
  const CmdResult s = run_cli("distance --method swap" + common);
  CHECK(h.code == 0);
  CHECK(s.code == 0);
  CHECK(first_line_value(h.output) >= 2.0 - 1e-12);
  CHECK(first_line_value(s.output) >= 2.0 - 1e-12);
  CHECK(first_line_value(s.output) <= first_line_value(h.output) + 1e-12);

  const CmdResult k = run_cli("distance --method sinkhorn --zeta 0.1" + common);
  CHECK(k.code == 0);
  CHECK(first_line_value(k.output) >= 2.0 - 1e-6);
  const CmdResult mmd = run_cli("distance --method mmd" + common);
  CHECK(mmd.code == 0);
  CHECK(first_line_value(mmd.output) > 0.0);

  CHECK(run_cli("distance --method astral" + common).code == 2);
  CHECK(run_cli("distance --method wasserstein --x " + path("missing.csv") +
                " --y " + path("b.csv")).code == 1);
}

TEST_CASE("sampler command runs a config, writes outputs, and is reproducible") {
  auto config = [&](const std::string& dir, int seed) {
    nlohmann::json j{{"model", "normal_location"},
                     {"n", 15},
                     {"theta_true", {1.0, 1.0}},
                     {"method", "wasserstein"},
                     {"particles", 16},
                     {"alpha", 0.5},
                     {"r", 2},
                     {"mix_components", 2},
                     {"budget", 800},
                     {"trial_cap", 200},
                     {"seed", seed},
                     {"output_dir", dir}};
    return j;
  };
  const std::string dir1 = path("run1"), dir2 = path("run2"), dir3 = path("run3");
  std::ofstream(path("cfg1.json")) << config(dir1, 5);
  std::ofstream(path("cfg2.json")) << config(dir2, 5);
  std::ofstream(path("cfg3.json")) << config(dir3, 6);

  const CmdResult r1 = run_cli("smc --config " + path("cfg1.json"));
  CHECK(r1.code == 0);
  CHECK(r1.output.find("final epsilon") != std::string::npos);
  for (const char* f : {"particles.csv", "trace.csv", "meta.json", "observed.csv",
                        "particles_step_0.csv"})
    CHECK(std::filesystem::exists(std::filesystem::path(dir1) / f));

  const nlohmann::json meta =
      nlohmann::json::parse(slurp(std::filesystem::path(dir1) / "meta.json"));
  CHECK(meta.at("model") == "normal_location");
  CHECK(meta.at("total_simulations").get<long>() >= 16);
  CHECK(std::isfinite(meta.at("final_epsilon").get<double>()));

  std::vector<std::string> header;
  const wabc::Matrix particles = wabc::read_matrix_csv(
      (std::filesystem::path(dir1) / "particles.csv").string(), &header);
  CHECK(particles.rows() == 16);
  CHECK(particles.cols() == 3);  // two parameters + distance
  CHECK(header.back() == "distance");

  // Same config, fresh directory: identical particle table; new seed: not.
  CHECK(run_cli("smc --config " + path("cfg2.json")).code == 0);
  CHECK(run_cli("smc --config " + path("cfg3.json")).code == 0);
  CHECK(slurp(std::filesystem::path(dir1) / "particles.csv") ==
        slurp(std::filesystem::path(dir2) / "particles.csv"));
  CHECK(slurp(std::filesystem::path(dir1) / "particles.csv") !=
        slurp(std::filesystem::path(dir3) / "particles.csv"));

  // Worker count must not change the output.
  const std::string dir4 = path("run4");
  std::ofstream(path("cfg4.json")) << config(dir4, 5);
  CHECK(run_cli("smc --config " + path("cfg4.json") + " --workers 3").code == 0);
  CHECK(slurp(std::filesystem::path(dir1) / "particles.csv") ==
        slurp(std::filesystem::path(dir4) / "particles.csv"));

  // Config validation: unknown keys and missing files are usage errors.
  std::ofstream(path("bad.json")) << R"({"model":"normal_location","n_obs":10})";
  CHECK(run_cli("smc --config " + path("bad.json")).code == 2);
  CHECK(run_cli("smc --config " + path("absent.json")).code == 2);
}

TEST_CASE("reference sampler command needs a tractable likelihood") {
  const std::string data = path("mh_data.csv");
  REQUIRE(run_cli("simulate --model normal_location --theta 0.5 -0.5 --n 30 "
                  "--seed 2 --out " + data).code == 0);
  const std::string chain = path("chain.csv");
  const CmdResult r = run_cli("mh --model normal_location --data " + data +
                              " --iterations 400 --burnin 100 --chains 2 --seed 1 "
                              "--out " + chain);
  CHECK(r.code == 0);
  CHECK(r.output.find("acceptance rate") != std::string::npos);
  std::vector<std::string> header;
  const wabc::Matrix draws = wabc::read_matrix_csv(chain, &header);
  CHECK(draws.rows() == 800);
  CHECK(draws.cols() == 2);
  CHECK(header == std::vector<std::string>{"theta1", "theta2"});

  CHECK(run_cli("mh --model mg1 --data " + data + " --out " + chain).code == 2);
}

TEST_CASE("evaluate command reports transport gaps between particle tables") {
  // Reference cloud: tight around (0, 0); particles: around (1, 0) => W1 = 1.
  wabc::Matrix ref(30, 2), part(30, 2);
  for (int i = 0; i < 30; ++i) {
    ref(i, 0) = 0.01 * i;
    ref(i, 1) = -0.01 * i;
    part(i, 0) = 0.01 * i + 1.0;
    part(i, 1) = -0.01 * i;
  }
  wabc::write_cloud_csv(path("ref.csv"), wabc::PointCloud(wabc::Matrix(ref)));
  wabc::write_cloud_csv(path("part.csv"), wabc::PointCloud(wabc::Matrix(part)));
  const CmdResult r = run_cli("evaluate --particles " + path("part.csv") +
                              " --reference " + path("ref.csv"));
  CHECK(r.code == 0);
  CHECK(first_line_value(r.output) == doctest::Approx(1.0).epsilon(1e-12));

  // Per-step report over a real sampler output directory.
  const std::string dir = path("run1");  // produced by the smc test case
  if (std::filesystem::exists(std::filesystem::path(dir) / "particles_step_0.csv")) {
    const CmdResult t = run_cli("evaluate --particles " +
                                (std::filesystem::path(dir) / "particles.csv").string() +
                                " --reference " + path("ref.csv") +
                                " --trace-dir " + dir);
    CHECK(t.code == 0);
    const std::string json_part = t.output.substr(t.output.find('\n') + 1);
    const nlohmann::json rep = nlohmann::json::parse(json_part);
    CHECK(rep.contains("per_step_w1"));
    CHECK(rep.contains("excursions_over_10_percent"));
    CHECK(rep.at("per_step_w1").size() >= 1);
  }

  CHECK(run_cli("evaluate --particles " + path("part.csv") + " --reference " +
                path("ref.csv") + " --trace-dir " + path("empty_dir")).code == 2);
}

TEST_CASE("bench command times distances across sizes") {
  const std::string out = path("bench.csv");
  const CmdResult r = run_cli("bench --method hilbert --n-grid 64 128 --reps 2 "
                              "--seed 1 --out " + out);
  CHECK(r.code == 0);
  CHECK(r.output.find("median_seconds") != std::string::npos);
  CHECK(r.output.find("ratio_vs_prev") != std::string::npos);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("method,n,d,rep,seconds", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 5);  // header + 2 sizes x 2 reps

  CHECK(run_cli("bench --method nope --n-grid 32").code == 2);
  CHECK(run_cli("bench --method hilbert --n-grid 32 --reps 0").code == 2);
}

int main(int argc, char** argv) {
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (!arg.empty() && arg[0] != '-' && std::filesystem::exists(arg)) {
      g_cli = arg;
      break;
    }
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary> [doctest options]\n");
    return 1;
  }
  char tmpl[] = "/tmp/wabc_cli_test_XXXXXX";
  if (!mkdtemp(tmpl)) {
    std::fprintf(stderr, "cannot create scratch directory\n");
    return 1;
  }
  g_scratch = tmpl;
  doctest::Context ctx;
  ctx.applyCommandLine(argc, argv);
  const int rc = ctx.run();
  std::error_code ec;
  std::filesystem::remove_all(g_scratch, ec);
  return rc;
}
