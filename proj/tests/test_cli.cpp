#define DOCTEST_CONFIG_IMPLEMENT
#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string g_cli;
int g_dir_counter = 0;

// Unique scratch directory; removed by the caller via Scratch's destructor.
struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() /
          ("cubosc_cli_" + std::to_string(::getpid()) + "_" + std::to_string(g_dir_counter++));
    fs::create_directories(dir);
  }
  ~Scratch() {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }
  std::string path(const std::string& leaf = "") const {
    return leaf.empty() ? dir.string() : (dir / leaf).string();
  }
};

int run_shell(const std::string& cmd) {
  const int rc = std::system(cmd.c_str());
  if (rc == -1) return -1;
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -2;
}

int run_cli(const std::string& args, const std::string& env_prefix = "") {
  std::string cmd;
  if (!env_prefix.empty()) cmd += env_prefix + " ";
  cmd += "'" + g_cli + "' " + args + " >/dev/null 2>&1";
  return run_shell(cmd);
}

std::string slurp(const std::string& file) {
  std::ifstream in(file, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json slurp_json(const std::string& file) { return json::parse(slurp(file)); }

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

// Header names to column vectors.
std::map<std::string, std::vector<double>> read_csv(const std::string& file) {
  std::ifstream in(file);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(static_cast<bool>(std::getline(in, line)));
  std::vector<std::string> names;
  {
    std::istringstream hs(line);
    std::string cell;
    while (std::getline(hs, cell, ',')) names.push_back(trim(cell));
  }
  std::map<std::string, std::vector<double>> cols;
  std::vector<std::vector<double>> data(names.size());
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::istringstream ls(line);
    std::string cell;
    std::size_t i = 0;
    while (std::getline(ls, cell, ',')) {
      REQUIRE(i < names.size());
      data[i++].push_back(std::strtod(cell.c_str(), nullptr));
    }
    REQUIRE(i == names.size());
  }
  for (std::size_t i = 0; i < names.size(); ++i) cols[names[i]] = std::move(data[i]);
  return cols;
}

}  // namespace

TEST_CASE("deterministic emits orbit profiles and the modulus sweep") {
  Scratch out1, out2;
  REQUIRE(run_cli("deterministic --out '" + out1.path() + "'") == 0);

  const auto cols = read_csv(out1.path("deterministic.csv"));
  REQUIRE(cols.count("t") == 1);
  REQUIRE(cols.count("x0") == 1);
  REQUIRE(cols.count("u1") == 1);
  REQUIRE(cols.count("w2") == 1);
  const auto& x0 = cols.at("x0");
  REQUIRE(x0.size() > 6000);
  CHECK(cols.at("t").front() == 0.0);
  for (const double v : x0) {
    CHECK(v >= -1.0 - 1e-12);
    CHECK(v <= 0.0 + 1e-12);
  }

  const auto sweep = read_csv(out1.path("mu_sweep.csv"));
  const auto& q = sweep.at("q");
  const auto& mu = sweep.at("mu");
  REQUIRE(q.size() == 99);
  CHECK(q.front() == doctest::Approx(0.01));
  CHECK(q.back() == doctest::Approx(0.99));
  for (const double v : mu) {
    CHECK(std::isfinite(v));
    CHECK(v > 0.0);
  }

  const json meta = slurp_json(out1.path("deterministic_meta.json"));
  CHECK(meta["params"]["B"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-14));

  // Same config, fresh directory: byte-identical files.
  REQUIRE(run_cli("deterministic --out '" + out2.path() + "'") == 0);
  CHECK(slurp(out1.path("deterministic.csv")) == slurp(out2.path("deterministic.csv")));
  CHECK(slurp(out1.path("mu_sweep.csv")) == slurp(out2.path("mu_sweep.csv")));

  Scratch bad;
  CHECK(run_cli("deterministic --a -1 --out '" + bad.path() + "'") == 2);
  CHECK(run_cli("deterministic --eta-sign 0 --out '" + bad.path() + "'") == 2);
}

TEST_CASE("simulate is seed-deterministic and honors zero noise") {
  Scratch d1, d2, d3;
  const std::string common = "simulate --paths 3 --sigma 0.01 --order 2 --dt 0.002 --seed 777";
  REQUIRE(run_cli(common + " --out '" + d1.path() + "'") == 0);
  REQUIRE(run_cli(common + " --out '" + d2.path() + "'") == 0);

  for (const char* name : {"path_000.csv", "path_001.csv", "path_002.csv"}) {
    REQUIRE(fs::exists(d1.dir / name));
    CHECK(slurp(d1.path(name)) == slurp(d2.path(name)));
  }
  CHECK(slurp(d1.path("path_000.csv")) != slurp(d1.path("path_001.csv")));
  CHECK(slurp(d1.path("path_001.csv")) != slurp(d1.path("path_002.csv")));

  const json meta = slurp_json(d1.path("simulate_meta.json"));
  REQUIRE(meta["paths"].size() == 3);
  for (const auto& p : meta["paths"]) CHECK(!p["exploded"].get<bool>());
  CHECK(meta["sigma"].get<double>() == 0.01);

  // Zero amplitude: stochastic columns vanish and the truncation is x0.
  REQUIRE(run_cli("simulate --paths 1 --sigma 0 --order 3 --dt 0.002 --seed 5 --out '" +
                  d3.path() + "'") == 0);
  const auto cols = read_csv(d3.path("path_000.csv"));
  const auto& x0 = cols.at("x0");
  for (const double v : cols.at("x1")) CHECK(v == 0.0);
  for (const double v : cols.at("x2")) CHECK(v == 0.0);
  for (const double v : cols.at("x3")) CHECK(v == 0.0);
  const auto& total = cols.at("Xn_sigma");
  const auto& em = cols.at("x_em");
  REQUIRE(total.size() == x0.size());
  REQUIRE(em.size() == x0.size());
  double em_gap = 0.0;
  for (std::size_t k = 0; k < x0.size(); ++k) {
    CHECK(total[k] == x0[k]);
    em_gap = std::max(em_gap, std::abs(em[k] - x0[k]));
  }
  CHECK(em_gap <= 1e-5);

  CHECK(run_cli("simulate --driver bounded-example --noise multiplicative --out '" + d3.path() +
                "'") == 2);
  CHECK(run_cli("simulate --paths 0 --out '" + d3.path() + "'") == 2);
}

TEST_CASE("validate passes by default and fails the negative control") {
  Scratch pass_dir, fail_dir;
  CHECK(run_cli("validate --paths 500 --out '" + pass_dir.path() + "'") == 2);

  const std::string common = "validate --paths 1000 --dt 0.002 --seed 3";
  REQUIRE(run_cli(common + " --out '" + pass_dir.path() + "'") == 0);
  const json report = slurp_json(pass_dir.path("validate_report.json"));
  CHECK(report["all_pass"].get<bool>());
  REQUIRE(report["bounds"].size() == 3);
  for (const auto& row : report["bounds"]) {
    CHECK(row["pass"].get<bool>());
    CHECK(row["implication_violations"].get<int>() == 0);
    if (!row["vacuous"].get<bool>())
      CHECK(row["empirical_fraction"].get<double>() + 1e-12 >=
            row["analytic_bound"].get<double>());
  }
  for (const auto& r : report["coupling"]["halving_ratios"]) {
    CHECK(r.get<double>() >= 4.0);
    CHECK(r.get<double>() <= 16.0);
  }
  CHECK(std::abs(report["convergence"]["residual"].get<double>()) <= 1e-10);
  CHECK(report["convergence"]["tail_violations"].get<int>() == 0);
  CHECK(report["convergence"]["envelope_violations"].get<int>() == 0);
  CHECK(report["convergence"]["library_check_consistent"].get<bool>());
  CHECK(report["convergence"]["pass"].get<bool>());

  // The shrunk-envelope control must fail loudly but still write its report.
  REQUIRE(run_cli(common + " --negative-control --out '" + fail_dir.path() + "'") == 1);
  const json control = slurp_json(fail_dir.path("validate_report.json"));
  CHECK(!control["all_pass"].get<bool>());
  CHECK(control["negative_control"]["violations"].get<int>() >= 1);
}

TEST_CASE("convergence verb reports a consistent horizon") {
  Scratch out;
  REQUIRE(run_cli("convergence --sigma 0.02 --out '" + out.path() + "'") == 0);
  const json report = slurp_json(out.path("convergence_report.json"));
  const double t_sigma = report["T_sigma"].get<double>();
  const double n_at = report["N_at_T_sigma"].get<double>();
  const double m_at = report["M_at_T_sigma"].get<double>();
  const double tail = report["tail_bound"].get<double>();
  CHECK(t_sigma > 0.0);
  CHECK(n_at > 0.0);
  CHECK(m_at > 0.0);
  CHECK(std::abs(4.0 * 0.02 * m_at * n_at - 1.0) <= 1e-9);
  // The residual tolerance 1e-10 leaves sqrt(1e-10) = 1e-5 of slack in the
  // square root at the branch point.
  CHECK(std::abs(tail - 0.5 / n_at) <= 1e-4 * tail);

  CHECK(run_cli("convergence --driver brownian --out '" + out.path() + "'") == 2);
}

TEST_CASE("output directory: flag beats environment beats default") {
  Scratch env_dir, flag_dir, cwd;
  REQUIRE(run_cli("deterministic", "CUBOSC_OUT_DIR='" + env_dir.path() + "'") == 0);
  CHECK(fs::exists(env_dir.dir / "deterministic.csv"));

  const fs::path untouched = env_dir.dir / "unused";
  REQUIRE(run_cli("deterministic --out '" + flag_dir.path() + "'",
                  "CUBOSC_OUT_DIR='" + untouched.string() + "'") == 0);
  CHECK(fs::exists(flag_dir.dir / "deterministic.csv"));
  CHECK(!fs::exists(untouched));

  // No flag, no env var: ./out relative to the working directory.
  REQUIRE(run_shell("cd '" + cwd.path() + "' && '" + g_cli + "' deterministic >/dev/null 2>&1") ==
          0);
  CHECK(fs::exists(cwd.dir / "out" / "deterministic.csv"));
}

TEST_CASE("config file supplies defaults and flags override them") {
  Scratch out1, out2;
  const std::string cfg = out1.path("run.ini");
  {
    std::ofstream ini(cfg);
    ini << "[simulate]\n"
        << "sigma=0.25\n"
        << "paths=2\n"
        << "dt=0.002\n"
        << "seed=99\n";
  }
  REQUIRE(run_cli("--config '" + cfg + "' simulate --out '" + out1.path() + "'") == 0);
  const json meta1 = slurp_json(out1.path("simulate_meta.json"));
  CHECK(meta1["sigma"].get<double>() == 0.25);
  CHECK(meta1["seed"].get<std::uint64_t>() == 99);
  REQUIRE(meta1["paths"].size() == 2);

  REQUIRE(run_cli("--config '" + cfg + "' simulate --sigma 0.5 --out '" + out2.path() + "'") == 0);
  const json meta2 = slurp_json(out2.path("simulate_meta.json"));
  CHECK(meta2["sigma"].get<double>() == 0.5);
  REQUIRE(meta2["paths"].size() == 2);
}

TEST_CASE("usage errors exit with the configuration code") {
  CHECK(run_cli("") == 2);
  CHECK(run_cli("deterministic --no-such-flag") == 2);
  CHECK(run_cli("simulate --noise sideways") == 2);
  CHECK(run_cli("simulate --driver fancy") == 2);
}

int main(int argc, char** argv) {
  std::vector<char*> args;
  for (int i = 0; i < argc; ++i) {
    if (i > 0 && argv[i][0] != '-' && g_cli.empty()) {
      g_cli = argv[i];
      continue;
    }
    args.push_back(argv[i]);
  }
  if (g_cli.empty()) {
    std::fprintf(stderr, "usage: test_cli <path-to-cli-binary> [doctest options]\n");
    return 3;
  }
  doctest::Context ctx(static_cast<int>(args.size()), args.data());
  return ctx.run();
}
