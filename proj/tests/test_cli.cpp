#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

int run(const std::string& args) {
  const std::string cmd = std::string(PMJC_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::string capture(const std::string& args) {
  const fs::path out = fs::temp_directory_path() / "pmjc_cli_capture.txt";
  if (std::system((std::string(PMJC_CLI_PATH) + " " + args + " >" + out.string() + " 2>&1").c_str()) < 0) return {};
  return slurp(out);
}

fs::path fresh_dir(const std::string& name) {
  const fs::path d = fs::temp_directory_path() / ("pmjc_cli_" + name);
  fs::remove_all(d);
  return d;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

}  // namespace

TEST_CASE("solve-beta") {
  CHECK(run("solve-beta --target atom --omega0 2.0 --big-omega 1.0") == 0);
  const std::string text = capture("solve-beta --target atom --omega0 2.0 --big-omega 1.0");
  const auto doc = nlohmann::json::parse(text.substr(text.find('{')));
  const std::complex<double> arg{doc.at("argument").at("re").get<double>(), doc.at("argument").at("im").get<double>()};
  CHECK(std::abs(arg - std::complex<double>(-2.14, 1.42)) <= 5e-3);
  CHECK(doc.at("residual").get<double>() <= 1e-10);

  const std::string one = capture("solve-beta --target cavity --n 1 --big-omega 1.0");
  const std::string four = capture("solve-beta --target cavity --n 4 --big-omega 1.0");
  const auto b1 = nlohmann::json::parse(one.substr(one.find('{'))).at("beta");
  const auto b4 = nlohmann::json::parse(four.substr(four.find('{'))).at("beta");
  CHECK(b1.at("re").get<double>() == doctest::Approx(4.0 * b4.at("re").get<double>()));
  CHECK(b1.at("im").get<double>() == doctest::Approx(4.0 * b4.at("im").get<double>()));

  CHECK(run("solve-beta --target atom") == 2);
  CHECK(run("solve-beta --target mirror --big-omega 1") == 2);
  CHECK(run("") == 2);
  CHECK(run("frobnicate") == 2);
}

TEST_CASE("evolve writes one CSV per frame, deterministically") {
  const fs::path a = fresh_dir("evolve_a");
  const fs::path b = fresh_dir("evolve_b");
  fs::create_directories(a);
  write(a / "cfg.json", R"({"evolve": {"frames": ["lab", "gauged"], "t_end": 50.0, "step": 0.01}})");
  CHECK(run("evolve --config " + (a / "cfg.json").string() + " --output-dir " + a.string()) == 0);
  CHECK(run("evolve --config " + (a / "cfg.json").string() + " --output-dir " + b.string()) == 0);
  for (const char* f : {"trajectory_lab.csv", "trajectory_gauged.csv"}) {
    REQUIRE(fs::exists(a / f));
    CHECK(slurp(a / f) == slurp(b / f));
  }
  CHECK_FALSE(fs::exists(a / "trajectory_interaction.csv"));

  // Hermitian beta = 0 run: |c|^2 + |d|^2 stays 1.
  std::istringstream lab(slurp(a / "trajectory_lab.csv"));
  std::string line;
  std::getline(lab, line);
  double drift = 0.0;
  while (std::getline(lab, line)) {
    double t, rc, ic, rd, id;
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &rc, &ic, &rd, &id);
    drift = std::max(drift, std::abs(rc * rc + ic * ic + rd * rd + id * id - 1.0));
  }
  CHECK(drift <= 1e-10);

  // Static non-Hermitian run: d follows cosh.
  const fs::path s = fresh_dir("evolve_static");
  fs::create_directories(s);
  write(s / "cfg.json", R"({"params": {"coupling": {"re": 0, "im": 0.1}},
    "evolve": {"mode": "static", "frames": ["interaction"], "t_end": 20.0, "step": 0.01}})");
  CHECK(run("evolve --config " + (s / "cfg.json").string() + " --output-dir " + s.string()) == 0);
  std::istringstream st(slurp(s / "trajectory_interaction.csv"));
  std::getline(st, line);
  double worst = 0.0;
  while (std::getline(st, line)) {
    double t, rc, ic, rd, id;
    std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf", &t, &rc, &ic, &rd, &id);
    worst = std::max(worst, std::abs(rd - std::cosh(0.1 * t)) / std::cosh(0.1 * t));
  }
  CHECK(worst <= 1e-10);

  write(s / "bad.json", R"({"evolve": {"frames": ["rotating"]}})");
  CHECK(run("evolve --config " + (s / "bad.json").string()) == 2);
}

TEST_CASE("compare writes the report and CSV") {
  const fs::path d = fresh_dir("compare");
  CHECK(run("compare --ratio 25 --output-dir " + d.string()) == 0);
  const auto report = nlohmann::json::parse(slurp(d / "report.json"));
  for (const char* key : {"beta", "max_rel_err", "rms_err", "generated_by"}) CHECK(report.contains(key));
  CHECK(slurp(d / "comparison.csv").rfind("t,re_c_avg", 0) == 0);

  const fs::path sw = fresh_dir("compare_sweep");
  CHECK(run("compare --condition relative_phase --sweep 25 50 100 --output-dir " + sw.string()) == 0);
  std::istringstream csv(slurp(sw / "sweep.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "omega_ratio,max_rel_err");
  double prev = 1e300;
  int rows = 0;
  while (std::getline(csv, line)) {
    const double err = std::stod(line.substr(line.find(',') + 1));
    CHECK(err <= prev);
    prev = err;
    ++rows;
  }
  CHECK(rows == 3);

  fs::create_directories(d);
  write(d / "bad.json", "{\n \"experiment\": {\"n\": 2,,}\n}");
  const std::string msg = capture("compare --config " + (d / "bad.json").string());
  CHECK(msg.find("line 2") != std::string::npos);
  CHECK(run("compare --config " + (d / "bad.json").string()) == 2);
  CHECK(run("compare --ratio 0.5") == 2);
}

TEST_CASE("spectrum and pseudo") {
  const fs::path d = fresh_dir("pseudo");
  CHECK(run("spectrum --n-max 3 --output-dir " + d.string()) == 0);
  CHECK(nlohmann::json::parse(slurp(d / "spectrum.json")).at("blocks").size() == 3);

  CHECK(run("pseudo --alpha 0 --output-dir " + d.string()) == 0);
  const auto zero = nlohmann::json::parse(slurp(d / "pseudo_diagnostics.json"));
  CHECK(zero.at("gram_max_offdiag").get<double>() <= 1e-12);

  CHECK(run("pseudo --output-dir " + d.string()) == 0);
  const auto diag = nlohmann::json::parse(slurp(d / "pseudo_diagnostics.json"));
  CHECK(diag.at("eigen_residual_max").get<double>() <= 1e-9);
  CHECK(diag.at("convention_match") == "n+k");
  for (const char* key : {"alpha", "boson_levels", "energies", "gram_max_offdiag", "eigen_residual_max",
                          "metric_residuals", "convention_match"}) {
    CHECK(diag.contains(key));
  }

  CHECK(run("pseudo --alpha 2.5") == 2);
  CHECK(run("pseudo --count 500") == 2);
}
