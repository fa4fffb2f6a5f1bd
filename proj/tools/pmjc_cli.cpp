// pmjc: command-line front end.
//
// Exit codes: 0 success, 1 numerical or I/O failure, 2 usage or config error.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pmjc/equivalence.hpp"
#include "pmjc/errors.hpp"
#include "pmjc/run_config.hpp"
#include "pmjc/special_fns.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using pmjc::cplx;

namespace {

struct CommonOptions {
  std::string config_path;
  std::string output_dir;
};

pmjc::RunConfig load(const CommonOptions& opts) {
  pmjc::RunConfig cfg = opts.config_path.empty() ? pmjc::RunConfig{} : pmjc::load_run_config(opts.config_path);
  if (!opts.output_dir.empty()) cfg.output_dir = opts.output_dir;
  return cfg;
}

fs::path prepare_output_dir(const pmjc::RunConfig& cfg) {
  std::error_code ec;
  fs::create_directories(cfg.output_dir, ec);
  if (ec) {
    throw std::runtime_error("cannot create output directory '" + cfg.output_dir.string() +
                             "': " + ec.message());
  }
  return cfg.output_dir;
}

std::string format_complex(cplx z) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
  return buf;
}

void add_common(CLI::App* sub, CommonOptions& opts) {
  sub->add_option("--config", opts.config_path, "JSON run configuration")->check(CLI::ExistingFile);
  sub->add_option("--output-dir", opts.output_dir, "Directory for output files");
}

int cmd_solve_beta(const std::string& target, double omega0, double omega, double big_omega, int n,
                   const std::string& condition, double guess_re, double guess_im) {
  const pmjc::JcParams params{omega0, omega, {1.0, 0.0}};
  const auto tgt = pmjc::parse_modulation_target(target);
  const auto cond = pmjc::parse_bessel_condition(condition);
  const cplx beta = pmjc::solve_modulation_beta(params, tgt, n, big_omega, cond, {guess_re, guess_im});
  const cplx arg = pmjc::condition_argument(params, tgt, n, big_omega, beta, cond);
  const double residual = std::abs(pmjc::bessel_j0(arg) - cplx{0.0, 1.0});
  std::cout << "beta = " << format_complex(beta) << "\n";
  const json out{{"generated_by", pmjc::kGeneratedBy},
                 {"target", pmjc::to_string(tgt)},
                 {"condition", pmjc::to_string(cond)},
                 {"n", n},
                 {"big_omega", big_omega},
                 {"beta", pmjc::complex_to_json(beta)},
                 {"argument", pmjc::complex_to_json(arg)},
                 {"residual", residual}};
  std::cout << out.dump(2) << "\n";
  return residual <= 1e-10 ? 0 : 1;
}

int cmd_evolve(const pmjc::RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  for (const pmjc::Trajectory& traj : pmjc::run_evolve(cfg)) {
    std::ostringstream csv;
    pmjc::write_trajectory_csv(csv, traj);
    const fs::path path = dir / ("trajectory_" + std::string(pmjc::to_string(traj.frame())) + ".csv");
    pmjc::write_text_file(path, csv.str());
    std::cout << "wrote " << path.string() << " (" << traj.size() << " samples)\n";
  }
  return 0;
}

int cmd_compare(const pmjc::RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const pmjc::ComparisonReport report = pmjc::run_equivalence_experiment(cfg.experiment);
  std::vector<pmjc::SweepPoint> sweep;
  if (!cfg.sweep.empty()) sweep = pmjc::convergence_sweep(cfg.experiment, cfg.sweep);

  pmjc::write_text_file(dir / "report.json", pmjc::report_to_json(cfg.experiment, report, sweep).dump(2) + "\n");
  pmjc::write_text_file(dir / "comparison.csv", pmjc::comparison_csv(report));
  if (!sweep.empty()) pmjc::write_text_file(dir / "sweep.csv", pmjc::sweep_csv(sweep));

  std::cout << "beta = " << format_complex(report.beta_used) << "\n"
            << "max_rel_err = " << report.max_rel_err << "\n"
            << "rms_err = " << report.rms_err << "\n";
  for (const auto& p : sweep) std::cout << "ratio " << p.ratio << ": max_rel_err " << p.max_rel_err << "\n";
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

int cmd_spectrum(const pmjc::RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const json doc = pmjc::spectrum_to_json(cfg.params, cfg.spectrum);
  pmjc::write_text_file(dir / "spectrum.json", doc.dump(2) + "\n");
  std::cout << "wrote " << (dir / "spectrum.json").string() << "\n";
  return 0;
}

int cmd_pseudo(const pmjc::RunConfig& cfg) {
  const fs::path dir = prepare_output_dir(cfg);
  const pmjc::PseudoDiagnostics diag = pmjc::run_pseudo_diagnostics(cfg.pseudo);
  pmjc::write_text_file(dir / "pseudo_diagnostics.json", pmjc::pseudo_to_json(cfg.pseudo, diag).dump(2) + "\n");
  std::cout << "gram_max_offdiag = " << diag.gram_max_offdiag << "\n"
            << "eigen_residual_max = " << diag.eigen_residual_max << "\n"
            << "convention_match = "
            << (diag.convention.match ? pmjc::to_string(*diag.convention.match) : "none") << "\n";
  for (const auto& w : diag.warnings) std::cerr << "warning: " << w << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Modulated and pseudo-deformed Jaynes-Cummings simulations"};
  app.require_subcommand(1);

  // solve-beta
  std::string sb_target;
  double sb_omega0 = 1.0;
  double sb_omega = 1.0;
  double sb_big_omega = 0.0;
  int sb_n = 1;
  std::string sb_condition = "published";
  double sb_guess_re = pmjc::kPrincipalRootGuess.real();
  double sb_guess_im = pmjc::kPrincipalRootGuess.imag();
  auto* solve = app.add_subcommand("solve-beta", "Solve the Bessel condition for the modulation depth");
  solve->add_option("--target", sb_target, "atom | cavity")->required();
  solve->add_option("--omega0", sb_omega0, "Atomic frequency");
  solve->add_option("--omega", sb_omega, "Cavity frequency");
  solve->add_option("--big-omega", sb_big_omega, "Drive frequency")->required();
  solve->add_option("--n", sb_n, "Excitation number");
  solve->add_option("--condition", sb_condition, "published | relative_phase");
  solve->add_option("--guess-re", sb_guess_re, "Real part of the Newton seed");
  solve->add_option("--guess-im", sb_guess_im, "Imaginary part of the Newton seed");

  // evolve
  CommonOptions ev_opts;
  std::vector<std::string> ev_frames;
  auto* evolve = app.add_subcommand("evolve", "Integrate the amplitude equations, one CSV per frame");
  add_common(evolve, ev_opts);
  evolve->add_option("--frames", ev_frames, "lab, interaction, gauged");

  // compare
  CommonOptions cmp_opts;
  std::optional<double> cmp_ratio;
  std::vector<double> cmp_sweep;
  std::string cmp_target;
  std::string cmp_condition;
  std::optional<int> cmp_n;
  auto* compare = app.add_subcommand("compare", "Driven vs static comparison (defaults: headline run)");
  add_common(compare, cmp_opts);
  compare->add_option("--ratio", cmp_ratio, "Omega / Omega_R");
  compare->add_option("--sweep", cmp_sweep, "Ratios for a convergence sweep");
  compare->add_option("--target", cmp_target, "atom | cavity");
  compare->add_option("--condition", cmp_condition, "published | relative_phase");
  compare->add_option("--n", cmp_n, "Excitation number");

  // spectrum
  CommonOptions sp_opts;
  std::optional<int> sp_n_max;
  auto* spectrum = app.add_subcommand("spectrum", "Dressed spectra and PT phases per excitation block");
  add_common(spectrum, sp_opts);
  spectrum->add_option("--n-max", sp_n_max, "Largest excitation number");

  // pseudo
  CommonOptions ps_opts;
  std::optional<double> ps_alpha;
  std::optional<int> ps_levels;
  std::optional<int> ps_count;
  auto* pseudo = app.add_subcommand("pseudo", "Deformed JC biorthogonal diagnostics");
  add_common(pseudo, ps_opts);
  pseudo->add_option("--alpha", ps_alpha, "Similarity strength, |alpha| <= 2");
  pseudo->add_option("--boson-levels", ps_levels, "Boson truncation");
  pseudo->add_option("--count", ps_count, "Number of included states");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (solve->parsed()) {
      return cmd_solve_beta(sb_target, sb_omega0, sb_omega, sb_big_omega, sb_n, sb_condition,
                            sb_guess_re, sb_guess_im);
    }
    if (evolve->parsed()) {
      pmjc::RunConfig cfg = load(ev_opts);
      if (!ev_frames.empty()) {
        cfg.evolve.frames.clear();
        for (const auto& f : ev_frames) cfg.evolve.frames.push_back(pmjc::parse_frame(f));
      }
      cfg.validate();
      return cmd_evolve(cfg);
    }
    if (compare->parsed()) {
      pmjc::RunConfig cfg = load(cmp_opts);
      if (cmp_ratio) cfg.experiment.omega_ratio = *cmp_ratio;
      if (!cmp_sweep.empty()) cfg.sweep = cmp_sweep;
      if (!cmp_target.empty()) cfg.experiment.target = pmjc::parse_modulation_target(cmp_target);
      if (!cmp_condition.empty()) cfg.experiment.condition = pmjc::parse_bessel_condition(cmp_condition);
      if (cmp_n) cfg.experiment.n = *cmp_n;
      cfg.validate();
      return cmd_compare(cfg);
    }
    if (spectrum->parsed()) {
      pmjc::RunConfig cfg = load(sp_opts);
      if (sp_n_max) cfg.spectrum.n_max = *sp_n_max;
      cfg.validate();
      return cmd_spectrum(cfg);
    }
    if (pseudo->parsed()) {
      pmjc::RunConfig cfg = load(ps_opts);
      if (ps_alpha) cfg.pseudo.alpha = *ps_alpha;
      if (ps_levels) cfg.pseudo.boson_levels = *ps_levels;
      if (ps_count) cfg.pseudo.count = *ps_count;
      cfg.validate();
      return cmd_pseudo(cfg);
    }
  } catch (const std::logic_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}
