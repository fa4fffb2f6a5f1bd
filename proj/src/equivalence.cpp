#include "pmjc/equivalence.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <numbers>
#include <stdexcept>

#include "pmjc/errors.hpp"

namespace pmjc {

namespace {

constexpr cplx kI{0.0, 1.0};
constexpr double kConditionResidual = 1e-12;

// Floor of the relative-error normalization, keeps sinh(0) = 0 from blowing up.
constexpr double kReferenceFloor = 0.1;

}  // namespace

const char* to_string(BesselCondition condition) {
  return condition == BesselCondition::AsPublished ? "published" : "relative_phase";
}

BesselCondition parse_bessel_condition(const std::string& text) {
  if (text == "published") return BesselCondition::AsPublished;
  if (text == "relative_phase") return BesselCondition::RelativePhase;
  throw std::invalid_argument("unknown Bessel condition '" + text +
                              "' (expected published|relative_phase)");
}

double ExperimentConfig::rabi_frequency() const {
  return std::abs(params.coupling.real()) * std::sqrt(static_cast<double>(n));
}

double ExperimentConfig::big_omega() const { return omega_ratio * rabi_frequency(); }

void ExperimentConfig::validate() const {
  params.validate();
  if (params.coupling.imag() != 0.0 || params.coupling.real() == 0.0) {
    throw std::invalid_argument("ExperimentConfig: the driven coupling must be real and nonzero");
  }
  if (n < 1) throw std::invalid_argument("ExperimentConfig: n must be >= 1");
  if (!(omega_ratio > 1.0)) throw std::invalid_argument("ExperimentConfig: omega_ratio must be > 1");
  if (!(duration_rabi_units > 0.0)) {
    throw std::invalid_argument("ExperimentConfig: duration_rabi_units must be > 0");
  }
  if (window_periods < 1) throw std::invalid_argument("ExperimentConfig: window_periods must be >= 1");
  if (step_per_period < 100) {
    throw std::invalid_argument("ExperimentConfig: step_per_period must be >= 100");
  }
  if ((static_cast<long long>(window_periods) * step_per_period) % 2 != 0) {
    throw std::invalid_argument(
        "ExperimentConfig: window_periods * step_per_period must be even so the window is centered "
        "on a sample");
  }
  if (!allow_off_resonance && params.omega0 != params.omega) {
    throw std::invalid_argument(
        "ExperimentConfig: the averaged equations hold at resonance (omega0 == omega); set "
        "allow_off_resonance to run anyway");
  }
}

cplx condition_argument(const JcParams& params, ModulationTarget target, int n, double big_omega,
                        cplx beta, BesselCondition condition) {
  const bool atom = target == ModulationTarget::AtomFrequency;
  if (condition == BesselCondition::AsPublished) {
    return atom ? -params.omega0 * beta / (2.0 * big_omega)
                : -static_cast<double>(n) * params.omega * beta / big_omega;
  }
  return atom ? -params.omega0 * beta / big_omega : -params.omega * beta / big_omega;
}

cplx solve_modulation_beta(const JcParams& params, ModulationTarget target, int n,
                           double big_omega, BesselCondition condition, cplx guess) {
  params.validate();
  if (!(big_omega > 0.0)) throw std::invalid_argument("solve_modulation_beta: big_omega must be > 0");
  if (n < 1) throw std::invalid_argument("solve_modulation_beta: n must be >= 1");

  const RootResult root = solve_j0_equals(kI, guess);
  if (!root.converged) {
    throw NumericalError("solve_modulation_beta: Newton did not converge (residual " +
                         std::to_string(root.residual) + ")");
  }
  // The argument is linear in beta: argument = beta * unit.
  const cplx unit = condition_argument(params, target, n, big_omega, 1.0, condition);
  const cplx beta = root.root / unit;
  const double residual =
      std::abs(bessel_j0(condition_argument(params, target, n, big_omega, beta, condition)) - kI);
  if (residual > kConditionResidual) {
    throw NumericalError("solve_modulation_beta: condition residual " + std::to_string(residual) +
                         " exceeds 1e-12");
  }
  return beta;
}

std::vector<std::optional<cplx>> centered_window_average(const std::vector<cplx>& samples,
                                                         int half_width) {
  if (half_width < 1) throw std::invalid_argument("centered_window_average: half_width must be >= 1");
  const auto size = static_cast<long long>(samples.size());
  std::vector<std::optional<cplx>> out(samples.size());
  const double width = 2.0 * half_width;
  for (long long i = half_width; i + half_width < size; ++i) {
    cplx sum = 0.5 * (samples[i - half_width] + samples[i + half_width]);
    for (long long j = i - half_width + 1; j < i + half_width; ++j) sum += samples[j];
    out[i] = sum / width;
  }
  return out;
}

double relative_deviation(cplx value, cplx reference) {
  return std::abs(value - reference) / std::max(std::abs(reference), kReferenceFloor);
}

ComparisonReport run_equivalence_experiment(const ExperimentConfig& cfg) {
  cfg.validate();
  const JcParams& params = cfg.params;
  const int n = cfg.n;
  const double rabi = cfg.rabi_frequency();
  const double big_omega = cfg.big_omega();
  const double period = 2.0 * std::numbers::pi / big_omega;
  const double step = period / cfg.step_per_period;
  const double t_end = cfg.duration_rabi_units / rabi;

  ComparisonReport report;
  if (params.omega0 != params.omega) {
    report.warnings.emplace_back(
        "off resonance: the averaged equations were derived for omega0 == omega");
  }

  ModulationSpec mod;
  mod.target = cfg.target;
  mod.big_omega = big_omega;
  mod.beta = cfg.beta_override ? *cfg.beta_override
                               : solve_modulation_beta(params, cfg.target, n, big_omega,
                                                       cfg.condition, cfg.root_guess);
  report.beta_used = mod.beta;
  report.reference_coupling =
      params.coupling.real() *
      bessel_j0(condition_argument(params, cfg.target, n, big_omega, mod.beta, cfg.condition));

  // Driven envelope samples.
  std::vector<double> times;
  std::vector<cplx> cs;
  std::vector<cplx> ds;
  if (cfg.condition == BesselCondition::AsPublished) {
    const AmplitudeState start{n, {0.0, 0.0}, {1.0, 0.0}, Frame::Gauged};
    const RhsFn rhs = [&](const AmplitudeState& s, double t) {
      return rhs_gauged(params, mod, s, t);
    };
    Trajectory traj;
    try {
      traj = integrate(rhs, start, 0.0, t_end, step);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string("equivalence experiment (gauged frame): ") + e.what(),
                             e.time());
    }
    times = traj.times;
    for (const auto& s : traj.states) {
      cs.push_back(s.c);
      ds.push_back(s.d);
    }
  } else {
    const AmplitudeState start{n, {0.0, 0.0}, {1.0, 0.0}, Frame::Interaction};
    const RhsFn rhs = [&](const AmplitudeState& s, double t) {
      return rhs_interaction(params, mod, s, t);
    };
    Trajectory traj;
    try {
      traj = integrate(rhs, start, 0.0, t_end, step);
    } catch (const IntegrationError& e) {
      throw IntegrationError(std::string("equivalence experiment (interaction frame): ") + e.what(),
                             e.time());
    }
    times = traj.times;
    for (std::size_t i = 0; i < traj.size(); ++i) {
      const auto [mc, md] = interaction_modulation_phases(params, mod, n, times[i]);
      cs.push_back(traj.states[i].c * std::exp(kI * mc));
      ds.push_back(traj.states[i].d * std::exp(kI * md));
    }
  }

  // A shortened final step breaks the uniform grid; windows must not touch it.
  std::size_t usable = times.size();
  if (usable >= 2 && std::abs((times[usable - 1] - times[usable - 2]) - step) > 1e-9 * step) {
    --usable;
  }
  cs.resize(usable);
  ds.resize(usable);

  const int half = cfg.window_periods * cfg.step_per_period / 2;
  const auto c_avg = centered_window_average(cs, half);
  const auto d_avg = centered_window_average(ds, half);

  JcParams reference_params = params;
  reference_params.coupling = report.reference_coupling;
  const AmplitudeState reference_start{n, {0.0, 0.0}, {1.0, 0.0}, Frame::Gauged};

  double sum_sq = 0.0;
  for (std::size_t i = 0; i < usable; ++i) {
    if (!c_avg[i] || !d_avg[i]) continue;
    const AmplitudeState ref = closed_form_static(reference_params, reference_start, times[i]);
    const double ec = relative_deviation(*c_avg[i], ref.c);
    const double ed = relative_deviation(*d_avg[i], ref.d);
    report.max_rel_err = std::max({report.max_rel_err, ec, ed});
    sum_sq += 0.5 * (ec * ec + ed * ed);
    report.times.push_back(times[i]);
    report.driven_envelope.emplace_back(*c_avg[i], *d_avg[i]);
    report.static_reference.emplace_back(ref.c, ref.d);
  }
  if (report.times.empty()) {
    throw std::invalid_argument(
        "run_equivalence_experiment: duration shorter than one averaging window");
  }
  report.rms_err = std::sqrt(sum_sq / static_cast<double>(report.times.size()));
  return report;
}

std::vector<SweepPoint> convergence_sweep(const ExperimentConfig& base,
                                          const std::vector<double>& ratios) {
  if (ratios.empty()) throw std::invalid_argument("convergence_sweep: no ratios given");
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    if (!(ratios[i] > 1.0)) throw std::invalid_argument("convergence_sweep: ratios must be > 1");
    if (i > 0 && !(ratios[i] > ratios[i - 1])) {
      throw std::invalid_argument("convergence_sweep: ratios must be strictly increasing");
    }
  }

  std::vector<std::future<ComparisonReport>> jobs;
  jobs.reserve(ratios.size());
  for (double ratio : ratios) {
    ExperimentConfig cfg = base;
    cfg.omega_ratio = ratio;
    jobs.push_back(std::async(std::launch::async, [cfg] { return run_equivalence_experiment(cfg); }));
  }
  std::vector<SweepPoint> curve;
  curve.reserve(ratios.size());
  for (std::size_t i = 0; i < ratios.size(); ++i) {
    curve.push_back({ratios[i], jobs[i].get().max_rel_err});
  }
  return curve;
}

}  // namespace pmjc
