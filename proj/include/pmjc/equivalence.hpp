#pragma once

// Driven-vs-static comparison: pick beta from a Bessel condition, integrate
// the modulated block, window-average over drive periods, and measure the
// deviation from the static imaginary-coupling evolution.

#include <complex>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmjc/dynamics.hpp"
#include "pmjc/jc_core.hpp"
#include "pmjc/special_fns.hpp"

namespace pmjc {

/// Which Bessel condition fixes beta, and the frame the envelope is taken in.
///
/// AsPublished: J0(-omega0 beta / 2 Omega) = i (atom) or J0(-n omega beta / Omega) = i
/// (cavity); the envelope is the gauged-frame (c, d) integrated with rhs_gauged.
///
/// RelativePhase: J0(-omega0 beta / Omega) = i (atom) or J0(-omega beta / Omega) = i
/// (cavity, independent of n); both interaction-frame diagonal modulations are
/// gauged away, so the coupling carries the full relative phase
/// exp(i (M_c - M_d)) whose period average is the J0 above.
enum class BesselCondition { AsPublished, RelativePhase };

const char* to_string(BesselCondition condition);
BesselCondition parse_bessel_condition(const std::string& text);

struct ExperimentConfig {
  JcParams params{1.0, 1.0, {0.01, 0.0}};
  ModulationTarget target = ModulationTarget::AtomFrequency;
  int n = 1;
  double omega_ratio = 100.0;         // Omega / Omega_R
  double duration_rabi_units = 2.0;   // total time in units of 1 / Omega_R
  int window_periods = 1;             // boxcar width in drive periods
  int step_per_period = 400;
  BesselCondition condition = BesselCondition::AsPublished;
  std::optional<cplx> beta_override;  // skip the Bessel condition (e.g. beta = 0)
  cplx root_guess = kPrincipalRootGuess;
  bool allow_off_resonance = false;

  double rabi_frequency() const;  // |g| sqrt(n)
  double big_omega() const;       // omega_ratio * rabi_frequency()
  void validate() const;
};

struct ComparisonReport {
  cplx beta_used;
  cplx reference_coupling;  // g_s of the static reference (i g when beta solves the condition)
  double max_rel_err = 0.0;
  double rms_err = 0.0;
  std::vector<double> times;
  std::vector<std::pair<cplx, cplx>> driven_envelope;   // window-averaged (c, d)
  std::vector<std::pair<cplx, cplx>> static_reference;  // closed-form static (c, d)
  std::vector<std::string> warnings;
};

struct SweepPoint {
  double ratio = 0.0;
  double max_rel_err = 0.0;
};

/// The argument of J0 in the chosen condition, as a multiple of beta.
cplx condition_argument(const JcParams& params, ModulationTarget target, int n, double big_omega,
                        cplx beta, BesselCondition condition = BesselCondition::AsPublished);

/// beta such that the condition argument equals the root of J0(r) = i
/// selected by `guess`. Throws NumericalError if the root solve fails or the
/// final residual exceeds 1e-12.
cplx solve_modulation_beta(const JcParams& params, ModulationTarget target, int n,
                           double big_omega,
                           BesselCondition condition = BesselCondition::AsPublished,
                           cplx guess = kPrincipalRootGuess);

/// Centered trapezoid boxcar: entry i averages samples[i - half_width .. i + half_width]
/// with half weights at both ends. Entries closer than half_width to either end
/// are left as std::nullopt.
std::vector<std::optional<cplx>> centered_window_average(const std::vector<cplx>& samples,
                                                         int half_width);

/// Relative deviation normalized by max(|reference|, 0.1).
double relative_deviation(cplx value, cplx reference);

ComparisonReport run_equivalence_experiment(const ExperimentConfig& cfg);

/// One experiment per ratio (run concurrently); ratios must be strictly
/// increasing and > 1.
std::vector<SweepPoint> convergence_sweep(const ExperimentConfig& base,
                                          const std::vector<double>& ratios);

}  // namespace pmjc
