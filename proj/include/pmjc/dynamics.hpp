#pragma once

// Amplitude dynamics of the periodically modulated JC model inside one
// n-excitation block, |psi> = c |n-1, 1> + d |n, 0>.
//
// Frames:
//   Lab          c~'(t), d'(t)   Schroedinger amplitudes of the driven model.
//   Interaction  c~(t),  d(t)    c~ = c~' e^{+i(omega0/2 + omega(n-1)) t},
//                                d  = d'  e^{+i(n omega - omega0/2) t}.
//   Gauged       c(t),   d(t)    c  = c~ e^{+i Phi(t)}, d unchanged, where
//                                Phi = (omega0 beta / 2 Omega) sin(Omega t)   (atom drive)
//                                Phi = (n omega beta / Omega) sin(Omega t)    (cavity drive).
//
// Lab-frame diagonal entries:
//   atom drive    omega0(t)/2 + omega (n-1),     n omega - omega0(t)/2,
//                 omega0(t) = omega0 (1 + beta cos(Omega t))
//   cavity drive  omega0/2 + omega(t) (n-1),     n omega(t) - omega0/2,
//                 omega(t) = omega (1 + beta cos(Omega t))
// The cavity-drive entries follow from substituting the block state into the
// Hamiltonian with omega(t) a^dagger a. In the gauged frame the atom-drive
// equations are
//   i dc/dt = g sqrt(n) e^{i(omega0-omega)t} e^{+i Phi} d
//   i dd/dt = -(omega0 beta/2) cos(Omega t) d + g sqrt(n) e^{-i(omega0-omega)t} e^{-i Phi} c
// and the cavity-drive equations keep a residual -(omega beta) cos(Omega t) c
// term, because the gauge removes n omega beta cos while c carries (n-1).

#include <complex>
#include <functional>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "pmjc/jc_core.hpp"

namespace pmjc {

enum class ModulationTarget { AtomFrequency, CavityFrequency };

const char* to_string(ModulationTarget target);
ModulationTarget parse_modulation_target(const std::string& text);

struct ModulationSpec {
  ModulationTarget target = ModulationTarget::AtomFrequency;
  cplx beta{0.0, 0.0};  // complex depth: Im(beta) acts as gain/loss
  double big_omega = 1.0;

  void validate() const;
};

enum class Frame { Lab, Interaction, Gauged };

const char* to_string(Frame frame);
Frame parse_frame(const std::string& text);

struct AmplitudeState {
  int n = 1;
  cplx c{0.0, 0.0};  // amplitude on |n-1, 1>
  cplx d{1.0, 0.0};  // amplitude on |n, 0>
  Frame frame = Frame::Lab;
};

struct Derivative {
  cplx dc;
  cplx dd;
};

using RhsFn = std::function<Derivative(const AmplitudeState&, double)>;

/// Uniformly sampled solution; the final step may be shorter so the last time
/// is exactly the requested end time.
struct Trajectory {
  std::vector<double> times;
  std::vector<AmplitudeState> states;
  double step = 0.0;

  std::size_t size() const { return times.size(); }
  Frame frame() const;
};

// Right-hand sides. Each checks the frame tag of `state` and throws
// std::invalid_argument on a mismatch.

/// Lab-frame equations. The coupling must be real (the driven model is
/// Hermitian apart from a complex beta, which is allowed).
Derivative rhs_lab(const JcParams& params, const ModulationSpec& mod, const AmplitudeState& state,
                   double t);

/// Interaction-frame equations (fast static phases removed, modulation kept).
Derivative rhs_interaction(const JcParams& params, const ModulationSpec& mod,
                           const AmplitudeState& state, double t);

/// Gauged-frame equations, see the header comment.
Derivative rhs_gauged(const JcParams& params, const ModulationSpec& mod,
                      const AmplitudeState& state, double t);

/// Period-averaged gauged equations at resonance: coupling g sqrt(n) J0(-omega0 beta / 2 Omega)
/// for the atom drive, g sqrt(n) J0(-n omega beta / Omega) for the cavity drive.
Derivative rhs_averaged(const JcParams& params, const ModulationSpec& mod,
                        const AmplitudeState& state, double t);

/// Effective static coupling g_s of the averaged equations (without sqrt(n)).
cplx averaged_coupling(const JcParams& params, const ModulationSpec& mod, int n);

/// Static equations i dc/dt = g_s sqrt(n) d, i dd/dt = g_s sqrt(n) c, any complex g_s.
/// Applies to slow-frame amplitudes (Interaction or Gauged).
Derivative rhs_static(const JcParams& params, const AmplitudeState& state);

// Frame maps. Inverses undo the forward map exactly up to rounding.

AmplitudeState to_interaction(const AmplitudeState& lab, const JcParams& params, double t);
AmplitudeState from_interaction(const AmplitudeState& interaction, const JcParams& params, double t);
AmplitudeState to_gauged(const AmplitudeState& interaction, const ModulationSpec& mod,
                         const JcParams& params, double t);
AmplitudeState from_gauged(const AmplitudeState& gauged, const ModulationSpec& mod,
                           const JcParams& params, double t);

/// Gauge exponent Phi(t); to_gauged multiplies c by exp(i Phi(t)).
cplx gauge_phase(const JcParams& params, const ModulationSpec& mod, int n, double t);

/// Integrated interaction-frame modulation phases (M_c(t), M_d(t)): the
/// diagonal entries m_c, m_d of the interaction-frame equations integrated
/// from 0. Multiplying c~ by e^{i M_c} and d by e^{i M_d} removes both
/// diagonal modulations.
std::pair<cplx, cplx> interaction_modulation_phases(const JcParams& params,
                                                    const ModulationSpec& mod, int n, double t);

/// Apply a frame map pointwise to every sample.
Trajectory map_trajectory(const Trajectory& traj,
                          const std::function<AmplitudeState(const AmplitudeState&, double)>& fn);

/// Classical fixed-step RK4 from t0 to t1. Throws IntegrationError on a bad
/// step or a non-finite amplitude.
Trajectory integrate(const RhsFn& rhs, const AmplitudeState& state0, double t0, double t1,
                     double step);

/// Exact solution of the static equations with kappa = g_s sqrt(n):
/// c(t) = cos(kappa t) c0 - i sin(kappa t) d0, d(t) = -i sin(kappa t) c0 + cos(kappa t) d0.
/// Reduces to cosh/sinh for imaginary coupling.
AmplitudeState closed_form_static(const JcParams& params, const AmplitudeState& state0, double t);

/// min(2 pi / Omega, 2 pi / (|g| sqrt(n))) / 400.
double default_step(const JcParams& params, const ModulationSpec& mod, int n);

/// CSV with header `t,re_c,im_c,re_d,im_d,frame,n`; doubles printed with 17
/// significant digits, so output bytes depend only on the values.
void write_trajectory_csv(std::ostream& out, const Trajectory& traj);
Trajectory read_trajectory_csv(std::istream& in);

}  // namespace pmjc
