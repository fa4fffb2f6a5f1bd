#include "pmjc/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numbers>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "pmjc/errors.hpp"
#include "pmjc/special_fns.hpp"

namespace pmjc {

namespace {

constexpr cplx kI{0.0, 1.0};

void require_frame(const AmplitudeState& s, Frame expected, const char* fn) {
  if (s.frame != expected) {
    throw std::invalid_argument(std::string(fn) + ": expected a " + to_string(expected) +
                                "-frame state, got " + to_string(s.frame));
  }
  if (s.n < 1) {
    throw std::invalid_argument(std::string(fn) + ": excitation number must be >= 1");
  }
}

void require_real_coupling(const JcParams& params, const char* fn) {
  if (params.coupling.imag() != 0.0) {
    throw std::invalid_argument(std::string(fn) +
                                ": the driven model needs a real coupling constant");
  }
}

double root_n(int n) { return std::sqrt(static_cast<double>(n)); }

// Static diagonal energies of the block (lab frame with beta = 0).
double static_energy_c(const JcParams& p, int n) { return p.omega0 / 2.0 + p.omega * (n - 1); }
double static_energy_d(const JcParams& p, int n) { return n * p.omega - p.omega0 / 2.0; }

// Modulated parts of the interaction-frame diagonal, (m_c, m_d).
std::pair<cplx, cplx> modulation_diagonal(const JcParams& p, const ModulationSpec& mod, int n,
                                          double t) {
  const double cw = std::cos(mod.big_omega * t);
  if (mod.target == ModulationTarget::AtomFrequency) {
    const cplx half = p.omega0 * mod.beta / 2.0 * cw;
    return {half, -half};
  }
  const cplx unit = p.omega * mod.beta * cw;
  return {static_cast<double>(n - 1) * unit, static_cast<double>(n) * unit};
}

bool finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

}  // namespace

const char* to_string(ModulationTarget target) {
  return target == ModulationTarget::AtomFrequency ? "atom" : "cavity";
}

ModulationTarget parse_modulation_target(const std::string& text) {
  if (text == "atom") return ModulationTarget::AtomFrequency;
  if (text == "cavity") return ModulationTarget::CavityFrequency;
  throw std::invalid_argument("unknown modulation target '" + text + "' (expected atom|cavity)");
}

const char* to_string(Frame frame) {
  switch (frame) {
    case Frame::Lab:
      return "lab";
    case Frame::Interaction:
      return "interaction";
    case Frame::Gauged:
      return "gauged";
  }
  return "unknown";
}

Frame parse_frame(const std::string& text) {
  if (text == "lab") return Frame::Lab;
  if (text == "interaction") return Frame::Interaction;
  if (text == "gauged") return Frame::Gauged;
  throw std::invalid_argument("unknown frame '" + text + "' (expected lab|interaction|gauged)");
}

void ModulationSpec::validate() const {
  if (!(big_omega > 0.0) || !std::isfinite(big_omega)) {
    throw std::invalid_argument("ModulationSpec: big_omega must be finite and > 0");
  }
  if (!finite(beta)) throw std::invalid_argument("ModulationSpec: beta must be finite");
}

Frame Trajectory::frame() const {
  if (states.empty()) throw std::logic_error("Trajectory::frame on an empty trajectory");
  return states.front().frame;
}

Derivative rhs_lab(const JcParams& params, const ModulationSpec& mod, const AmplitudeState& state,
                   double t) {
  require_frame(state, Frame::Lab, "rhs_lab");
  require_real_coupling(params, "rhs_lab");
  const int n = state.n;
  const auto [mc, md] = modulation_diagonal(params, mod, n, t);
  const cplx hc = static_energy_c(params, n) + mc;
  const cplx hd = static_energy_d(params, n) + md;
  const double coupling = params.coupling.real() * root_n(n);
  return {-kI * (hc * state.c + coupling * state.d), -kI * (hd * state.d + coupling * state.c)};
}

Derivative rhs_interaction(const JcParams& params, const ModulationSpec& mod,
                           const AmplitudeState& state, double t) {
  require_frame(state, Frame::Interaction, "rhs_interaction");
  require_real_coupling(params, "rhs_interaction");
  const int n = state.n;
  const auto [mc, md] = modulation_diagonal(params, mod, n, t);
  const double coupling = params.coupling.real() * root_n(n);
  const cplx detuning_phase = std::exp(kI * params.detuning() * t);
  return {-kI * (mc * state.c + coupling * detuning_phase * state.d),
          -kI * (md * state.d + coupling * std::conj(detuning_phase) * state.c)};
}

cplx gauge_phase(const JcParams& params, const ModulationSpec& mod, int n, double t) {
  const double sw = std::sin(mod.big_omega * t);
  if (mod.target == ModulationTarget::AtomFrequency) {
    return params.omega0 * mod.beta / (2.0 * mod.big_omega) * sw;
  }
  return static_cast<double>(n) * params.omega * mod.beta / mod.big_omega * sw;
}

std::pair<cplx, cplx> interaction_modulation_phases(const JcParams& params,
                                                    const ModulationSpec& mod, int n, double t) {
  const double sw = std::sin(mod.big_omega * t) / mod.big_omega;
  if (mod.target == ModulationTarget::AtomFrequency) {
    const cplx half = params.omega0 * mod.beta / 2.0 * sw;
    return {half, -half};
  }
  const cplx unit = params.omega * mod.beta * sw;
  return {static_cast<double>(n - 1) * unit, static_cast<double>(n) * unit};
}

Derivative rhs_gauged(const JcParams& params, const ModulationSpec& mod,
                      const AmplitudeState& state, double t) {
  require_frame(state, Frame::Gauged, "rhs_gauged");
  require_real_coupling(params, "rhs_gauged");
  const int n = state.n;
  const double coupling = params.coupling.real() * root_n(n);
  const cplx detuning_phase = std::exp(kI * params.detuning() * t);
  const cplx gauge = std::exp(kI * gauge_phase(params, mod, n, t));
  const double cw = std::cos(mod.big_omega * t);

  cplx diag_c(0.0);
  cplx diag_d;
  if (mod.target == ModulationTarget::AtomFrequency) {
    diag_d = -params.omega0 * mod.beta / 2.0 * cw;
  } else {
    diag_c = -params.omega * mod.beta * cw;
    diag_d = static_cast<double>(n) * params.omega * mod.beta * cw;
  }
  return {-kI * (diag_c * state.c + coupling * detuning_phase * gauge * state.d),
          -kI * (diag_d * state.d + coupling * std::conj(detuning_phase) / gauge * state.c)};
}

cplx averaged_coupling(const JcParams& params, const ModulationSpec& mod, int n) {
  require_real_coupling(params, "averaged_coupling");
  mod.validate();
  const cplx argument = (mod.target == ModulationTarget::AtomFrequency)
                            ? -params.omega0 * mod.beta / (2.0 * mod.big_omega)
                            : -static_cast<double>(n) * params.omega * mod.beta / mod.big_omega;
  return params.coupling.real() * bessel_j0(argument);
}

Derivative rhs_averaged(const JcParams& params, const ModulationSpec& mod,
                        const AmplitudeState& state, double /*t*/) {
  require_frame(state, Frame::Gauged, "rhs_averaged");
  const cplx kappa = averaged_coupling(params, mod, state.n) * root_n(state.n);
  return {-kI * kappa * state.d, -kI * kappa * state.c};
}

Derivative rhs_static(const JcParams& params, const AmplitudeState& state) {
  if (state.frame == Frame::Lab) {
    throw std::invalid_argument("rhs_static: the static equations act on slow (non-lab) amplitudes");
  }
  if (state.n < 1) throw std::invalid_argument("rhs_static: excitation number must be >= 1");
  const cplx kappa = params.coupling * root_n(state.n);
  return {-kI * kappa * state.d, -kI * kappa * state.c};
}

AmplitudeState to_interaction(const AmplitudeState& lab, const JcParams& params, double t) {
  require_frame(lab, Frame::Lab, "to_interaction");
  AmplitudeState out = lab;
  out.c = lab.c * std::exp(kI * (static_energy_c(params, lab.n) * t));
  out.d = lab.d * std::exp(kI * (static_energy_d(params, lab.n) * t));
  out.frame = Frame::Interaction;
  return out;
}

AmplitudeState from_interaction(const AmplitudeState& interaction, const JcParams& params,
                                double t) {
  require_frame(interaction, Frame::Interaction, "from_interaction");
  AmplitudeState out = interaction;
  out.c = interaction.c * std::exp(-kI * (static_energy_c(params, interaction.n) * t));
  out.d = interaction.d * std::exp(-kI * (static_energy_d(params, interaction.n) * t));
  out.frame = Frame::Lab;
  return out;
}

AmplitudeState to_gauged(const AmplitudeState& interaction, const ModulationSpec& mod,
                         const JcParams& params, double t) {
  require_frame(interaction, Frame::Interaction, "to_gauged");
  AmplitudeState out = interaction;
  out.c = interaction.c * std::exp(kI * gauge_phase(params, mod, interaction.n, t));
  out.frame = Frame::Gauged;
  return out;
}

AmplitudeState from_gauged(const AmplitudeState& gauged, const ModulationSpec& mod,
                           const JcParams& params, double t) {
  require_frame(gauged, Frame::Gauged, "from_gauged");
  AmplitudeState out = gauged;
  out.c = gauged.c / std::exp(kI * gauge_phase(params, mod, gauged.n, t));
  out.frame = Frame::Interaction;
  return out;
}

Trajectory map_trajectory(const Trajectory& traj,
                          const std::function<AmplitudeState(const AmplitudeState&, double)>& fn) {
  Trajectory out;
  out.step = traj.step;
  out.times = traj.times;
  out.states.reserve(traj.states.size());
  for (std::size_t i = 0; i < traj.size(); ++i) {
    out.states.push_back(fn(traj.states[i], traj.times[i]));
  }
  return out;
}

Trajectory integrate(const RhsFn& rhs, const AmplitudeState& state0, double t0, double t1,
                     double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw IntegrationError("integrate: step must be finite and > 0", t0);
  }
  if (!(t1 > t0)) throw IntegrationError("integrate: t1 must exceed t0", t0);
  if (!finite(state0.c) || !finite(state0.d)) {
    throw IntegrationError("integrate: non-finite initial amplitude", t0);
  }

  // Number of steps; a remainder below 1e-9 of a step is absorbed rather than
  // producing a sliver step.
  const double span = (t1 - t0) / step;
  auto steps = static_cast<long long>(std::ceil(span - 1e-9));
  if (steps < 1) steps = 1;

  Trajectory traj;
  traj.step = step;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.times.push_back(t0);
  traj.states.push_back(state0);

  AmplitudeState y = state0;
  auto shifted = [&y](const Derivative& k, double scale) {
    AmplitudeState s = y;
    s.c += scale * k.dc;
    s.d += scale * k.dd;
    return s;
  };

  for (long long k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * step;
    const double t_next = (k + 1 == steps) ? t1 : t0 + static_cast<double>(k + 1) * step;
    const double h = t_next - t;

    const Derivative k1 = rhs(y, t);
    const Derivative k2 = rhs(shifted(k1, h / 2.0), t + h / 2.0);
    const Derivative k3 = rhs(shifted(k2, h / 2.0), t + h / 2.0);
    const Derivative k4 = rhs(shifted(k3, h), t + h);
    y.c += h / 6.0 * (k1.dc + 2.0 * k2.dc + 2.0 * k3.dc + k4.dc);
    y.d += h / 6.0 * (k1.dd + 2.0 * k2.dd + 2.0 * k3.dd + k4.dd);

    if (!finite(y.c) || !finite(y.d)) {
      throw IntegrationError("integrate: amplitude became non-finite", t_next);
    }
    traj.times.push_back(t_next);
    traj.states.push_back(y);
  }
  return traj;
}

AmplitudeState closed_form_static(const JcParams& params, const AmplitudeState& state0, double t) {
  if (state0.n < 1) throw std::invalid_argument("closed_form_static: excitation number must be >= 1");
  const cplx kappa_t = params.coupling * root_n(state0.n) * t;
  const cplx cs = std::cos(kappa_t);
  const cplx sn = -kI * std::sin(kappa_t);
  AmplitudeState out = state0;
  out.c = cs * state0.c + sn * state0.d;
  out.d = sn * state0.c + cs * state0.d;
  return out;
}

double default_step(const JcParams& params, const ModulationSpec& mod, int n) {
  const double two_pi = 2.0 * std::numbers::pi;
  double period = two_pi / mod.big_omega;
  const double rabi = std::abs(params.coupling) * root_n(n);
  if (rabi > 0.0) period = std::min(period, two_pi / rabi);
  return period / 400.0;
}

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,re_c,im_c,re_d,im_d,frame,n\n";
  char buf[256];
  for (std::size_t i = 0; i < traj.size(); ++i) {
    const AmplitudeState& s = traj.states[i];
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%.17g,%s,%d\n", traj.times[i],
                  s.c.real(), s.c.imag(), s.d.real(), s.d.imag(), to_string(s.frame), s.n);
    out << buf;
  }
}

Trajectory read_trajectory_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "t,re_c,im_c,re_d,im_d,frame,n") {
    throw std::invalid_argument("read_trajectory_csv: missing or wrong header");
  }
  Trajectory traj;
  int row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field[7];
    for (auto& f : field) {
      if (!std::getline(ss, f, ',')) {
        throw std::invalid_argument("read_trajectory_csv: short row " + std::to_string(row));
      }
    }
    AmplitudeState s;
    s.c = {std::stod(field[1]), std::stod(field[2])};
    s.d = {std::stod(field[3]), std::stod(field[4])};
    s.frame = parse_frame(field[5]);
    s.n = std::stoi(field[6]);
    if (!traj.states.empty() && s.frame != traj.states.front().frame) {
      throw std::invalid_argument("read_trajectory_csv: mixed frames in one trajectory");
    }
    const double t = std::stod(field[0]);
    if (!traj.times.empty() && !(t > traj.times.back())) {
      throw std::invalid_argument("read_trajectory_csv: times must be strictly increasing");
    }
    traj.times.push_back(t);
    traj.states.push_back(s);
  }
  if (traj.times.size() >= 2) traj.step = traj.times[1] - traj.times[0];
  return traj;
}

}  // namespace pmjc
