#include "pmjc/jc_core.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "pmjc/errors.hpp"

namespace pmjc {

namespace {

void require_block(int n, const char* fn) {
  if (n < 1) {
    throw std::invalid_argument(std::string(fn) + ": excitation number must be >= 1, got " +
                                std::to_string(n));
  }
}

}  // namespace

void JcParams::validate() const {
  if (!(omega0 > 0.0) || !std::isfinite(omega0)) {
    throw std::invalid_argument("JcParams: omega0 must be finite and > 0");
  }
  if (!(omega > 0.0) || !std::isfinite(omega)) {
    throw std::invalid_argument("JcParams: omega must be finite and > 0");
  }
  if (!std::isfinite(coupling.real()) || !std::isfinite(coupling.imag())) {
    throw std::invalid_argument("JcParams: coupling must be finite");
  }
}

const char* to_string(PtPhase phase) {
  switch (phase) {
    case PtPhase::Unbroken:
      return "unbroken";
    case PtPhase::ExceptionalPoint:
      return "exceptional_point";
    case PtPhase::Broken:
      return "broken";
  }
  return "unknown";
}

SubspaceHamiltonian build_subspace_hamiltonian(const JcParams& params, int n) {
  params.validate();
  require_block(n, "build_subspace_hamiltonian");
  const cplx off = params.coupling * std::sqrt(static_cast<double>(n));
  SubspaceHamiltonian h;
  h.n = n;
  h.matrix << params.omega0 / 2.0 + params.omega * (n - 1), off,
              off, n * params.omega - params.omega0 / 2.0;
  return h;
}

DressedSpectrum dressed_spectrum(const JcParams& params, int n) {
  params.validate();
  require_block(n, "dressed_spectrum");

  const double delta = params.detuning();
  const cplx coupling_root_n = params.coupling * std::sqrt(static_cast<double>(n));
  const cplx big_delta = std::sqrt(cplx(delta * delta) + 4.0 * coupling_root_n * coupling_root_n);
  const double scale = std::abs(delta) + 2.0 * std::abs(coupling_root_n);
  if (scale == 0.0 || std::abs(big_delta) <= 1e-12 * scale) {
    throw DegenerateBlockError("dressed_spectrum: Delta = 0 in block n = " + std::to_string(n) +
                               "; the block is diagonal (or at an exceptional point) and has no "
                               "dressing angle");
  }

  DressedSpectrum s;
  s.n = n;
  s.delta = delta;
  s.big_delta = big_delta;
  const double centre = (n - 0.5) * params.omega;
  s.e_plus = centre + big_delta / 2.0;
  s.e_minus = centre - big_delta / 2.0;

  const cplx ratio = delta / big_delta;
  s.theta_half_sin = std::sqrt((1.0 + ratio) / 2.0);
  s.theta_half_cos = -std::sqrt((1.0 - ratio) / 2.0);
  // The half-angle formulas fix sin and cos only up to a common sign choice
  // tied to g_s itself. Pick the cos sign that satisfies the eigen-equation
  // g_s sqrt(n) cos(theta/2) = sin(theta/2) (delta - Delta) / 2; for g_s > 0
  // this is the printed (negative) branch.
  const cplx target = s.theta_half_sin * (delta - big_delta) / 2.0;
  if (std::abs(coupling_root_n * s.theta_half_cos - target) >
      std::abs(coupling_root_n * s.theta_half_cos + target)) {
    s.theta_half_cos = -s.theta_half_cos;
  }

  s.eigvec_plus << -s.theta_half_sin, s.theta_half_cos;
  s.eigvec_minus << s.theta_half_cos, s.theta_half_sin;
  return s;
}

PtClassification classify_pt_phase(const JcParams& params, int n, double tol) {
  params.validate();
  require_block(n, "classify_pt_phase");
  if (params.coupling.real() != 0.0) {
    throw std::invalid_argument("classify_pt_phase: coupling must be purely imaginary (i g)");
  }
  if (!(tol >= 0.0)) throw std::invalid_argument("classify_pt_phase: tol must be >= 0");

  const double g = params.coupling.imag();
  const double delta = params.detuning();
  PtClassification out;
  out.discriminant = delta * delta - 4.0 * g * g * n;
  if (std::abs(out.discriminant) <= tol) {
    out.phase = PtPhase::ExceptionalPoint;
  } else if (out.discriminant > 0.0) {
    out.phase = PtPhase::Unbroken;
  } else {
    out.phase = PtPhase::Broken;
  }
  return out;
}

Eigen::Matrix2cd t_block(const JcParams& params, int n) {
  const DressedSpectrum s = dressed_spectrum(params, n);
  Eigen::Matrix2cd t;
  t.col(0) = s.eigvec_minus;
  t.col(1) = s.eigvec_plus;
  return t;
}

double ground_state_energy(const JcParams& params) {
  params.validate();
  return -params.omega0 / 2.0;
}

}  // namespace pmjc
