#pragma once

// Static Jaynes-Cummings model, one excitation block at a time.
//
// Basis convention used throughout the library: the n-excitation block is
// ordered (|n-1, 1>, |n, 0>), first label = field quanta, second = atomic
// excitation. Component 0 is therefore the "c" amplitude and component 1 the
// "d" amplitude of the dynamics module. hbar = 1, so frequencies and energies
// share units.

#include <Eigen/Dense>
#include <complex>

namespace pmjc {

using cplx = std::complex<double>;

struct JcParams {
  double omega0 = 1.0;  // atomic transition frequency
  double omega = 1.0;   // cavity mode frequency
  cplx coupling{0.0, 0.0};

  double detuning() const { return omega0 - omega; }
  void validate() const;
};

struct SubspaceHamiltonian {
  int n = 1;
  Eigen::Matrix2cd matrix;
};

struct DressedSpectrum {
  int n = 1;
  double delta = 0.0;
  cplx big_delta;  // sqrt(delta^2 + 4 g_s^2 n), principal branch
  cplx e_plus;
  cplx e_minus;
  cplx theta_half_sin;
  cplx theta_half_cos;
  Eigen::Vector2cd eigvec_plus;   // (-sin(theta/2), cos(theta/2))
  Eigen::Vector2cd eigvec_minus;  // ( cos(theta/2), sin(theta/2))
};

enum class PtPhase { Unbroken, ExceptionalPoint, Broken };

struct PtClassification {
  PtPhase phase = PtPhase::Unbroken;
  double discriminant = 0.0;  // delta^2 - 4 g^2 n for coupling i g
};

const char* to_string(PtPhase phase);

inline constexpr double kExceptionalPointTolerance = 1e-10;

/// The 2x2 block: diag(omega0/2 + omega (n-1), n omega - omega0/2), both
/// off-diagonals g_s sqrt(n). Hermitian iff Im(g_s) = 0. Requires n >= 1.
SubspaceHamiltonian build_subspace_hamiltonian(const JcParams& params, int n);

/// Closed-form dressed energies and eigenvectors. For real coupling
/// Delta = sqrt(delta^2 + 4|g|^2 n) and e_pm = (n - 1/2) omega +- Delta/2.
/// For complex coupling g_s^2 replaces |g_s|^2, with principal square roots.
/// Throws DegenerateBlockError when Delta = 0.
DressedSpectrum dressed_spectrum(const JcParams& params, int n);

/// PT phase of the block for purely imaginary coupling i g.
PtClassification classify_pt_phase(const JcParams& params, int n,
                                    double tol = kExceptionalPointTolerance);

/// Restriction of the dressing operator T to the n-excitation block. Its
/// columns are the dressed states u^(-), u^(+), so T^{-1} H T = diag(e_-, e_+).
Eigen::Matrix2cd t_block(const JcParams& params, int n);

/// Energy of the zero-excitation state |0, 0>; the interaction does not touch it.
double ground_state_energy(const JcParams& params);

}  // namespace pmjc
