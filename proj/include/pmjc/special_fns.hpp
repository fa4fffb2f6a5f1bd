#pragma once

// Complex-argument Bessel functions J0/J1 and a Newton solver for J0(z) = target.

#include <complex>

namespace pmjc {

using cplx = std::complex<double>;

struct SeriesConfig {
  int max_terms = 60;
  double abs_tolerance = 1e-15;
  /// |z| above which the Hankel large-argument expansion replaces the power series.
  double asymptotic_switch_radius = 12.0;

  void validate() const;
};

/// J0(z). Exactly even: J0(-z) and J0(z) evaluate the same canonical point.
cplx bessel_j0(cplx z, const SeriesConfig& cfg = {});

/// J1(z). Exactly odd. J0'(z) = -J1(z).
cplx bessel_j1(cplx z, const SeriesConfig& cfg = {});

/// (1/2pi) * integral_{-pi}^{pi} exp(-i gamma sin x) dx by composite Simpson.
/// Independent quadrature route to J0(gamma); `panels` must be even and >= 2.
cplx average_phase_factor(cplx gamma, int panels);

struct RootResult {
  cplx root;
  double residual = 0.0;  // |J0(root) - target|
  int iterations = 0;
  bool converged = false;
};

/// Seed that selects the principal root of J0(z) = i, near -2.14 + 1.42i.
/// J0(z) = i has infinitely many roots; other seeds select other roots.
inline constexpr cplx kPrincipalRootGuess{-2.0, 1.4};

inline constexpr double kDefaultRootTolerance = 1e-13;

/// Complex Newton iteration z <- z - (J0(z) - target) / (-J1(z)).
/// Throws NumericalError if |J1| < 1e-14 at an iterate; returns converged = false
/// when max_iter is exhausted.
RootResult solve_j0_equals(cplx target, cplx guess = kPrincipalRootGuess,
                           double tol = kDefaultRootTolerance, int max_iter = 50,
                           const SeriesConfig& cfg = {});

}  // namespace pmjc
