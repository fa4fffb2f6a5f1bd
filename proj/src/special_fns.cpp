#include "pmjc/special_fns.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "pmjc/errors.hpp"

namespace pmjc {

namespace {

using lcplx = std::complex<long double>;

bool is_finite(cplx z) { return std::isfinite(z.real()) && std::isfinite(z.imag()); }

void require_finite(cplx z, const char* fn) {
  if (!is_finite(z)) {
    throw DomainError(std::string(fn) + ": argument is not finite");
  }
}

// Representative of {z, -z}: Re > 0, or Re == 0 and Im >= 0. Evaluating both
// members at the same point makes evenness/oddness exact.
struct Canonical {
  cplx z;
  bool flipped;
};

Canonical canonicalize(cplx z) {
  const bool flip = z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0);
  return {flip ? -z : z, flip};
}

// sum_k (-z^2/4)^k / (k! (k+order)!), order in {0, 1}. Accumulated in long
// double: at |z| = 12 the largest term is ~4e3 while J0 itself can be ~0.05.
lcplx power_series(cplx z, int order, const SeriesConfig& cfg) {
  const lcplx zl(z.real(), z.imag());
  const lcplx q = -(zl * zl) / 4.0L;
  lcplx term(1.0L);
  lcplx sum = term;
  for (int k = 1; k <= cfg.max_terms; ++k) {
    term *= q / static_cast<long double>(k * (k + order));
    sum += term;
    if (std::abs(term) < cfg.abs_tolerance) {
      return sum;
    }
  }
  throw NumericalError("Bessel power series did not reach abs_tolerance within max_terms = " +
                       std::to_string(cfg.max_terms));
}

// Hankel expansion J_nu(z) ~ sqrt(2/(pi z)) [P cos(chi) - Q sin(chi)],
// chi = z - (2 nu + 1) pi / 4, for Re z >= 0 and large |z|.
cplx hankel_asymptotic(cplx z, int order, const SeriesConfig& cfg) {
  const long double mu = 4.0L * order * order;
  const lcplx zl(z.real(), z.imag());
  const lcplx inv_z = 1.0L / zl;

  lcplx p(0.0L);
  lcplx q(0.0L);
  lcplx term(1.0L);  // a_k / z^k
  long double prev_mag = std::numeric_limits<long double>::infinity();
  for (int k = 0; k <= 2 * cfg.max_terms; ++k) {
    if (k > 0) {
      const long double odd = 2.0L * k - 1.0L;
      term *= (mu - odd * odd) / (8.0L * k) * inv_z;
    }
    const long double mag = std::abs(term);
    // Asymptotic series: stop at the smallest term.
    if (mag > prev_mag) break;
    prev_mag = mag;
    // P collects even k with sign (-1)^(k/2), Q odd k with sign (-1)^((k-1)/2).
    const long double sign = ((k / 2) % 2 == 0) ? 1.0L : -1.0L;
    if (k % 2 == 0) {
      p += sign * term;
    } else {
      q += sign * term;
    }
    if (mag < cfg.abs_tolerance * 1e-3L) break;
  }

  const long double pi = std::numbers::pi_v<long double>;
  const lcplx chi = zl - (2.0L * order + 1.0L) * pi / 4.0L;
  const lcplx amp = std::sqrt(2.0L / (pi * zl));
  const lcplx value = amp * (p * std::cos(chi) - q * std::sin(chi));
  return {static_cast<double>(value.real()), static_cast<double>(value.imag())};
}

cplx evaluate(cplx z, int order, const SeriesConfig& cfg) {
  const Canonical c = canonicalize(z);
  cplx value;
  if (std::abs(c.z) <= cfg.asymptotic_switch_radius) {
    lcplx s = power_series(c.z, order, cfg);
    if (order == 1) {
      s *= lcplx(c.z.real(), c.z.imag()) / 2.0L;
    }
    value = {static_cast<double>(s.real()), static_cast<double>(s.imag())};
  } else {
    value = hankel_asymptotic(c.z, order, cfg);
  }
  return (order == 1 && c.flipped) ? -value : value;
}

}  // namespace

void SeriesConfig::validate() const {
  if (max_terms < 1) throw std::invalid_argument("SeriesConfig: max_terms must be >= 1");
  if (!(abs_tolerance > 0.0)) throw std::invalid_argument("SeriesConfig: abs_tolerance must be > 0");
  if (!(asymptotic_switch_radius > 0.0)) {
    throw std::invalid_argument("SeriesConfig: asymptotic_switch_radius must be > 0");
  }
}

cplx bessel_j0(cplx z, const SeriesConfig& cfg) {
  require_finite(z, "bessel_j0");
  cfg.validate();
  return evaluate(z, 0, cfg);
}

cplx bessel_j1(cplx z, const SeriesConfig& cfg) {
  require_finite(z, "bessel_j1");
  cfg.validate();
  return evaluate(z, 1, cfg);
}

cplx average_phase_factor(cplx gamma, int panels) {
  if (panels < 2 || panels % 2 != 0) {
    throw std::invalid_argument("average_phase_factor: panels must be even and >= 2, got " +
                                std::to_string(panels));
  }
  require_finite(gamma, "average_phase_factor");
  const double pi = std::numbers::pi;
  const double h = 2.0 * pi / panels;
  const cplx minus_i(0.0, -1.0);
  auto f = [&](int j) { return std::exp(minus_i * gamma * std::sin(-pi + j * h)); };

  cplx odd(0.0);
  cplx even(0.0);
  for (int j = 1; j < panels; ++j) {
    if (j % 2 == 1) {
      odd += f(j);
    } else {
      even += f(j);
    }
  }
  const cplx integral = (h / 3.0) * (f(0) + f(panels) + 4.0 * odd + 2.0 * even);
  return integral / (2.0 * pi);
}

RootResult solve_j0_equals(cplx target, cplx guess, double tol, int max_iter,
                           const SeriesConfig& cfg) {
  if (!(tol > 0.0)) throw std::invalid_argument("solve_j0_equals: tol must be > 0");
  if (max_iter < 0) throw std::invalid_argument("solve_j0_equals: max_iter must be >= 0");
  require_finite(guess, "solve_j0_equals");

  RootResult result;
  result.root = guess;
  cplx f = bessel_j0(guess, cfg) - target;
  result.residual = std::abs(f);
  while (result.residual > tol && result.iterations < max_iter) {
    const cplx j1 = bessel_j1(result.root, cfg);
    if (std::abs(j1) < 1e-14) {
      throw NumericalError("solve_j0_equals: derivative breakdown, |J1(z)| < 1e-14 at iteration " +
                           std::to_string(result.iterations));
    }
    result.root -= f / (-j1);
    ++result.iterations;
    f = bessel_j0(result.root, cfg) - target;
    result.residual = std::abs(f);
  }
  result.converged = result.residual <= tol;
  return result;
}

}  // namespace pmjc
