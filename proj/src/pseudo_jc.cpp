#include "pmjc/pseudo_jc.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "pmjc/errors.hpp"

namespace pmjc {

namespace {

constexpr double kDegeneracyTolerance = 1e-10;
constexpr double kSpanTolerance = 1e-8;

int excitation_of(const FockSpace& space, const Vector& v) {
  double mean = 0.0;
  for (int i = 0; i < space.dim(); ++i) {
    const auto [m, k] = space.occupation(i);
    mean += std::norm(v(i)) * (m + k);
  }
  return static_cast<int>(std::lround(mean / v.squaredNorm()));
}

void require_same_space(const FockSpace& a, const FockSpace& b, const char* where) {
  if (!(a == b)) throw std::invalid_argument(std::string(where) + ": Fock spaces differ");
}

double unit_uniform(std::mt19937_64& rng) {
  return 2.0 * std::ldexp(static_cast<double>(rng() >> 11), -53) - 1.0;
}

}  // namespace

FockSpace::FockSpace(int boson_levels) : boson_levels_(boson_levels) {
  if (boson_levels < 4) {
    throw std::invalid_argument("FockSpace: boson_levels must be >= 4 (got " +
                                std::to_string(boson_levels) + ")");
  }
}

int FockSpace::index(int boson, int fermion) const {
  if (boson < 0 || boson >= boson_levels_ || fermion < 0 || fermion > 1) {
    throw std::out_of_range("FockSpace::index: occupation out of range");
  }
  return 2 * boson + fermion;
}

std::pair<int, int> FockSpace::occupation(int index) const {
  if (index < 0 || index >= dim()) throw std::out_of_range("FockSpace::occupation: index out of range");
  return {index / 2, index % 2};
}

FockOperators build_fock_operators(const FockSpace& space) {
  const int dim = space.dim();
  Matrix d = Matrix::Zero(dim, dim);
  Matrix c = Matrix::Zero(dim, dim);
  Matrix num = Matrix::Zero(dim, dim);
  for (int m = 0; m < space.boson_levels(); ++m) {
    for (int k = 0; k <= 1; ++k) {
      if (m > 0) d(space.index(m - 1, k), space.index(m, k)) = std::sqrt(static_cast<double>(m));
      num(space.index(m, k), space.index(m, k)) = m + k;
    }
    c(space.index(m, 0), space.index(m, 1)) = 1.0;
  }
  return {{space, d, "d"},
          {space, d.adjoint(), "d_dag"},
          {space, c, "c"},
          {space, c.adjoint(), "c_dag"},
          {space, num, "N"}};
}

OperatorMatrix build_h0(const JcParams& params, const FockSpace& space) {
  params.validate();
  const int dim = space.dim();
  const cplx eps = params.coupling;
  Matrix h = Matrix::Zero(dim, dim);
  for (int m = 0; m < space.boson_levels(); ++m) {
    for (int k = 0; k <= 1; ++k) {
      h(space.index(m, k), space.index(m, k)) = params.omega0 * (k - 0.5) + params.omega * m;
    }
    if (m > 0) {
      const double root = std::sqrt(static_cast<double>(m));
      h(space.index(m - 1, 1), space.index(m, 0)) = eps * root;
      h(space.index(m, 0), space.index(m - 1, 1)) = std::conj(eps) * root;
    }
  }
  return {space, h, "H0"};
}

SimilarityMap build_similarity(const FockSpace& space, double alpha, GeneratorKind kind,
                               const std::optional<Matrix>& custom) {
  if (!std::isfinite(alpha) || std::abs(alpha) > kMaxAlpha) {
    throw std::invalid_argument("build_similarity: |alpha| must be <= " + std::to_string(kMaxAlpha));
  }
  Matrix g;
  if (kind == GeneratorKind::LadderSum) {
    const FockOperators ops = build_fock_operators(space);
    g = ops.d.entries + ops.d_dag.entries + ops.c.entries + ops.c_dag.entries;
  } else {
    if (!custom) throw std::invalid_argument("build_similarity: Custom generator needs a matrix");
    if (custom->rows() != space.dim() || custom->cols() != space.dim()) {
      throw std::invalid_argument("build_similarity: custom generator has the wrong dimension");
    }
    if (hermiticity_residual(*custom) > 1e-12 * std::max(1.0, max_abs(*custom))) {
      throw std::invalid_argument("build_similarity: custom generator is not Hermitian");
    }
    g = *custom;
  }

  SimilarityMap map{alpha,
                    {space, g, "G"},
                    {space, expm(alpha * g), "S"},
                    {space, expm(-alpha * g), "S_inv"},
                    1.0,
                    {}};
  const HermitianEigen eig = jacobi_eigen(g);
  map.condition_estimate =
      std::exp(std::abs(alpha) * (eig.values(eig.values.size() - 1) - eig.values(0)));
  if (map.condition_estimate > kConditionWarning) {
    map.warnings.push_back("similarity condition estimate " + std::to_string(map.condition_estimate) +
                           " exceeds 1e8; biorthogonality checks will lose accuracy");
  }
  return map;
}

DeformedOperators deform(const OperatorMatrix& h0, const SimilarityMap& map) {
  require_same_space(h0.space, map.s.space, "deform");
  const FockSpace& space = h0.space;
  const Matrix& s = map.s.entries;
  const Matrix& si = map.s_inv.entries;
  const FockOperators ops = build_fock_operators(space);
  DeformedOperators out{{space, s * h0.entries * si, "H_alpha"},
                        {space, s * ops.d.entries * si, "d_alpha"},
                        {space, s * ops.d_dag.entries * si, "D_alpha"},
                        {space, s * ops.c.entries * si, "c_alpha"},
                        {space, s * ops.c_dag.entries * si, "C_alpha"},
                        {space, Matrix(), "N_alpha"}};
  out.n_alpha.entries = out.big_d_alpha.entries * out.d_alpha.entries +
                        out.big_c_alpha.entries * out.c_alpha.entries;
  return out;
}

const char* to_string(EnergyConvention convention) {
  return convention == EnergyConvention::ShiftedNPlusKPlus1 ? "n+k+1" : "n+k";
}

double energy_formula(const JcParams& params, int n, int k, EnergyConvention convention) {
  if (n < 0 || k < 0 || k > 1) throw std::invalid_argument("energy_formula: need n >= 0, k in {0,1}");
  const int m = convention == EnergyConvention::ShiftedNPlusKPlus1 ? n + k + 1 : n + k;
  const double delta = params.detuning();
  const double eps2 = std::norm(params.coupling);
  const double big_delta = std::sqrt(delta * delta + 4.0 * eps2 * m);
  return (params.omega - big_delta) * (k - 0.5) + params.omega * n;
}

BiorthogonalSystem build_biorthogonal_system(const OperatorMatrix& h0, const SimilarityMap& map,
                                             int count) {
  require_same_space(h0.space, map.s.space, "build_biorthogonal_system");
  const FockSpace& space = h0.space;
  if (count < 1 || count > space.safe_state_budget()) {
    throw std::invalid_argument("build_biorthogonal_system: count must be in [1, " +
                                std::to_string(space.safe_state_budget()) + "] for " +
                                std::to_string(space.boson_levels()) + " boson levels");
  }

  const HermitianEigen eig = jacobi_eigen(h0.entries);
  const int dim = space.dim();
  std::vector<int> excitation(static_cast<std::size_t>(dim));
  for (int j = 0; j < dim; ++j) excitation[j] = excitation_of(space, eig.vectors.col(j));

  BiorthogonalSystem sys;
  for (int j = 0; j < dim && static_cast<int>(sys.bare.size()) < count; ++j) {
    const int big_n = excitation[j];
    if (big_n > space.safe_excitation_max()) continue;

    std::pair<int, int> label{0, 0};
    if (big_n > 0) {
      label = {big_n - 1, 1};
      for (int i = 0; i < dim; ++i) {
        if (i != j && excitation[i] == big_n && eig.values(j) > eig.values(i)) label = {big_n, 0};
      }
    }
    for (int i = 0; i < dim; ++i) {
      if (i != j && std::abs(eig.values(i) - eig.values(j)) <= kDegeneracyTolerance) {
        sys.degenerate = true;
      }
    }

    const Vector bare = eig.vectors.col(j);
    const Vector phi = map.s.entries * bare;
    Vector psi = map.s_inv.entries * bare;
    psi /= std::conj(phi.dot(psi));  // <phi, psi> = 1
    sys.bare.push_back(bare);
    sys.phis.push_back(phi);
    sys.psis.push_back(psi);
    sys.energies.push_back(eig.values(j));
    sys.labels.push_back(label);
    sys.excitations.push_back(big_n);
  }
  if (static_cast<int>(sys.bare.size()) < count) {
    throw NumericalError("build_biorthogonal_system: only " + std::to_string(sys.bare.size()) +
                         " truncation-safe states available");
  }
  return sys;
}

double gram_max_offdiag(const BiorthogonalSystem& system) {
  double worst = 0.0;
  for (std::size_t i = 0; i < system.phis.size(); ++i) {
    for (std::size_t j = 0; j < system.psis.size(); ++j) {
      const cplx ip = system.phis[i].dot(system.psis[j]);
      worst = std::max(worst, std::abs(ip - (i == j ? 1.0 : 0.0)));
    }
  }
  return worst;
}

double phi_overlap_max(const BiorthogonalSystem& system) {
  double worst = 0.0;
  for (std::size_t i = 0; i < system.phis.size(); ++i) {
    for (std::size_t j = i + 1; j < system.phis.size(); ++j) {
      worst = std::max(worst, std::abs(system.phis[i].dot(system.phis[j])) /
                                  (system.phis[i].norm() * system.phis[j].norm()));
    }
  }
  return worst;
}

std::pair<double, double> eigen_residuals(const BiorthogonalSystem& system,
                                          const OperatorMatrix& h_alpha) {
  const Matrix h_dag = h_alpha.entries.adjoint();
  double right = 0.0;
  double left = 0.0;
  for (std::size_t j = 0; j < system.phis.size(); ++j) {
    const double e = system.energies[j];
    const Vector& phi = system.phis[j];
    const Vector& psi = system.psis[j];
    right = std::max(right, (h_alpha.entries * phi - e * phi).norm() / phi.norm());
    left = std::max(left, (h_dag * psi - e * psi).norm() / psi.norm());
  }
  return {right, left};
}

MetricDiagnostics metric_checks(const BiorthogonalSystem& system, const SimilarityMap& map) {
  const Matrix s2 = map.s.entries * map.s.entries;
  const Matrix si2 = map.s_inv.entries * map.s_inv.entries;
  MetricDiagnostics out;
  const int dim = map.s.space.dim();
  const auto count = static_cast<Eigen::Index>(system.phis.size());
  Matrix phi(dim, count);
  Matrix psi(dim, count);
  Matrix bare(dim, count);
  for (Eigen::Index j = 0; j < count; ++j) {
    phi.col(j) = system.phis[j];
    psi.col(j) = system.psis[j];
    bare.col(j) = system.bare[j];
    out.phi_vs_s2_psi = std::max(
        out.phi_vs_s2_psi, (system.phis[j] - s2 * system.psis[j]).norm() / system.phis[j].norm());
    out.psi_vs_sinv2_phi = std::max(
        out.psi_vs_sinv2_phi, (system.psis[j] - si2 * system.phis[j]).norm() / system.psis[j].norm());
  }
  const Matrix p = bare * bare.adjoint();
  out.resolution_residual = max_abs(p * (phi * phi.adjoint() - s2) * p);
  out.dual_resolution_residual = max_abs(p * (psi * psi.adjoint() - si2) * p);
  return out;
}

std::vector<QuasiBasisResidual> quasi_basis_check(
    const BiorthogonalSystem& system, const std::vector<std::pair<Vector, Vector>>& trials) {
  auto project = [&](const Vector& x) {
    Vector out = Vector::Zero(x.size());
    for (std::size_t i = 0; i < system.phis.size(); ++i) out += system.phis[i] * system.psis[i].dot(x);
    return out;
  };
  std::vector<QuasiBasisResidual> out;
  out.reserve(trials.size());
  for (const auto& [f, g] : trials) {
    if (f.size() == 0 || f.size() != g.size() || f.size() != system.phis.front().size()) {
      throw std::invalid_argument("quasi_basis_check: trial vector has the wrong dimension");
    }
    const double scale = f.norm() * g.norm();
    if (scale == 0.0) throw std::invalid_argument("quasi_basis_check: zero trial vector");
    cplx forward = 0.0;
    cplx swapped = 0.0;
    for (std::size_t i = 0; i < system.phis.size(); ++i) {
      forward += f.dot(system.phis[i]) * system.psis[i].dot(g);
      swapped += f.dot(system.psis[i]) * system.phis[i].dot(g);
    }
    const cplx exact = f.dot(g);
    QuasiBasisResidual r;
    r.forward = std::abs(exact - forward) / scale;
    r.swapped = std::abs(exact - swapped) / scale;
    r.in_span = (project(f) - f).norm() <= kSpanTolerance * f.norm() &&
                (project(g) - g).norm() <= kSpanTolerance * g.norm();
    out.push_back(r);
  }
  return out;
}

Matrix assemble_t0(const JcParams& params, const FockSpace& space) {
  params.validate();
  const double magnitude = std::abs(params.coupling);
  const cplx phase = magnitude > 0.0 ? std::conj(params.coupling) / magnitude : cplx{1.0, 0.0};
  JcParams real_params = params;
  real_params.coupling = magnitude;

  Matrix t0 = Matrix::Identity(space.dim(), space.dim());
  for (int big_n = 1; big_n < space.boson_levels(); ++big_n) {
    const Eigen::Matrix2cd block = t_block(real_params, big_n);
    const int lo = space.index(big_n - 1, 1);
    const int hi = space.index(big_n, 0);
    t0(lo, lo) = block(0, 0);
    t0(lo, hi) = block(0, 1);
    t0(hi, lo) = phase * block(1, 0);
    t0(hi, hi) = phase * block(1, 1);
  }
  return t0;
}

double t_alpha_diagonalization_check(const OperatorMatrix& h0, const SimilarityMap& map,
                                     const JcParams& params, const BiorthogonalSystem& system) {
  require_same_space(h0.space, map.s.space, "t_alpha_diagonalization_check");
  const FockSpace& space = h0.space;
  const Matrix t0 = assemble_t0(params, space);
  const Matrix t0_inv = t0.partialPivLu().inverse();
  const DeformedOperators def = deform(h0, map);
  const Matrix& s = map.s.entries;
  const Matrix& si = map.s_inv.entries;

  const double delta = params.detuning();
  const double eps2 = std::norm(params.coupling);
  Vector big_delta(space.dim());
  for (int i = 0; i < space.dim(); ++i) {
    const auto [m, k] = space.occupation(i);
    big_delta(i) = std::sqrt(delta * delta + 4.0 * eps2 * (m + k));
  }

  auto t_alpha = [&](const Vector& x) -> Vector { return s * (t0 * (si * x)); };
  auto t_alpha_inv = [&](const Vector& x) -> Vector { return s * (t0_inv * (si * x)); };
  auto delta_of_n_alpha = [&](const Vector& x) -> Vector {
    return s * big_delta.cwiseProduct(si * x).eval();
  };

  double worst = 0.0;
  for (std::size_t j = 0; j < system.phis.size(); ++j) {
    if (system.excitations[j] == 0) continue;
    const Vector& v = system.phis[j];
    const Vector lhs = t_alpha_inv(def.h_alpha.entries * t_alpha(v));
    const Vector dd = def.big_d_alpha.entries * (def.d_alpha.entries * v);
    const Vector cc = def.big_c_alpha.entries * (def.c_alpha.entries * v) - 0.5 * v;
    const Vector rhs = params.omega * dd + params.omega * cc - delta_of_n_alpha(cc);
    worst = std::max(worst, (lhs - rhs).norm() / v.norm());
  }
  return worst;
}

AlgebraResiduals algebra_residuals(const DeformedOperators& deformed, const SimilarityMap& map,
                                   const BiorthogonalSystem& system) {
  const FockOperators ops = build_fock_operators(map.s.space);
  const Matrix ccr = ops.d.entries * ops.d_dag.entries - ops.d_dag.entries * ops.d.entries;
  const Matrix car = ops.c.entries * ops.c_dag.entries + ops.c_dag.entries * ops.c.entries;
  const Matrix& da = deformed.d_alpha.entries;
  const Matrix& big_da = deformed.big_d_alpha.entries;
  const Matrix& ca = deformed.c_alpha.entries;
  const Matrix& big_ca = deformed.big_c_alpha.entries;

  AlgebraResiduals out;
  for (const Vector& v : system.phis) {
    const double norm = v.norm();
    const Vector comm = da * (big_da * v) - big_da * (da * v);
    const Vector anti = ca * (big_ca * v) + big_ca * (ca * v);
    const Vector comm_ref = map.s.entries * (ccr * (map.s_inv.entries * v));
    const Vector anti_ref = map.s.entries * (car * (map.s_inv.entries * v));
    out.ccr = std::max(out.ccr, (comm - v).norm() / norm);
    out.car = std::max(out.car, (anti - v).norm() / norm);
    out.ccr_preservation = std::max(out.ccr_preservation, (comm - comm_ref).norm() / norm);
    out.car_preservation = std::max(out.car_preservation, (anti - anti_ref).norm() / norm);
  }
  return out;
}

ConventionMatch convention_oracle(const JcParams& params, const BiorthogonalSystem& system,
                                  int states, double tol) {
  if (states < 1 || states > static_cast<int>(system.energies.size())) {
    throw std::invalid_argument("convention_oracle: states must be in [1, number of included states]");
  }
  std::vector<double> numeric(system.energies.begin(), system.energies.begin() + states);
  std::sort(numeric.begin(), numeric.end());

  auto residual = [&](EnergyConvention convention) {
    std::vector<double> formula;
    const int top = system.excitations.empty()
                        ? 0
                        : *std::max_element(system.excitations.begin(), system.excitations.end());
    for (int n = 0; n <= top + 1; ++n) {
      formula.push_back(energy_formula(params, n, 0, convention));
      formula.push_back(energy_formula(params, n, 1, convention));
    }
    std::sort(formula.begin(), formula.end());
    double worst = 0.0;
    for (int i = 0; i < states; ++i) worst = std::max(worst, std::abs(numeric[i] - formula[i]));
    return worst;
  };

  ConventionMatch out;
  out.states = states;
  out.shifted_residual = residual(EnergyConvention::ShiftedNPlusKPlus1);
  out.consistent_residual = residual(EnergyConvention::ConsistentNPlusK);
  const bool shifted = out.shifted_residual <= tol;
  const bool consistent = out.consistent_residual <= tol;
  if (shifted != consistent) {
    out.match = shifted ? EnergyConvention::ShiftedNPlusKPlus1 : EnergyConvention::ConsistentNPlusK;
  }
  return out;
}

PseudoDiagnostics run_pseudo_diagnostics(const PseudoConfig& cfg) {
  if (cfg.quasi_basis_trials < 0) throw std::invalid_argument("PseudoConfig: quasi_basis_trials must be >= 0");
  const FockSpace space(cfg.boson_levels);
  const OperatorMatrix h0 = build_h0(cfg.params, space);
  const SimilarityMap map = build_similarity(space, cfg.alpha);
  const DeformedOperators def = deform(h0, map);
  const BiorthogonalSystem sys = build_biorthogonal_system(h0, map, cfg.count);

  PseudoDiagnostics out;
  out.alpha = cfg.alpha;
  out.boson_levels = cfg.boson_levels;
  out.energies = sys.energies;
  out.labels = sys.labels;
  out.degenerate = sys.degenerate;
  out.warnings = map.warnings;
  out.condition_estimate = map.condition_estimate;
  out.similarity_inverse_residual =
      max_abs(map.s.entries * map.s_inv.entries - Matrix::Identity(space.dim(), space.dim()));
  out.non_hermiticity = hermiticity_residual(def.h_alpha.entries);
  out.gram_max_offdiag = gram_max_offdiag(sys);
  out.phi_overlap_max = phi_overlap_max(sys);
  std::tie(out.eigen_residual_max, out.adjoint_eigen_residual_max) =
      eigen_residuals(sys, def.h_alpha);
  out.metric = metric_checks(sys, map);
  out.algebra = algebra_residuals(def, map, sys);

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::pair<Vector, Vector>> trials;
  for (int t = 0; t < cfg.quasi_basis_trials; ++t) {
    Vector f = Vector::Zero(space.dim());
    Vector g = Vector::Zero(space.dim());
    for (const Vector& phi : sys.phis) {
      f += cplx{unit_uniform(rng), unit_uniform(rng)} * phi;
      g += cplx{unit_uniform(rng), unit_uniform(rng)} * phi;
    }
    trials.emplace_back(f, g);
  }
  for (const QuasiBasisResidual& r : quasi_basis_check(sys, trials)) {
    out.quasi_basis_max = std::max({out.quasi_basis_max, r.forward, r.swapped});
  }

  try {
    out.t_alpha_residual = t_alpha_diagonalization_check(h0, map, cfg.params, sys);
  } catch (const DegenerateBlockError& e) {
    out.warnings.push_back(std::string("T_alpha check skipped: ") + e.what());
  }
  out.convention = convention_oracle(cfg.params, sys, std::min(10, cfg.count));
  if (sys.degenerate) out.warnings.emplace_back("degenerate energies among the included states");
  return out;
}

}  // namespace pmjc
