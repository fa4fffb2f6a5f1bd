#include <doctest.h>

#include <cmath>
#include <random>

#include "pmjc/errors.hpp"
#include "pmjc/pseudo_jc.hpp"

using namespace pmjc;

namespace {

constexpr double kAlpha = 0.5;

struct Fixture {
  FockSpace space{32};
  JcParams params{1.0, 1.0, {0.1, 0.0}};
  OperatorMatrix h0 = build_h0(params, space);
  SimilarityMap map = build_similarity(space, kAlpha);
};

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

}  // namespace

TEST_CASE("Fock space indexing") {
  const FockSpace s(6);
  CHECK(s.dim() == 12);
  for (int i = 0; i < s.dim(); ++i) {
    const auto [m, k] = s.occupation(i);
    CHECK(s.index(m, k) == i);
  }
  CHECK(s.safe_excitation_max() == 2);
  CHECK(s.safe_state_budget() == 5);
  CHECK_THROWS_AS(FockSpace(3), std::invalid_argument);
  CHECK_THROWS_AS(s.index(6, 0), std::out_of_range);
}

TEST_CASE("ladder operators") {
  const FockSpace s(8);
  const auto ops = build_fock_operators(s);
  const Matrix ccr = commutator(ops.d.entries, ops.d_dag.entries);
  Matrix expected = Matrix::Identity(s.dim(), s.dim());
  for (int k = 0; k <= 1; ++k) expected(s.index(7, k), s.index(7, k)) = -7.0;
  CHECK(max_abs(ccr - expected) <= 1e-14);
  const Matrix car = ops.c.entries * ops.c_dag.entries + ops.c_dag.entries * ops.c.entries;
  CHECK(max_abs(car - Matrix::Identity(s.dim(), s.dim())) == 0.0);
  CHECK(max_abs(ops.c.entries * ops.c.entries) == 0.0);
  CHECK(max_abs(commutator(ops.d.entries, ops.c.entries)) == 0.0);
  CHECK(max_abs(ops.number_total.entries - ops.d_dag.entries * ops.d.entries -
                ops.c_dag.entries * ops.c.entries) <= 1e-14);
}

TEST_CASE("H0 structure") {
  const FockSpace s(10);
  const auto free = build_h0({1.3, 1.0, 0.0}, s);
  for (int i = 0; i < s.dim(); ++i) {
    const auto [m, k] = s.occupation(i);
    CHECK(free.entries(i, i).real() == doctest::Approx(1.3 * (k - 0.5) + m));
  }
  CHECK(max_abs(free.entries - Matrix(free.entries.diagonal().asDiagonal())) == 0.0);

  const JcParams p{1.2, 1.0, {0.07, 0.03}};
  const auto h = build_h0(p, s);
  CHECK(hermiticity_residual(h.entries) == 0.0);
  const auto ops = build_fock_operators(s);
  CHECK(max_abs(commutator(h.entries, ops.number_total.entries)) <= 1e-15);

  // Excitation block n sits at indices (|n-1,1>, |n,0>) and matches the 2x2 builder for real eps.
  const JcParams real{1.2, 1.0, 0.07};
  const auto hr = build_h0(real, s);
  for (int n = 1; n < s.boson_levels(); ++n) {
    const auto blk = build_subspace_hamiltonian(real, n).matrix;
    const int lo = s.index(n - 1, 1);
    const int hi = s.index(n, 0);
    CHECK(std::abs(hr.entries(lo, lo) - blk(0, 0)) <= 1e-14);
    CHECK(std::abs(hr.entries(hi, hi) - blk(1, 1)) <= 1e-14);
    CHECK(std::abs(hr.entries(lo, hi) - blk(0, 1)) <= 1e-15);
    // The upper-right entry carries eps (from eps d c^dagger), the lower-left eps^*.
    CHECK(std::abs(h.entries(lo, hi) - p.coupling * std::sqrt(n)) <= 1e-15);
  }
}

TEST_CASE("similarity map") {
  const FockSpace s(16);
  const auto id = build_similarity(s, 0.0);
  CHECK(max_abs(id.s.entries - Matrix::Identity(s.dim(), s.dim())) <= 1e-15);
  const auto m = build_similarity(s, kAlpha);
  CHECK(max_abs(m.s.entries * m.s_inv.entries - Matrix::Identity(s.dim(), s.dim())) <= 1e-10);
  CHECK(hermiticity_residual(m.s.entries) <= 1e-11 * max_abs(m.s.entries));
  CHECK(hermiticity_residual(m.generator.entries) <= 1e-13);
  CHECK(m.condition_estimate > 1.0);
  CHECK(m.warnings.empty());

  CHECK_THROWS_AS(build_similarity(s, 2.5), std::invalid_argument);
  Matrix bad = Matrix::Zero(s.dim(), s.dim());
  bad(0, 1) = 1.0;
  CHECK_THROWS_AS(build_similarity(s, 0.1, GeneratorKind::Custom, bad), std::invalid_argument);
  CHECK_THROWS_AS(build_similarity(s, 0.1, GeneratorKind::Custom), std::invalid_argument);
  Matrix diag = Matrix::Zero(s.dim(), s.dim());
  for (int i = 0; i < s.dim(); ++i) diag(i, i) = static_cast<double>(i % 3);
  const auto custom = build_similarity(s, 0.3, GeneratorKind::Custom, diag);
  CHECK(std::abs(custom.s.entries(2, 2) - std::exp(0.6)) <= 1e-14);

  const auto wide = build_similarity(FockSpace(40), 2.0);
  CHECK(wide.condition_estimate > kConditionWarning);
  CHECK_FALSE(wide.warnings.empty());
}

TEST_CASE("deformed operators") {
  Fixture f;
  const auto id = deform(f.h0, build_similarity(f.space, 0.0));
  CHECK(max_abs(id.h_alpha.entries - f.h0.entries) <= 1e-13);

  const auto def = deform(f.h0, f.map);
  CHECK(hermiticity_residual(def.h_alpha.entries) > 0.01);
  CHECK(max_abs(def.big_d_alpha.entries - def.d_alpha.entries.adjoint()) > 0.01);

  // Pseudo-CCR on a low-occupancy block, where the truncation defect has not spread.
  const Matrix ccr = commutator(def.d_alpha.entries, def.big_d_alpha.entries);
  const FockSpace small(12);
  const auto sm = build_similarity(small, 0.2);
  const auto sd = deform(build_h0(f.params, small), sm);
  const Matrix sccr = commutator(sd.d_alpha.entries, sd.big_d_alpha.entries);
  const Matrix target = sm.s.entries * commutator(build_fock_operators(small).d.entries,
                                                  build_fock_operators(small).d_dag.entries) *
                        sm.s_inv.entries;
  CHECK(max_abs(sccr - target) <= 1e-10 * max_abs(target));
  CHECK(ccr.rows() == f.space.dim());
}

TEST_CASE("energy formula conventions") {
  const JcParams p{1.0, 1.0, 0.1};
  CHECK(energy_formula(p, 0, 0, EnergyConvention::ConsistentNPlusK) == doctest::Approx(-0.5));
  CHECK(energy_formula(p, 0, 0, EnergyConvention::ShiftedNPlusKPlus1) == doctest::Approx(-0.5 + 0.1));
  CHECK_THROWS_AS(energy_formula(p, 0, 2, EnergyConvention::ConsistentNPlusK), std::invalid_argument);
  CHECK_THROWS_AS(energy_formula(p, -1, 0, EnergyConvention::ConsistentNPlusK), std::invalid_argument);
}

TEST_CASE("the k = 1 branch is bounded below when omega >= 2|eps|") {
  for (double eps : {0.1, 0.3, 0.5}) {
    const JcParams p{1.0, 1.0, eps};
    const int budget = FockSpace(32).safe_excitation_max();
    std::vector<double> e;
    for (int n = 0; n <= budget; ++n) e.push_back(energy_formula(p, n, 1, EnergyConvention::ConsistentNPlusK));
    const auto it = std::min_element(e.begin(), e.end());
    CHECK(it != e.end() - 1);
    for (std::size_t i = e.size() - 5; i < e.size(); ++i) CHECK(e[i] > e[i - 1]);
  }
}

TEST_CASE("biorthogonal system at alpha = 0 is orthonormal") {
  const FockSpace s(16);
  const auto h0 = build_h0({1.0, 1.0, 0.1}, s);
  const auto sys = build_biorthogonal_system(h0, build_similarity(s, 0.0), 10);
  CHECK(gram_max_offdiag(sys) <= 1e-12);
  for (std::size_t i = 0; i < sys.phis.size(); ++i) CHECK((sys.phis[i] - sys.psis[i]).norm() <= 1e-12);
  const auto m = metric_checks(sys, build_similarity(s, 0.0));
  CHECK(m.phi_vs_s2_psi <= 1e-12);
  CHECK(m.resolution_residual <= 1e-12);
  CHECK(m.dual_resolution_residual <= 1e-12);
}

TEST_CASE("biorthogonal system at alpha = 0.5") {
  Fixture f;
  const auto sys = build_biorthogonal_system(f.h0, f.map, 10);
  REQUIRE(sys.phis.size() == 10);
  CHECK_FALSE(sys.degenerate);
  CHECK(gram_max_offdiag(sys) <= 1e-10);
  CHECK(phi_overlap_max(sys) > 0.1);
  const auto def = deform(f.h0, f.map);
  const auto [right, left] = eigen_residuals(sys, def.h_alpha);
  CHECK(right <= 1e-9);
  CHECK(left <= 1e-9);
  CHECK(sys.labels[0] == std::pair<int, int>{0, 0});
  CHECK(sys.labels[1] == std::pair<int, int>{0, 1});
  CHECK(sys.labels[2] == std::pair<int, int>{1, 0});
  for (std::size_t i = 1; i < sys.energies.size(); ++i) CHECK(sys.energies[i] >= sys.energies[i - 1]);

  const auto algebra = algebra_residuals(def, f.map, sys);
  CHECK(algebra.ccr <= 1e-10);
  CHECK(algebra.car <= 1e-10);
  CHECK(algebra.ccr_preservation <= 1e-10);
  CHECK(algebra.car_preservation <= 1e-10);

  CHECK_THROWS_AS(build_biorthogonal_system(f.h0, f.map, f.space.safe_state_budget() + 1), std::invalid_argument);
  CHECK_THROWS_AS(build_biorthogonal_system(f.h0, f.map, 0), std::invalid_argument);
}

TEST_CASE("degenerate spectra are flagged") {
  const FockSpace s(8);
  const auto sys = build_biorthogonal_system(build_h0({1.0, 1.0, 0.0}, s), build_similarity(s, 0.2), 3);
  CHECK(sys.degenerate);
}

TEST_CASE("metric identities") {
  Fixture f;
  const auto sys = build_biorthogonal_system(f.h0, f.map, 10);
  const auto m = metric_checks(sys, f.map);
  CHECK(m.phi_vs_s2_psi <= 1e-10);
  CHECK(m.psi_vs_sinv2_phi <= 1e-10);

  // The truncated resolution misses exactly P S (1 - P) S P.
  Matrix p = Matrix::Zero(f.space.dim(), f.space.dim());
  for (const auto& v : sys.bare) p += v * v.adjoint();
  const Matrix& sm = f.map.s.entries;
  const Matrix missing = p * sm * (Matrix::Identity(f.space.dim(), f.space.dim()) - p) * sm * p;
  CHECK(m.resolution_residual == doctest::Approx(max_abs(missing)).epsilon(1e-8));
  CHECK(m.resolution_residual > 1.0);

  const auto flat_map = build_similarity(f.space, 0.0);
  const auto flat = metric_checks(build_biorthogonal_system(f.h0, flat_map, 10), flat_map);
  CHECK(flat.resolution_residual <= 1e-12);
  CHECK(flat.dual_resolution_residual <= 1e-12);
}

TEST_CASE("quasi-basis identities") {
  Fixture f;
  const auto sys = build_biorthogonal_system(f.h0, f.map, 10);
  const Vector unit = sys.phis[0] / sys.phis[0].norm();
  const auto single = quasi_basis_check(sys, {{unit, unit}});
  CHECK(single[0].forward <= 1e-10);
  CHECK(single[0].swapped <= 1e-10);
  CHECK(single[0].in_span);

  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::pair<Vector, Vector>> trials;
  for (int t = 0; t < 6; ++t) {
    Vector a = Vector::Zero(f.space.dim());
    Vector b = Vector::Zero(f.space.dim());
    for (const auto& phi : sys.phis) {
      a += std::complex<double>(u(rng), u(rng)) * phi;
      b += std::complex<double>(u(rng), u(rng)) * phi;
    }
    trials.emplace_back(a, b);
  }
  for (const auto& r : quasi_basis_check(sys, trials)) {
    CHECK(r.in_span);
    CHECK(r.forward <= 1e-9);
    CHECK(r.swapped <= 1e-9);
  }

  Vector high = Vector::Zero(f.space.dim());
  high(f.space.index(25, 0)) = 1.0;
  const auto outside = quasi_basis_check(sys, {{high, high}});
  CHECK_FALSE(outside[0].in_span);
}

TEST_CASE("T_alpha brings H_alpha to the deformed diagonal form") {
  const FockSpace s(32);
  const JcParams p{1.05, 1.0, 0.1};
  const auto h0 = build_h0(p, s);
  const auto id = build_similarity(s, 0.0);
  CHECK(t_alpha_diagonalization_check(h0, id, p, build_biorthogonal_system(h0, id, 10)) <= 1e-12);
  const auto map = build_similarity(s, kAlpha);
  const auto sys = build_biorthogonal_system(h0, map, 10);
  CHECK(t_alpha_diagonalization_check(h0, map, p, sys) <= 1e-9);

  const JcParams complex_eps{1.05, 1.0, {0.06, 0.08}};
  const auto hc = build_h0(complex_eps, s);
  CHECK(t_alpha_diagonalization_check(hc, map, complex_eps, build_biorthogonal_system(hc, map, 10)) <= 1e-9);

  const JcParams flat{1.0, 1.0, 0.0};
  const auto hf = build_h0(flat, s);
  const auto sf = build_similarity(s, 0.0);
  CHECK_THROWS_AS(t_alpha_diagonalization_check(hf, sf, flat, build_biorthogonal_system(hf, sf, 3)),
                  DegenerateBlockError);
}

TEST_CASE("convention oracle and diagnostics record") {
  const auto d = run_pseudo_diagnostics({});
  REQUIRE(d.convention.match.has_value());
  CHECK(*d.convention.match == EnergyConvention::ConsistentNPlusK);
  CHECK(d.convention.consistent_residual <= 1e-8);
  CHECK(d.convention.shifted_residual > 1e-8);
  CHECK(d.gram_max_offdiag <= 1e-10);
  CHECK(d.eigen_residual_max <= 1e-9);
  CHECK(d.quasi_basis_max <= 1e-9);
  REQUIRE(d.t_alpha_residual.has_value());
  CHECK(*d.t_alpha_residual <= 1e-9);
  CHECK(d.similarity_inverse_residual <= 1e-10);
  CHECK(d.non_hermiticity > 0.01);
  CHECK(d.warnings.empty());

  PseudoConfig flat;
  flat.params.coupling = 0.0;
  flat.count = 3;
  const auto df = run_pseudo_diagnostics(flat);
  CHECK_FALSE(df.t_alpha_residual.has_value());
  CHECK(df.degenerate);
  CHECK_FALSE(df.warnings.empty());
}
