#pragma once

// Deformed (pseudo-bosonic / pseudo-fermionic) JC Hamiltonian on a truncated
// Fock space.
//
// H_alpha = S H_0 S^{-1} with S = exp(alpha G), G Hermitian. The deformed
// ladder operators d_alpha = S d S^{-1}, D_alpha = S d^dagger S^{-1}, and
// likewise c_alpha, C_alpha, obey [d_alpha, D_alpha] = 1 and
// {c_alpha, C_alpha} = 1 with D_alpha != d_alpha^dagger. Eigenvectors of
// H_alpha and H_alpha^dagger are transported from the Hermitian H_0:
//   Phi_hat = S Phi0,  Psi_hat = S^{-1} Phi0,  <Phi_hat_i, Psi_hat_j> = delta_ij.
//
// Truncation: the boson ladder is cut at boson_levels, which corrupts the
// algebra at the top levels. Only eigenstates whose excitation number is at
// most boson_levels - 4 are used ("truncation-safe"). Identities of the
// deformed operators are checked by acting on the included Phi_hat vectors;
// S spreads the top-level defect over the whole matrix, so entrywise checks
// of deformed operator matrices are not meaningful.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "pmjc/jc_core.hpp"
#include "pmjc/linalg.hpp"

namespace pmjc {

/// Boson (truncated) x two-level fermion space, index(m, k) = 2 m + k.
class FockSpace {
 public:
  explicit FockSpace(int boson_levels);

  int boson_levels() const { return boson_levels_; }
  int dim() const { return 2 * boson_levels_; }
  int index(int boson, int fermion) const;
  std::pair<int, int> occupation(int index) const;
  /// Largest excitation number m + k of a truncation-safe state.
  int safe_excitation_max() const { return boson_levels_ - 4; }
  /// Number of H_0 eigenstates with excitation <= safe_excitation_max().
  int safe_state_budget() const { return 2 * safe_excitation_max() + 1; }

  bool operator==(const FockSpace&) const = default;

 private:
  int boson_levels_;
};

struct OperatorMatrix {
  FockSpace space;
  Matrix entries;
  std::string label;
};

struct FockOperators {
  OperatorMatrix d;
  OperatorMatrix d_dag;
  OperatorMatrix c;
  OperatorMatrix c_dag;
  OperatorMatrix number_total;  // d^dagger d + c^dagger c
};

FockOperators build_fock_operators(const FockSpace& space);

/// H_0 = omega0 (c^dagger c - 1/2) + omega d^dagger d + eps d c^dagger + eps^* d^dagger c,
/// with eps = params.coupling. Hermitian for any complex eps.
OperatorMatrix build_h0(const JcParams& params, const FockSpace& space);

enum class GeneratorKind { LadderSum, Custom };

inline constexpr double kMaxAlpha = 2.0;
inline constexpr double kConditionWarning = 1e8;

struct SimilarityMap {
  double alpha = 0.0;
  OperatorMatrix generator;  // G = G^dagger
  OperatorMatrix s;          // exp(alpha G)
  OperatorMatrix s_inv;      // exp(-alpha G)
  double condition_estimate = 1.0;  // exp(|alpha| (lambda_max(G) - lambda_min(G)))
  std::vector<std::string> warnings;
};

/// LadderSum: G = (d + d^dagger) x 1_f + 1_b x (c + c^dagger). Custom takes a
/// Hermitian matrix of the space's dimension. Requires |alpha| <= kMaxAlpha.
SimilarityMap build_similarity(const FockSpace& space, double alpha,
                               GeneratorKind kind = GeneratorKind::LadderSum,
                               const std::optional<Matrix>& custom = std::nullopt);

struct DeformedOperators {
  OperatorMatrix h_alpha;
  OperatorMatrix d_alpha;
  OperatorMatrix big_d_alpha;  // D_alpha
  OperatorMatrix c_alpha;
  OperatorMatrix big_c_alpha;  // C_alpha
  OperatorMatrix n_alpha;      // D_alpha d_alpha + C_alpha c_alpha
};

DeformedOperators deform(const OperatorMatrix& h0, const SimilarityMap& map);

/// Two candidate labellings of the closed-form eigenvalues
///   E_{n,k} = [omega - sqrt(delta^2 + 4 |eps|^2 m)] (k - 1/2) + omega n
/// with m = n + k + 1 (ShiftedNPlusKPlus1) or m = n + k (ConsistentNPlusK).
enum class EnergyConvention { ShiftedNPlusKPlus1, ConsistentNPlusK };

const char* to_string(EnergyConvention convention);

double energy_formula(const JcParams& params, int n, int k, EnergyConvention convention);

struct BiorthogonalSystem {
  std::vector<Vector> bare;  // Phi0: orthonormal eigenvectors of H_0
  std::vector<Vector> phis;  // S Phi0
  std::vector<Vector> psis;  // S^{-1} Phi0, scaled so <Phi_hat, Psi_hat> = 1
  std::vector<double> energies;
  std::vector<std::pair<int, int>> labels;  // (n, k), n + k = excitation number
  std::vector<int> excitations;
  bool degenerate = false;  // some included energy is within 1e-10 of another eigenvalue
};

/// Lowest `count` truncation-safe eigenstates of H_0 (Jacobi), transported
/// through S and S^{-1}.
BiorthogonalSystem build_biorthogonal_system(const OperatorMatrix& h0, const SimilarityMap& map,
                                             int count);

/// max_{i,j} |<Phi_hat_i, Psi_hat_j> - delta_ij|.
double gram_max_offdiag(const BiorthogonalSystem& system);

/// max_{i != j} |<Phi_hat_i, Phi_hat_j>| / (|Phi_hat_i| |Phi_hat_j|); nonzero
/// when the Phi family is genuinely non-orthogonal.
double phi_overlap_max(const BiorthogonalSystem& system);

/// Relative eigen-residuals max |H_alpha Phi_hat - E Phi_hat| / |Phi_hat| and
/// max |H_alpha^dagger Psi_hat - E Psi_hat| / |Psi_hat|.
std::pair<double, double> eigen_residuals(const BiorthogonalSystem& system,
                                          const OperatorMatrix& h_alpha);

struct MetricDiagnostics {
  double phi_vs_s2_psi = 0.0;     // max |Phi_hat - S^2 Psi_hat| / |Phi_hat|
  double psi_vs_sinv2_phi = 0.0;  // max |Psi_hat - S^-2 Phi_hat| / |Psi_hat|
  // Truncated resolutions compressed to the span P of the included Phi0:
  // max |P (sum |Phi_hat><Phi_hat| - S^2) P| and the dual with Psi_hat, S^-2.
  double resolution_residual = 0.0;
  double dual_resolution_residual = 0.0;
};

MetricDiagnostics metric_checks(const BiorthogonalSystem& system, const SimilarityMap& map);

struct QuasiBasisResidual {
  double forward = 0.0;  // |<f,g> - sum <f,Phi_hat><Psi_hat,g>| / (|f| |g|)
  double swapped = 0.0;  // |<f,g> - sum <f,Psi_hat><Phi_hat,g>| / (|f| |g|)
  bool in_span = false;  // f and g both lie in span{Phi_hat} (to 1e-8)
};

std::vector<QuasiBasisResidual> quasi_basis_check(
    const BiorthogonalSystem& system, const std::vector<std::pair<Vector, Vector>>& trials);

/// Dressing map on the Fock space assembled from jc_core::t_block, one block
/// per excitation number 1 .. boson_levels - 1 (identity on |0,0> and on the
/// unpaired top state). A complex eps is handled by the phase diag(1, eps^*/|eps|).
Matrix assemble_t0(const JcParams& params, const FockSpace& space);

/// max over included states with excitation >= 1 of
///   |T_alpha^{-1} H_alpha T_alpha v - [omega D_alpha d_alpha + (omega - Delta(N_alpha)) (C_alpha c_alpha - 1/2)] v| / |v|
/// with v = Phi_hat and T_alpha = S T_0 S^{-1}.
double t_alpha_diagonalization_check(const OperatorMatrix& h0, const SimilarityMap& map,
                                     const JcParams& params, const BiorthogonalSystem& system);

struct AlgebraResiduals {
  double ccr = 0.0;               // |[d_alpha, D_alpha] v - v| / |v|
  double car = 0.0;               // |{c_alpha, C_alpha} v - v| / |v|
  double ccr_preservation = 0.0;  // |([d_alpha, D_alpha] - S [d, d^dagger] S^-1) v| / |v|
  double car_preservation = 0.0;
};

/// Deformed commutation relations evaluated on the included Phi_hat.
AlgebraResiduals algebra_residuals(const DeformedOperators& deformed, const SimilarityMap& map,
                                   const BiorthogonalSystem& system);

struct ConventionMatch {
  std::optional<EnergyConvention> match;  // set only when exactly one convention matches
  double shifted_residual = 0.0;       // max |E_numeric - E_formula| over the lowest states
  double consistent_residual = 0.0;
  int states = 0;
};

/// Compares the lowest `states` included energies with the sorted closed-form
/// values of each convention.
ConventionMatch convention_oracle(const JcParams& params, const BiorthogonalSystem& system,
                                  int states = 10, double tol = 1e-8);

struct PseudoConfig {
  int boson_levels = 32;
  double alpha = 0.5;
  JcParams params{1.0, 1.0, {0.1, 0.0}};  // coupling = eps
  int count = 10;
  int quasi_basis_trials = 8;
  unsigned long long seed = 20260101ULL;
};

struct PseudoDiagnostics {
  double alpha = 0.0;
  int boson_levels = 0;
  std::vector<double> energies;
  std::vector<std::pair<int, int>> labels;
  double gram_max_offdiag = 0.0;
  double phi_overlap_max = 0.0;
  double eigen_residual_max = 0.0;          // H_alpha on Phi_hat
  double adjoint_eigen_residual_max = 0.0;  // H_alpha^dagger on Psi_hat
  MetricDiagnostics metric;
  double quasi_basis_max = 0.0;
  std::optional<double> t_alpha_residual;  // absent when a block is degenerate
  AlgebraResiduals algebra;
  ConventionMatch convention;
  double condition_estimate = 1.0;
  double similarity_inverse_residual = 0.0;  // max |S S^-1 - 1|
  double non_hermiticity = 0.0;              // max |H_alpha - H_alpha^dagger|
  bool degenerate = false;
  std::vector<std::string> warnings;
};

PseudoDiagnostics run_pseudo_diagnostics(const PseudoConfig& cfg);

}  // namespace pmjc
