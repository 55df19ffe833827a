#pragma once

#include <optional>
#include <vector>

#include "tfkry/arnoldi.hpp"
#include "tfkry/core.hpp"
#include "tfkry/krylov.hpp"

namespace tfkry {

/// Rank-m factored transpose surrogate A'_m = W_m H_m^T W_{m+1}^T held
/// through its Arnoldi decomposition; nothing of size N x N is formed.
struct TfPreconditioner {
  const ArnoldiDecomposition* dec = nullptr;
  std::size_t m = 0;

  Vector apply(const Vector& x) const { return dec->apply_surrogate(m, x); }
  DenseMatrix materialize() const { return dec->materialize_surrogate(m); }
};

enum class InnerSolver { minres, cg };
enum class FirstStop { subdiag, sigma_product, both, m_fixed };

struct TfConfig {
  std::size_t m_max = 40;
  std::size_t k_max = 0;        // 0: defaults to the rank bound m
  double tau = 1e-10;           // subdiagonal threshold
  double tau_prime = 1e-15;     // singular-value product threshold
  double eta = 1.01;
  std::optional<double> eps_hat;
  InnerSolver inner_solver = InnerSolver::minres;  // minres: TF-CGLS, cg: TF-CGNE
  FirstStop first_stop = FirstStop::sigma_product;
  ArnoldiOptions arnoldi;
  bool keep_iterates = true;
  /// Keep expanding the decomposition (after the active criterion fires)
  /// until the other first-cycle criterion has fired too, so both indices
  /// get recorded.
  bool record_both_criteria = true;
};

/// First-cycle quantities tracked while the Arnoldi decomposition grows.
struct StoppingDiagnostics {
  std::vector<double> subdiagonals;    // h_{m+1,m}, m = 1..
  std::vector<double> sigma1_per_m;    // sigma_1 of H_m
  std::vector<double> sigma_min_per_m; // sigma_m of H_m
  std::vector<double> sigma_product;   // sigma_1^(m) * sigma_{m+1}^(m+1), m = 1..
  std::vector<double> zeta_exact;      // ||A^T A - P_m A^T A||, validation only
  std::vector<double> zeta_bound;      // sigma_1^(m) * ||A - W_{m+1} H_m W_m^T||
  std::optional<std::size_t> stop_subdiag_m;
  std::optional<std::size_t> stop_sigma_product_m;
};

std::optional<std::size_t> stop_subdiag(const StoppingDiagnostics& diag, double tau);
std::optional<std::size_t> stop_sigma_product(const StoppingDiagnostics& diag,
                                              double tau_prime);

struct TfStep {
  Vector t;                       // projected iterate, dim m+1
  Vector x;                       // recovered iterate, dim N (if kept)
  double reduced_residual = 0.0;  // || ||b|| e1 - H H^T t ||
  std::optional<double> relative_error;
};

struct TfResult {
  std::size_t m_used = 0;
  std::vector<TfStep> steps;
  std::optional<std::size_t> k_stop;   // discrepancy index, 1-based
  StopReason phase2_reason = StopReason::max_iter;
  StoppingDiagnostics diagnostics;
  double b_norm = 0.0;
  ArnoldiDecomposition dec;

  std::size_t best_residual_k() const;  // 1-based argmin of reduced residual
  double best_relative_error() const;
};

/// Algorithm: a first cycle of Arnoldi iterations sized by the subdiagonal
/// or singular-value-product criterion, then MINRES (TF-CGLS) or CG
/// (TF-CGNE) on the projected system H_m H_m^T t = ||b|| e1, with the
/// discrepancy principle on the reduced residual; x_{m,k} = W_m H_m^T t_k.
TfResult tf_solve(const LinearOperator& op, const Vector& b, const TfConfig& cfg,
                  const Vector* x_ex = nullptr);

/// x = W_m (H_m^T t); free function over the decomposition.
Vector recover_solution(const ArnoldiDecomposition& dec, std::size_t m, const Vector& t);

/// Fills zeta_exact / zeta_bound for m = 1..m_upto. Needs the dense matrix
/// (validation-only path: the bound is the computable stand-in elsewhere).
void zeta_diagnostics(const DenseMatrix& A, const ArnoldiDecomposition& dec,
                      std::size_t m_upto, StoppingDiagnostics& diag);

enum class FilterKind { tf_cgls, hybrid_tsvd };

/// Diagonal filter factors of the m-step decomposition after k inner
/// iterations, in the singular basis of H_m. Entries whose right-hand-side
/// coefficient is below the tiny-denominator guard are reported as NaN.
std::vector<double> filter_factors(const ArnoldiDecomposition& dec, std::size_t m,
                                   std::size_t k, FilterKind kind);

/// Basis-coefficient matrices of the first k solution-subspace vectors in
/// the right singular basis of A, for the three subspace constructions
/// compared in the experiments.
struct SvdMixingReport {
  DenseMatrix gmres_coeffs;   // V^T (W_{m_small} V^{H_{m_small}})[:, 0..k)
  DenseMatrix tf_coeffs;      // V^T (W_{m_large} V^{H_{m_large}}_k)
  DenseMatrix lanczos_coeffs; // V^T (Lanczos(A^T A, A^T b) basis mixed by T's SVD)
};

SvdMixingReport svd_mixing_report(const DenseMatrix& A, const Vector& b,
                                  std::size_t m_small, std::size_t m_large, std::size_t k);

enum class Prop1Status { holds, fails, not_applicable };

/// Round-trip check of the projected-system equivalence: solves
/// H_m H_m^T t = ||b|| e1, forms y = W_{m+1} t, and verifies that y is the
/// minimum-norm solution of C_m C_m^T y = b and that x = A'_m y solves
/// A x = b. Requires that the projected problem is consistent.
Prop1Status verify_proposition1(const DenseMatrix& A, const ArnoldiDecomposition& dec,
                                std::size_t m);

}  // namespace tfkry
