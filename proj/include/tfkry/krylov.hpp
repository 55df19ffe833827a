#pragma once

#include <optional>
#include <vector>

#include "tfkry/arnoldi.hpp"
#include "tfkry/core.hpp"

namespace tfkry {

enum class StopReason { none, discrepancy, max_iter, breakdown, stagnation };

/// Discrepancy principle threshold eta * eps_hat * ||b||, eta > 1.
struct DiscrepancyRule {
  double eta = 1.01;
  double eps_hat = 0.0;
  double threshold(double b_norm) const { return eta * eps_hat * b_norm; }
};

bool discrepancy_check(double residual_norm, double eta, double eps_hat, double b_norm);

/// Per-iteration history of a solver run. Solvers always run out their full
/// budget; stop_iteration records where the discrepancy rule first fired
/// (1-based), so traces stay inspectable past the stop.
struct SolveTrace {
  std::vector<Vector> iterates;             // kept only when keep_iterates
  std::vector<double> residual_norms;       // ||b - A x_k||
  std::vector<double> relative_errors;      // filled when x_ex is provided
  std::optional<std::size_t> stop_iteration;
  StopReason stop_reason = StopReason::none;

  double best_relative_error() const;
  std::size_t best_error_iteration() const;  // 1-based
};

struct SolverOptions {
  bool keep_iterates = false;
  ArnoldiOptions arnoldi;
};

/// GMRES via the projected least-squares problem, solved by SVD of H_m at
/// every step. The recorded residual is the projected one, which agrees
/// with ||b - A x_m|| up to the basis orthogonality level.
SolveTrace gmres(const LinearOperator& op, const Vector& b, std::size_t m_max,
                 const std::optional<DiscrepancyRule>& disc = {},
                 const Vector* x_ex = nullptr, const SolverOptions& options = {});

/// CGLS: implicit Krylov iteration on the normal equations A^T A x = A^T b.
SolveTrace cgls(const LinearOperator& op, const Vector& b, std::size_t k_max,
                const std::optional<DiscrepancyRule>& disc = {},
                const Vector* x_ex = nullptr, const SolverOptions& options = {});

/// CGNE (Craig): CG on A A^T y = b with x = A^T y.
SolveTrace cgne(const LinearOperator& op, const Vector& b, std::size_t k_max,
                const std::optional<DiscrepancyRule>& disc = {},
                const Vector* x_ex = nullptr, const SolverOptions& options = {});

/// Iterates of a small symmetric (PSD) solve, one entry per step.
struct ProjectedSolveResult {
  std::vector<Vector> t;                    // t_k, k = 1..steps
  std::vector<double> reduced_residuals;    // ||M t_k - g||
  StopReason reason = StopReason::max_iter;
};

/// MINRES on a small dense symmetric PSD system, realized as a Lanczos
/// process with full reorthogonalization plus an SVD least-squares solve of
/// the projected tridiagonal. Breakdown truncates with the exact solve in
/// the generated subspace.
ProjectedSolveResult minres_spd(const DenseMatrix& M, const Vector& g, std::size_t k_max);

/// CG (Galerkin) counterpart of minres_spd; reduced residuals need not be
/// monotone.
ProjectedSolveResult cg_spd(const DenseMatrix& M, const Vector& g, std::size_t k_max);

}  // namespace tfkry
