#include "tfkry/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace tfkry {

bool discrepancy_check(double residual_norm, double eta, double eps_hat, double b_norm) {
  if (eta <= 1.0) throw std::invalid_argument("discrepancy_check: eta must exceed 1");
  if (eps_hat < 0.0) throw std::invalid_argument("discrepancy_check: eps_hat must be >= 0");
  return residual_norm < eta * eps_hat * b_norm;
}

double SolveTrace::best_relative_error() const {
  double best = std::numeric_limits<double>::infinity();
  for (double e : relative_errors) best = std::min(best, e);
  return best;
}

std::size_t SolveTrace::best_error_iteration() const {
  std::size_t arg = 0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < relative_errors.size(); ++i)
    if (relative_errors[i] < best) {
      best = relative_errors[i];
      arg = i + 1;
    }
  return arg;
}

namespace {

void record_step(SolveTrace& trace, const Vector& x, double res, const Vector* x_ex,
                 double x_ex_norm, bool keep, const std::optional<DiscrepancyRule>& disc,
                 double b_norm) {
  trace.residual_norms.push_back(res);
  if (x_ex) trace.relative_errors.push_back(norm2(vector_sub(x, *x_ex)) / x_ex_norm);
  if (keep) trace.iterates.push_back(x);
  if (disc && !trace.stop_iteration &&
      discrepancy_check(res, disc->eta, disc->eps_hat, b_norm)) {
    trace.stop_iteration = trace.residual_norms.size();
    trace.stop_reason = StopReason::discrepancy;
  }
}

}  // namespace

SolveTrace gmres(const LinearOperator& op, const Vector& b, std::size_t m_max,
                 const std::optional<DiscrepancyRule>& disc, const Vector* x_ex,
                 const SolverOptions& options) {
  if (norm2(b) == 0.0) throw std::invalid_argument("gmres: b == 0");
  SolveTrace trace;
  const double b_norm = norm2(b);
  const double x_ex_norm = x_ex ? norm2(*x_ex) : 1.0;

  ArnoldiDecomposition dec = arnoldi_expand(op, b, 1, options.arnoldi);
  for (std::size_t j = 1; j <= m_max; ++j) {
    if (j > dec.m()) break;  // breakdown cut the expansion short
    const DenseMatrix Hj = dec.h_matrix(j);
    Vector rhs(j + 1, 0.0);
    rhs[0] = dec.beta();
    const SvdFactorization f = dense_svd(Hj);
    const Vector s = least_squares_svd(f, rhs);
    // Projected residual ||H s - beta e1||.
    Vector r = rhs;
    for (std::size_t col = 0; col < j; ++col)
      for (std::size_t i = 0; i <= std::min(col + 1, j); ++i) r[i] -= Hj(i, col) * s[col];
    const double res = norm2(r);
    Vector x(op.dim_in, 0.0);
    for (std::size_t col = 0; col < j; ++col) axpy(s[col], dec.w(col), x);
    record_step(trace, x, res, x_ex, x_ex_norm, options.keep_iterates, disc, b_norm);
    if (j < m_max) dec.extend(op, j + 1);
  }
  if (dec.breakdown() && trace.residual_norms.size() < m_max) {
    trace.stop_reason = StopReason::breakdown;
  } else if (trace.stop_reason == StopReason::none) {
    trace.stop_reason = StopReason::max_iter;
  }
  return trace;
}

SolveTrace cgls(const LinearOperator& op, const Vector& b, std::size_t k_max,
                const std::optional<DiscrepancyRule>& disc, const Vector* x_ex,
                const SolverOptions& options) {
  if (op.adjoint_kind != AdjointKind::exact)
    throw std::invalid_argument("cgls: operator must carry an exact adjoint");
  SolveTrace trace;
  const double b_norm = norm2(b);
  const double x_ex_norm = x_ex ? norm2(*x_ex) : 1.0;

  Vector x(op.dim_in, 0.0);
  Vector r = b;
  Vector s = apply_adjoint(op, r);
  Vector p = s;
  double gamma = dot(s, s);
  for (std::size_t k = 1; k <= k_max; ++k) {
    if (gamma == 0.0) {
      trace.stop_reason = StopReason::breakdown;
      return trace;
    }
    const Vector q = apply(op, p);
    const double qq = dot(q, q);
    if (qq == 0.0) {
      trace.stop_reason = StopReason::breakdown;
      return trace;
    }
    const double alpha = gamma / qq;
    axpy(alpha, p, x);
    axpy(-alpha, q, r);
    s = apply_adjoint(op, r);
    const double gamma_next = dot(s, s);
    const double beta = gamma_next / gamma;
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
    gamma = gamma_next;
    record_step(trace, x, norm2(r), x_ex, x_ex_norm, options.keep_iterates, disc, b_norm);
  }
  if (trace.stop_reason == StopReason::none) trace.stop_reason = StopReason::max_iter;
  return trace;
}

SolveTrace cgne(const LinearOperator& op, const Vector& b, std::size_t k_max,
                const std::optional<DiscrepancyRule>& disc, const Vector* x_ex,
                const SolverOptions& options) {
  if (op.adjoint_kind != AdjointKind::exact)
    throw std::invalid_argument("cgne: operator must carry an exact adjoint");
  SolveTrace trace;
  const double b_norm = norm2(b);
  const double x_ex_norm = x_ex ? norm2(*x_ex) : 1.0;

  Vector x(op.dim_in, 0.0);
  Vector r = b;
  Vector p = apply_adjoint(op, r);
  double rr = dot(r, r);
  for (std::size_t k = 1; k <= k_max; ++k) {
    const double pp = dot(p, p);
    if (pp == 0.0) {
      trace.stop_reason = StopReason::breakdown;
      return trace;
    }
    const double alpha = rr / pp;
    axpy(alpha, p, x);
    const Vector Ap = apply(op, p);
    axpy(-alpha, Ap, r);
    const double rr_next = dot(r, r);
    const double beta = rr_next / rr;
    const Vector s = apply_adjoint(op, r);
    for (std::size_t i = 0; i < p.size(); ++i) p[i] = s[i] + beta * p[i];
    rr = rr_next;
    record_step(trace, x, norm2(r), x_ex, x_ex_norm, options.keep_iterates, disc, b_norm);
  }
  if (trace.stop_reason == StopReason::none) trace.stop_reason = StopReason::max_iter;
  return trace;
}

namespace {

// Shared Lanczos-based driver: builds an orthonormal basis of K_k(M, g)
// with full reorthogonalization, then solves the projected problem per
// step, either in least-squares (MINRES) or Galerkin (CG) form.
ProjectedSolveResult projected_solve(const DenseMatrix& M, const Vector& g, std::size_t k_max,
                                     bool galerkin) {
  const std::size_t n = g.size();
  if (M.rows() != n || M.cols() != n)
    throw std::invalid_argument("projected_solve: shape mismatch");
  const double sym = max_abs(matrix_sub(M, M.transposed()));
  if (sym > 1e-10 * (max_abs(M) + 1e-300))
    throw std::invalid_argument("projected_solve: matrix is not symmetric");

  ProjectedSolveResult out;
  const double g_norm = norm2(g);
  if (g_norm == 0.0) return out;
  k_max = std::min(k_max, n);

  std::vector<Vector> Q;
  Q.push_back(scaled(g, 1.0 / g_norm));
  std::vector<double> alpha, beta;  // tridiagonal entries
  for (std::size_t k = 0; k < k_max; ++k) {
    Vector v = matvec(M, Q[k]);
    double a = 0.0;
    for (std::size_t i = 0; i < Q.size(); ++i) {
      const double h = dot(Q[i], v);
      if (i == k) a = h;
      axpy(-h, Q[i], v);
    }
    for (std::size_t i = 0; i < Q.size(); ++i) {
      const double h = dot(Q[i], v);
      axpy(-h, Q[i], v);
    }
    alpha.push_back(a);
    const double bnext = norm2(v);

    const std::size_t j = k + 1;
    Vector z;
    if (galerkin) {
      DenseMatrix T(j, j);
      for (std::size_t i = 0; i < j; ++i) {
        T(i, i) = alpha[i];
        if (i > 0) {
          T(i - 1, i) = beta[i - 1];
          T(i, i - 1) = beta[i - 1];
        }
      }
      Vector rhs(j, 0.0);
      rhs[0] = g_norm;
      z = least_squares_svd(T, rhs);
    } else {
      DenseMatrix T(j + 1, j);
      for (std::size_t i = 0; i < j; ++i) {
        T(i, i) = alpha[i];
        if (i > 0) {
          T(i - 1, i) = beta[i - 1];
          T(i, i - 1) = beta[i - 1];
        }
      }
      T(j, j - 1) = bnext;
      Vector rhs(j + 1, 0.0);
      rhs[0] = g_norm;
      z = least_squares_svd(T, rhs);
    }
    Vector t(n, 0.0);
    for (std::size_t i = 0; i < j; ++i) axpy(z[i], Q[i], t);
    out.t.push_back(t);
    out.reduced_residuals.push_back(norm2(vector_sub(g, matvec(M, t))));

    if (bnext < 1e-14 * g_norm) {
      out.reason = StopReason::breakdown;
      return out;
    }
    // Stagnation: three consecutive steps without relative progress.
    const std::size_t steps = out.reduced_residuals.size();
    if (steps >= 4) {
      bool stalled = true;
      for (std::size_t i = steps - 3; i < steps; ++i)
        if (out.reduced_residuals[i] < out.reduced_residuals[i - 1] * (1.0 - 1e-14))
          stalled = false;
      if (stalled) {
        out.reason = StopReason::stagnation;
        return out;
      }
    }
    beta.push_back(bnext);
    Q.push_back(scaled(v, 1.0 / bnext));
  }
  out.reason = StopReason::max_iter;
  return out;
}

}  // namespace

ProjectedSolveResult minres_spd(const DenseMatrix& M, const Vector& g, std::size_t k_max) {
  return projected_solve(M, g, k_max, /*galerkin=*/false);
}

ProjectedSolveResult cg_spd(const DenseMatrix& M, const Vector& g, std::size_t k_max) {
  return projected_solve(M, g, k_max, /*galerkin=*/true);
}

}  // namespace tfkry
