#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tfkry {

using Vector = std::vector<double>;

/// Dense row-major matrix of doubles. All problem sizes here are small
/// enough (N <= 65536 unknowns, factors of order <= ~60) that a plain
/// contiguous buffer beats any sparse or blocked format.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);

  static DenseMatrix identity(std::size_t n);
  static DenseMatrix diagonal(const Vector& d);
  static DenseMatrix from_columns(const std::vector<Vector>& cols);

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }

  double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
  double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

  const std::vector<double>& data() const { return data_; }
  std::vector<double>& data() { return data_; }

  DenseMatrix transposed() const;
  Vector column(std::size_t j) const;
  /// Top-left rows x cols block.
  DenseMatrix block(std::size_t rows, std::size_t cols) const;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

// Basic dense kernels.
double dot(const Vector& x, const Vector& y);
double norm2(const Vector& x);
void axpy(double alpha, const Vector& x, Vector& y);  // y += alpha*x
Vector scaled(const Vector& x, double alpha);
Vector vector_sub(const Vector& x, const Vector& y);
Vector vector_add(const Vector& x, const Vector& y);

Vector matvec(const DenseMatrix& A, const Vector& x);
Vector matvec_transposed(const DenseMatrix& A, const Vector& x);
DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B);
DenseMatrix matrix_sub(const DenseMatrix& A, const DenseMatrix& B);
double max_abs(const DenseMatrix& A);

bool all_finite(const Vector& x);
bool all_finite(const DenseMatrix& A);

/// Matrix-free square (or rectangular) operator. The adjoint slot may hold
/// the exact transpose action, a structural surrogate for it, or nothing.
enum class AdjointKind { exact, surrogate, absent };

struct LinearOperator {
  std::size_t dim_out = 0;
  std::size_t dim_in = 0;
  std::function<Vector(const Vector&)> forward;
  std::function<Vector(const Vector&)> adjoint;  // empty iff kind == absent
  AdjointKind adjoint_kind = AdjointKind::absent;

  static LinearOperator from_matrix(const DenseMatrix& A);
  static LinearOperator identity(std::size_t n);
};

Vector apply(const LinearOperator& op, const Vector& x);
Vector apply_adjoint(const LinearOperator& op, const Vector& y);

/// Economy-size SVD, A = U diag(sigma) V^T with sigma nonincreasing.
/// U is rows x k, V is cols x k with k = min(rows, cols).
struct SvdFactorization {
  DenseMatrix U;
  Vector sigma;
  DenseMatrix V;
};

/// One-sided Jacobi SVD. Deterministic for a fixed input: the sweep order
/// is fixed and iteration stops when every column pair is orthogonal to
/// 1e-14 relative. Accurate for the small factors used throughout.
SvdFactorization dense_svd(const DenseMatrix& M);

/// Matrix 2-norm as the largest singular value of dense_svd; determinism
/// over speed (no power iteration).
double matrix_norm2(const DenseMatrix& M);

/// Minimum-norm least-squares solution of the rank-m truncation:
/// x = V_m Sigma_m^{-1} U_m^T b. Requires sigma[m-1] > 0.
Vector tsvd_solve(const DenseMatrix& A, const Vector& b, std::size_t m);

/// Minimum-norm least squares via pseudo-inverse with relative cutoff
/// sigma_i <= rel_cutoff * sigma_0 treated as zero.
Vector least_squares_svd(const SvdFactorization& f, const Vector& rhs,
                         double rel_cutoff = 1e-13);
Vector least_squares_svd(const DenseMatrix& M, const Vector& rhs,
                         double rel_cutoff = 1e-13);

}  // namespace tfkry
