#include "tfkry/core.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace tfkry {

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (rows_ * cols_ != data_.size())
    throw std::invalid_argument("DenseMatrix: rows*cols != entries.size()");
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix I(n, n);
  for (std::size_t i = 0; i < n; ++i) I(i, i) = 1.0;
  return I;
}

DenseMatrix DenseMatrix::diagonal(const Vector& d) {
  DenseMatrix D(d.size(), d.size());
  for (std::size_t i = 0; i < d.size(); ++i) D(i, i) = d[i];
  return D;
}

DenseMatrix DenseMatrix::from_columns(const std::vector<Vector>& cols) {
  if (cols.empty()) return {};
  DenseMatrix M(cols.front().size(), cols.size());
  for (std::size_t j = 0; j < cols.size(); ++j) {
    if (cols[j].size() != M.rows())
      throw std::invalid_argument("from_columns: ragged columns");
    for (std::size_t i = 0; i < M.rows(); ++i) M(i, j) = cols[j][i];
  }
  return M;
}

DenseMatrix DenseMatrix::transposed() const {
  DenseMatrix T(cols_, rows_);
  for (std::size_t i = 0; i < rows_; ++i)
    for (std::size_t j = 0; j < cols_; ++j) T(j, i) = (*this)(i, j);
  return T;
}

Vector DenseMatrix::column(std::size_t j) const {
  Vector c(rows_);
  for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
  return c;
}

DenseMatrix DenseMatrix::block(std::size_t rows, std::size_t cols) const {
  if (rows > rows_ || cols > cols_) throw std::invalid_argument("block: out of range");
  DenseMatrix B(rows, cols);
  for (std::size_t i = 0; i < rows; ++i)
    for (std::size_t j = 0; j < cols; ++j) B(i, j) = (*this)(i, j);
  return B;
}

double dot(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("dot: size mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(const Vector& x) {
  // Two-pass scaled norm keeps severely graded vectors (quadrature columns
  // hold denormals) from under/overflowing.
  double amax = 0.0;
  for (double v : x) amax = std::max(amax, std::abs(v));
  if (amax == 0.0) return 0.0;
  double s = 0.0;
  for (double v : x) {
    const double r = v / amax;
    s += r * r;
  }
  return amax * std::sqrt(s);
}

void axpy(double alpha, const Vector& x, Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("axpy: size mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

Vector scaled(const Vector& x, double alpha) {
  Vector y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = alpha * x[i];
  return y;
}

Vector vector_sub(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("vector_sub: size mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] - y[i];
  return z;
}

Vector vector_add(const Vector& x, const Vector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("vector_add: size mismatch");
  Vector z(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) z[i] = x[i] + y[i];
  return z;
}

Vector matvec(const DenseMatrix& A, const Vector& x) {
  if (x.size() != A.cols()) throw std::invalid_argument("matvec: size mismatch");
  Vector y(A.rows(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < A.cols(); ++j) s += A(i, j) * x[j];
    y[i] = s;
  }
  return y;
}

Vector matvec_transposed(const DenseMatrix& A, const Vector& x) {
  if (x.size() != A.rows()) throw std::invalid_argument("matvec_transposed: size mismatch");
  Vector y(A.cols(), 0.0);
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t j = 0; j < A.cols(); ++j) y[j] += A(i, j) * x[i];
  return y;
}

DenseMatrix matmul(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.cols() != B.rows()) throw std::invalid_argument("matmul: size mismatch");
  DenseMatrix C(A.rows(), B.cols());
  for (std::size_t i = 0; i < A.rows(); ++i)
    for (std::size_t k = 0; k < A.cols(); ++k) {
      const double a = A(i, k);
      if (a == 0.0) continue;
      for (std::size_t j = 0; j < B.cols(); ++j) C(i, j) += a * B(k, j);
    }
  return C;
}

DenseMatrix matrix_sub(const DenseMatrix& A, const DenseMatrix& B) {
  if (A.rows() != B.rows() || A.cols() != B.cols())
    throw std::invalid_argument("matrix_sub: shape mismatch");
  DenseMatrix C(A.rows(), A.cols());
  for (std::size_t i = 0; i < A.data().size(); ++i) C.data()[i] = A.data()[i] - B.data()[i];
  return C;
}

double max_abs(const DenseMatrix& A) {
  double m = 0.0;
  for (double v : A.data()) m = std::max(m, std::abs(v));
  return m;
}

bool all_finite(const Vector& x) {
  return std::all_of(x.begin(), x.end(), [](double v) { return std::isfinite(v); });
}

bool all_finite(const DenseMatrix& A) { return all_finite(A.data()); }

LinearOperator LinearOperator::from_matrix(const DenseMatrix& A) {
  LinearOperator op;
  op.dim_out = A.rows();
  op.dim_in = A.cols();
  op.forward = [A](const Vector& x) { return matvec(A, x); };
  op.adjoint = [A](const Vector& y) { return matvec_transposed(A, y); };
  op.adjoint_kind = AdjointKind::exact;
  return op;
}

LinearOperator LinearOperator::identity(std::size_t n) {
  LinearOperator op;
  op.dim_out = op.dim_in = n;
  op.forward = [](const Vector& x) { return x; };
  op.adjoint = [](const Vector& y) { return y; };
  op.adjoint_kind = AdjointKind::exact;
  return op;
}

Vector apply(const LinearOperator& op, const Vector& x) {
  if (x.size() != op.dim_in)
    throw std::invalid_argument("apply: dimension mismatch");
  return op.forward(x);
}

Vector apply_adjoint(const LinearOperator& op, const Vector& y) {
  if (op.adjoint_kind == AdjointKind::absent || !op.adjoint)
    throw std::invalid_argument("apply_adjoint: operator has no adjoint");
  if (y.size() != op.dim_out)
    throw std::invalid_argument("apply_adjoint: dimension mismatch");
  return op.adjoint(y);
}

namespace {

// Orthonormal completion for columns whose singular value vanished: take the
// coordinate vector least represented in the current column span.
void complete_orthonormal(DenseMatrix& U, std::size_t col) {
  const std::size_t n = U.rows();
  std::size_t best_i = 0;
  double best_res = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    double proj = 0.0;
    for (std::size_t j = 0; j < col; ++j) proj += U(i, j) * U(i, j);
    const double res = 1.0 - proj;
    if (res > best_res) {
      best_res = res;
      best_i = i;
    }
  }
  Vector v(n, 0.0);
  v[best_i] = 1.0;
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t j = 0; j < col; ++j) {
      double h = 0.0;
      for (std::size_t i = 0; i < n; ++i) h += U(i, j) * v[i];
      for (std::size_t i = 0; i < n; ++i) v[i] -= h * U(i, j);
    }
  }
  const double nv = norm2(v);
  for (std::size_t i = 0; i < n; ++i) U(i, col) = v[i] / nv;
}

}  // namespace

SvdFactorization dense_svd(const DenseMatrix& M) {
  if (!all_finite(M)) throw std::invalid_argument("dense_svd: non-finite input");
  const bool tall = M.rows() >= M.cols();
  DenseMatrix A = tall ? M : M.transposed();
  const std::size_t n = A.rows();
  const std::size_t k = A.cols();

  DenseMatrix V = DenseMatrix::identity(k);
  constexpr double kRelTol = 1e-14;
  constexpr int kMaxSweeps = 60;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < k; ++p) {
      for (std::size_t q = p + 1; q < k; ++q) {
        double app = 0.0, aqq = 0.0, apq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double ap = A(i, p), aq = A(i, q);
          app += ap * ap;
          aqq += aq * aq;
          apq += ap * aq;
        }
        if (app == 0.0 || aqq == 0.0) continue;
        if (std::abs(apq) <= kRelTol * std::sqrt(app) * std::sqrt(aqq)) continue;
        rotated = true;
        const double zeta = (aqq - app) / (2.0 * apq);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        for (std::size_t i = 0; i < n; ++i) {
          const double ap = A(i, p), aq = A(i, q);
          A(i, p) = c * ap - s * aq;
          A(i, q) = s * ap + c * aq;
        }
        for (std::size_t i = 0; i < k; ++i) {
          const double vp = V(i, p), vq = V(i, q);
          V(i, p) = c * vp - s * vq;
          V(i, q) = s * vp + c * vq;
        }
      }
    }
    if (!rotated) break;
  }

  Vector sigma(k);
  DenseMatrix U(n, k);
  for (std::size_t j = 0; j < k; ++j) {
    Vector col = A.column(j);
    sigma[j] = norm2(col);
  }
  // Sort nonincreasing; stable index order keeps the result deterministic.
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  std::stable_sort(idx.begin(), idx.end(),
                   [&sigma](std::size_t a, std::size_t b) { return sigma[a] > sigma[b]; });

  Vector sorted_sigma(k);
  DenseMatrix Vs(k, k);
  for (std::size_t j = 0; j < k; ++j) {
    const std::size_t src = idx[j];
    sorted_sigma[j] = sigma[src];
    for (std::size_t i = 0; i < k; ++i) Vs(i, j) = V(i, src);
    if (sigma[src] > 0.0) {
      for (std::size_t i = 0; i < n; ++i) U(i, j) = A(i, src) / sigma[src];
    }
  }
  for (std::size_t j = 0; j < k; ++j)
    if (sorted_sigma[j] == 0.0) complete_orthonormal(U, j);

  if (tall) return {U, sorted_sigma, Vs};
  return {Vs, sorted_sigma, U};
}

double matrix_norm2(const DenseMatrix& M) {
  if (M.rows() == 0 || M.cols() == 0) return 0.0;
  return dense_svd(M).sigma.front();
}

Vector tsvd_solve(const DenseMatrix& A, const Vector& b, std::size_t m) {
  if (m < 1 || m > std::min(A.rows(), A.cols()))
    throw std::invalid_argument("tsvd_solve: truncation index out of range");
  if (b.size() != A.rows()) throw std::invalid_argument("tsvd_solve: rhs size mismatch");
  const SvdFactorization f = dense_svd(A);
  if (f.sigma[m - 1] <= 0.0)
    throw std::invalid_argument("tsvd_solve: rank-deficient truncation (sigma[m-1] == 0)");
  Vector x(A.cols(), 0.0);
  for (std::size_t j = 0; j < m; ++j) {
    const double c = dot(f.U.column(j), b) / f.sigma[j];
    for (std::size_t i = 0; i < A.cols(); ++i) x[i] += c * f.V(i, j);
  }
  return x;
}

Vector least_squares_svd(const SvdFactorization& f, const Vector& rhs, double rel_cutoff) {
  const std::size_t k = f.sigma.size();
  Vector x(f.V.rows(), 0.0);
  if (k == 0) return x;
  const double cutoff = rel_cutoff * f.sigma.front();
  for (std::size_t j = 0; j < k; ++j) {
    if (f.sigma[j] <= cutoff || f.sigma[j] == 0.0) continue;
    const double c = dot(f.U.column(j), rhs) / f.sigma[j];
    for (std::size_t i = 0; i < f.V.rows(); ++i) x[i] += c * f.V(i, j);
  }
  return x;
}

Vector least_squares_svd(const DenseMatrix& M, const Vector& rhs, double rel_cutoff) {
  return least_squares_svd(dense_svd(M), rhs, rel_cutoff);
}

}  // namespace tfkry
