#include "tfkry/arnoldi.hpp"

#include <cmath>

namespace tfkry {

namespace {

// Householder vector zeroing z[pos+1:]; entries before pos are untouched.
// Returns the unit reflector u (zero before pos) and writes the resulting
// diagonal entry alpha = (P z)[pos].
Vector make_reflector(const Vector& z, std::size_t pos, double& alpha) {
  Vector u(z.size(), 0.0);
  double sigma = 0.0;
  {
    Vector tail(z.begin() + static_cast<std::ptrdiff_t>(pos), z.end());
    sigma = norm2(tail);
  }
  if (sigma == 0.0) {
    alpha = 0.0;
    return u;
  }
  alpha = z[pos] >= 0.0 ? -sigma : sigma;
  for (std::size_t i = pos; i < z.size(); ++i) u[i] = z[i];
  u[pos] -= alpha;
  const double un = norm2(u);
  if (un > 0.0)
    for (std::size_t i = pos; i < z.size(); ++i) u[i] /= un;
  return u;
}

void apply_reflector(const Vector& u, std::size_t pos, Vector& v) {
  double h = 0.0;
  for (std::size_t i = pos; i < v.size(); ++i) h += u[i] * v[i];
  h *= 2.0;
  if (h == 0.0) return;
  for (std::size_t i = pos; i < v.size(); ++i) v[i] -= h * u[i];
}

}  // namespace

double ArnoldiDecomposition::h(std::size_t i, std::size_t j) const {
  if (j >= h_cols_.size()) throw std::out_of_range("ArnoldiDecomposition::h");
  if (i >= h_cols_[j].size()) return 0.0;
  return h_cols_[j][i];
}

double ArnoldiDecomposition::subdiagonal(std::size_t j) const {
  if (j < 1 || j > m()) throw std::out_of_range("subdiagonal: step out of range");
  return h_cols_[j - 1][j];
}

DenseMatrix ArnoldiDecomposition::w_matrix(std::size_t cols) const {
  if (cols > w_cols_.size()) throw std::out_of_range("w_matrix");
  DenseMatrix W(n_, cols);
  for (std::size_t j = 0; j < cols; ++j)
    for (std::size_t i = 0; i < n_; ++i) W(i, j) = w_cols_[j][i];
  return W;
}

DenseMatrix ArnoldiDecomposition::h_matrix(std::size_t m_sub) const {
  if (m_sub > m()) throw std::out_of_range("h_matrix");
  DenseMatrix H(m_sub + 1, m_sub);
  for (std::size_t j = 0; j < m_sub; ++j) {
    const std::size_t rows = std::min(h_cols_[j].size(), m_sub + 2);
    for (std::size_t i = 0; i < rows && i <= m_sub; ++i) H(i, j) = h_cols_[j][i];
  }
  return H;
}

Vector ArnoldiDecomposition::recover_solution(std::size_t m_sub, const Vector& t) const {
  if (m_sub > m() || m_sub < 1)
    throw std::out_of_range("recover_solution: m_sub out of range");
  if (t.size() != m_sub + 1)
    throw std::invalid_argument("recover_solution: t has wrong dimension");
  Vector x(n_, 0.0);
  for (std::size_t j = 0; j < m_sub; ++j) {
    double s = 0.0;
    const std::size_t rows = std::min(h_cols_[j].size(), m_sub + 1);
    for (std::size_t i = 0; i < rows; ++i) s += h_cols_[j][i] * t[i];
    axpy(s, w_cols_[j], x);
  }
  return x;
}

Vector ArnoldiDecomposition::apply_surrogate(std::size_t m_sub, const Vector& x) const {
  if (x.size() != n_) throw std::invalid_argument("apply_surrogate: dimension mismatch");
  Vector t(m_sub + 1);
  for (std::size_t i = 0; i <= m_sub; ++i) t[i] = dot(w_cols_[i], x);
  return recover_solution(m_sub, t);
}

DenseMatrix ArnoldiDecomposition::materialize_surrogate(std::size_t m_sub) const {
  DenseMatrix Ap(n_, n_);
  Vector e(n_, 0.0);
  for (std::size_t j = 0; j < n_; ++j) {
    e[j] = 1.0;
    const Vector col = apply_surrogate(m_sub, e);
    for (std::size_t i = 0; i < n_; ++i) Ap(i, j) = col[i];
    e[j] = 0.0;
  }
  return Ap;
}

Vector ArnoldiDecomposition::orthogonal_extension() const {
  if (w_cols_.size() >= n_) return Vector(n_, 0.0);
  std::size_t best_i = 0;
  double best_res = -1.0;
  for (std::size_t i = 0; i < n_; ++i) {
    double proj = 0.0;
    for (const auto& w : w_cols_) proj += w[i] * w[i];
    if (1.0 - proj > best_res) {
      best_res = 1.0 - proj;
      best_i = i;
    }
  }
  Vector v(n_, 0.0);
  v[best_i] = 1.0;
  for (int pass = 0; pass < 2; ++pass)
    for (const auto& w : w_cols_) {
      const double h = dot(w, v);
      axpy(-h, w, v);
    }
  const double nv = norm2(v);
  if (nv < 1e-8) return Vector(n_, 0.0);
  return scaled(v, 1.0 / nv);
}

void ArnoldiDecomposition::extend(const LinearOperator& op, std::size_t m_target) {
  if (op.dim_in != n_ || op.dim_out != n_)
    throw std::invalid_argument("extend: operator dimension mismatch");
  if (m_target > n_) m_target = n_;
  if (breakdown_ || m_target <= m()) return;
  if (opts_.variant == ArnoldiVariant::mgs)
    extend_mgs(op, m_target);
  else
    extend_householder(op, m_target);
}

void ArnoldiDecomposition::extend_mgs(const LinearOperator& op, std::size_t m_target) {
  for (std::size_t j = m(); j < m_target; ++j) {
    Vector v = op.forward(w_cols_[j]);
    Vector hcol(j + 2, 0.0);
    for (std::size_t i = 0; i <= j; ++i) {
      const double hij = dot(w_cols_[i], v);
      hcol[i] = hij;
      axpy(-hij, w_cols_[i], v);
    }
    if (opts_.reorthogonalize) {
      for (std::size_t i = 0; i <= j; ++i) {
        const double hij = dot(w_cols_[i], v);
        hcol[i] += hij;
        axpy(-hij, w_cols_[i], v);
      }
    }
    const double hsub = norm2(v);
    hcol[j + 1] = hsub;
    h_cols_.push_back(std::move(hcol));
    if (hsub < opts_.breakdown_tol * beta_) {
      breakdown_ = true;
      w_cols_.push_back(orthogonal_extension());
      return;
    }
    w_cols_.push_back(scaled(v, 1.0 / hsub));
  }
}

void ArnoldiDecomposition::extend_householder(const LinearOperator& op, std::size_t m_target) {
  for (std::size_t c = m(); c < m_target; ++c) {
    // Raw basis vector for the recurrence (signs are exact +-1 flips).
    Vector z = op.forward(scaled(w_cols_[c], signs_[c]));
    for (std::size_t i = 0; i <= c; ++i) apply_reflector(reflectors_[i], i, z);

    const std::size_t pos = c + 1;
    double alpha = 0.0;
    Vector hcol(c + 2, 0.0);
    if (pos < n_) {
      Vector u = make_reflector(z, pos, alpha);
      Vector pz = z;
      apply_reflector(u, pos, pz);
      for (std::size_t i = 0; i <= pos; ++i) hcol[i] = pz[i];
      reflectors_.push_back(std::move(u));
      const double s_next = alpha >= 0.0 ? signs_[c] : -signs_[c];
      signs_.push_back(s_next);
      Vector w(n_, 0.0);
      w[pos] = 1.0;
      for (std::size_t i = pos + 1; i-- > 0;) apply_reflector(reflectors_[i], i, w);
      // Signed exposure: H~ = S H S, W~ = W S.
      for (std::size_t i = 0; i <= pos; ++i) hcol[i] *= signs_[i] * signs_[c];
      h_cols_.push_back(std::move(hcol));
      w_cols_.push_back(scaled(w, s_next));
      if (std::abs(alpha) < opts_.breakdown_tol * beta_) {
        breakdown_ = true;
        return;
      }
    } else {
      // Full dimension: the Krylov space cannot grow further. The last
      // Hessenberg row is an exact zero and the extra basis column is empty.
      for (std::size_t i = 0; i < n_; ++i) hcol[i] = z[i] * signs_[i] * signs_[c];
      hcol[n_] = 0.0;
      h_cols_.push_back(std::move(hcol));
      signs_.push_back(signs_[c]);
      w_cols_.push_back(Vector(n_, 0.0));
      breakdown_ = true;
      return;
    }
  }
}

ArnoldiDecomposition arnoldi_expand(const LinearOperator& op, const Vector& b,
                                    std::size_t m_target, const ArnoldiOptions& opts) {
  if (op.dim_in != op.dim_out) throw std::invalid_argument("arnoldi_expand: operator not square");
  if (b.size() != op.dim_in) throw std::invalid_argument("arnoldi_expand: rhs dimension mismatch");
  const double beta = norm2(b);
  if (beta == 0.0) throw std::invalid_argument("arnoldi_expand: b == 0");
  if (m_target < 1) throw std::invalid_argument("arnoldi_expand: m_target < 1");
  if (opts.breakdown_tol <= 0.0)
    throw std::invalid_argument("arnoldi_expand: breakdown_tol must be positive");

  ArnoldiDecomposition dec;
  dec.n_ = b.size();
  dec.beta_ = beta;
  dec.opts_ = opts;
  if (opts.variant == ArnoldiVariant::mgs) {
    dec.w_cols_.push_back(scaled(b, 1.0 / beta));
  } else {
    double alpha = 0.0;
    Vector u = make_reflector(b, 0, alpha);
    dec.reflectors_.push_back(std::move(u));
    const double s0 = alpha >= 0.0 ? 1.0 : -1.0;
    dec.signs_.push_back(s0);
    Vector w(dec.n_, 0.0);
    w[0] = 1.0;
    apply_reflector(dec.reflectors_[0], 0, w);
    dec.w_cols_.push_back(scaled(w, s0));
  }
  dec.extend(op, m_target);
  return dec;
}

}  // namespace tfkry
