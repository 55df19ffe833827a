#pragma once

#include <optional>
#include <vector>

#include "tfkry/core.hpp"

namespace tfkry {

enum class ArnoldiVariant { mgs, householder };

struct ArnoldiOptions {
  ArnoldiVariant variant = ArnoldiVariant::mgs;
  /// Breakdown when h_{j+1,j} < breakdown_tol * ||b||.
  double breakdown_tol = 1e-14;
  /// One extra orthogonalization pass for the MGS variant.
  bool reorthogonalize = false;
};

/// A W_m = W_{m+1} H_m with orthonormal W columns and upper-Hessenberg H.
/// The decomposition is resumable: extend() grows m without recomputing
/// earlier columns, bitwise-identically to a fresh run at the larger m.
class ArnoldiDecomposition {
 public:
  std::size_t m() const { return h_cols_.size(); }
  std::size_t dim() const { return n_; }
  double beta() const { return beta_; }
  bool breakdown() const { return breakdown_; }
  ArnoldiVariant variant() const { return opts_.variant; }

  /// Basis vector w_j, 0-based j in [0, m].
  const Vector& w(std::size_t j) const { return w_cols_[j]; }
  /// Entry H(i, j), 0-based, exact zero below the first subdiagonal.
  double h(std::size_t i, std::size_t j) const;
  /// Subdiagonal h_{j+1,j} for 1-based step j in [1, m]; always >= 0.
  double subdiagonal(std::size_t j) const;

  /// W as a dense N x (cols) matrix of the leading columns.
  DenseMatrix w_matrix(std::size_t cols) const;
  /// Leading (m_sub+1) x m_sub Hessenberg block.
  DenseMatrix h_matrix(std::size_t m_sub) const;

  /// x = W_m (H_m^T t), the solution-recovery map of the factored
  /// transpose surrogate; len(t) == m_sub + 1.
  Vector recover_solution(std::size_t m_sub, const Vector& t) const;
  /// y = A'_m x = W_m H_m^T W_{m+1}^T x without materializing anything
  /// of size N x N.
  Vector apply_surrogate(std::size_t m_sub, const Vector& x) const;
  /// Dense A'_m for validation at small N.
  DenseMatrix materialize_surrogate(std::size_t m_sub) const;

  void extend(const LinearOperator& op, std::size_t m_target);

  friend ArnoldiDecomposition arnoldi_expand(const LinearOperator& op, const Vector& b,
                                             std::size_t m_target, const ArnoldiOptions& opts);

 private:
  void extend_mgs(const LinearOperator& op, std::size_t m_target);
  void extend_householder(const LinearOperator& op, std::size_t m_target);
  /// Deterministic unit vector orthogonal to the current basis (used when a
  /// breakdown leaves w_{m+1} unconstrained). Zero vector at full dimension.
  Vector orthogonal_extension() const;

  std::size_t n_ = 0;
  double beta_ = 0.0;
  bool breakdown_ = false;
  ArnoldiOptions opts_;
  std::vector<Vector> w_cols_;          // m+1 vectors of length n
  std::vector<Vector> h_cols_;          // column j holds rows 0..j+1
  // Householder state.
  std::vector<Vector> reflectors_;      // unit reflector vectors u_j
  std::vector<double> signs_;           // basis sign fixes, w~_j = s_j w_j
};

ArnoldiDecomposition arnoldi_expand(const LinearOperator& op, const Vector& b,
                                    std::size_t m_target,
                                    const ArnoldiOptions& opts = {});

}  // namespace tfkry
