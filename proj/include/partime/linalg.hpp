#pragma once

#include <functional>
#include <vector>

#include "partime/types.hpp"

namespace partime {

template <typename Derived>
auto matrix_power(const Eigen::MatrixBase<Derived>& a, int p) {
  using M = Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, Eigen::Dynamic>;
  M base = a;
  M out;
  bool first = true;
  for (unsigned e = static_cast<unsigned>(p); e; e >>= 1) {
    if (e & 1U) {
      out = first ? base : M(out * base);
      first = false;
    }
    if (e > 1) base = base * base;
  }
  if (first) out = M::Identity(a.rows(), a.cols());
  return out;
}

template <typename Derived>
double sigma_max(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  if (a.rows() <= 16 && a.cols() <= 16)
    return Eigen::JacobiSVD<typename Derived::PlainObject>(a).singularValues()(0);
  return Eigen::BDCSVD<typename Derived::PlainObject>(a).singularValues()(0);
}

template <typename Derived>
double sigma_min(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 0.0;
  Eigen::BDCSVD<typename Derived::PlainObject> svd(a);
  return svd.singularValues()(svd.singularValues().size() - 1);
}

// Reciprocal 2-norm condition number.
template <typename Derived>
double rcond2(const Eigen::MatrixBase<Derived>& a) {
  if (a.size() == 0) return 1.0;
  Eigen::BDCSVD<typename Derived::PlainObject> svd(a);
  const auto& s = svd.singularValues();
  if (s(0) == 0.0) return 0.0;
  return s(s.size() - 1) / s(0);
}

template <typename Derived>
Matrix block_diag(const Eigen::MatrixBase<Derived>& b, Eigen::Index copies) {
  const Eigen::Index n = b.rows();
  Matrix out = Matrix::Zero(n * copies, n * copies);
  for (Eigen::Index i = 0; i < copies; ++i) out.block(i * n, i * n, n, n) = b;
  return out;
}

// Block Toeplitz matrix with n x n blocks; lag(d) is the block at (i, i - d).
Matrix block_toeplitz(const std::function<Matrix(int)>& lag, int n, int bs);

Matrix inverse_checked(const Matrix& a, double rcond_threshold, const char* what);

struct SingularPair {
  double value = 0.0;
  Vector right;
};
SingularPair leading_singular(const Matrix& a);

double commutator_norm(const Matrix& a, const Matrix& b);
bool is_normal(const Matrix& a, double tol);

// Maximize a smooth periodic function on [0, 2pi): uniform grid then
// golden-section refinement around the best few samples.
struct PhaseMax {
  double x = 0.0;
  double value = 0.0;
};
PhaseMax maximize_phase(const std::function<double(double)>& f, int samples, int refine = 3);

}  // namespace partime

#include <random>

namespace partime {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng);
// Random matrix rescaled to the given spectral norm.
Matrix random_contraction(Eigen::Index n, double norm, std::mt19937_64& rng);

}  // namespace partime
