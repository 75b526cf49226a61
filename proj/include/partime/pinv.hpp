#pragma once

#include <algorithm>

#include "partime/types.hpp"

namespace partime {

enum class LowerShape { A0, A1 };

template <typename Scalar>
using DenseOf = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

// Strictly lower block Toeplitz with block g f^m h at lag m+1 (A0) or m+2 (A1).
template <typename Scalar>
DenseOf<Scalar> assemble_lower(const DenseOf<Scalar>& f, const DenseOf<Scalar>& g, const DenseOf<Scalar>& h,
                               int n, LowerShape shape) {
  const Eigen::Index b = f.rows();
  const int shift = shape == LowerShape::A0 ? 1 : 2;
  DenseOf<Scalar> out = DenseOf<Scalar>::Zero(n * b, n * b);
  DenseOf<Scalar> fm = DenseOf<Scalar>::Identity(b, b);
  for (int m = 0; m + shift < n; ++m) {
    const DenseOf<Scalar> blk = g * fm * h;
    for (int j = 0; j + m + shift < n; ++j) out.block((j + m + shift) * b, j * b, b, b) = blk;
    fm = fm * f;
  }
  return out;
}

template <typename Scalar>
DenseOf<Scalar> pinv_lower(const DenseOf<Scalar>& f, const DenseOf<Scalar>& g, const DenseOf<Scalar>& h, int n,
                           LowerShape shape) {
  const Eigen::Index b = f.rows();
  const DenseOf<Scalar> hinv = h.partialPivLu().inverse();
  const DenseOf<Scalar> ginv = g.partialPivLu().inverse();
  const DenseOf<Scalar> super = hinv * ginv;
  const DenseOf<Scalar> diag = -hinv * f * ginv;
  const int shift = shape == LowerShape::A0 ? 1 : 2;
  DenseOf<Scalar> out = DenseOf<Scalar>::Zero(n * b, n * b);
  for (int i = 0; i + shift < n; ++i) {
    out.block(i * b, (i + shift) * b, b, b) = super;
    if (i >= 1) out.block(i * b, (i + shift - 1) * b, b, b) = diag;
  }
  return out;
}

// Upper bidiagonal block Toeplitz with -a on the diagonal and b above it.
template <typename Scalar>
DenseOf<Scalar> upper_bidiagonal(const DenseOf<Scalar>& a, const DenseOf<Scalar>& b, int n) {
  const Eigen::Index s = a.rows();
  DenseOf<Scalar> out = DenseOf<Scalar>::Zero(n * s, n * s);
  for (int i = 0; i < n; ++i) {
    out.block(i * s, i * s, s, s) = -a;
    if (i + 1 < n) out.block(i * s, (i + 1) * s, s, s) = b;
  }
  return out;
}

// (A0^p)^+ as T^p with the last p block rows and first p block columns removed.
template <typename Scalar>
DenseOf<Scalar> pinv_power(const DenseOf<Scalar>& f, const DenseOf<Scalar>& g, const DenseOf<Scalar>& h, int n,
                           int p) {
  if (p < 1 || p >= n / 2) throw PreconditionError("power must satisfy 1 <= p < floor(n/2)");
  const Eigen::Index s = f.rows();
  const DenseOf<Scalar> hinv = h.partialPivLu().inverse();
  const DenseOf<Scalar> ginv = g.partialPivLu().inverse();
  const DenseOf<Scalar> T = upper_bidiagonal<Scalar>(DenseOf<Scalar>(hinv * f * ginv), DenseOf<Scalar>(hinv * ginv), n);
  DenseOf<Scalar> Tp = DenseOf<Scalar>::Identity(T.rows(), T.cols());
  for (int i = 0; i < p; ++i) Tp = Tp * T;
  Tp.bottomRows(p * s).setZero();
  Tp.leftCols(p * s).setZero();
  return Tp;
}

struct MoorePenroseResidual {
  double axa = 0.0, xax = 0.0, ax_herm = 0.0, xa_herm = 0.0;
  double max() const { return std::max({axa, xax, ax_herm, xa_herm}); }
};

// Residuals of the four Penrose conditions, relative to ||A|| and ||X||.
template <typename Scalar>
MoorePenroseResidual mp_residuals(const DenseOf<Scalar>& A, const DenseOf<Scalar>& X) {
  const double na = std::max(A.norm(), 1e-300), nx = std::max(X.norm(), 1e-300);
  const DenseOf<Scalar> AX = A * X, XA = X * A;
  MoorePenroseResidual r;
  r.axa = (AX * A - A).norm() / na;
  r.xax = (XA * X - X).norm() / nx;
  r.ax_herm = (AX - AX.adjoint()).norm() / std::max(AX.norm(), 1e-300);
  r.xa_herm = (XA - XA.adjoint()).norm() / std::max(XA.norm(), 1e-300);
  return r;
}

}  // namespace partime
