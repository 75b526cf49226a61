#include "partime/linalg.hpp"
#include "partime/toeplitz.hpp"

namespace partime {

namespace {

void check_sequence(const TimeDepSequence& s) {
  if (s.Psi.empty()) throw PreconditionError("need at least two coarse points");
  if (s.Phi.size() != s.Psi.size() * static_cast<std::size_t>(s.k))
    throw PreconditionError("fine sequence length must be (Nc-1)k");
}

// Phi_{jk} ... Phi_{(j-1)k+1}
Matrix fine_product(const TimeDepSequence& s, int j) {
  const auto n = s.Phi.front().rows();
  Matrix out = Matrix::Identity(n, n);
  for (int t = (j - 1) * s.k; t < j * s.k; ++t) out = s.Phi[t] * out;
  return out;
}

}  // namespace

Matrix timedep_cgc(const TimeDepSequence& s) {
  check_sequence(s);
  const int Nc = s.Nc();
  const auto nx = s.Phi.front().rows();
  Matrix Ad = Matrix::Identity(Nc * nx, Nc * nx);
  Matrix Binv = Matrix::Zero(Nc * nx, Nc * nx);
  for (int j = 1; j < Nc; ++j) Ad.block(j * nx, (j - 1) * nx, nx, nx) = -fine_product(s, j);
  // block forward substitution for B_Delta^{-1}
  for (int c = 0; c < Nc; ++c) {
    Binv.block(c * nx, c * nx, nx, nx).setIdentity();
    for (int i = c + 1; i < Nc; ++i)
      Binv.block(i * nx, c * nx, nx, nx) = s.Psi[i - 1] * Binv.block((i - 1) * nx, c * nx, nx, nx);
  }
  return Matrix::Identity(Nc * nx, Nc * nx) - Ad * Binv;
}

Matrix timedep_pinv(const TimeDepSequence& s) {
  check_sequence(s);
  const int Nc = s.Nc();
  const auto nx = s.Phi.front().rows();
  std::vector<Matrix> ginv(Nc);
  for (int j = 1; j < Nc; ++j)
    ginv[j] = inverse_checked(Matrix(fine_product(s, j) - s.Psi[j - 1]), 1e-13, "coarse defect");
  Matrix X = Matrix::Zero(Nc * nx, Nc * nx);
  for (int i = 0; i + 1 < Nc; ++i) {
    X.block(i * nx, (i + 1) * nx, nx, nx) = ginv[i + 1];
    if (i >= 1) X.block(i * nx, i * nx, nx, nx) = -s.Psi[i - 1] * ginv[i];
  }
  return X;
}

Matrix timedep_cgc_modes(const TimeDepSpectra& s, Eigen::Index mode) {
  const int Nc = s.Nc, k = s.k;
  Matrix M = Matrix::Zero(Nc, Nc);
  for (int i = 1; i < Nc; ++i) {
    cplx prod = 1.0;
    for (int t = (i - 1) * k; t < i * k; ++t) prod *= s.lambda(mode, t);
    cplx acc = prod - s.mu(mode, i - 1);
    for (int j = i - 1; j >= 0; --j) {
      M(i, j) = acc;
      if (j >= 1) acc *= s.mu(mode, j - 1);
    }
  }
  return M;
}

}  // namespace partime
