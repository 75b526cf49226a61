#include <cmath>
#include <vector>

#include "partime/linalg.hpp"
#include "partime/toeplitz.hpp"

namespace partime {

namespace {

int effective_blocks(Relaxation relax, int Nc) { return relax == Relaxation::F ? Nc : Nc - 1; }

// Scalar defect operator for one mode; its p-th power is measured directly.
double mode_power_norm(cplx lambda, cplx mu, int k, Relaxation relax, int Nc, int p) {
  const cplx lk = std::pow(lambda, k);
  Eigen::MatrixXcd f(1, 1), g(1, 1), h(1, 1);
  f(0, 0) = mu;
  g(0, 0) = mu - lk;
  h(0, 0) = relax == Relaxation::F ? cplx(1.0) : lk;
  const Matrix M = assemble_lower<cplx>(f, g, h, Nc, relax == Relaxation::F ? LowerShape::A0 : LowerShape::A1);
  return sigma_max(matrix_power(M, p));
}

}  // namespace

DiagBounds diag_bounds(const StepperPair& pair, Relaxation relax, int Nc, int p) {
  if (!pair.eig) throw PreconditionError("diagonal bounds need a shared eigenbasis");
  if (p < 1) throw PreconditionError("power must be >= 1");
  require_off_unit_circle(pair);
  const auto& e = *pair.eig;
  DiagBounds out;
  out.blocks = effective_blocks(relax, Nc);
  out.lower_certified = p == 1;
  const double n = out.blocks;
  for (Eigen::Index i = 0; i < e.mu.size(); ++i) {
    const cplx lk = std::pow(e.lambda(i), pair.k);
    const double m = std::abs(e.mu(i));
    double num = std::abs(e.mu(i) - lk);
    if (relax == Relaxation::FCF) num *= std::abs(lk);
    const double a = (1.0 - m) * (1.0 - m);
    const double c = kPi * kPi * m / (n * n);
    double lo, up, asym, exact;
    if (p == 1) {
      lo = num / std::sqrt(a + c);
      up = num / std::sqrt(a + c / 6.0);
      asym = num / (1.0 - m);
      exact = out.blocks >= 2 ? num / std::sqrt(tridiag_min_eig(perturbed_tridiag(e.mu(i), out.blocks - 1))) : 0.0;
    } else {
      lo = std::pow(num, p) / std::sqrt(std::pow(a, p) + p * std::pow(a, p - 1) * c);
      up = std::pow(num / std::sqrt(a + c / 6.0), p);
      asym = std::pow(num / (1.0 - m), p);
      exact = mode_power_norm(e.lambda(i), e.mu(i), pair.k, relax, Nc, p);
    }
    if (lo > out.lower) { out.lower = lo; out.lower_index = i; }
    if (up > out.upper) { out.upper = up; out.upper_index = i; }
    out.asymptote = std::max(out.asymptote, asym);
    out.exact = std::max(out.exact, exact);
  }
  return out;
}

NecessaryBound necessary_lower_bound(const StepperPair& pair, Relaxation relax, int Nc, int p, Side side,
                                     const TapOptions& opt) {
  if (p < 1) throw PreconditionError("power must be >= 1");
  if (side == Side::Error && p != 1) throw PreconditionError("error-side bound is defined for p = 1");
  NecessaryBound out;
  const auto nx = pair.Phi.rows();
  const Matrix Id = Matrix::Identity(nx, nx);
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  const Matrix G = pair.Psi - pk;
  const int n = effective_blocks(relax, Nc);
  if (rcond2(G) < 1e-12 || n <= p) return out;
  if (relax == Relaxation::FCF && rcond2(pk) < 1e-12) return out;

  Matrix g, h;
  if (side == Side::Residual) {
    g = G;
    h = relax == Relaxation::F ? Id : pk;
  } else {
    g = Id;
    h = relax == Relaxation::F ? G : Matrix(G * pk);
  }
  const Matrix hinv = h.partialPivLu().inverse();
  const Matrix ginv = g.partialPivLu().inverse();
  const Matrix a = hinv * pair.Psi * ginv, b = hinv * ginv;
  // T^p is upper triangular block Toeplitz; C[j] is its block at (i, i + j).
  std::vector<Matrix> C{-a, b};
  for (int q = 2; q <= p; ++q) {
    std::vector<Matrix> next(q + 1, Matrix::Zero(nx, nx));
    for (int j = 0; j < q; ++j) {
      next[j] -= C[j] * a;
      next[j + 1] += C[j] * b;
    }
    C = std::move(next);
  }
  // The top n - p block rows reach column n - 1 at most, so their Gram matrix is banded block Toeplitz.
  const int m = n - p;
  Matrix H = Matrix::Zero(m * nx, m * nx);
  for (int d = 0; d <= std::min(p, m - 1); ++d) {
    Matrix blk = Matrix::Zero(nx, nx);
    for (int j = d; j <= p; ++j) blk += C[j] * C[j - d].adjoint();
    for (int i = 0; i + d < m; ++i) {
      H.block(i * nx, (i + d) * nx, nx, nx) = blk;
      H.block((i + d) * nx, i * nx, nx, nx) = blk.adjoint();
    }
  }
  Eigen::SelfAdjointEigenSolver<Matrix> es(H, Eigen::EigenvaluesOnly);
  const double lmin = es.eigenvalues()(0);
  if (!(lmin > 0.0)) return out;
  out.value = 1.0 / std::sqrt(lmin);
  out.phi = side == Side::Residual ? tap_constant(pair, relax, p, opt).value : itap_constant(pair, relax, opt).value;
  out.slack = (out.phi / out.value - 1.0) * std::sqrt(double(Nc));
  out.available = true;
  return out;
}

SufficientBound sufficient_bound(const StepperPair& pair, Relaxation relax, int Nc, Side side,
                                 const TapOptions& opt) {
  SufficientBound out;
  const StabilityDecay d = stability_decay(pair, Nc);
  const TapResult t = side == Side::Residual ? tap_constant(pair, relax, 1, opt) : itap_constant(pair, relax, opt);
  out.phi = t.value;
  out.decay = side == Side::Residual && relax == Relaxation::FCF ? d.conj_psi_power : d.psi_power;
  out.value = out.phi * (1.0 + out.decay);
  out.certified = t.certified;
  return out;
}

}  // namespace partime
