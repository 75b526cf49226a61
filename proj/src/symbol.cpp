#include <cmath>

#include "partime/linalg.hpp"
#include "partime/toeplitz.hpp"

namespace partime {

namespace {
const cplx I1(0.0, 1.0);
}

const char* to_string(Side s) { return s == Side::Residual ? "residual" : "error"; }

Matrix defect_coefficient(const StepperPair& pair, Relaxation relax, Side side, int lag) {
  const int shift = relax == Relaxation::F ? 1 : 2;
  if (lag < shift) return Matrix();
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  const Matrix G = pair.Psi - pk;
  const Matrix pw = matrix_power(pair.Psi, lag - shift);
  Matrix c = side == Side::Residual ? Matrix(-G * pw) : Matrix(-pw * G);
  if (relax == Relaxation::FCF) c = c * pk;
  return c;
}

Matrix assemble_defect(const StepperPair& pair, Relaxation relax, Side side, int Nc) {
  const int nx = static_cast<int>(pair.Phi.rows());
  const int shift = relax == Relaxation::F ? 1 : 2;
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  const Matrix G = pair.Psi - pk;
  std::vector<Matrix> coeff;
  Matrix pw = Matrix::Identity(nx, nx);
  for (int d = 0; d < Nc; ++d) {
    if (d < shift) {
      coeff.emplace_back();
      continue;
    }
    Matrix c = side == Side::Residual ? Matrix(-G * pw) : Matrix(-pw * G);
    if (relax == Relaxation::FCF) c = c * pk;
    coeff.push_back(c);
    pw = pw * pair.Psi;
  }
  return block_toeplitz([&](int d) { return d >= 0 && d < Nc ? coeff[d] : Matrix(); }, Nc, nx);
}

Symbol build_symbol(const StepperPair& pair, Relaxation relax, Side side, int Nc) {
  require_off_unit_circle(pair);
  const auto n = pair.Phi.rows();
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  const Matrix G = pair.Psi - pk;
  const Matrix psiN = matrix_power(pair.Psi, Nc);
  const Matrix Psi = pair.Psi;
  const int shift = relax == Relaxation::F ? 1 : 2;
  Symbol s;
  s.dim = static_cast<int>(n);
  s.eval = [=](double x) {
    const cplx z = std::exp(I1 * x);
    const Matrix Id = Matrix::Identity(n, n);
    const Matrix geo = (Id - z * Psi).partialPivLu().solve(Matrix(Id - std::pow(z, Nc) * psiN));
    Matrix out = side == Side::Residual ? Matrix(-std::pow(z, shift) * G * geo) : Matrix(-std::pow(z, shift) * geo * G);
    if (relax == Relaxation::FCF) out = out * pk;
    return out;
  };
  return s;
}

SymbolExtremum symbol_max_sv(const Symbol& s, int grid) {
  const PhaseMax m = maximize_phase([&](double x) { return sigma_max(s.eval(x)); }, grid);
  return {m.value, m.x};
}

SymbolExtremum symbol_min_eig(const Symbol& s, int grid) {
  if (!s.hermitian) throw PreconditionError("symbol is not Hermitian");
  auto f = [&](double x) {
    const Matrix m = s.eval(x);
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return -es.eigenvalues()(0);
  };
  const PhaseMax m = maximize_phase(f, grid);
  return {-m.value, m.x};
}

Symbol power_symbol(const Matrix& a, const Matrix& b, int p) {
  if (p < 1) throw PreconditionError("power must be >= 1");
  Symbol s;
  s.dim = static_cast<int>(a.rows());
  s.hermitian = true;
  s.eval = [=](double x) {
    const Matrix f = matrix_power(Matrix(-a + std::exp(I1 * x) * b), p);
    return Matrix(f * f.adjoint());
  };
  return s;
}

Matrix fourier_coefficient(const Symbol& s, int lag, int points) {
  Matrix acc = Matrix::Zero(s.dim, s.dim);
  for (int m = 0; m < points; ++m) {
    const double x = 2.0 * kPi * m / points;
    acc += s.eval(x) * std::exp(-I1 * (double(lag) * x));
  }
  return acc / double(points);
}

}  // namespace partime
