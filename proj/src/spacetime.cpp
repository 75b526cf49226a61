#include "partime/spacetime.hpp"

#include <string>

#include "partime/linalg.hpp"

namespace partime {

namespace {

using Idx = Eigen::Index;

void check_cap(Idx dim, std::size_t cap, const char* what) {
  if (static_cast<std::size_t>(dim) > cap)
    throw CapExceeded(std::string(what) + ": " + std::to_string(dim) + " unknowns exceeds dense cap " +
                      std::to_string(cap));
}

std::vector<Matrix> powers(const Matrix& a, int upto) {
  std::vector<Matrix> out{Matrix::Identity(a.rows(), a.cols())};
  for (int i = 1; i <= upto; ++i) out.push_back(out.back() * a);
  return out;
}

Matrix to_natural(const Matrix& m_fc, const Matrix& Q) { return Q.transpose() * m_fc * Q; }

}  // namespace

void GridSpec::validate() const {
  if (k < 1) throw ConfigError("coarsening factor must be >= 1");
  if (N < 2) throw ConfigError("need at least two time points");
  if ((N - 1) % k != 0) throw ConfigError("N - 1 must be divisible by k");
}

const char* to_string(Relaxation r) { return r == Relaxation::F ? "F" : "FCF"; }

SpaceTimeSystem assemble_system(const StepperPair& pair, const GridSpec& grid, std::size_t cap) {
  grid.validate();
  if (pair.k != grid.k) throw PreconditionError("pair and grid disagree on k");
  SpaceTimeSystem sys;
  sys.pair = pair;
  sys.grid = grid;
  sys.nx = static_cast<int>(pair.Phi.rows());
  sys.cap = cap;
  return sys;
}

std::vector<int> fc_order(const GridSpec& g) {
  std::vector<int> order;
  order.reserve(g.N);
  for (int t = 0; t < g.N; ++t)
    if (!g.is_c(t)) order.push_back(t);
  for (int t = 0; t < g.N; t += g.k) order.push_back(t);
  return order;
}

Matrix fc_permutation(const SpaceTimeSystem& sys) {
  const int nx = sys.nx;
  const auto order = fc_order(sys.grid);
  Matrix Q = Matrix::Zero(sys.fine_dim(), sys.fine_dim());
  for (int i = 0; i < sys.grid.N; ++i)
    Q.block(Idx(i) * nx, Idx(order[i]) * nx, nx, nx).setIdentity();
  return Q;
}

Matrix dense_A(const SpaceTimeSystem& sys) {
  check_cap(sys.fine_dim(), sys.cap, "space-time operator");
  const int nx = sys.nx;
  Matrix A = Matrix::Identity(sys.fine_dim(), sys.fine_dim());
  for (int t = 1; t < sys.grid.N; ++t) A.block(Idx(t) * nx, Idx(t - 1) * nx, nx, nx) = -sys.pair.Phi;
  return A;
}

Partition partition(const SpaceTimeSystem& sys) {
  const Matrix Q = fc_permutation(sys);
  const Matrix Ap = Q * dense_A(sys) * Q.transpose();
  const int nx = sys.nx, k = sys.grid.k, Nc = sys.grid.Nc();
  const Idx nf = Idx(sys.grid.N - Nc) * nx, nc = Idx(Nc) * nx;
  Partition p;
  p.Aff = Ap.topLeftCorner(nf, nf);
  p.Afc = Ap.topRightCorner(nf, nc);
  p.Acf = Ap.bottomLeftCorner(nc, nf);
  p.Acc = Ap.bottomRightCorner(nc, nc);
  p.Aff_inv = Matrix::Zero(nf, nf);
  const auto pw = powers(sys.pair.Phi, k);
  for (int j = 0; j + 1 < Nc; ++j) {
    const Idx base = Idx(j) * (k - 1);
    for (int a = 0; a < k - 1; ++a)
      for (int b = 0; b <= a; ++b) p.Aff_inv.block((base + a) * nx, (base + b) * nx, nx, nx) = pw[a - b];
  }
  return p;
}

IdealTransfer ideal_transfer(const SpaceTimeSystem& sys) {
  check_cap(sys.fine_dim(), sys.cap, "ideal transfer");
  const int nx = sys.nx, k = sys.grid.k, Nc = sys.grid.Nc();
  const Idx nf = Idx(sys.grid.N - Nc) * nx, nc = Idx(Nc) * nx;
  const auto pw = powers(sys.pair.Phi, k);
  IdealTransfer t;
  t.R = Matrix::Zero(nc, nf + nc);
  t.P = Matrix::Zero(nf + nc, nc);
  t.R.rightCols(nc).setIdentity();
  t.P.bottomRows(nc).setIdentity();
  for (int j = 0; j + 1 < Nc; ++j) {
    for (int l = 1; l < k; ++l) {
      const Idx f = (Idx(j) * (k - 1) + l - 1) * nx;
      t.P.block(f, Idx(j) * nx, nx, nx) = pw[l];
      t.R.block(Idx(j + 1) * nx, f, nx, nx) = pw[k - l];
    }
  }
  return t;
}

Matrix schur_complement(const SpaceTimeSystem& sys) {
  const Partition p = partition(sys);
  return p.Acc - p.Acf * p.Aff_inv * p.Afc;
}

Matrix coarse_bidiagonal(const Matrix& sub, int Nc) {
  const Idx nx = sub.rows();
  Matrix out = Matrix::Identity(Nc * nx, Nc * nx);
  for (int j = 1; j < Nc; ++j) out.block(j * nx, (j - 1) * nx, nx, nx) = -sub;
  return out;
}

Matrix coarse_A_delta(const SpaceTimeSystem& sys) {
  check_cap(sys.coarse_dim(), sys.cap, "coarse operator");
  return coarse_bidiagonal(matrix_power(sys.pair.Phi, sys.grid.k), sys.grid.Nc());
}

Matrix coarse_solve_operator(const SpaceTimeSystem& sys) {
  check_cap(sys.coarse_dim(), sys.cap, "coarse solve operator");
  const int nx = sys.nx, Nc = sys.grid.Nc();
  const auto pw = powers(sys.pair.Psi, Nc);
  Matrix B = Matrix::Zero(sys.coarse_dim(), sys.coarse_dim());
  for (int i = 0; i < Nc; ++i)
    for (int j = 0; j <= i; ++j) B.block(Idx(i) * nx, Idx(j) * nx, nx, nx) = pw[i - j];
  return B;
}

Matrix coarse_shift(const SpaceTimeSystem& sys) {
  check_cap(sys.coarse_dim(), sys.cap, "coarse shift");
  const int nx = sys.nx, Nc = sys.grid.Nc();
  Matrix K = Matrix::Zero(sys.coarse_dim(), sys.coarse_dim());
  if (sys.grid.k == 1) return K;
  const Matrix pk = matrix_power(sys.pair.Phi, sys.grid.k);
  for (int j = 1; j < Nc; ++j) K.block(Idx(j) * nx, Idx(j - 1) * nx, nx, nx) = pk;
  return K;
}

Matrix cgc_residual(const SpaceTimeSystem& sys) {
  const Idx n = sys.coarse_dim();
  return Matrix::Identity(n, n) - coarse_A_delta(sys) * coarse_solve_operator(sys);
}

Matrix cgc_error(const SpaceTimeSystem& sys) {
  const Idx n = sys.coarse_dim();
  return Matrix::Identity(n, n) - coarse_solve_operator(sys) * coarse_A_delta(sys);
}

Matrix cgc_residual_factored(const SpaceTimeSystem& sys) {
  check_cap(sys.coarse_dim(), sys.cap, "coarse defect");
  const int nx = sys.nx, Nc = sys.grid.Nc();
  const Matrix G = sys.pair.Psi - matrix_power(sys.pair.Phi, sys.grid.k);
  const auto pw = powers(sys.pair.Psi, Nc);
  return block_toeplitz([&](int d) { return d >= 1 ? Matrix(-G * pw[d - 1]) : Matrix(); }, Nc, nx);
}

Matrix cgc_error_factored(const SpaceTimeSystem& sys) {
  check_cap(sys.coarse_dim(), sys.cap, "coarse defect");
  const int nx = sys.nx, Nc = sys.grid.Nc();
  const Matrix G = sys.pair.Psi - matrix_power(sys.pair.Phi, sys.grid.k);
  const auto pw = powers(sys.pair.Psi, Nc);
  return block_toeplitz([&](int d) { return d >= 1 ? Matrix(-pw[d - 1] * G) : Matrix(); }, Nc, nx);
}

Propagators build_propagators(const SpaceTimeSystem& sys) {
  check_cap(sys.fine_dim(), sys.cap, "propagators");
  const IdealTransfer t = ideal_transfer(sys);
  const Matrix Mr = cgc_residual(sys);
  const Matrix Me = cgc_error(sys);
  const Matrix K = coarse_shift(sys);
  const Idx n = sys.fine_dim(), nc = sys.coarse_dim();

  // [0; X] R_ideal and P_ideal [0, X]
  auto left = [&](const Matrix& X) {
    Matrix out = Matrix::Zero(n, n);
    out.bottomRows(nc) = X * t.R;
    return out;
  };
  auto right = [&](const Matrix& X) {
    Matrix out = Matrix::Zero(n, n);
    out.rightCols(nc) = t.P * X;
    return out;
  };
  const Matrix Q = fc_permutation(sys);
  Propagators p;
  p.R_F = to_natural(left(Mr), Q);
  p.E_F = to_natural(right(Me), Q);
  p.R_FCF = to_natural(left(Matrix(Mr * K)), Q);
  p.E_FCF = to_natural(right(Matrix(Me * K)), Q);
  return p;
}

Vector apply_A(const SpaceTimeSystem& sys, const Vector& u) {
  const int nx = sys.nx;
  Vector out = u;
  for (int t = 1; t < sys.grid.N; ++t) out.segment(Idx(t) * nx, nx) -= sys.pair.Phi * u.segment(Idx(t - 1) * nx, nx);
  return out;
}

Vector sequential_solve(const SpaceTimeSystem& sys, const Vector& f) {
  return coarse_forward_solve(sys.pair.Phi, f, sys.nx);
}

Vector coarse_forward_solve(const Matrix& sub, const Vector& rhs, int nx) {
  Vector out = rhs;
  const Idx n = rhs.size() / nx;
  for (Idx t = 1; t < n; ++t) out.segment(t * nx, nx) += sub * out.segment((t - 1) * nx, nx);
  return out;
}

Vector apply_P_ideal(const SpaceTimeSystem& sys, const Vector& coarse) {
  const int nx = sys.nx, k = sys.grid.k, Nc = sys.grid.Nc();
  Vector out = Vector::Zero(sys.fine_dim());
  for (int j = 0; j < Nc; ++j) {
    Vector w = coarse.segment(Idx(j) * nx, nx);
    out.segment(Idx(j) * k * nx, nx) = w;
    if (j + 1 == Nc) break;
    for (int l = 1; l < k; ++l) {
      w = sys.pair.Phi * w;
      out.segment((Idx(j) * k + l) * nx, nx) = w;
    }
  }
  return out;
}

namespace {

void f_relax(const SpaceTimeSystem& sys, Vector& u, const Vector& f) {
  const int nx = sys.nx, k = sys.grid.k;
  for (int j = 0; j + 1 < sys.grid.Nc(); ++j)
    for (int t = j * k + 1; t < (j + 1) * k; ++t)
      u.segment(Idx(t) * nx, nx) = sys.pair.Phi * u.segment(Idx(t - 1) * nx, nx) + f.segment(Idx(t) * nx, nx);
}

void c_relax(const SpaceTimeSystem& sys, Vector& u, const Vector& f) {
  const int nx = sys.nx, k = sys.grid.k;
  u.head(nx) = f.head(nx);
  for (int j = 1; j < sys.grid.Nc(); ++j) {
    const Idx t = Idx(j) * k;
    u.segment(t * nx, nx) = sys.pair.Phi * u.segment((t - 1) * nx, nx) + f.segment(t * nx, nx);
  }
}

}  // namespace

Vector apply_iteration(const SpaceTimeSystem& sys, Relaxation relax, const Vector& u0, const Vector& f) {
  if (u0.size() != sys.fine_dim() || f.size() != sys.fine_dim())
    throw PreconditionError("space-time vector has wrong length");
  const int nx = sys.nx, k = sys.grid.k, Nc = sys.grid.Nc();
  Vector u = u0;
  f_relax(sys, u, f);
  if (relax == Relaxation::FCF) {
    c_relax(sys, u, f);
    f_relax(sys, u, f);
  }
  Vector r(Idx(Nc) * nx);
  r.head(nx) = f.head(nx) - u.head(nx);
  for (int j = 1; j < Nc; ++j) {
    const Idx t = Idx(j) * k;
    r.segment(Idx(j) * nx, nx) =
        f.segment(t * nx, nx) - u.segment(t * nx, nx) + sys.pair.Phi * u.segment((t - 1) * nx, nx);
  }
  const Vector delta = coarse_forward_solve(sys.pair.Psi, r, nx);
  u += apply_P_ideal(sys, delta);
  return u;
}

double operator_norm_l2(const Matrix& M) { return sigma_max(M); }

double operator_norm_astar_a(const Matrix& M, const Matrix& A) {
  // || A M A^{-1} ||, with the right inverse applied through a solve
  const Matrix AM = A * M;
  const Matrix X = A.adjoint().partialPivLu().solve(AM.adjoint());
  return sigma_max(X);
}

double operator_norm_modified(const Matrix& M, const Matrix& U, const Matrix& Uinv) {
  const Idx nx = U.rows();
  if (M.rows() % nx != 0) throw PreconditionError("eigenbasis does not tile the operator");
  const Idx blocks = M.rows() / nx;
  Matrix S(M.rows(), M.cols());
  for (Idx i = 0; i < blocks; ++i)
    for (Idx j = 0; j < blocks; ++j) S.block(i * nx, j * nx, nx, nx) = Uinv * M.block(i * nx, j * nx, nx, nx) * U;
  return sigma_max(S);
}

}  // namespace partime
