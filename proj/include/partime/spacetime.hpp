#pragma once

#include <cstddef>
#include <vector>

#include "partime/operators.hpp"

namespace partime {

struct GridSpec {
  int N = 0;  // fine time points t = 0..N-1
  int k = 2;

  int Nc() const { return 1 + (N - 1) / k; }
  bool is_c(int t) const { return t % k == 0; }
  void validate() const;
};

inline constexpr std::size_t kDenseCap = 4096;

struct SpaceTimeSystem {
  StepperPair pair;
  GridSpec grid;
  int nx = 0;
  std::size_t cap = kDenseCap;

  Eigen::Index fine_dim() const { return Eigen::Index(grid.N) * nx; }
  Eigen::Index coarse_dim() const { return Eigen::Index(grid.Nc()) * nx; }
};

SpaceTimeSystem assemble_system(const StepperPair& pair, const GridSpec& grid, std::size_t cap = kDenseCap);

// Time indices in partitioned order: all F-points, then all C-points.
std::vector<int> fc_order(const GridSpec& grid);
Matrix fc_permutation(const SpaceTimeSystem& sys);  // maps natural to partitioned ordering

Matrix dense_A(const SpaceTimeSystem& sys);  // natural ordering

struct Partition {
  Matrix Aff, Afc, Acf, Acc;
  Matrix Aff_inv;  // from explicit powers of Phi
};
Partition partition(const SpaceTimeSystem& sys);

struct IdealTransfer {
  Matrix R;  // [-Acf Aff^-1, I], partitioned columns
  Matrix P;  // [-Aff^-1 Afc; I], partitioned rows
};
IdealTransfer ideal_transfer(const SpaceTimeSystem& sys);

Matrix schur_complement(const SpaceTimeSystem& sys);

// Coarse-level operators of size Nc*nx, built directly from Phi^k and Psi.
Matrix coarse_bidiagonal(const Matrix& sub, int Nc);  // identity diagonal, -sub below
Matrix coarse_solve_operator(const SpaceTimeSystem& sys);  // B_Delta^{-1}
Matrix coarse_A_delta(const SpaceTimeSystem& sys);
Matrix coarse_shift(const SpaceTimeSystem& sys);  // Acc^{-1} Acf Aff^{-1} Afc
Matrix cgc_residual(const SpaceTimeSystem& sys);  // I - A_Delta B_Delta^{-1}
Matrix cgc_error(const SpaceTimeSystem& sys);     // I - B_Delta^{-1} A_Delta
// The same defects from their factored forms in Psi - Phi^k.
Matrix cgc_residual_factored(const SpaceTimeSystem& sys);
Matrix cgc_error_factored(const SpaceTimeSystem& sys);

enum class Relaxation { F, FCF };
const char* to_string(Relaxation r);

struct Propagators {
  Matrix E_F, R_F, E_FCF, R_FCF;  // natural ordering
};
Propagators build_propagators(const SpaceTimeSystem& sys);

// Matrix-free actions on natural-ordered space-time vectors.
Vector apply_A(const SpaceTimeSystem& sys, const Vector& u);
Vector sequential_solve(const SpaceTimeSystem& sys, const Vector& f);
Vector apply_iteration(const SpaceTimeSystem& sys, Relaxation relax, const Vector& u, const Vector& f);
Vector apply_P_ideal(const SpaceTimeSystem& sys, const Vector& coarse);
Vector coarse_forward_solve(const Matrix& sub, const Vector& rhs, int nx);

double operator_norm_l2(const Matrix& M);
double operator_norm_astar_a(const Matrix& M, const Matrix& A);
// Norm induced by (U U^*)^{-1} with U applied blockwise.
double operator_norm_modified(const Matrix& M, const Matrix& U, const Matrix& Uinv);

}  // namespace partime
