#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "partime/types.hpp"

namespace partime {

struct EigenDecomp {
  Matrix U;
  Matrix Uinv;
  Vector values;
  bool unitary = false;
};

enum class SpatialKind { Laplacian1D, Advection1DUpwind, FromFile };

struct SpatialParams {
  SpatialKind kind = SpatialKind::Laplacian1D;
  int n = 0;
  double h = 0.0;  // 0 selects 1/(n+1)
  double velocity = 1.0;
  std::string path;
};

struct SpatialOperator {
  SpatialKind kind = SpatialKind::Laplacian1D;
  Matrix L;
  std::optional<EigenDecomp> eig;
};

std::shared_ptr<const SpatialOperator> build_spatial(const SpatialParams& params);
Matrix read_matrix_file(const std::string& path);
cplx parse_complex(const std::string& token);

// Numerical eigendecomposition, kept only when it reproduces the matrix.
std::optional<EigenDecomp> try_eigendecompose(const Matrix& a, double tol = 1e-10);

enum class Scheme { ForwardEuler, BackwardEuler, Theta, RK4, SDIRK2, Rational };

struct SchemeSpec {
  Scheme kind = Scheme::BackwardEuler;
  double dt = 0.0;
  double theta = 0.5;
  std::vector<cplx> num;  // custom rational numerator, ascending powers of z
  std::vector<cplx> den;
};

struct StabilityPolys {
  std::vector<cplx> num;
  std::vector<cplx> den;
};
StabilityPolys stability_polys(const SchemeSpec& s);
cplx stability_function(const SchemeSpec& s, cplx z);

struct Stepper {
  Matrix Phi;
  SchemeSpec scheme;
  std::shared_ptr<const SpatialOperator> source;
  double spectral_radius = 0.0;
  bool stable = false;
};

Stepper build_stepper(std::shared_ptr<const SpatialOperator> L, const SchemeSpec& scheme);

struct SharedEig {
  Matrix U;
  Matrix Uinv;
  Vector lambda;
  Vector mu;
  bool unitary = false;
};

struct StepperPair {
  Matrix Phi;
  Matrix Psi;
  int k = 2;
  bool commuting = false;
  std::optional<SharedEig> eig;
};

StepperPair make_pair(const Stepper& fine, const Stepper& coarse, int k, double commute_tol = 1e-10);
StepperPair make_pair(const Matrix& Phi, const Matrix& Psi, int k, double commute_tol = 1e-10);
// Pair from eigenvalues in a shared eigenbasis U (identity if U is empty).
StepperPair make_diagonal_pair(const Vector& lambda, const Vector& mu, int k, const Matrix& U = Matrix());

struct PairDiagnostics {
  double commutator = 0.0;
  bool commuting = false;
  double defect_rcond = 0.0;
  bool defect_singular = false;
  double fine_radius = 0.0;
  double coarse_radius = 0.0;
  bool coarse_on_unit_circle = false;
  bool fine_invertible = true;
  bool normal = false;
};

struct PairTolerances {
  double commute = 1e-10;
  double rcond = 1e-12;
  double unit_circle = 1e-12;
};

PairDiagnostics verify_pair(const StepperPair& pair, const PairTolerances& tol = {});

double spectral_radius(const Matrix& a);

struct Rk4Defect {
  Matrix direct;       // Psi - Phi^2 with Psi the RK4 step of 2 dt
  Matrix closed_form;  // -(dt^5/4) L^5 (I + 5dt/18 L + dt^2/18 L^2 + dt^3/144 L^3)
  double residual = 0.0;
};
Rk4Defect rk4_defect(const Matrix& L, double dt);
std::vector<cplx> rk4_defect_roots(double dt);

}  // namespace partime
