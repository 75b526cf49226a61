#pragma once

#include <functional>
#include <string>
#include <vector>

#include "partime/pinv.hpp"
#include "partime/tap.hpp"

namespace partime {

enum class Side { Residual, Error };
const char* to_string(Side s);

struct Symbol {
  std::function<Matrix(double)> eval;
  int dim = 0;
  bool hermitian = false;
};

Symbol build_symbol(const StepperPair& pair, Relaxation relax, Side side, int Nc);
// Lag coefficients of the coarse defect operator; lag(d) is the block at (i, i - d).
Matrix defect_coefficient(const StepperPair& pair, Relaxation relax, Side side, int lag);
Matrix assemble_defect(const StepperPair& pair, Relaxation relax, Side side, int Nc);

struct SymbolExtremum {
  double value = 0.0;
  double x = 0.0;
};
SymbolExtremum symbol_max_sv(const Symbol& s, int grid = 1024);
SymbolExtremum symbol_min_eig(const Symbol& s, int grid = 1024);

// F_p(x) = (-a + b e^{ix})^p [(-a + b e^{ix})^p]^*
Symbol power_symbol(const Matrix& a, const Matrix& b, int p);
// (1/2pi) int F(x) e^{-i lag x} dx by trapezoidal quadrature.
Matrix fourier_coefficient(const Symbol& s, int lag, int points = 4096);

// Hermitian tridiagonal matrices given by a real diagonal and complex superdiagonal.
struct Tridiag {
  RVector diag;
  Vector super;
};
double tridiag_min_eig(const Tridiag& t, double rel_tol = 1e-15);
int tridiag_count_below(const Tridiag& t, double x);
Matrix to_dense(const Tridiag& t);

std::vector<double> tridiag_toeplitz_eigs(cplx mu, int n);
// Tridiagonal Toeplitz in mu with the last diagonal entry replaced by 1.
Tridiag perturbed_tridiag(cplx mu, int n);

struct PerturbedBracket {
  double value = 0.0;
  double theta = 0.0;  // value = 1 + |mu|^2 + 2|mu| cos(theta)
  double outer_lower = 0.0, inner_lower = 0.0, inner_upper = 0.0, outer_upper = 0.0;
  bool ordered() const {
    return outer_lower <= inner_lower && inner_lower <= value && value <= inner_upper && inner_upper <= outer_upper;
  }
};
PerturbedBracket tridiag_perturbed_min_eig(cplx mu, int n);

struct DiagBounds {
  double lower = 0.0;
  double upper = 0.0;
  double asymptote = 0.0;
  double exact = 0.0;  // from the per-mode tridiagonal eigenproblem (p = 1 only)
  Eigen::Index lower_index = 0, upper_index = 0;
  int blocks = 0;  // block count of the defect operator in its A0 form
  bool lower_certified = true;
};
DiagBounds diag_bounds(const StepperPair& pair, Relaxation relax, int Nc, int p = 1);

// Time-dependent steppers: per spatial mode, fine eigenvalues for steps 1..N-1 and
// coarse eigenvalues for coarse steps 1..Nc-1.
struct TimeDepSpectra {
  int k = 2;
  int Nc = 0;
  Eigen::MatrixXcd lambda;  // modes x (Nc-1)k
  Eigen::MatrixXcd mu;      // modes x (Nc-1)
};
Tridiag timedep_tridiag(const TimeDepSpectra& s, Eigen::Index mode);

struct TimeDepNorm {
  double exact = 0.0;
  double gershgorin = 0.0;  // +inf when the discs reach zero
  Eigen::Index mode = 0;
  std::vector<double> per_mode;
};
TimeDepNorm timedep_exact_norm(const TimeDepSpectra& s);

struct TimeDepSequence {
  int k = 2;
  std::vector<Matrix> Phi;  // Phi[t-1] maps t-1 to t
  std::vector<Matrix> Psi;  // Psi[j-1] maps coarse j-1 to j
  int Nc() const { return static_cast<int>(Psi.size()) + 1; }
};
Matrix timedep_cgc(const TimeDepSequence& s);   // I - A_Delta B_Delta^{-1}
Matrix timedep_pinv(const TimeDepSequence& s);  // closed form of its pseudoinverse
Matrix timedep_cgc_modes(const TimeDepSpectra& s, Eigen::Index mode);

struct NecessaryBound {
  double value = 0.0;  // certified lower bound on the propagator-power norm
  double phi = 0.0;    // TAP (residual) or ITAP (error) constant
  double slack = 0.0;  // c in phi / (1 + c / sqrt(Nc))
  bool available = false;
};
NecessaryBound necessary_lower_bound(const StepperPair& pair, Relaxation relax, int Nc, int p, Side side,
                                     const TapOptions& opt = {});

struct SufficientBound {
  double value = 0.0;
  double phi = 0.0;
  double decay = 0.0;
  bool certified = false;
};
SufficientBound sufficient_bound(const StepperPair& pair, Relaxation relax, int Nc, Side side,
                                 const TapOptions& opt = {});

}  // namespace partime
