#pragma once

#include <cstdint>

#include "partime/spacetime.hpp"

namespace partime {

struct PhaseMin {
  double value = 0.0;
  double x = 0.0;
};

// min over x of || (left (I - e^{ix} Psi))^p v ||; left may be empty (identity).
PhaseMin min_phase(const Matrix& Psi, const Vector& v, int p, const Matrix& left = Matrix(), int grid = 1024);
double min_phase_norm(const Matrix& Psi, const Vector& v, int p, int grid = 1024);

struct TapOptions {
  int phase_grid = 1024;
  int restarts = 32;
  int max_steps = 200;
  double stall = 1e-8;
  std::uint64_t seed = 20240601;
  bool closed_form = true;  // use eigenvalue formulas for normal pairs with a shared eigenbasis
};

struct TapResult {
  double value = 0.0;
  double x_hat = 0.0;
  Vector v_hat;
  bool certified = false;
  double gsv = 0.0;     // max over x of the leading generalized singular value
  double search = 0.0;  // best value of the vector ascent
};

TapResult tap_constant(const StepperPair& pair, Relaxation relax, int p = 1, const TapOptions& opt = {});
TapResult itap_constant(const StepperPair& pair, Relaxation relax, const TapOptions& opt = {});
double teap_constant(const StepperPair& pair, Relaxation relax, int p = 1);
bool closed_form_applies(const StepperPair& pair);

struct StabilityDecay {
  double psi_power = 0.0;       // ||Psi^Nc||
  double conj_psi_power = 0.0;  // ||Phi^{-k} Psi^Nc Phi^k||
};
StabilityDecay stability_decay(const StepperPair& pair, int Nc);

void require_off_unit_circle(const StepperPair& pair);

}  // namespace partime
