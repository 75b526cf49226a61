#include "partime/tap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "partime/linalg.hpp"

namespace partime {

namespace {

const cplx I1(0.0, 1.0);

Matrix phase_factor(const Matrix& Psi, double x, const Matrix& left) {
  const auto n = Psi.rows();
  Matrix b = Matrix::Identity(n, n) - std::exp(I1 * x) * Psi;
  if (left.size()) b = left * b;
  return b;
}

Matrix defect(const StepperPair& pair) { return pair.Psi - matrix_power(pair.Phi, pair.k); }

Matrix inverse_phi_k(const StepperPair& pair) {
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  return inverse_checked(pk, 1e-13, "Phi^k");
}

struct GsvProblem {
  Matrix numer;  // G^p
  Matrix left;   // empty or Phi^{-k}
  int p = 1;
  const Matrix* Psi = nullptr;

  Matrix denom(double x) const { return matrix_power(phase_factor(*Psi, x, left), p); }
  double at(double x) const { return sigma_max(Matrix(numer * denom(x).partialPivLu().inverse())); }
  Vector vector_at(double x) const {
    const Matrix binv = denom(x).partialPivLu().inverse();
    Vector v = binv * leading_singular(Matrix(numer * binv)).right;
    return v / v.norm();
  }
  double ratio(const Vector& v, int grid, double* x = nullptr) const {
    const PhaseMin m = min_phase(*Psi, v, p, left, grid);
    if (x) *x = m.x;
    return (numer * v).norm() / m.value;
  }
};

TapResult optimise(const GsvProblem& prob, const TapOptions& opt) {
  TapResult res;
  const PhaseMax g = maximize_phase([&](double x) { return prob.at(x); }, opt.phase_grid);
  res.gsv = g.value;

  const auto n = prob.Psi->rows();
  std::mt19937_64 rng(opt.seed);
  std::normal_distribution<double> nd;
  double best = -1.0;
  Vector best_v;
  double best_x = 0.0;
  for (int r = 0; r < opt.restarts; ++r) {
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
    v /= v.norm();
    double x = 0.0;
    double cur = prob.ratio(v, opt.phase_grid, &x);
    for (int s = 0; s < opt.max_steps; ++s) {
      const Vector w = prob.vector_at(x);
      double xn = 0.0;
      const double next = prob.ratio(w, opt.phase_grid, &xn);
      if (next <= cur * (1.0 + opt.stall)) {
        if (next > cur) { cur = next; v = w; x = xn; }
        break;
      }
      cur = next; v = w; x = xn;
    }
    if (cur > best) { best = cur; best_v = v; best_x = x; }
  }
  res.search = best;
  if (best >= res.gsv) {
    res.value = best; res.v_hat = best_v; res.x_hat = best_x;
  } else {
    res.value = res.gsv; res.x_hat = g.x; res.v_hat = prob.vector_at(g.x);
  }
  res.certified = false;
  return res;
}

TapResult closed_form_result(const StepperPair& pair, Relaxation relax, int p, bool inverse_scaled) {
  const auto& e = *pair.eig;
  TapResult res;
  double best = -1.0;
  Eigen::Index arg = 0;
  for (Eigen::Index i = 0; i < e.mu.size(); ++i) {
    const cplx lk = std::pow(e.lambda(i), pair.k);
    double v = std::abs(e.mu(i) - lk) / (1.0 - std::abs(e.mu(i)));
    if (relax == Relaxation::FCF) v *= std::abs(lk);
    if (!inverse_scaled) v = std::pow(v, p);
    if (v > best) { best = v; arg = i; }
  }
  res.value = best;
  res.gsv = best;
  res.search = best;
  res.certified = true;
  res.x_hat = std::fmod(-std::arg(e.mu(arg)) + 2.0 * kPi, 2.0 * kPi);
  res.v_hat = e.U.col(arg) / e.U.col(arg).norm();
  return res;
}

}  // namespace

PhaseMin min_phase(const Matrix& Psi, const Vector& v, int p, const Matrix& left, int grid) {
  if (p < 1) throw PreconditionError("power must be >= 1");
  if (p == 1) {
    const Vector a = left.size() ? Vector(left * v) : v;
    const Vector b = left.size() ? Vector(left * (Psi * v)) : Vector(Psi * v);
    const cplx c = a.dot(b);  // a^* b
    const double sq = a.squaredNorm() + b.squaredNorm() - 2.0 * std::abs(c);
    const double x = std::abs(c) > 0.0 ? std::fmod(-std::arg(c) + 2.0 * kPi, 2.0 * kPi) : 0.0;
    return {std::sqrt(std::max(sq, 0.0)), x};
  }
  auto f = [&](double x) { return -(matrix_power(phase_factor(Psi, x, left), p) * v).norm(); };
  const PhaseMax m = maximize_phase(f, grid);
  return {-m.value, m.x};
}

double min_phase_norm(const Matrix& Psi, const Vector& v, int p, int grid) {
  return min_phase(Psi, v, p, Matrix(), grid).value;
}

void require_off_unit_circle(const StepperPair& pair) {
  const PairDiagnostics d = verify_pair(pair);
  if (d.coarse_on_unit_circle) throw PreconditionError("coarse propagator has an eigenvalue on the unit circle");
}

bool closed_form_applies(const StepperPair& pair) {
  return pair.eig && pair.eig->unitary && pair.commuting;
}

TapResult tap_constant(const StepperPair& pair, Relaxation relax, int p, const TapOptions& opt) {
  if (p < 1) throw PreconditionError("power must be >= 1");
  require_off_unit_circle(pair);
  if (opt.closed_form && closed_form_applies(pair)) return closed_form_result(pair, relax, p, false);
  GsvProblem prob;
  prob.numer = matrix_power(defect(pair), p);
  prob.p = p;
  prob.Psi = &pair.Psi;
  if (relax == Relaxation::FCF) prob.left = inverse_phi_k(pair);
  return optimise(prob, opt);
}

TapResult itap_constant(const StepperPair& pair, Relaxation relax, const TapOptions& opt) {
  require_off_unit_circle(pair);
  if (opt.closed_form && closed_form_applies(pair)) return closed_form_result(pair, relax, 1, true);
  Matrix G = defect(pair);
  if (relax == Relaxation::FCF) G = G * matrix_power(pair.Phi, pair.k);
  const auto n = pair.Psi.rows();
  auto f = [&](double x) {
    const Matrix b = Matrix::Identity(n, n) - std::exp(I1 * x) * pair.Psi;
    return sigma_max(Matrix(b.partialPivLu().solve(G)));
  };
  const PhaseMax m = maximize_phase(f, opt.phase_grid);
  TapResult res;
  res.value = res.gsv = res.search = m.value;
  res.x_hat = m.x;
  const Matrix b = Matrix::Identity(n, n) - std::exp(I1 * m.x) * pair.Psi;
  res.v_hat = leading_singular(Matrix(b.partialPivLu().solve(G))).right;
  res.certified = false;
  return res;
}

double teap_constant(const StepperPair& pair, Relaxation relax, int p) {
  if (!pair.eig) throw PreconditionError("eigenvalue property needs a shared eigenbasis");
  require_off_unit_circle(pair);
  return closed_form_result(pair, relax, p, false).value;
}

StabilityDecay stability_decay(const StepperPair& pair, int Nc) {
  StabilityDecay d;
  const Matrix pn = matrix_power(pair.Psi, Nc);
  d.psi_power = sigma_max(pn);
  const Matrix pk = matrix_power(pair.Phi, pair.k);
  if (rcond2(pk) < 1e-13) {
    d.conj_psi_power = std::numeric_limits<double>::infinity();
  } else {
    d.conj_psi_power = sigma_max(Matrix(pk.partialPivLu().solve(pn * pk)));
  }
  return d;
}

}  // namespace partime
