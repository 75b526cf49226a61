#include <cmath>
#include <random>

#include "doctest.h"
#include "partime/linalg.hpp"
#include "partime/tap.hpp"

using namespace partime;

namespace {

// Brute-force phase minimum: 4096-point grid, then ternary search around the best sample.
double grid_min(const std::function<double(double)>& f) {
  const int n = 4096;
  const double h = 2 * kPi / n;
  int best = 0;
  for (int i = 1; i < n; ++i)
    if (f(i * h) < f(best * h)) best = i;
  double a = (best - 1) * h, b = (best + 1) * h;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) < f(m2)) b = m2;
    else a = m1;
  }
  return std::min(f(0.5 * (a + b)), f(best * h));
}

Vector cvec(std::mt19937_64& rng, int n) { return random_matrix(n, 1, rng); }

StepperPair normal_pair(std::mt19937_64& rng, int n, int k) {
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  Vector lam(n), mu(n);
  for (int i = 0; i < n; ++i) {
    lam(i) = std::polar(0.2 + 0.75 * ud(rng), 2 * kPi * ud(rng));
    mu(i) = std::polar(0.05 + 0.9 * ud(rng), 2 * kPi * ud(rng));
  }
  Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
  return make_diagonal_pair(lam, mu, k, Matrix(qr.householderQ()));
}

}  // namespace

TEST_CASE("closed-form phase minimum against a brute-force search") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + trial % 4;
    const Matrix Psi = random_matrix(n, n, rng);
    const Vector v = cvec(rng, n);
    const PhaseMin m = min_phase(Psi, v, 1);
    const double ref = grid_min([&](double x) { return (v - std::exp(cplx(0, x)) * (Psi * v)).norm(); });
    CHECK(std::abs(m.value - ref) <= 1e-9 * std::max(ref, 1e-3));
    CHECK((v - std::exp(cplx(0, m.x)) * (Psi * v)).norm() == doctest::Approx(m.value).epsilon(1e-10));
  }
}

TEST_CASE("phase minimum for powers") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 10; ++trial) {
    const Matrix Psi = random_contraction(3, 0.8, rng);
    const Vector v = cvec(rng, 3);
    const double ref = grid_min([&](double x) {
      const Matrix b = Matrix::Identity(3, 3) - std::exp(cplx(0, x)) * Psi;
      return (b * b * v).norm();
    });
    CHECK(std::abs(min_phase_norm(Psi, v, 2) - ref) <= 1e-9 * ref);
  }
}

TEST_CASE("scalar and real phase minima") {
  Vector v = Vector::Ones(1);
  CHECK(min_phase_norm(Matrix::Constant(1, 1, 0.5), v, 1) == doctest::Approx(0.5));
  CHECK(min_phase_norm(Matrix::Constant(1, 1, cplx(0.0, 0.5)), v, 1) == doctest::Approx(0.5));

  std::mt19937_64 rng(23);
  std::normal_distribution<double> nd;
  for (int trial = 0; trial < 20; ++trial) {
    Eigen::MatrixXd P(3, 3);
    Eigen::VectorXd w(3);
    for (int i = 0; i < 9; ++i) P(i) = nd(rng);
    for (int i = 0; i < 3; ++i) w(i) = nd(rng);
    const Matrix Psi = P.cast<cplx>();
    const Vector vv = w.cast<cplx>();
    const double ip = w.dot(P * w);
    const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(3, 3);
    const double expected = ip > 0 ? ((I - P) * w).norm() : ((I + P) * w).norm();
    CHECK(min_phase_norm(Psi, vv, 1) == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("eigenvalue constants for the scalar example") {
  const StepperPair pair = make_diagonal_pair(Vector::Constant(1, 0.5), Vector::Constant(1, 0.3), 2);
  CHECK(teap_constant(pair, Relaxation::F) == doctest::Approx(0.05 / 0.7).epsilon(1e-14));
  CHECK(teap_constant(pair, Relaxation::FCF) == doctest::Approx(0.05 * 0.25 / 0.7).epsilon(1e-14));
  const TapResult t = tap_constant(pair, Relaxation::F);
  CHECK(t.certified);
  CHECK(t.value == doctest::Approx(0.0714285714285714).epsilon(1e-13));
  CHECK(t.x_hat == doctest::Approx(0.0));
}

TEST_CASE("TAP equals TEAP for normal pairs through the general path") {
  std::mt19937_64 rng(24);
  TapOptions general;
  general.closed_form = false;
  for (int trial = 0; trial < 6; ++trial) {
    const StepperPair pair = normal_pair(rng, 2 + trial % 3, 2 + trial % 2);
    for (Relaxation r : {Relaxation::F, Relaxation::FCF}) {
      const double teap = teap_constant(pair, r);
      const TapResult t = tap_constant(pair, r, 1, general);
      CHECK_FALSE(t.certified);
      CHECK(std::abs(t.value - teap) <= 1e-8 * teap);
      const TapResult it = itap_constant(pair, r, general);
      CHECK(std::abs(it.value - teap) <= 1e-8 * teap);
    }
    const double teap2 = teap_constant(pair, Relaxation::F, 2);
    CHECK(std::abs(tap_constant(pair, Relaxation::F, 2, general).value - teap2) <= 1e-8 * teap2);
  }
}

TEST_CASE("vector ascent never exceeds the generalized singular value") {
  std::mt19937_64 rng(25);
  for (int trial = 0; trial < 5; ++trial) {
    const StepperPair pair = make_pair(random_contraction(3, 0.9, rng), random_contraction(3, 0.7, rng), 2);
    for (Relaxation r : {Relaxation::F, Relaxation::FCF}) {
      const TapResult t = tap_constant(pair, r);
      CHECK(t.value >= t.gsv);
      CHECK(t.search <= t.gsv * (1.0 + 1e-9));
      CHECK(t.search >= 0.9 * t.gsv);
      // the reported vector attains the value
      const Matrix G = pair.Psi - matrix_power(pair.Phi, 2);
      Matrix left;
      if (r == Relaxation::FCF) left = matrix_power(pair.Phi, 2).inverse();
      const double ratio = (G * t.v_hat).norm() / min_phase(pair.Psi, t.v_hat, 1, left).value;
      CHECK(ratio == doctest::Approx(t.value).epsilon(1e-6));
    }
  }
}

TEST_CASE("unit-circle coarse eigenvalues are rejected") {
  Vector lam(2), mu(2);
  lam << 0.5, 0.4;
  mu << 0.3, -1.0;
  const StepperPair pair = make_diagonal_pair(lam, mu, 2);
  CHECK_THROWS_AS(tap_constant(pair, Relaxation::F), PreconditionError);
  CHECK_THROWS_AS(itap_constant(pair, Relaxation::F), PreconditionError);
}

TEST_CASE("stability decay") {
  const StepperPair pair = make_diagonal_pair(Vector::Constant(1, 0.5), Vector::Constant(1, 0.3), 2);
  const StabilityDecay d = stability_decay(pair, 10);
  CHECK(d.psi_power == doctest::Approx(std::pow(0.3, 10)).epsilon(1e-12));
  CHECK(d.conj_psi_power == doctest::Approx(std::pow(0.3, 10)).epsilon(1e-12));
}
