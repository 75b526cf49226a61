#include <algorithm>
#include <cmath>
#include <limits>

#include "partime/toeplitz.hpp"

namespace partime {

int tridiag_count_below(const Tridiag& t, double x) {
  const auto n = t.diag.size();
  int count = 0;
  double q = 1.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double off = i > 0 ? std::norm(t.super(i - 1)) : 0.0;
    q = t.diag(i) - x - (i > 0 ? off / q : 0.0);
    if (q == 0.0) q = -std::numeric_limits<double>::epsilon() * (std::abs(x) + 1e-300);
    if (q < 0.0) ++count;
  }
  return count;
}

double tridiag_min_eig(const Tridiag& t, double rel_tol) {
  const auto n = t.diag.size();
  if (n == 0) throw PreconditionError("empty tridiagonal matrix");
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (Eigen::Index i = 0; i < n; ++i) {
    double r = 0.0;
    if (i > 0) r += std::abs(t.super(i - 1));
    if (i + 1 < n) r += std::abs(t.super(i));
    lo = std::min(lo, t.diag(i) - r);
    hi = std::max(hi, t.diag(i) + r);
  }
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (tridiag_count_below(t, mid) >= 1) hi = mid;
    else lo = mid;
    if (hi - lo <= rel_tol * std::max(std::abs(lo), std::abs(hi)) || hi - lo <= 1e-300) break;
  }
  return 0.5 * (lo + hi);
}

Matrix to_dense(const Tridiag& t) {
  const auto n = t.diag.size();
  Matrix m = Matrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m(i, i) = t.diag(i);
    if (i + 1 < n) {
      m(i, i + 1) = t.super(i);
      m(i + 1, i) = std::conj(t.super(i));
    }
  }
  return m;
}

std::vector<double> tridiag_toeplitz_eigs(cplx mu, int n) {
  const double a = std::abs(mu);
  std::vector<double> out;
  for (int l = 1; l <= n; ++l) out.push_back(1.0 + a * a + 2.0 * a * std::cos(l * kPi / (n + 1)));
  std::sort(out.begin(), out.end());
  return out;
}

Tridiag perturbed_tridiag(cplx mu, int n) {
  Tridiag t;
  t.diag = RVector::Constant(n, 1.0 + std::norm(mu));
  t.diag(n - 1) = 1.0;
  t.super = Vector::Constant(std::max(n - 1, 0), -std::conj(mu));
  return t;
}

PerturbedBracket tridiag_perturbed_min_eig(cplx mu, int n) {
  if (n < 1) throw PreconditionError("size must be >= 1");
  const double a = std::abs(mu);
  if (!(a < 1.0)) throw PreconditionError("|mu| must be < 1");
  PerturbedBracket b;
  b.value = tridiag_min_eig(perturbed_tridiag(mu, n));
  const double c = a > 0.0 ? std::clamp((b.value - 1.0 - a * a) / (2.0 * a), -1.0, 1.0) : -1.0;
  b.theta = std::acos(c);
  const double base = (1.0 - a) * (1.0 - a);
  b.outer_lower = base + kPi * kPi * a / (6.0 * n * n);
  b.inner_lower = 1.0 + a * a + 2.0 * a * std::cos(n * kPi / (n + 0.5));
  b.inner_upper = 1.0 + a * a + 2.0 * a * std::cos(n * kPi / (n + 1.0));
  b.outer_upper = base + kPi * kPi * a / (double(n) * n);
  return b;
}

Tridiag timedep_tridiag(const TimeDepSpectra& s, Eigen::Index mode) {
  const int Nc = s.Nc, k = s.k;
  if (Nc < 2) throw PreconditionError("need at least two coarse points");
  if (s.lambda.cols() != Eigen::Index(Nc - 1) * k || s.mu.cols() != Nc - 1)
    throw PreconditionError("eigenvalue sequences have the wrong length");
  std::vector<double> d(Nc);  // d[j] = |prod lambda - mu_j|^2, j = 1..Nc-1
  for (int j = 1; j < Nc; ++j) {
    cplx prod = 1.0;
    for (int t = (j - 1) * k; t < j * k; ++t) prod *= s.lambda(mode, t);
    const double mu_abs = std::abs(s.mu(mode, j - 1));
    if (!(mu_abs < 1.0)) throw PreconditionError("coarse eigenvalue with |mu| >= 1");
    d[j] = std::norm(prod - s.mu(mode, j - 1));
    if (d[j] == 0.0) throw SingularError("coarse step reproduces the fine steps exactly");
  }
  Tridiag t;
  t.diag.resize(Nc - 1);
  t.super.resize(std::max(Nc - 2, 0));
  t.diag(0) = 1.0 / d[1];
  for (int j = 1; j + 1 < Nc; ++j) {
    const cplx mj = s.mu(mode, j - 1);
    t.diag(j) = std::norm(mj) / d[j] + 1.0 / d[j + 1];
  }
  for (int j = 0; j + 2 < Nc; ++j) t.super(j) = -std::conj(s.mu(mode, j)) / d[j + 1];
  return t;
}

TimeDepNorm timedep_exact_norm(const TimeDepSpectra& s) {
  TimeDepNorm out;
  double worst_gamma = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < s.lambda.rows(); ++i) {
    const Tridiag t = timedep_tridiag(s, i);
    const double v = 1.0 / std::sqrt(tridiag_min_eig(t));
    out.per_mode.push_back(v);
    if (v > out.exact) {
      out.exact = v;
      out.mode = i;
    }
    const auto n = t.diag.size();
    for (Eigen::Index j = 0; j < n; ++j) {
      double r = 0.0;
      if (j > 0) r += std::abs(t.super(j - 1));
      if (j + 1 < n) r += std::abs(t.super(j));
      worst_gamma = std::min(worst_gamma, t.diag(j) - r);
    }
  }
  out.gershgorin = worst_gamma > 0.0 ? 1.0 / std::sqrt(worst_gamma) : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace partime
