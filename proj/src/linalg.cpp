#include "partime/linalg.hpp"

#include <algorithm>
#include <cmath>

namespace partime {

Matrix block_toeplitz(const std::function<Matrix(int)>& lag, int n, int bs) {
  Matrix out = Matrix::Zero(Eigen::Index(n) * bs, Eigen::Index(n) * bs);
  for (int d = -(n - 1); d <= n - 1; ++d) {
    Matrix b = lag(d);
    if (b.size() == 0) continue;
    for (int i = std::max(0, d); i < n && i - d < n; ++i)
      out.block(Eigen::Index(i) * bs, Eigen::Index(i - d) * bs, bs, bs) = b;
  }
  return out;
}

Matrix inverse_checked(const Matrix& a, double rcond_threshold, const char* what) {
  if (rcond2(a) < rcond_threshold)
    throw SingularError(std::string(what) + " is numerically singular");
  return a.partialPivLu().inverse();
}

SingularPair leading_singular(const Matrix& a) {
  Eigen::BDCSVD<Matrix> svd(a, Eigen::ComputeThinV);
  return {svd.singularValues()(0), svd.matrixV().col(0)};
}

double commutator_norm(const Matrix& a, const Matrix& b) { return sigma_max(Matrix(a * b - b * a)); }

bool is_normal(const Matrix& a, double tol) {
  const double scale = std::max(1.0, a.squaredNorm());
  return (a * a.adjoint() - a.adjoint() * a).norm() <= tol * scale;
}

PhaseMax maximize_phase(const std::function<double(double)>& f, int samples, int refine) {
  const double h = 2.0 * kPi / samples;
  std::vector<double> vals(samples);
  for (int i = 0; i < samples; ++i) vals[i] = f(i * h);
  std::vector<int> peaks;
  for (int i = 0; i < samples; ++i) {
    const double l = vals[(i + samples - 1) % samples];
    const double r = vals[(i + 1) % samples];
    if (vals[i] >= l && vals[i] >= r) peaks.push_back(i);
  }
  std::sort(peaks.begin(), peaks.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  if (static_cast<int>(peaks.size()) > refine) peaks.resize(refine);

  PhaseMax best{0.0, vals[0]};
  for (int i = 0; i < samples; ++i)
    if (vals[i] > best.value) best = {i * h, vals[i]};

  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  for (int idx : peaks) {
    double a = (idx - 1) * h, b = (idx + 1) * h;
    double c = b - g * (b - a), d = a + g * (b - a);
    double fc = f(c), fd = f(d);
    for (int it = 0; it < 80 && b - a > 1e-13; ++it) {
      if (fc > fd) {
        b = d; d = c; fd = fc;
        c = b - g * (b - a); fc = f(c);
      } else {
        a = c; c = d; fc = fd;
        d = a + g * (b - a); fd = f(d);
      }
    }
    const double x = 0.5 * (a + b);
    const double v = f(x);
    for (auto [xx, vv] : {std::pair{x, v}, std::pair{c, fc}, std::pair{d, fd}})
      if (vv > best.value) best = {std::fmod(xx + 2.0 * kPi, 2.0 * kPi), vv};
  }
  return best;
}

}  // namespace partime

namespace partime {

Matrix random_matrix(Eigen::Index rows, Eigen::Index cols, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Matrix m(rows, cols);
  for (Eigen::Index j = 0; j < cols; ++j)
    for (Eigen::Index i = 0; i < rows; ++i) m(i, j) = cplx(nd(rng), nd(rng));
  return m;
}

Matrix random_contraction(Eigen::Index n, double norm, std::mt19937_64& rng) {
  Matrix m = random_matrix(n, n, rng);
  return m * (norm / sigma_max(m));
}

}  // namespace partime
