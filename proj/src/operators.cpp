#include "partime/operators.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <sstream>

#include "partime/linalg.hpp"

namespace partime {

namespace {

Matrix laplacian(int n, double h, std::optional<EigenDecomp>& eig) {
  Matrix L = Matrix::Zero(n, n);
  const double s = 1.0 / (h * h);
  for (int i = 0; i < n; ++i) {
    L(i, i) = -2.0 * s;
    if (i > 0) L(i, i - 1) = s;
    if (i + 1 < n) L(i, i + 1) = s;
  }
  EigenDecomp d;
  d.U.resize(n, n);
  d.values.resize(n);
  const double norm = std::sqrt(2.0 / (n + 1));
  for (int j = 0; j < n; ++j) {
    const double t = (j + 1) * kPi / (n + 1);
    d.values(j) = -4.0 * s * std::pow(std::sin(t / 2.0), 2);
    for (int i = 0; i < n; ++i) d.U(i, j) = norm * std::sin((i + 1) * t);
  }
  d.Uinv = d.U.adjoint();
  d.unitary = true;
  eig = d;
  return L;
}

Matrix upwind(int n, double h, double v) {
  Matrix L = Matrix::Zero(n, n);
  const double s = std::abs(v) / h;
  for (int i = 0; i < n; ++i) {
    L(i, i) = -s;
    if (v >= 0 && i > 0) L(i, i - 1) = s;
    if (v < 0 && i + 1 < n) L(i, i + 1) = s;
  }
  return L;
}

Matrix poly_of(const std::vector<cplx>& c, const Matrix& z) {
  const auto n = z.rows();
  Matrix out = Matrix::Zero(n, n);
  for (auto it = c.rbegin(); it != c.rend(); ++it) {
    out = out * z;
    out.diagonal().array() += *it;
  }
  return out;
}

cplx poly_of(const std::vector<cplx>& c, cplx z) {
  cplx out = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) out = out * z + *it;
  return out;
}

}  // namespace

cplx parse_complex(const std::string& raw) {
  std::string t;
  for (char ch : raw)
    if (!std::isspace(static_cast<unsigned char>(ch))) t += ch;
  if (t.empty()) throw ConfigError("empty matrix entry");
  auto number = [&](const std::string& s) {
    if (s.empty() || s == "+") return 1.0;
    if (s == "-") return -1.0;
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw ConfigError("malformed matrix entry '" + raw + "'");
    }
    if (used != s.size()) throw ConfigError("malformed matrix entry '" + raw + "'");
    return v;
  };
  const char last = t.back();
  if (last != 'i' && last != 'j') return {number(t), 0.0};
  t.pop_back();
  std::size_t split = std::string::npos;
  for (std::size_t i = t.size(); i-- > 1;) {
    if ((t[i] == '+' || t[i] == '-') && t[i - 1] != 'e' && t[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string::npos) return {0.0, number(t)};
  return {number(t.substr(0, split)), number(t.substr(split))};
}

Matrix read_matrix_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file '" + path + "'");
  std::vector<std::vector<cplx>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (auto c = line.find('#'); c != std::string::npos) line.resize(c);
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    std::vector<cplx> row;
    for (std::string tok; ls >> tok;) row.push_back(parse_complex(tok));
    if (!row.empty()) rows.push_back(std::move(row));
  }
  if (rows.empty()) throw ConfigError("matrix file '" + path + "' is empty");
  const std::size_t n = rows.size();
  for (const auto& r : rows)
    if (r.size() != n) throw ConfigError("matrix file '" + path + "' is not square");
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = rows[i][j];
  return m;
}

std::optional<EigenDecomp> try_eigendecompose(const Matrix& a, double tol) {
  Eigen::ComplexEigenSolver<Matrix> es(a);
  if (es.info() != Eigen::Success) return std::nullopt;
  EigenDecomp d;
  d.U = es.eigenvectors();
  if (rcond2(d.U) < 1e-10) return std::nullopt;
  d.values = es.eigenvalues();
  d.Uinv = d.U.partialPivLu().inverse();
  const double scale = std::max(1.0, a.norm());
  if ((d.U * d.values.asDiagonal() * d.Uinv - a).norm() > tol * scale) return std::nullopt;
  d.unitary = (d.U.adjoint() * d.U - Matrix::Identity(a.rows(), a.cols())).norm() < 1e-10;
  return d;
}

std::shared_ptr<const SpatialOperator> build_spatial(const SpatialParams& p) {
  auto op = std::make_shared<SpatialOperator>();
  op->kind = p.kind;
  if (p.kind != SpatialKind::FromFile && p.n < 1) throw ConfigError("spatial size must be >= 1");
  const double h = p.h > 0.0 ? p.h : 1.0 / (p.n + 1);
  switch (p.kind) {
    case SpatialKind::Laplacian1D:
      op->L = laplacian(p.n, h, op->eig);
      break;
    case SpatialKind::Advection1DUpwind:
      if (p.velocity == 0.0) throw ConfigError("advection velocity must be nonzero");
      op->L = upwind(p.n, h, p.velocity);
      break;
    case SpatialKind::FromFile:
      op->L = read_matrix_file(p.path);
      op->eig = try_eigendecompose(op->L);
      break;
  }
  return op;
}

StabilityPolys stability_polys(const SchemeSpec& s) {
  switch (s.kind) {
    case Scheme::ForwardEuler:
      return {{1.0, 1.0}, {1.0}};
    case Scheme::BackwardEuler:
      return {{1.0}, {1.0, -1.0}};
    case Scheme::Theta:
      return {{1.0, 1.0 - s.theta}, {1.0, -s.theta}};
    case Scheme::RK4:
      return {{1.0, 1.0, 0.5, 1.0 / 6.0, 1.0 / 24.0}, {1.0}};
    case Scheme::SDIRK2: {
      const double g = 1.0 - 1.0 / std::sqrt(2.0);
      return {{1.0, 1.0 - 2.0 * g}, {1.0, -2.0 * g, g * g}};
    }
    case Scheme::Rational:
      if (s.num.empty() || s.den.empty()) throw ConfigError("rational scheme needs numerator and denominator");
      return {s.num, s.den};
  }
  throw ConfigError("unknown scheme");
}

cplx stability_function(const SchemeSpec& s, cplx z) {
  const auto p = stability_polys(s);
  return poly_of(p.num, z) / poly_of(p.den, z);
}

double spectral_radius(const Matrix& a) {
  if (a.size() == 0) return 0.0;
  Eigen::ComplexEigenSolver<Matrix> es(a, false);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

Stepper build_stepper(std::shared_ptr<const SpatialOperator> L, const SchemeSpec& scheme) {
  if (!L) throw PreconditionError("stepper needs a spatial operator");
  if (!(scheme.dt > 0.0)) throw ConfigError("time step must be positive");
  const auto p = stability_polys(scheme);
  const Matrix z = scheme.dt * L->L;
  const Matrix num = poly_of(p.num, z);
  const Matrix den = poly_of(p.den, z);
  Stepper st;
  if (p.den.size() == 1) {
    st.Phi = num / p.den[0];
  } else {
    if (rcond2(den) < 1e-14) throw SingularError("stepper denominator is singular");
    st.Phi = den.partialPivLu().solve(num);
  }
  st.scheme = scheme;
  st.source = std::move(L);
  st.spectral_radius = spectral_radius(st.Phi);
  st.stable = st.spectral_radius <= 1.0 + 1e-12;
  return st;
}

StepperPair make_pair(const Matrix& Phi, const Matrix& Psi, int k, double commute_tol) {
  if (k < 1) throw PreconditionError("coarsening factor must be >= 1");
  if (Phi.rows() != Phi.cols() || Psi.rows() != Psi.cols() || Phi.rows() != Psi.rows())
    throw PreconditionError("stepper dimensions differ");
  StepperPair pair;
  pair.Phi = Phi;
  pair.Psi = Psi;
  pair.k = k;
  const double scale = std::max(1.0, sigma_max(Phi) * sigma_max(Psi));
  pair.commuting = commutator_norm(Phi, Psi) <= commute_tol * scale;
  return pair;
}

StepperPair make_pair(const Stepper& fine, const Stepper& coarse, int k, double commute_tol) {
  StepperPair pair = make_pair(fine.Phi, coarse.Phi, k, commute_tol);
  if (fine.source && fine.source == coarse.source && fine.source->eig) {
    const auto& e = *fine.source->eig;
    SharedEig s;
    s.U = e.U;
    s.Uinv = e.Uinv;
    s.unitary = e.unitary;
    const auto n = e.values.size();
    s.lambda.resize(n);
    s.mu.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      s.lambda(i) = stability_function(fine.scheme, fine.scheme.dt * e.values(i));
      s.mu(i) = stability_function(coarse.scheme, coarse.scheme.dt * e.values(i));
    }
    const double scale = std::max(1.0, pair.Phi.norm());
    const bool ok = (s.U * s.lambda.asDiagonal() * s.Uinv - pair.Phi).norm() <= 1e-8 * scale &&
                    (s.U * s.mu.asDiagonal() * s.Uinv - pair.Psi).norm() <= 1e-8 * scale;
    if (ok) pair.eig = s;
  }
  return pair;
}

StepperPair make_diagonal_pair(const Vector& lambda, const Vector& mu, int k, const Matrix& U) {
  if (lambda.size() != mu.size()) throw PreconditionError("eigenvalue lists differ in length");
  const auto n = lambda.size();
  SharedEig s;
  s.U = U.size() ? U : Matrix(Matrix::Identity(n, n));
  s.Uinv = s.U.partialPivLu().inverse();
  s.unitary = (s.U.adjoint() * s.U - Matrix::Identity(n, n)).norm() < 1e-10;
  s.lambda = lambda;
  s.mu = mu;
  StepperPair pair = make_pair(Matrix(s.U * lambda.asDiagonal() * s.Uinv),
                               Matrix(s.U * mu.asDiagonal() * s.Uinv), k);
  pair.commuting = true;
  pair.eig = s;
  return pair;
}

PairDiagnostics verify_pair(const StepperPair& pair, const PairTolerances& tol) {
  PairDiagnostics d;
  const double scale = std::max(1.0, sigma_max(pair.Phi) * sigma_max(pair.Psi));
  d.commutator = commutator_norm(pair.Phi, pair.Psi);
  d.commuting = d.commutator <= tol.commute * scale;
  const Matrix defect = pair.Psi - matrix_power(pair.Phi, pair.k);
  d.defect_rcond = rcond2(defect);
  d.defect_singular = d.defect_rcond < tol.rcond;
  d.fine_radius = spectral_radius(pair.Phi);
  d.fine_invertible = rcond2(pair.Phi) >= tol.rcond;
  if (pair.eig) {
    d.coarse_radius = pair.eig->mu.cwiseAbs().maxCoeff();
    d.coarse_on_unit_circle = false;
    for (Eigen::Index i = 0; i < pair.eig->mu.size(); ++i)
      if (std::abs(std::abs(pair.eig->mu(i)) - 1.0) <= tol.unit_circle) d.coarse_on_unit_circle = true;
  } else {
    Eigen::ComplexEigenSolver<Matrix> es(pair.Psi, false);
    d.coarse_radius = es.eigenvalues().cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i)
      if (std::abs(std::abs(es.eigenvalues()(i)) - 1.0) <= tol.unit_circle) d.coarse_on_unit_circle = true;
  }
  d.normal = is_normal(pair.Phi, 1e-10) && is_normal(pair.Psi, 1e-10);
  return d;
}

Rk4Defect rk4_defect(const Matrix& L, double dt) {
  const auto n = L.rows();
  const Matrix I = Matrix::Identity(n, n);
  const Matrix z = dt * L;
  const Matrix z2 = z * z, z3 = z2 * z, z4 = z3 * z;
  const Matrix phi = I + z + z2 / 2.0 + z3 / 6.0 + z4 / 24.0;
  const Matrix w = 2.0 * z;
  const Matrix w2 = w * w, w3 = w2 * w, w4 = w3 * w;
  const Matrix psi = I + w + w2 / 2.0 + w3 / 6.0 + w4 / 24.0;
  Rk4Defect out;
  out.direct = psi - phi * phi;
  out.closed_form = -(z4 * z / 4.0) * (I + (5.0 / 18.0) * z + z2 / 18.0 + z3 / 144.0);
  out.residual = (out.direct - out.closed_form).norm();
  return out;
}

std::vector<cplx> rk4_defect_roots(double dt) {
  // Roots in lambda of 1 + (5dt/18) lambda + (dt^2/18) lambda^2 + (dt^3/144) lambda^3.
  const double c0 = 1.0, c1 = 5.0 * dt / 18.0, c2 = dt * dt / 18.0, c3 = dt * dt * dt / 144.0;
  Eigen::Matrix3cd comp = Eigen::Matrix3cd::Zero();
  comp(1, 0) = 1.0;
  comp(2, 1) = 1.0;
  comp(0, 2) = -c0 / c3;
  comp(1, 2) = -c1 / c3;
  comp(2, 2) = -c2 / c3;
  Eigen::ComplexEigenSolver<Eigen::Matrix3cd> es(comp, false);
  std::vector<cplx> roots(es.eigenvalues().data(), es.eigenvalues().data() + 3);
  std::sort(roots.begin(), roots.end(), [](cplx a, cplx b) {
    return a.real() != b.real() ? a.real() < b.real() : a.imag() < b.imag();
  });
  return roots;
}

}  // namespace partime
