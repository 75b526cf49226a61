#include <cmath>
#include <ostream>
#include <random>
#include <sstream>

#include "partime/harness.hpp"
#include "partime/linalg.hpp"

namespace partime {

namespace {

using Idx = Eigen::Index;

struct Suite {
  const VerifyOptions& opt;
  VerifyReport report;

  bool wanted(const std::string& name) const {
    return opt.filter.empty() || name.find(opt.filter) != std::string::npos;
  }
  void add(const std::string& name, double margin, const std::string& detail) {
    report.items.push_back({name, margin >= 0.0, margin, detail});
  }
};

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void moore_penrose(Suite& s) {
  std::mt19937_64 rng(s.opt.seed);
  double worst = 0.0;
  for (int trial = 0; trial < 12; ++trial) {
    const Idx b = 1 + trial % 3;
    const int n = 6 + trial;
    const Matrix f = random_contraction(b, 0.7, rng);
    const Matrix g = random_matrix(b, b, rng);
    const Matrix h = random_matrix(b, b, rng);
    for (LowerShape shape : {LowerShape::A0, LowerShape::A1}) {
      const Matrix A = assemble_lower<cplx>(f, g, h, n, shape);
      Matrix X = pinv_lower<cplx>(f, g, h, n, shape);
      if (s.opt.corrupt_pinv) X.block(0, (shape == LowerShape::A0 ? 1 : 2) * b, b, b) *= -1.0;
      worst = std::max(worst, mp_residuals<cplx>(A, X).max());
    }
    const int p = 1 + trial % 2;
    const Matrix A = assemble_lower<cplx>(f, g, h, n, LowerShape::A0);
    worst = std::max(worst, mp_residuals<cplx>(matrix_power(A, p), pinv_power<cplx>(f, g, h, n, p)).max());

    TimeDepSequence seq;
    seq.k = 2;
    for (int j = 0; j < 5; ++j) seq.Psi.push_back(random_contraction(b, 0.6, rng));
    for (int t = 0; t < 10; ++t) seq.Phi.push_back(random_contraction(b, 0.9, rng));
    Matrix Xt = timedep_pinv(seq);
    if (s.opt.corrupt_pinv) Xt.block(0, b, b, b) *= -1.0;
    worst = std::max(worst, mp_residuals<cplx>(timedep_cgc(seq), Xt).max());
  }
  s.add("moore-penrose", 1e-10 - worst, "max relative residual " + str(worst));
}

void norm_identity(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 1);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const int nx = 1 + trial % 3, k = 2 + trial % 3;
    const StepperPair pair = make_pair(random_contraction(nx, 0.8, rng), random_contraction(nx, 0.6, rng), k);
    const SpaceTimeSystem sys = assemble_system(pair, {6 * k + 1, k});
    const Matrix A = dense_A(sys);
    const Propagators P = build_propagators(sys);
    for (int p = 1; p <= 3; ++p) {
      for (auto [E, R] : {std::pair{&P.E_F, &P.R_F}, std::pair{&P.E_FCF, &P.R_FCF}}) {
        const double a = operator_norm_l2(matrix_power(*R, p));
        const double b = operator_norm_astar_a(matrix_power(*E, p), A);
        worst = std::max(worst, std::abs(a - b) / std::max(1.0, a));
      }
    }
  }
  s.add("norm-identity", 1e-8 - worst, "max relative gap " + str(worst));
}

void schur_exact(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 2);
  double worst = 0.0;
  for (int k : {2, 3, 4, 8}) {
    const StepperPair pair = make_pair(random_contraction(2, 0.9, rng), random_contraction(2, 0.5, rng), k);
    const SpaceTimeSystem sys = assemble_system(pair, {5 * k + 1, k});
    worst = std::max(worst, (schur_complement(sys) - coarse_A_delta(sys)).cwiseAbs().maxCoeff());
  }
  s.add("schur-exact", 1e-13 - worst, "max entry gap " + str(worst));
}

void transfer_bound(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 3);
  double margin = 1e300;
  for (int k : {2, 3, 5}) {
    const StepperPair pair = make_pair(random_contraction(3, 0.95, rng), random_contraction(3, 0.5, rng), k);
    const SpaceTimeSystem sys = assemble_system(pair, {4 * k + 1, k});
    const IdealTransfer t = ideal_transfer(sys);
    const double r = operator_norm_l2(t.R), p = operator_norm_l2(t.P);
    margin = std::min({margin, std::sqrt(double(k)) - r, std::sqrt(double(k)) - p});
  }
  s.add("ideal-transfer-bound", margin, "min sqrt(k) - norm");
}

void perturbed_bracket(Suite& s) {
  double margin = 1e300;
  for (double m = 0.05; m < 0.951; m += 0.15)
    for (int n : {10, 20, 50, 100, 200}) {
      const PerturbedBracket b = tridiag_perturbed_min_eig(cplx(m * std::cos(n), m * std::sin(n)), n);
      margin = std::min({margin, b.inner_lower - b.outer_lower, b.value - b.inner_lower, b.inner_upper - b.value,
                         b.outer_upper - b.inner_upper});
      const double lo = n * kPi / (n + 1.0), hi = n * kPi / (n + 0.5);
      margin = std::min({margin, b.theta - lo, hi - b.theta});
    }
  s.add("perturbed-bracket", margin, "smallest gap in the ordered chain");
}

void tap_teap(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 4);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0;
  for (int trial = 0; trial < 4; ++trial) {
    const int n = 3;
    Vector lam(n), mu(n);
    for (int i = 0; i < n; ++i) {
      lam(i) = std::polar(0.2 + 0.75 * ud(rng), 2 * kPi * ud(rng));
      mu(i) = std::polar(0.1 + 0.8 * ud(rng), 2 * kPi * ud(rng));
    }
    Eigen::HouseholderQR<Matrix> qr(random_matrix(n, n, rng));
    const StepperPair pair = make_diagonal_pair(lam, mu, 2, Matrix(qr.householderQ()));
    TapOptions general;
    general.closed_form = false;
    for (Relaxation r : {Relaxation::F, Relaxation::FCF}) {
      const double t = tap_constant(pair, r, 1, general).value, e = teap_constant(pair, r);
      worst = std::max(worst, std::abs(t - e) / e);
    }
  }
  s.add("tap-teap-normal", 1e-8 - worst, "max relative gap " + str(worst));
}

void min_phase_grid(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 5);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix Psi = random_matrix(3, 3, rng);
    const Vector v = random_matrix(3, 1, rng);
    double grid = 1e300;
    for (int m = 0; m < 4096; ++m) {
      const double x = 2 * kPi * m / 4096;
      grid = std::min(grid, (v - std::exp(cplx(0, x)) * (Psi * v)).norm());
    }
    const double c = min_phase_norm(Psi, v, 1);
    worst = std::max(worst, (grid - c) / grid);
    if (c > grid * (1 + 1e-12)) worst = std::max(worst, 1.0);
  }
  s.add("min-phase-closed-form", 1e-6 - worst, "max relative gap to a 4096-point grid " + str(worst));
}

void rk4(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 6);
  const Matrix L = random_contraction(8, 1.0, rng);
  const Rk4Defect d = rk4_defect(L, 1.0);
  const double rel = d.residual / d.direct.norm();
  s.add("rk4-defect", 1e-12 - rel, "relative residual " + str(rel));
}

void symbol_bound(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 7);
  double margin = 1e300;
  for (int trial = 0; trial < 3; ++trial) {
    const StepperPair pair = make_pair(random_contraction(3, 0.9, rng), random_contraction(3, 0.7, rng), 2);
    const int Nc = 24;
    for (Relaxation r : {Relaxation::F, Relaxation::FCF})
      for (Side side : {Side::Residual, Side::Error}) {
        const double sym = symbol_max_sv(build_symbol(pair, r, side, Nc)).value;
        const double dense = sigma_max(assemble_defect(pair, r, side, Nc));
        const SufficientBound b = sufficient_bound(pair, r, Nc, side);
        margin = std::min({margin, sym + 1e-10 - dense, b.value + 1e-10 - sym});
      }
  }
  s.add("symbol-bound", margin, "min of symbol - dense and sufficient - symbol");
}

void timedep(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 8);
  std::uniform_real_distribution<double> ud(0.0, 1.0);
  double worst = 0.0, gmargin = 1e300;
  for (int trial = 0; trial < 5; ++trial) {
    TimeDepSpectra t;
    t.k = 2;
    t.Nc = 16;
    t.lambda.resize(3, (t.Nc - 1) * t.k);
    t.mu.resize(3, t.Nc - 1);
    for (Idx i = 0; i < t.lambda.size(); ++i) t.lambda(i) = std::polar(0.3 + 0.6 * ud(rng), 0.5 * ud(rng));
    for (Idx i = 0; i < t.mu.size(); ++i) t.mu(i) = std::polar(0.1 + 0.7 * ud(rng), 0.5 * ud(rng));
    const TimeDepNorm n = timedep_exact_norm(t);
    double dense = 0.0;
    for (Idx i = 0; i < t.lambda.rows(); ++i) dense = std::max(dense, sigma_max(timedep_cgc_modes(t, i)));
    worst = std::max(worst, std::abs(dense - n.exact) / dense);
    gmargin = std::min(gmargin, n.gershgorin - n.exact);
  }
  s.add("timedep-exact", 1e-8 - worst, "max relative gap " + str(worst));
  s.add("timedep-gershgorin", gmargin, "min bound - exact");
}

void action_dense(Suite& s) {
  std::mt19937_64 rng(s.opt.seed + 9);
  const StepperPair pair = make_pair(random_contraction(2, 0.9, rng), random_contraction(2, 0.6, rng), 3);
  const SpaceTimeSystem sys = assemble_system(pair, {19, 3});
  const Propagators P = build_propagators(sys);
  const Vector e = random_matrix(sys.fine_dim(), 1, rng);
  const Vector zero = Vector::Zero(sys.fine_dim());
  const double gf = (apply_iteration(sys, Relaxation::F, e, zero) - P.E_F * e).norm() / e.norm();
  const double gc = (apply_iteration(sys, Relaxation::FCF, e, zero) - P.E_FCF * e).norm() / e.norm();
  s.add("action-vs-dense", 1e-12 - std::max(gf, gc), "relative gap " + str(std::max(gf, gc)));
}

void diag_tight(Suite& s) {
  SpatialParams sp;
  sp.n = 16;
  const auto L = build_spatial(sp);
  double margin = 1e300;
  for (int k : {2, 4}) {
    const Stepper fine = build_stepper(L, {Scheme::BackwardEuler, 1.0 / 64});
    const Stepper coarse = build_stepper(L, {Scheme::BackwardEuler, k / 64.0});
    const StepperPair pair = make_pair(fine, coarse, k);
    const int Nc = 32;
    const SpaceTimeSystem sys = assemble_system(pair, {(Nc - 1) * k + 1, k});
    const double dense = operator_norm_modified(cgc_residual(sys), pair.eig->U, pair.eig->Uinv);
    const DiagBounds b = diag_bounds(pair, Relaxation::F, Nc);
    margin = std::min({margin, dense - b.lower, b.upper - dense, 1e-8 - std::abs(dense - b.exact) / dense});
  }
  s.add("diag-tightness", margin, "min margin of the dense norm inside the bracket");
}

void sandwich(Suite& s) {
  for (const auto& cfg : default_suite()) {
    const std::string name = "sandwich-" + cfg.name;
    if (!s.wanted(name)) continue;
    const ExperimentResult r = run_experiment(cfg);
    s.add(name, r.ok() ? 0.0 : -1.0, r.ok() ? "all ratios inside bounds" : r.violations.front());
  }
}

}  // namespace

bool VerifyReport::ok() const {
  for (const auto& i : items)
    if (!i.passed) return false;
  return !items.empty();
}

VerifyReport verify_suite(const VerifyOptions& opt) {
  Suite s{opt, {}};
  const std::vector<std::pair<const char*, void (*)(Suite&)>> checks{
      {"moore-penrose", moore_penrose},    {"norm-identity", norm_identity},
      {"schur-exact", schur_exact},        {"ideal-transfer-bound", transfer_bound},
      {"perturbed-bracket", perturbed_bracket}, {"tap-teap-normal", tap_teap},
      {"min-phase-closed-form", min_phase_grid}, {"rk4-defect", rk4},
      {"symbol-bound", symbol_bound},      {"timedep", timedep},
      {"action-vs-dense", action_dense},   {"diag-tightness", diag_tight}};
  for (const auto& [name, fn] : checks)
    if (s.wanted(name)) fn(s);
  sandwich(s);
  return s.report;
}

void write_verify(const VerifyReport& r, std::ostream& os) {
  for (const auto& i : r.items)
    os << (i.passed ? "PASS " : "FAIL ") << i.name << "  margin=" << str(i.margin) << "  " << i.detail << '\n';
  os << (r.ok() ? "verify: all invariants hold\n" : "verify: violations found\n");
}

}  // namespace partime
