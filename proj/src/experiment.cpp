#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "partime/harness.hpp"
#include "partime/linalg.hpp"

namespace partime {

namespace {

using Idx = Eigen::Index;

Matrix coarse_operator(const SpaceTimeSystem& sys, Relaxation r, Side side) {
  Matrix M = side == Side::Residual ? cgc_residual(sys) : cgc_error(sys);
  if (r == Relaxation::FCF) M = M * coarse_shift(sys);
  return M;
}

Vector random_vector(Idx n, std::mt19937_64& rng) {
  std::normal_distribution<double> nd;
  Vector v(n);
  for (Idx i = 0; i < n; ++i) v(i) = cplx(nd(rng), nd(rng));
  return v;
}

double measure(const SpaceTimeSystem& sys, NormKind kind, const Vector& e) {
  switch (kind) {
    case NormKind::L2:
      return e.norm();
    case NormKind::AstarA:
      return apply_A(sys, e).norm();
    case NormKind::Modified: {
      const Matrix& Uinv = sys.pair.eig->Uinv;
      double s = 0.0;
      for (int t = 0; t < sys.grid.N; ++t) s += (Uinv * e.segment(Idx(t) * sys.nx, sys.nx)).squaredNorm();
      return std::sqrt(s);
    }
  }
  return 0.0;
}

Vector worst_case_seed(const SpaceTimeSystem& sys, Relaxation r, NormKind kind) {
  const int Nc = sys.grid.Nc(), k = sys.grid.k;
  if (kind == NormKind::AstarA) {
    const Vector w = leading_singular(coarse_operator(sys, r, Side::Residual)).right;
    return apply_P_ideal(sys, coarse_forward_solve(matrix_power(sys.pair.Phi, k), w, sys.nx));
  }
  // Error norms: the seed lives on the C-points only, so the first iteration
  // amplifies by at least the coarse defect norm.
  Matrix X = coarse_operator(sys, r, Side::Error);
  Vector v;
  if (kind == NormKind::Modified) {
    const auto& e = *sys.pair.eig;
    X = block_diag(e.Uinv, Nc) * X * block_diag(e.U, Nc);
    v = block_diag(e.U, Nc) * leading_singular(X).right;
  } else {
    v = leading_singular(X).right;
  }
  Vector e0 = Vector::Zero(sys.fine_dim());
  for (int j = 0; j < Nc; ++j) e0.segment(Idx(j) * k * sys.nx, sys.nx) = v.segment(Idx(j) * sys.nx, sys.nx);
  return e0;
}

void bound_for(const RelaxBounds& b, NormKind kind, TraceRow& row) {
  switch (kind) {
    case NormKind::AstarA:
      row.lower = b.necessary_residual.value;
      row.upper = b.sufficient_residual.value;
      row.kind = "tap";
      break;
    case NormKind::L2:
      row.lower = b.necessary_error.value;
      row.upper = b.sufficient_error.value;
      row.kind = "itap";
      break;
    case NormKind::Modified:
      row.lower = b.diag ? b.diag->lower : 0.0;
      row.upper = b.diag ? b.diag->upper : std::numeric_limits<double>::infinity();
      row.kind = "diag";
      break;
  }
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace

StepperPair build_pair(const ExperimentConfig& cfg) {
  const auto L = build_spatial(cfg.spatial);
  const Stepper fine = build_stepper(L, cfg.fine);
  SchemeSpec cs = cfg.coarse;
  if (cs.dt == 0.0) cs.dt = cfg.grid.k * cfg.fine.dt;
  const Stepper coarse = build_stepper(L, cs);
  return make_pair(fine, coarse, cfg.grid.k);
}

BoundReport compute_bounds(const StepperPair& pair, const GridSpec& grid, const std::vector<Relaxation>& relax,
                           std::size_t cap) {
  BoundReport rep;
  rep.pair = verify_pair(pair);
  if (rep.pair.coarse_on_unit_circle)
    throw PreconditionError("coarse propagator has an eigenvalue on the unit circle");
  rep.Nc = grid.Nc();
  const SpaceTimeSystem sys = assemble_system(pair, grid, cap);
  if (static_cast<std::size_t>(sys.coarse_dim()) > cap)
    throw CapExceeded("coarse level exceeds the dense cap; bounds need the coarse operators");
  for (Relaxation r : relax) {
    RelaxBounds b;
    b.relax = r;
    b.tap = tap_constant(pair, r, 1);
    b.itap = itap_constant(pair, r);
    if (pair.eig) b.teap = teap_constant(pair, r);
    b.decay = stability_decay(pair, rep.Nc);
    b.sufficient_residual = {b.tap.value * (1.0 + (r == Relaxation::F ? b.decay.psi_power : b.decay.conj_psi_power)),
                             b.tap.value, r == Relaxation::F ? b.decay.psi_power : b.decay.conj_psi_power,
                             b.tap.certified};
    b.sufficient_error = {b.itap.value * (1.0 + b.decay.psi_power), b.itap.value, b.decay.psi_power,
                          b.itap.certified};
    b.necessary_residual = necessary_lower_bound(pair, r, rep.Nc, 1, Side::Residual);
    b.necessary_error = necessary_lower_bound(pair, r, rep.Nc, 1, Side::Error);
    b.symbol_residual = symbol_max_sv(build_symbol(pair, r, Side::Residual, rep.Nc)).value;
    b.symbol_error = symbol_max_sv(build_symbol(pair, r, Side::Error, rep.Nc)).value;
    if (pair.eig) b.diag = diag_bounds(pair, r, rep.Nc, 1);
    b.dense_residual = operator_norm_l2(coarse_operator(sys, r, Side::Residual));
    const Matrix Xe = coarse_operator(sys, r, Side::Error);
    b.dense_error = operator_norm_l2(Xe);
    if (pair.eig)
      b.dense_modified = pair.eig->unitary ? b.dense_error : operator_norm_modified(Xe, pair.eig->U, pair.eig->Uinv);
    rep.relax.push_back(b);
  }
  return rep;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  ExperimentResult res;
  res.config = cfg;
  const StepperPair pair = build_pair(cfg);
  for (NormKind n : cfg.norms)
    if (n == NormKind::Modified && !pair.eig) throw ConfigError("modified norm needs a shared eigenbasis");
  res.bounds = compute_bounds(pair, cfg.grid, cfg.relaxations, cfg.cap);
  const SpaceTimeSystem sys = assemble_system(pair, cfg.grid, cfg.cap);
  std::mt19937_64 rng(cfg.seed);
  const Vector f = cfg.random_rhs ? random_vector(sys.fine_dim(), rng) : Vector(Vector::Zero(sys.fine_dim()));
  const Vector ustar = sequential_solve(sys, f);
  const double eps = std::numeric_limits<double>::epsilon();

  for (std::size_t ri = 0; ri < cfg.relaxations.size(); ++ri) {
    const Relaxation r = cfg.relaxations[ri];
    const RelaxBounds& b = res.bounds.relax[ri];
    // Each run is measured in the listed norms; worst-case mode seeds one run per norm.
    std::vector<std::pair<Vector, std::vector<NormKind>>> runs;
    if (cfg.worst_case) {
      for (NormKind n : cfg.norms) runs.push_back({worst_case_seed(sys, r, n), {n}});
    } else {
      runs.push_back({random_vector(sys.fine_dim(), rng), cfg.norms});
    }
    for (auto& [e0, norms] : runs) {
      std::vector<Vector> errs{e0};
      Vector u = ustar + e0;
      for (int it = 1; it <= cfg.iterations; ++it) {
        u = apply_iteration(sys, r, u, f);
        errs.push_back(u - ustar);
      }
      for (NormKind n : norms) {
        std::vector<double> vals;
        for (const auto& e : errs) vals.push_back(measure(sys, n, e));
        const double floor = std::max(1e-300, 64.0 * eps * vals[0]);
        double worst = 0.0;
        for (int it = 0; it <= cfg.iterations; ++it) {
          TraceRow row;
          row.iteration = it;
          row.relax = r;
          row.norm = n;
          row.value = vals[it];
          if (it > 0 && vals[it - 1] > floor) row.ratio = vals[it] / vals[it - 1];
          bound_for(b, n, row);
          if (row.ratio) {
            worst = std::max(worst, *row.ratio);
            if (it >= 2 && *row.ratio > row.upper * (1.0 + 1e-8) + 1e-12)
              res.violations.push_back(std::string(to_string(r)) + "/" + to_string(n) + " iteration " +
                                       std::to_string(it) + ": ratio " + fmt(*row.ratio) + " exceeds bound " +
                                       fmt(row.upper));
          }
          res.rows.push_back(row);
        }
        if (cfg.worst_case) {
          TraceRow probe;
          bound_for(b, n, probe);
          if (worst < probe.lower * (1.0 - 1e-8))
            res.violations.push_back(std::string(to_string(r)) + "/" + to_string(n) + ": worst observed ratio " +
                                     fmt(worst) + " below necessary bound " + fmt(probe.lower));
        }
      }
    }
    // dense coarse-level norms must sit inside the same brackets
    auto check_dense = [&](const char* what, double lo, double val, double hi) {
      if (val < lo * (1.0 - 1e-8) || val > hi * (1.0 + 1e-8) + 1e-12)
        res.violations.push_back(std::string(to_string(r)) + " dense " + what + " " + fmt(val) + " outside [" +
                                 fmt(lo) + ", " + fmt(hi) + "]");
    };
    check_dense("residual", b.necessary_residual.value, b.dense_residual, b.sufficient_residual.value);
    check_dense("error", b.necessary_error.value, b.dense_error, b.sufficient_error.value);
    if (b.diag) check_dense("modified", b.diag->lower, b.dense_modified, b.diag->upper);
  }
  return res;
}

std::vector<ExperimentConfig> default_suite() {
  std::vector<ExperimentConfig> out;
  auto heat = [](const std::string& name, int n, Scheme fine, double dt, Scheme coarse, int k, int Nc) {
    ExperimentConfig c;
    c.name = name;
    c.spatial.kind = SpatialKind::Laplacian1D;
    c.spatial.n = n;
    c.fine.kind = fine;
    c.fine.dt = dt;
    c.coarse.kind = coarse;
    c.grid = {(Nc - 1) * k + 1, k};
    c.norms = {NormKind::L2, NormKind::AstarA, NormKind::Modified};
    return c;
  };
  out.push_back(heat("heat-be-k4", 16, Scheme::BackwardEuler, 1.0 / 64, Scheme::BackwardEuler, 4, 65));
  auto random = heat("heat-be-k2-random", 16, Scheme::BackwardEuler, 1.0 / 64, Scheme::BackwardEuler, 2, 33);
  random.worst_case = false;
  random.random_rhs = true;
  random.seed = 11;
  out.push_back(random);
  out.push_back(heat("heat-sdirk2-k8", 8, Scheme::SDIRK2, 1.0 / 32, Scheme::SDIRK2, 8, 33));
  out.push_back(heat("heat-rk4-be-k4", 8, Scheme::RK4, 1.0 / 256, Scheme::BackwardEuler, 4, 33));
  auto theta = heat("heat-theta-k4", 12, Scheme::Theta, 1.0 / 48, Scheme::Theta, 4, 33);
  theta.fine.theta = theta.coarse.theta = 0.75;
  out.push_back(theta);

  ExperimentConfig adv;
  adv.name = "advection-be-k4";
  adv.spatial.kind = SpatialKind::Advection1DUpwind;
  adv.spatial.n = 8;
  adv.fine.kind = Scheme::BackwardEuler;
  adv.fine.dt = 0.05;
  adv.coarse.kind = Scheme::BackwardEuler;
  adv.grid = {(33 - 1) * 4 + 1, 4};
  adv.norms = {NormKind::AstarA, NormKind::L2};
  out.push_back(adv);
  return out;
}

}  // namespace partime
