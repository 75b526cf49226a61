#include <cmath>
#include <iomanip>
#include <ostream>

#include "json.hpp"
#include "partime/harness.hpp"

namespace partime {

namespace {

using nlohmann::json;

json num(double v) {
  if (std::isfinite(v)) return v;
  return v > 0 ? "inf" : (v < 0 ? "-inf" : "nan");
}

json tap_json(const TapResult& t) {
  return {{"value", num(t.value)}, {"x_hat", t.x_hat}, {"certified", t.certified}, {"gsv", num(t.gsv)},
          {"search", num(t.search)}};
}

json bounds_json(const BoundReport& b) {
  json out;
  out["Nc"] = b.Nc;
  out["pair"] = {{"commutator", b.pair.commutator},     {"commuting", b.pair.commuting},
                 {"defect_rcond", b.pair.defect_rcond}, {"defect_singular", b.pair.defect_singular},
                 {"fine_radius", b.pair.fine_radius},   {"coarse_radius", b.pair.coarse_radius},
                 {"normal", b.pair.normal}};
  for (const auto& r : b.relax) {
    json j;
    j["relaxation"] = to_string(r.relax);
    j["tap"] = tap_json(r.tap);
    j["itap"] = tap_json(r.itap);
    j["teap"] = r.teap ? json(num(*r.teap)) : json(nullptr);
    j["decay"] = {{"psi_power", num(r.decay.psi_power)}, {"conj_psi_power", num(r.decay.conj_psi_power)}};
    j["sufficient"] = {{"residual", num(r.sufficient_residual.value)}, {"error", num(r.sufficient_error.value)}};
    j["necessary"] = {{"residual", num(r.necessary_residual.value)},
                      {"residual_slack", num(r.necessary_residual.slack)},
                      {"error", num(r.necessary_error.value)},
                      {"error_slack", num(r.necessary_error.slack)},
                      {"available", r.necessary_residual.available && r.necessary_error.available}};
    j["symbol_max_sv"] = {{"residual", num(r.symbol_residual)}, {"error", num(r.symbol_error)}};
    j["dense"] = {{"residual", num(r.dense_residual)}, {"error", num(r.dense_error)}};
    if (r.diag) {
      j["dense"]["modified"] = num(r.dense_modified);
      j["diag"] = {{"lower", num(r.diag->lower)},
                   {"upper", num(r.diag->upper)},
                   {"asymptote", num(r.diag->asymptote)},
                   {"exact", num(r.diag->exact)},
                   {"blocks", r.diag->blocks}};
    }
    out["relaxations"].push_back(j);
  }
  return out;
}

}  // namespace

void write_csv(const ExperimentResult& r, std::ostream& os) {
  os << "iteration,relaxation,norm,value,ratio,bound_lower,bound_upper,bound_kind\n";
  os << std::setprecision(12);
  for (const auto& row : r.rows) {
    os << row.iteration << ',' << to_string(row.relax) << ',' << to_string(row.norm) << ',' << row.value << ',';
    if (row.ratio) os << *row.ratio;
    os << ',' << row.lower << ',' << row.upper << ',' << row.kind << '\n';
  }
}

void write_json(const ExperimentResult& r, std::ostream& os, bool include_rows) {
  json out;
  out["name"] = r.config.name;
  out["grid"] = {{"N", r.config.grid.N}, {"k", r.config.grid.k}, {"Nc", r.config.grid.Nc()}};
  out["bounds"] = bounds_json(r.bounds);
  out["violations"] = r.violations;
  if (include_rows) {
    out["rows"] = json::array();
    for (const auto& row : r.rows)
      out["rows"].push_back({{"iteration", row.iteration},
                             {"relaxation", to_string(row.relax)},
                             {"norm", to_string(row.norm)},
                             {"value", num(row.value)},
                             {"ratio", row.ratio ? num(*row.ratio) : json(nullptr)},
                             {"bound_lower", num(row.lower)},
                             {"bound_upper", num(row.upper)},
                             {"bound_kind", row.kind}});
  }
  os << out.dump(2) << '\n';
}

void write_bounds_json(const BoundReport& b, std::ostream& os) { os << bounds_json(b).dump(2) << '\n'; }

}  // namespace partime
