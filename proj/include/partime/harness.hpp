#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "partime/toeplitz.hpp"

namespace partime {

enum class NormKind { L2, AstarA, Modified };
const char* to_string(NormKind n);

struct ExperimentConfig {
  std::string name = "experiment";
  SpatialParams spatial;
  SchemeSpec fine;
  SchemeSpec coarse;  // dt == 0 selects k * fine.dt
  GridSpec grid;
  std::vector<Relaxation> relaxations{Relaxation::F, Relaxation::FCF};
  std::vector<NormKind> norms{NormKind::L2, NormKind::AstarA};
  int iterations = 8;
  bool worst_case = true;
  bool random_rhs = false;
  std::uint64_t seed = 1;
  std::size_t cap = kDenseCap;
};

// JSON document; unknown keys are rejected.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

struct RelaxBounds {
  Relaxation relax = Relaxation::F;
  TapResult tap, itap;
  std::optional<double> teap;
  StabilityDecay decay;
  SufficientBound sufficient_residual, sufficient_error;
  NecessaryBound necessary_residual, necessary_error;
  double symbol_residual = 0.0, symbol_error = 0.0;
  std::optional<DiagBounds> diag;
  double dense_residual = 0.0;  // ||I - A_Delta B^-1|| (times the coarse shift for FCF)
  double dense_error = 0.0;
  double dense_modified = 0.0;
};

struct BoundReport {
  PairDiagnostics pair;
  int Nc = 0;
  std::vector<RelaxBounds> relax;
};

BoundReport compute_bounds(const StepperPair& pair, const GridSpec& grid, const std::vector<Relaxation>& relax,
                           std::size_t cap = kDenseCap);

struct TraceRow {
  int iteration = 0;
  Relaxation relax = Relaxation::F;
  NormKind norm = NormKind::L2;
  double value = 0.0;
  std::optional<double> ratio;
  double lower = 0.0, upper = 0.0;
  std::string kind;
};

struct ExperimentResult {
  ExperimentConfig config;
  BoundReport bounds;
  std::vector<TraceRow> rows;
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

StepperPair build_pair(const ExperimentConfig& cfg);
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_csv(const ExperimentResult& r, std::ostream& os);
void write_json(const ExperimentResult& r, std::ostream& os, bool include_rows = true);
void write_bounds_json(const BoundReport& b, std::ostream& os);

std::vector<ExperimentConfig> default_suite();

struct VerifyOptions {
  std::string filter;
  bool corrupt_pinv = false;  // fault injection for the Moore-Penrose checks
  std::uint64_t seed = 7;
};

struct VerifyItem {
  std::string name;
  bool passed = false;
  double margin = 0.0;  // positive when the invariant holds
  std::string detail;
};

struct VerifyReport {
  std::vector<VerifyItem> items;
  bool ok() const;
};

VerifyReport verify_suite(const VerifyOptions& opt = {});
void write_verify(const VerifyReport& r, std::ostream& os);

}  // namespace partime
