#pragma once

#include <string>
#include <vector>

#include "convpot/error.hpp"
#include "convpot/geometry.hpp"
#include "convpot/orthopoly.hpp"

namespace convpot {

inline constexpr const char* kVersion = "0.4.1";
/// Largest degree an experiment may request.
inline constexpr int kMaxDegree = 80;

/// A module error tagged with the pipeline stage that raised it.
class StageError : public Error {
 public:
  StageError(std::string stage, ErrorCode code, const std::string& detail)
      : Error(code, stage + ": " + detail), stage_(std::move(stage)) {}
  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

struct LabeledDomain {
  std::string label;
  DomainSpec spec;
};

/// JSON config. Keys:
///   domain | domains   literal(s), optional "label"
///   weight             "unit" or {"type": "dist-power", "m": 1}
///   n_min, n_max       degree range
///   quadrature_extra   extra exactness degree for the inner product
///   chebyshev          {"grid", "max_iter", "rel_spread"}
///   deltas             Example 1 parameters
///   output, cache, jobs
struct ExperimentConfig {
  std::vector<LabeledDomain> domains;
  Weight weight;
  int n_min = 1;
  int n_max = 20;
  int quadrature_extra = 0;
  int chebyshev_grid = 2048;
  int chebyshev_max_iter = 4000;
  double chebyshev_spread = 1e-6;
  std::vector<double> deltas{0.1, 0.2, 0.5};
  std::string output = "out";
  bool cache = true;
  int jobs = 1;

  /// Throws Error(ConfigError) with the offending key named.
  static ExperimentConfig parse(const std::string& text);
  /// Re-checks the invariants after command-line overrides.
  void check() const;
  /// Canonical JSON (overrides applied) and its FNV-1a hash.
  std::string canonical() const;
  std::string hash() const;
};

struct SweepRecord {
  int n = 0;
  double D = 0.0;
  double eps = 0.0;
  double sup_norm = 0.0;
  double lambda_cap_n = 0.0;
  std::size_t interior = 0, boundary = 0, exterior = 0;
};

struct FittedConstants {
  double thm1_c = 0.0;         // least squares D_n ~ c sqrt(log n / n) through the origin
  double thm1_residual = 0.0;  // relative l2 residual of that fit
  double thm1_ratio_spread = 0.0;  // max/min of D_n / sqrt(log n / n), n >= 5
  double thm2_C = 0.0;         // max D_n / sqrt(max(eps_n, 1e-12))
  double c1 = 0.0, c2 = 0.0;   // ||Q_n|| <= c1 n^c2, c2 from the log-log slope
  double c2_residual = 0.0;
  double c3 = 0.0;             // min n^2 lambda_n cap^n
  std::size_t points = 0;
};

/// Throws Error(InsufficientData) with fewer than 8 usable degrees.
FittedConstants fit_constants(const std::vector<SweepRecord>& records);

/// Outcome of one subcommand; files are already written to config.output.
struct RunResult {
  std::string summary;  // JSON text
  std::vector<std::string> files;
};

/// Subcommands: validate, map, orthopoly, zeros, sweep, theorem2, example1,
/// faber, chebyshev, fit. Failures surface as StageError.
RunResult run_experiment(const std::string& command, const ExperimentConfig& config);

}  // namespace convpot
