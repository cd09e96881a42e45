// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cachenet/embed.hpp"
#include "cachenet/pwl.hpp"

namespace cachenet {

// How a depth budget is converted to parameters.
//  measured:   raw floors; the budget is judged against the depth the
//              concrete function actually needs.
//  worst_case: choose_params gate; any admissible function must fit.
enum class Feasibility { measured, worst_case };

struct ExperimentConfig {
  std::vector<int> depth_budgets;
  std::vector<UnitBallSpec> corpus;
  int grid = 10000;  // evaluation points per run (>= 1000)
  EmbedMode mode = EmbedMode::exact_linear;
  bool prune_zero = true;
  Feasibility feasibility = Feasibility::measured;
  std::uint64_t seed = 0;  // base seed for corpus expansion
  std::string out_path;    // empty = stdout

  void validate() const;  // throws ParameterError
};

struct RunRecord {
  std::string function_id;
  int depth_budget = 0;
  int intervals = 0;
  int cells = 0;
  std::size_t cache_size = 0;
  int depth = 0;
  std::size_t weights = 0;
  double sup_error = 0.0;
  double error_bound = 0.0;       // 2/(T*m)
  double normalized_error = 0.0;  // sup_error * T * m
  double evaluator_deviation = 0.0;
  std::size_t baseline_nodes = 0;
  double baseline_error = 0.0;
  double error_ratio = 0.0;  // baseline_error / sup_error (inf if exact)
  double wall_ms = 0.0;      // human log only; never serialized to csv
  std::string status = "ok";
};

struct SweepResult {
  std::vector<RunRecord> records;     // sorted by (function id, budget)
  std::vector<RunRecord> corpus_max;  // per-budget worst cases
};

// Build + embed + measure one (function, budget) pair.
RunRecord run_single(const UnitBallSpec& spec, int depth_budget,
                     const ExperimentConfig& cfg);

// Sup-error of the classical same-budget yardstick: interpolation on a
// uniform grid spending the same number of scalars (nodes = budget).
double run_baseline(const PwlFunction& f, std::size_t weight_budget);

SweepResult sweep(const ExperimentConfig& cfg);

// Deterministic report (no timing fields; stable formatting).
void write_csv(const SweepResult& result, std::ostream& out);

struct FitResult {
  double c_cell = 0.0;   // sup_error ~ c_cell * bound
  double c_depth = 0.0;  // sup_error ~ c_depth / (N log N)
  double rms_log_residual = 0.0;
  int points = 0;
};

// Least-squares constants through the measured errors.  Requires records
// at >= 3 distinct budgets; throws FitError otherwise.
FitResult fit_rate(const std::vector<RunRecord>& records);

// "pwl-random:pieces=19,seed=7" / "analytic:family=sine,scale=2" /
// "random-batch:count=10,pieces=19,seed=3".
std::vector<UnitBallSpec> parse_corpus_spec(const std::string& text);
std::vector<UnitBallSpec> parse_corpus_list(
    const std::vector<std::string>& texts);

// Key=value config file (one per line, '#' comments).
ExperimentConfig load_config(const std::string& path);

}  // namespace cachenet
