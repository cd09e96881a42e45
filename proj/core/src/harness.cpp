// SPDX-License-Identifier: Apache-2.0
#include "cachenet/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/errors.hpp"
#include "cachenet/parallel.hpp"

namespace cachenet {

void ExperimentConfig::validate() const {
  if (depth_budgets.empty()) {
    throw ParameterError("config: no depth budgets given");
  }
  for (int n : depth_budgets) {
    if (n < 8) throw ParameterError("config: depth budget below 8");
  }
  if (corpus.empty()) throw ParameterError("config: empty corpus");
  if (grid < 1000) throw ParameterError("config: grid must be >= 1000");
}

RunRecord run_single(const UnitBallSpec& spec, int depth_budget,
                     const ExperimentConfig& cfg) {
  RunRecord rec;
  rec.function_id = spec.id();
  rec.depth_budget = depth_budget;

  ChosenParams params;
  try {
    params = cfg.feasibility == Feasibility::worst_case
                 ? choose_params(depth_budget)
                 : raw_params(depth_budget);
  } catch (const InfeasibleBudgetError& e) {
    rec.status = "infeasible(min=" + std::to_string(e.min_feasible()) +
                 ",next=" + std::to_string(e.next_feasible()) + ")";
    return rec;
  }
  rec.intervals = params.intervals;
  rec.cells = params.cells;
  rec.error_bound =
      2.0 / (static_cast<double>(params.intervals) * params.cells);

  const auto t0 = std::chrono::steady_clock::now();
  const PwlFunction f = make_unit_ball_function(spec);
  std::optional<AdaptiveNet> adaptive;
  try {
    adaptive.emplace(f, params.intervals, params.cells);
  } catch (const AssignmentError& e) {
    rec.status = "assignment-failed@" + std::to_string(e.interval());
    return rec;
  }

  const Embedded embedded =
      embed_standard(*adaptive, cfg.mode, cfg.prune_zero);
  rec.cache_size = adaptive->assignment().cache_size();
  rec.depth = embedded.plan.depth;
  rec.weights = weight_count(embedded.net);
  if (cfg.feasibility == Feasibility::measured &&
      rec.depth > depth_budget) {
    rec.status = "depth-exceeded(" + std::to_string(rec.depth) + ">" +
                 std::to_string(depth_budget) + ")";
  }

  const ReferenceEvaluator reference(f, params.intervals, params.cells);

  // The grid must resolve the finest structural scale (cells within
  // intervals), otherwise the measured sup error is systematically low.
  const long long fine = 4LL * params.intervals * params.cells;
  const int grid = static_cast<int>(
      std::max<long long>(cfg.grid, std::min<long long>(fine, 1 << 20)));
  double sup = 0.0;
  double deviation = 0.0;
  for (int k = 0; k <= grid; ++k) {
    const double x = static_cast<double>(k) / grid;
    const double fwd = forward(embedded.net, x);
    sup = std::max(sup, std::abs(f(x) - fwd));
    deviation = std::max(deviation, std::abs(fwd - reference(x)));
    if (k % 8 == 0) {
      deviation =
          std::max(deviation, std::abs(fwd - eval_adaptive(*adaptive, x)));
    }
  }
  rec.sup_error = sup;
  rec.normalized_error = sup * params.intervals * params.cells;
  rec.evaluator_deviation = deviation;

  rec.baseline_nodes = rec.weights;
  rec.baseline_error = run_baseline(f, rec.baseline_nodes);
  rec.error_ratio =
      sup > 0.0 ? rec.baseline_error / sup
                : std::numeric_limits<double>::infinity();
  rec.wall_ms = std::chrono::duration<double, std::milli>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
  return rec;
}

double run_baseline(const PwlFunction& f, std::size_t weight_budget) {
  if (weight_budget < 2) {
    throw ParameterError("baseline: need at least two nodes");
  }
  const int segments = static_cast<int>(weight_budget) - 1;
  return sup_dist(f, interpolate(f, segments));
}

SweepResult sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  struct Pair {
    const UnitBallSpec* spec;
    int budget;
  };
  std::vector<Pair> pairs;
  pairs.reserve(cfg.corpus.size() * cfg.depth_budgets.size());
  for (const auto& spec : cfg.corpus) {
    for (int budget : cfg.depth_budgets) pairs.push_back({&spec, budget});
  }

  SweepResult result;
  result.records = parallel_index_map(pairs.size(), [&](std::size_t i) {
    return run_single(*pairs[i].spec, pairs[i].budget, cfg);
  });
  std::sort(result.records.begin(), result.records.end(),
            [](const RunRecord& a, const RunRecord& b) {
              if (a.function_id != b.function_id) {
                return a.function_id < b.function_id;
              }
              return a.depth_budget < b.depth_budget;
            });

  std::vector<int> budgets = cfg.depth_budgets;
  std::sort(budgets.begin(), budgets.end());
  budgets.erase(std::unique(budgets.begin(), budgets.end()), budgets.end());
  for (int budget : budgets) {
    RunRecord max;
    max.function_id = "corpus-max";
    max.depth_budget = budget;
    max.status = "summary";
    bool any = false;
    for (const RunRecord& r : result.records) {
      if (r.depth_budget != budget) continue;
      if (r.status != "ok") {
        max.status = "summary(incomplete)";
        continue;
      }
      any = true;
      max.intervals = r.intervals;
      max.cells = r.cells;
      max.error_bound = r.error_bound;
      max.cache_size = std::max(max.cache_size, r.cache_size);
      max.depth = std::max(max.depth, r.depth);
      max.weights = std::max(max.weights, r.weights);
      max.sup_error = std::max(max.sup_error, r.sup_error);
      max.normalized_error = std::max(max.normalized_error, r.normalized_error);
      max.evaluator_deviation =
          std::max(max.evaluator_deviation, r.evaluator_deviation);
      max.baseline_nodes = std::max(max.baseline_nodes, r.baseline_nodes);
      max.baseline_error = std::max(max.baseline_error, r.baseline_error);
    }
    if (any) {
      max.error_ratio = max.sup_error > 0.0
                            ? max.baseline_error / max.sup_error
                            : std::numeric_limits<double>::infinity();
    }
    result.corpus_max.push_back(std::move(max));
  }
  return result;
}

namespace {

std::string fmt_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_row(std::ostream& out, const RunRecord& r) {
  out << "sweep-v1," << r.function_id << ',' << r.depth_budget << ',';
  const bool skipped =
      r.status.rfind("infeasible", 0) == 0 && r.intervals == 0;
  if (skipped) {
    out << ",,,,,,,,,,,," << r.status << '\n';
    return;
  }
  out << r.intervals << ',' << r.cells << ',' << r.cache_size << ','
      << r.depth << ',' << r.weights << ',' << fmt_double(r.sup_error)
      << ',' << fmt_double(r.error_bound) << ','
      << fmt_double(r.normalized_error) << ','
      << fmt_double(r.evaluator_deviation) << ',' << r.baseline_nodes
      << ',' << fmt_double(r.baseline_error) << ','
      << fmt_double(r.error_ratio) << ',' << r.status << '\n';
}

}  // namespace

void write_csv(const SweepResult& result, std::ostream& out) {
  out << "# cachenet sweep report v1\n";
  out << "# error_ratio = baseline_error / sup_error for a classical "
         "interpolant spending the same number of scalars (conservative "
         "yardstick)\n";
  out << "# depth counts hidden layers; wall-clock timings go to stderr "
         "and are never serialized here\n";
  out << "schema,function,N,T,m,cache_size,depth,weights,sup_error,"
         "error_bound,normalized_error,deviation,baseline_nodes,"
         "baseline_error,error_ratio,status\n";
  for (const RunRecord& r : result.records) write_row(out, r);
  for (const RunRecord& r : result.corpus_max) write_row(out, r);
}

FitResult fit_rate(const std::vector<RunRecord>& records) {
  std::vector<const RunRecord*> ok;
  std::map<int, int> budgets;
  for (const auto& r : records) {
    if (r.status != "ok" || !(r.sup_error > 0.0)) continue;
    ok.push_back(&r);
    budgets[r.depth_budget] += 1;
  }
  if (budgets.size() < 3) {
    throw FitError("fit: need records at three or more distinct budgets");
  }
  FitResult fit;
  fit.points = static_cast<int>(ok.size());
  double sum_cell = 0.0;
  double sum_depth = 0.0;
  for (const auto* r : ok) {
    sum_cell += std::log(r->sup_error / r->error_bound);
    const double n = r->depth_budget;
    sum_depth += std::log(r->sup_error * n * std::log(n));
  }
  fit.c_cell = std::exp(sum_cell / fit.points);
  fit.c_depth = std::exp(sum_depth / fit.points);
  double rss = 0.0;
  for (const auto* r : ok) {
    const double resid =
        std::log(r->sup_error / (fit.c_cell * r->error_bound));
    rss += resid * resid;
  }
  fit.rms_log_residual = std::sqrt(rss / fit.points);
  return fit;
}

namespace {

std::uint64_t parse_u64(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const unsigned long long v = std::stoull(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("corpus spec: bad " + what + " '" + s + "'");
  }
}

double parse_double(const std::string& s, const std::string& what) {
  try {
    std::size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ParameterError("corpus spec: bad " + what + " '" + s + "'");
  }
}

std::map<std::string, std::string> parse_kv(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("corpus spec: expected key=value, got '" + item +
                           "'");
    }
    kv[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return kv;
}

void reject_unknown(const std::map<std::string, std::string>& kv,
                    std::initializer_list<const char*> known) {
  for (const auto& [key, _] : kv) {
    if (std::find_if(known.begin(), known.end(), [&](const char* k) {
          return key == k;
        }) == known.end()) {
      throw ParameterError("corpus spec: unknown key '" + key + "'");
    }
  }
}

}  // namespace

std::vector<UnitBallSpec> parse_corpus_spec(const std::string& text) {
  const auto colon = text.find(':');
  const std::string kind = text.substr(0, colon);
  const std::string rest =
      colon == std::string::npos ? "" : text.substr(colon + 1);
  auto kv = parse_kv(rest);

  std::vector<UnitBallSpec> out;
  if (kind == "pwl-random") {
    reject_unknown(kv, {"pieces", "seed"});
    UnitBallSpec spec;
    spec.kind = UnitBallSpec::Kind::pwl_random;
    if (kv.count("pieces")) {
      spec.pieces = static_cast<int>(parse_u64(kv["pieces"], "pieces"));
    }
    if (kv.count("seed")) spec.seed = parse_u64(kv["seed"], "seed");
    out.push_back(spec);
  } else if (kind == "analytic") {
    reject_unknown(kv, {"family", "scale"});
    if (!kv.count("family")) {
      throw ParameterError("corpus spec: analytic needs family=");
    }
    UnitBallSpec spec;
    spec.kind = UnitBallSpec::Kind::named_analytic;
    spec.family = kv["family"];
    if (kv.count("scale")) spec.scale = parse_double(kv["scale"], "scale");
    out.push_back(spec);
  } else if (kind == "random-batch") {
    reject_unknown(kv, {"count", "pieces", "seed"});
    if (!kv.count("count")) {
      throw ParameterError("corpus spec: random-batch needs count=");
    }
    const auto count = parse_u64(kv["count"], "count");
    if (count == 0 || count > 100000) {
      throw ParameterError("corpus spec: bad batch count");
    }
    UnitBallSpec base;
    base.kind = UnitBallSpec::Kind::pwl_random;
    if (kv.count("pieces")) {
      base.pieces = static_cast<int>(parse_u64(kv["pieces"], "pieces"));
    }
    const std::uint64_t seed0 =
        kv.count("seed") ? parse_u64(kv["seed"], "seed") : 0;
    for (std::uint64_t i = 0; i < count; ++i) {
      UnitBallSpec spec = base;
      spec.seed = seed0 + i;
      out.push_back(spec);
    }
  } else {
    throw ParameterError("corpus spec: unknown kind '" + kind + "'");
  }
  return out;
}

std::vector<UnitBallSpec> parse_corpus_list(
    const std::vector<std::string>& texts) {
  std::vector<UnitBallSpec> out;
  for (const auto& text : texts) {
    auto batch = parse_corpus_spec(text);
    out.insert(out.end(), batch.begin(), batch.end());
  }
  return out;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("config: cannot open '" + path + "'");
  ExperimentConfig cfg;
  std::vector<std::string> corpus_texts;
  bool have_seed = false;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto begin = line.find_first_not_of(" \t\r");
    if (begin == std::string::npos) continue;
    const auto end = line.find_last_not_of(" \t\r");
    line = line.substr(begin, end - begin + 1);
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": expected key=value");
    }
    const auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      if (b == std::string::npos) return std::string();
      const auto e = s.find_last_not_of(" \t");
      return s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "budgets") {
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ',')) {
        cfg.depth_budgets.push_back(
            static_cast<int>(parse_u64(trim(item), "budget")));
      }
    } else if (key == "corpus") {
      corpus_texts.push_back(value);
    } else if (key == "grid") {
      cfg.grid = static_cast<int>(parse_u64(value, "grid"));
    } else if (key == "mode") {
      if (value == "exact") {
        cfg.mode = EmbedMode::exact_linear;
      } else if (value == "strict") {
        cfg.mode = EmbedMode::strict_relu;
      } else {
        throw ParameterError("config: mode must be exact or strict");
      }
    } else if (key == "prune_zero") {
      if (value == "1" || value == "true") {
        cfg.prune_zero = true;
      } else if (value == "0" || value == "false") {
        cfg.prune_zero = false;
      } else {
        throw ParameterError("config: prune_zero must be 0/1");
      }
    } else if (key == "feasibility") {
      if (value == "measured") {
        cfg.feasibility = Feasibility::measured;
      } else if (value == "worst-case") {
        cfg.feasibility = Feasibility::worst_case;
      } else {
        throw ParameterError(
            "config: feasibility must be measured or worst-case");
      }
    } else if (key == "seed") {
      cfg.seed = parse_u64(value, "seed");
      have_seed = true;
    } else if (key == "out") {
      cfg.out_path = value;
    } else {
      throw ParameterError("config line " + std::to_string(lineno) +
                           ": unknown key '" + key + "'");
    }
  }
  for (std::string text : corpus_texts) {
    // A file-level seed provides the default for batches that do not
    // pin their own.
    if (have_seed && text.rfind("random-batch", 0) == 0 &&
        text.find("seed=") == std::string::npos) {
      text += ",seed=" + std::to_string(cfg.seed);
    }
    auto batch = parse_corpus_spec(text);
    cfg.corpus.insert(cfg.corpus.end(), batch.begin(), batch.end());
  }
  return cfg;
}

}  // namespace cachenet
