// SPDX-License-Identifier: Apache-2.0
//
// cachenet -- command line front end.
//
//   approximate      build one approximant and print its run record
//   sweep            run a corpus x budget experiment, emit the CSV report
//   enumerate-cache  list the profile cache for a given cell count
//   embed            compile a serialized adaptive net into a standard net
//
// Exit codes: 0 success, 2 parameter error, 3 infeasible budget, 4 I/O,
// 1 anything else.

#include <CLI11.hpp>

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <ostream>
#include <string>
#include <vector>

#include "cachenet/adaptive_net.hpp"
#include "cachenet/cache.hpp"
#include "cachenet/embed.hpp"
#include "cachenet/errors.hpp"
#include "cachenet/harness.hpp"
#include "cachenet/pwl.hpp"
#include "cachenet/relu_net.hpp"
#include "cachenet/serialize.hpp"

namespace {

using namespace cachenet;

EmbedMode parse_mode(const std::string& s) {
  if (s == "exact") return EmbedMode::exact_linear;
  if (s == "strict") return EmbedMode::strict_relu;
  throw ParameterError("mode must be 'exact' or 'strict'");
}

Feasibility parse_feasibility(const std::string& s) {
  if (s == "measured") return Feasibility::measured;
  if (s == "worst-case") return Feasibility::worst_case;
  throw ParameterError("feasibility must be 'measured' or 'worst-case'");
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void print_record(const RunRecord& r, std::ostream& os) {
  os << "function          " << r.function_id << '\n'
     << "depth_budget      " << r.depth_budget << '\n'
     << "status            " << r.status << '\n'
     << "intervals         " << r.intervals << '\n'
     << "cells             " << r.cells << '\n'
     << "cache_size        " << r.cache_size << '\n'
     << "depth             " << r.depth << '\n'
     << "weights           " << r.weights << '\n'
     << "sup_error         " << fmt(r.sup_error) << '\n'
     << "error_bound       " << fmt(r.error_bound) << '\n'
     << "normalized_error  " << fmt(r.normalized_error) << '\n'
     << "deviation         " << fmt(r.evaluator_deviation) << '\n'
     << "baseline_nodes    " << r.baseline_nodes << '\n'
     << "baseline_error    " << fmt(r.baseline_error) << '\n'
     << "error_ratio       " << fmt(r.error_ratio) << '\n'
     << "wall_ms           " << fmt(r.wall_ms) << '\n';
}

std::ofstream open_out(const std::string& path) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot open '" + path + "' for writing");
  return os;
}

// Mirror of the config-file convention: a batch entry without its own seed
// inherits the experiment seed.
std::vector<std::string> backfill_seed(std::vector<std::string> texts,
                                       std::uint64_t seed) {
  for (std::string& text : texts) {
    if (text.rfind("random-batch", 0) == 0 &&
        text.find("seed=") == std::string::npos) {
      text += ",seed=" + std::to_string(seed);
    }
  }
  return texts;
}

struct ApproximateArgs {
  std::string corpus;
  int depth = 0;
  int grid = 10000;
  std::string mode = "exact";
  std::string feasibility = "measured";
  bool prune_zero = true;
  std::uint64_t seed = 0;
  std::string out;
  std::string save_adaptive;
  std::string save_standard;
};

int cmd_approximate(const ApproximateArgs& a) {
  const auto specs = parse_corpus_list(backfill_seed({a.corpus}, a.seed));
  if (specs.size() != 1) {
    throw ParameterError(
        "approximate: the corpus spec must name exactly one function "
        "(use sweep for batches)");
  }

  ExperimentConfig cfg;
  cfg.depth_budgets = {a.depth};
  cfg.corpus = specs;
  cfg.grid = a.grid;
  cfg.mode = parse_mode(a.mode);
  cfg.prune_zero = a.prune_zero;
  cfg.feasibility = parse_feasibility(a.feasibility);
  cfg.seed = a.seed;
  cfg.validate();

  const RunRecord rec = run_single(specs.front(), a.depth, cfg);
  print_record(rec, std::cout);
  if (!a.out.empty()) {
    auto os = open_out(a.out);
    print_record(rec, os);
  }
  if (rec.status.rfind("infeasible", 0) == 0) return 3;
  if (rec.status != "ok") return 2;

  if (!a.save_adaptive.empty() || !a.save_standard.empty()) {
    const ChosenParams params = cfg.feasibility == Feasibility::worst_case
                                    ? choose_params(a.depth)
                                    : raw_params(a.depth);
    const PwlFunction f = make_unit_ball_function(specs.front());
    const AdaptiveNet anet =
        build_adaptive(f, params.intervals, params.cells);
    if (!a.save_adaptive.empty()) {
      save_json(to_json(anet), a.save_adaptive);
    }
    if (!a.save_standard.empty()) {
      const Embedded emb = embed_standard(anet, cfg.mode, cfg.prune_zero);
      save_json(to_json(emb.net), a.save_standard);
    }
  }
  return 0;
}

int cmd_sweep(const ExperimentConfig& cfg) {
  const SweepResult result = sweep(cfg);

  if (cfg.out_path.empty()) {
    write_csv(result, std::cout);
  } else {
    auto os = open_out(cfg.out_path);
    write_csv(result, os);
    if (!os) throw IoError("failed writing '" + cfg.out_path + "'");
    std::cerr << "report written to " << cfg.out_path << '\n';
  }

  double total_ms = 0.0;
  for (const auto& rec : result.records) total_ms += rec.wall_ms;
  std::cerr << result.records.size() << " runs, " << fmt(total_ms)
            << " ms build+measure time\n";
  try {
    const FitResult fit = fit_rate(result.records);
    std::cerr << "fit: sup_error ~ " << fmt(fit.c_cell)
              << " * 2/(T*m), ~ " << fmt(fit.c_depth)
              << " / (N ln N); rms log residual "
              << fmt(fit.rms_log_residual) << " over " << fit.points
              << " runs\n";
  } catch (const FitError& e) {
    std::cerr << "fit: skipped (" << e.what() << ")\n";
  }
  return 0;
}

int cmd_enumerate(int cells, bool as_json, const std::string& out) {
  const auto profiles = enumerate_profiles(cells);
  std::ofstream file;
  if (!out.empty()) file = open_out(out);
  std::ostream& os = out.empty() ? std::cout : file;

  if (as_json) {
    Json names = Json::array();
    for (const auto& p : profiles) names.push_back(p.digits());
    const Json j{{"type", "cache"},
                 {"cells", cells},
                 {"count", profiles.size()},
                 {"profiles", std::move(names)}};
    os << j.dump(2) << '\n';
  } else {
    for (const auto& p : profiles) os << p.digits() << '\n';
  }
  std::cerr << profiles.size() << " profiles for m=" << cells << '\n';
  return 0;
}

int cmd_embed(const std::string& in, const std::string& out,
              const std::string& plan_out, const std::string& mode,
              bool prune_zero) {
  const AdaptiveNet anet = adaptive_from_json(load_json(in));
  const Embedded emb = embed_standard(anet, parse_mode(mode), prune_zero);

  const ValidationReport report =
      validate_standard(emb.net, StandardShape{5, emb.net.depth()});
  std::cerr << "standard net: depth " << emb.net.depth() << ", "
            << weight_count(emb.net) << " weights, validation "
            << (report.ok ? "ok" : "FAILED") << '\n';
  for (const auto& v : report.violations) std::cerr << "  " << v << '\n';

  if (out.empty()) {
    std::cout << to_json(emb.net).dump(2) << '\n';
  } else {
    save_json(to_json(emb.net), out);
    std::cerr << "network written to " << out << '\n';
  }
  if (!plan_out.empty()) save_json(to_json(emb.plan), plan_out);
  return report.ok ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "width-5 cached-profile networks: build, embed, and benchmark "
      "piecewise-linear approximants"};
  app.set_version_flag("--version", "cachenet 0.1.0");
  app.require_subcommand(1);

  // approximate ----------------------------------------------------------
  ApproximateArgs ap;
  CLI::App* approx =
      app.add_subcommand("approximate", "build one approximant and report "
                                        "its errors");
  approx->add_option("--corpus", ap.corpus,
                     "function spec, e.g. pwl-random:pieces=19,seed=7 or "
                     "analytic:family=sine,scale=2")
      ->required();
  approx->add_option("--depth", ap.depth, "hidden-layer depth budget")
      ->required();
  approx->add_option("--grid", ap.grid, "evaluation grid points")
      ->capture_default_str();
  approx->add_option("--mode", ap.mode, "embedding mode")
      ->check(CLI::IsMember({"exact", "strict"}))
      ->capture_default_str();
  approx->add_option("--feasibility", ap.feasibility,
                     "budget interpretation")
      ->check(CLI::IsMember({"measured", "worst-case"}))
      ->capture_default_str();
  approx->add_flag("--prune-zero,!--no-prune-zero", ap.prune_zero,
                   "drop subnets of the all-zero profile");
  approx->add_option("--seed", ap.seed, "seed for batch corpus entries");
  approx->add_option("--out", ap.out, "also write the record to this file");
  approx->add_option("--save-adaptive", ap.save_adaptive,
                     "serialize the adaptive net to this JSON file");
  approx->add_option("--save-standard", ap.save_standard,
                     "serialize the embedded standard net to this JSON file");

  // sweep ------------------------------------------------------------------
  std::string sweep_config;
  std::vector<int> sweep_depths;
  std::vector<std::string> sweep_corpus;
  int sweep_grid = 10000;
  std::string sweep_mode = "exact";
  std::string sweep_feasibility = "measured";
  bool sweep_prune = true;
  std::uint64_t sweep_seed = 0;
  std::string sweep_out;
  CLI::App* sw = app.add_subcommand(
      "sweep", "run corpus x budgets, write the CSV report");
  sw->add_option("--config", sweep_config,
                 "key=value config file; flags below override it")
      ->check(CLI::ExistingFile);
  CLI::Option* o_depth =
      sw->add_option("--depth", sweep_depths, "depth budgets (repeatable)");
  CLI::Option* o_corpus =
      sw->add_option("--corpus", sweep_corpus, "function specs (repeatable)");
  CLI::Option* o_grid = sw->add_option("--grid", sweep_grid,
                                       "evaluation grid points");
  CLI::Option* o_mode = sw->add_option("--mode", sweep_mode, "embedding mode")
                            ->check(CLI::IsMember({"exact", "strict"}));
  CLI::Option* o_feas =
      sw->add_option("--feasibility", sweep_feasibility,
                     "budget interpretation")
          ->check(CLI::IsMember({"measured", "worst-case"}));
  CLI::Option* o_prune = sw->add_flag("--prune-zero,!--no-prune-zero",
                                      sweep_prune,
                                      "drop subnets of the all-zero profile");
  CLI::Option* o_seed =
      sw->add_option("--seed", sweep_seed, "seed for batch corpus entries");
  CLI::Option* o_out =
      sw->add_option("--out", sweep_out, "CSV output path (default stdout)");

  // enumerate-cache --------------------------------------------------------
  int enum_cells = 0;
  bool enum_json = false;
  std::string enum_out;
  CLI::App* en = app.add_subcommand("enumerate-cache",
                                    "list all profiles for a cell count");
  en->add_option("--cells", enum_cells, "cells per interval (1..16)")
      ->required();
  en->add_flag("--json", enum_json, "emit a JSON object instead of lines");
  en->add_option("--out", enum_out, "output path (default stdout)");

  // embed --------------------------------------------------------------
  std::string embed_in;
  std::string embed_out;
  std::string embed_plan;
  std::string embed_mode = "exact";
  bool embed_prune = true;
  CLI::App* em = app.add_subcommand(
      "embed", "compile a serialized adaptive net into a standard net");
  em->add_option("--in", embed_in, "adaptive net JSON file")
      ->required()
      ->check(CLI::ExistingFile);
  em->add_option("--out", embed_out, "network JSON path (default stdout)");
  em->add_option("--plan", embed_plan, "also write the layer plan here");
  em->add_option("--mode", embed_mode, "embedding mode")
      ->check(CLI::IsMember({"exact", "strict"}))
      ->capture_default_str();
  em->add_flag("--prune-zero,!--no-prune-zero", embed_prune,
               "drop subnets of the all-zero profile");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;  // bad arguments are parameter errors
  }

  try {
    if (approx->parsed()) return cmd_approximate(ap);
    if (sw->parsed()) {
      ExperimentConfig cfg;
      if (!sweep_config.empty()) cfg = load_config(sweep_config);
      if (o_seed->count() > 0) cfg.seed = sweep_seed;
      if (o_depth->count() > 0) cfg.depth_budgets = sweep_depths;
      if (o_corpus->count() > 0) {
        cfg.corpus =
            parse_corpus_list(backfill_seed(sweep_corpus, cfg.seed));
      }
      if (o_grid->count() > 0) cfg.grid = sweep_grid;
      if (o_mode->count() > 0) cfg.mode = parse_mode(sweep_mode);
      if (o_feas->count() > 0) cfg.feasibility =
          parse_feasibility(sweep_feasibility);
      if (o_prune->count() > 0) cfg.prune_zero = sweep_prune;
      if (o_out->count() > 0) cfg.out_path = sweep_out;
      cfg.validate();
      return cmd_sweep(cfg);
    }
    if (en->parsed()) return cmd_enumerate(enum_cells, enum_json, enum_out);
    if (em->parsed()) {
      return cmd_embed(embed_in, embed_out, embed_plan, embed_mode,
                       embed_prune);
    }
    return 2;  // unreachable: require_subcommand(1)
  } catch (const InfeasibleBudgetError& e) {
    std::cerr << "error: " << e.what() << " (min feasible "
              << e.min_feasible() << ", next feasible " << e.next_feasible()
              << ")\n";
    return 3;
  } catch (const IoError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 4;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
