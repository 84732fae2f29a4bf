// Copyright 2026 The divsched Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// Command-line driver: compile, diversify, analyze, bench.

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "divsched/bench.hpp"
#include "divsched/distance.hpp"
#include "divsched/diversify.hpp"
#include "divsched/emit.hpp"
#include "divsched/engine.hpp"
#include "divsched/error.hpp"
#include "divsched/gadget.hpp"
#include "divsched/ir.hpp"
#include "divsched/model.hpp"
#include "divsched/records.hpp"
#include "divsched/target.hpp"
#include "divsched/version.hpp"

namespace fs = std::filesystem;
using namespace divsched;

namespace {

constexpr int kExitError = 1;
constexpr int kExitInput = 2;
constexpr int kExitUnsat = 3;
constexpr int kExitTimeout = 4;

/// Ends the command with an exit code and a message for stderr.
struct Exit {
  int code;
  std::string message;
};

std::string default_out() {
  const char* env = std::getenv("DIVSCHED_OUT");
  return env != nullptr && *env != '\0' ? env : "divsched-out";
}

Program load_program(const std::string& path) {
  try {
    return parse_program(read_file(path));
  } catch (const Error& e) {
    throw Exit{kExitInput, path + ": " + e.what()};
  }
}

TargetDesc load_target_file(const std::string& path) {
  if (path.empty()) return default_target();
  try {
    return load_target(read_file(path));
  } catch (const Error& e) {
    throw Exit{kExitInput, path + ": " + e.what()};
  }
}

Csp make_csp(const Program& prog, const TargetDesc& tgt) {
  try {
    return build_csp(prog, tgt);
  } catch (const UnschedulableBlock& e) {
    throw Exit{kExitUnsat, e.what()};
  } catch (const SemanticError& e) {
    throw Exit{kExitInput, e.what()};
  }
}

std::string joined_args(int argc, char** argv) {
  std::string out;
  for (int i = 0; i < argc; ++i) out += (i ? " " : "") + std::string(argv[i]);
  return out;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

// compile -------------------------------------------------------------------

struct CompileOpts {
  std::string ir;
  std::string target;
  double time_limit = 60;
  std::uint64_t seed = 1;
  std::string out;
};

int cmd_compile(const CompileOpts& o) {
  const Program prog = load_program(o.ir);
  const TargetDesc tgt = load_target_file(o.target);
  const Csp csp = make_csp(prog, tgt);
  SearchConfig sc;
  sc.time_limit = o.time_limit;
  sc.seed = o.seed;
  const auto res = solve_optimal(csp, sc);
  if (!res.solution) {
    if (res.status == SearchStatus::Unsat) throw Exit{kExitUnsat, "no feasible schedule"};
    throw Exit{kExitTimeout, "time limit reached before any solution"};
  }
  const std::string text = to_text(emit(prog, tgt, *res.solution));
  if (!o.out.empty()) write_file(o.out, text);
  std::cout << text;
  std::cout << "# cost " << res.solution->cost << (res.status == SearchStatus::Optimal ? " optimal" : " feasible")
            << "\n# nodes " << res.stats.nodes << " failures " << res.stats.failures << " time "
            << fmt(res.stats.elapsed) << "s\n";
  return 0;
}

// diversify -----------------------------------------------------------------

struct DiversifyOpts {
  std::string ir;
  std::string target;
  DivConfig cfg;
  std::string metric = "hd";
  std::string method = "lns";
  int seeds = 0;  // 0: just cfg.seed
  int jobs = 1;
  std::string out;
};

struct SeedRun {
  std::uint64_t seed = 0;
  int code = 0;
  std::string message;
  std::string summary;
};

SeedRun diversify_one(const DiversifyOpts& o, const Program& prog, const TargetDesc& tgt, const Csp& csp,
                      std::uint64_t seed, const fs::path& dir, const std::string& command) {
  SeedRun run;
  run.seed = seed;
  DivConfig cfg = o.cfg;
  cfg.seed = seed;
  VariantPool pool;
  try {
    pool = diversify(csp, cfg);
  } catch (const Unsatisfiable& e) {
    run.code = kExitUnsat;
    run.message = e.what();
    return run;
  } catch (const Error& e) {
    run.code = kExitTimeout;
    run.message = e.what();
    return run;
  }
  fs::create_directories(dir);
  write_file(dir / "program.ir", serialize(prog));
  write_file(dir / "target.tgt", serialize(tgt));
  write_file(dir / "pool.jsonl", pool_records(pool));
  ordered_json outputs = ordered_json::array({"program.ir", "target.tgt", "pool.jsonl", "manifest.json"});
  for (std::size_t i = 0; i < pool.solutions.size(); ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "variant_%03zu.s", i);
    write_file(dir / name, to_text(emit(prog, tgt, pool.solutions[i])));
    outputs.push_back(name);
  }
  const double d =
      pool.solutions.size() >= 2 ? pairwise_diversity(prog, pool.solutions, cfg.metric) : 0.0;

  ordered_json m;
  m["tool"] = "divsched";
  m["version"] = kVersion;
  m["command"] = command;
  m["fixture"] = o.ir;
  m["target"] = o.target.empty() ? "builtin:toy" : o.target;
  m["config"] = config_json(cfg);
  m["seed"] = seed;
  m["optimum"] = pool.optimum;
  m["optimum_proven"] = pool.optimum_proven;
  m["cost_bound"] = pool.cost_bound;
  m["pool_size"] = pool.solutions.size();
  m["pool_incomplete"] = pool.incomplete();
  m["stop_reason"] = to_string(pool.stop);
  m["mean_pairwise_d"] = d;
  m["wall_time"] = pool.wall_time;
  ordered_json iters = ordered_json::array();
  for (const auto& p : pool.provenance)
    iters.push_back({{"iteration", p.iteration}, {"restarts", p.restarts}, {"attempts", p.attempts}});
  m["iterations"] = iters;
  m["outputs"] = outputs;
  write_file(dir / "manifest.json", m.dump(2) + "\n");

  run.summary = "seed " + std::to_string(seed) + ": pool " + std::to_string(pool.solutions.size()) + "/" +
                std::to_string(cfg.k) + " (" + to_string(pool.stop) + "), optimum " + std::to_string(pool.optimum) +
                ", mean " + to_string(cfg.metric) + " " + fmt(d) + ", " + fmt(pool.wall_time) + "s -> " +
                dir.string();
  return run;
}

int cmd_diversify(DiversifyOpts o, const std::string& command) {
  try {
    o.cfg.metric = parse_metric(o.metric);
    o.cfg.method = parse_method(o.method);
    o.cfg.validate();
  } catch (const std::exception& e) {
    throw Exit{kExitInput, e.what()};
  }
  const Program prog = load_program(o.ir);
  const TargetDesc tgt = load_target_file(o.target);
  const Csp csp = make_csp(prog, tgt);
  const fs::path out = o.out.empty() ? fs::path(default_out()) : fs::path(o.out);

  std::vector<std::uint64_t> seeds;
  if (o.seeds <= 0)
    seeds.push_back(o.cfg.seed);
  else
    for (int s = 0; s < o.seeds; ++s) seeds.push_back(o.cfg.seed + s);
  std::vector<SeedRun> runs(seeds.size());
  parallel_for(static_cast<int>(seeds.size()), o.jobs, [&](int i) {
    fs::path dir = o.seeds <= 0 ? out : out / ("seed_" + std::to_string(seeds[i]));
    runs[i] = diversify_one(o, prog, tgt, csp, seeds[i], dir, command);
  });
  int code = 0;
  for (const auto& r : runs) {
    if (r.code != 0) {
      std::cerr << "divsched: seed " << r.seed << ": " << r.message << "\n";
      code = std::max(code, r.code);
    } else {
      std::cout << r.summary << "\n";
    }
  }
  return code;
}

// analyze -------------------------------------------------------------------

struct AnalyzeOpts {
  std::string dir;
  bool gadgets = false;
  bool distances = false;
  bool matrix = false;
  int max_len = kDefaultGadgetLen;
  std::string out;
};

int cmd_analyze(const AnalyzeOpts& o) {
  const fs::path dir(o.dir);
  const Program prog = load_program((dir / "program.ir").string());
  const TargetDesc tgt = load_target_file((dir / "target.tgt").string());
  const Csp csp = make_csp(prog, tgt);
  std::vector<Solution> pool;
  try {
    pool = read_pool_records(read_file(dir / "pool.jsonl"));
  } catch (const Error& e) {
    throw Exit{kExitInput, (dir / "pool.jsonl").string() + ": " + e.what()};
  }
  for (std::size_t i = 0; i < pool.size(); ++i) {
    std::vector<std::string> why;
    if (!check_solution(csp, pool[i], &why))
      throw Exit{kExitInput, "record " + std::to_string(i) + " is not a valid schedule: " + why.front()};
  }
  double gap = 0;
  std::string fixture = prog.name;
  if (fs::exists(dir / "manifest.json")) {
    try {
      auto m = nlohmann::json::parse(read_file(dir / "manifest.json"));
      gap = m.at("config").at("p").get<double>();
    } catch (const std::exception& e) {
      throw Exit{kExitInput, (dir / "manifest.json").string() + ": " + e.what()};
    }
  }
  if (pool.size() < 2)
    throw Exit{kExitError, "PoolTooSmall: pool has " + std::to_string(pool.size()) +
                               " variant(s); pairwise reports need at least two"};

  const bool both = !o.gadgets && !o.distances;
  const fs::path out = o.out.empty() ? dir : fs::path(o.out);
  fs::create_directories(out);
  if (o.distances || both) {
    std::ostringstream csv;
    csv << "metric,variants,pairs,mean,min\n";
    const long pairs = static_cast<long>(pool.size() * (pool.size() - 1) / 2);
    for (Metric m : {Metric::HD, Metric::LD}) {
      const double mean = pairwise_diversity(prog, pool, m);
      const int lo = min_pairwise(prog, pool, m);
      csv << to_string(m) << ',' << pool.size() << ',' << pairs << ',' << fmt(mean) << ',' << lo << '\n';
      std::cout << to_string(m) << ": mean " << fmt(mean) << ", min " << lo << " over " << pairs << " pairs\n";
    }
    write_file(out / "distances.csv", csv.str());
  }
  if (o.gadgets || both) {
    std::vector<AsmListing> listings;
    for (const auto& s : pool) listings.push_back(emit(prog, tgt, s));
    const auto report = survival_report(listings, o.max_len);
    std::ostringstream csv;
    csv << "fixture,gap,pairs,pct_0,pct_0_10,pct_10_40,pct_40_100,srate_mean\n";
    const double pairs = static_cast<double>(report.pairs.size());
    csv << fixture << ',' << fmt(gap) << ',' << report.pairs.size();
    for (long b : report.histogram) csv << ',' << fmt(100.0 * static_cast<double>(b) / pairs);
    csv << ',' << fmt(report.mean()) << '\n';
    write_file(out / "survival.csv", csv.str());
    if (o.matrix) write_file(out / "srate_matrix.csv", pair_matrix_csv(report));
    std::cout << "srate: mean " << fmt(report.mean()) << ", buckets";
    for (int b = 0; b < 4; ++b) std::cout << ' ' << kBucketNames[b] << '=' << report.histogram[b];
    std::cout << " over " << report.pairs.size() << " ordered pairs\n";
  }
  return 0;
}

// bench ---------------------------------------------------------------------

struct BenchOpts {
  std::string suite;
  std::string target;
  std::string gaps = "0,5,10,20";
  std::string methods = "lns,rs";
  std::string metric = "hd";
  BenchConfig cfg;
  std::string out;
};

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  for (std::string item; std::getline(in, item, ',');)
    if (!item.empty()) out.push_back(item);
  return out;
}

int cmd_bench(BenchOpts o, const std::string& command) {
  try {
    o.cfg.gaps.clear();
    for (const auto& g : split_csv(o.gaps)) o.cfg.gaps.push_back(std::stod(g) / 100.0);
    o.cfg.methods.clear();
    for (const auto& m : split_csv(o.methods)) o.cfg.methods.push_back(parse_method(m));
    o.cfg.base.metric = parse_metric(o.metric);
    o.cfg.base.validate();
    if (o.cfg.gaps.empty() || o.cfg.methods.empty() || o.cfg.seeds < 1)
      throw std::invalid_argument("need at least one gap, method and seed");
  } catch (const std::exception& e) {
    throw Exit{kExitInput, e.what()};
  }
  if (!fs::is_directory(o.suite)) throw Exit{kExitInput, o.suite + ": not a directory"};
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(o.suite))
    if (e.is_regular_file() && e.path().extension() == ".ir") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  if (files.empty()) throw Exit{kExitInput, o.suite + ": no .ir fixtures"};
  std::vector<Fixture> fixtures;
  for (const auto& f : files) fixtures.push_back({f.stem().string(), load_program(f.string())});
  const TargetDesc tgt = load_target_file(o.target);

  const auto rows = run_bench(fixtures, tgt, o.cfg);
  const fs::path out = o.out.empty() ? fs::path(default_out()) : fs::path(o.out);
  fs::create_directories(out);
  write_file(out / "runs.csv", runs_csv(rows));
  write_file(out / "methods.csv", methods_csv(rows));
  write_file(out / "gaps.csv", gaps_csv(rows));
  write_file(out / "survival.csv", survival_csv(rows));

  ordered_json m;
  m["tool"] = "divsched";
  m["version"] = kVersion;
  m["command"] = command;
  m["suite"] = o.suite;
  ordered_json names = ordered_json::array();
  for (const auto& f : fixtures) names.push_back(f.name);
  m["fixtures"] = names;
  m["gaps"] = o.cfg.gaps;
  ordered_json methods = ordered_json::array();
  for (Method x : o.cfg.methods) methods.push_back(to_string(x));
  m["methods"] = methods;
  m["seeds"] = o.cfg.seeds;
  m["config"] = config_json(o.cfg.base);
  m["outputs"] = {"runs.csv", "methods.csv", "gaps.csv", "survival.csv"};
  write_file(out / "manifest.json", m.dump(2) + "\n");

  int failed = 0;
  for (const auto& r : rows)
    if (!r.ok) {
      ++failed;
      std::cerr << "divsched: " << r.fixture << " gap " << r.gap << " " << to_string(r.method) << " seed " << r.seed
                << ": " << r.error << "\n";
    }
  std::cout << methods_csv(rows);
  std::cout << rows.size() << " runs, " << failed << " failed -> " << out.string() << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Diversifying instruction scheduler and register allocator"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  CompileOpts co;
  auto* compile = app.add_subcommand("compile", "Emit the optimal schedule of a program");
  compile->add_option("ir", co.ir, "Program file")->required();
  compile->add_option("--target", co.target, "Target description (default: builtin toy target)");
  compile->add_option("--time-limit", co.time_limit, "Seconds")->check(CLI::PositiveNumber);
  compile->add_option("--seed", co.seed, "Search seed");
  compile->add_option("-o,--out", co.out, "Also write the listing to this file");

  DiversifyOpts dv;
  auto* diversify_cmd = app.add_subcommand("diversify", "Generate a pool of diverse near-optimal variants");
  diversify_cmd->add_option("ir", dv.ir, "Program file")->required();
  diversify_cmd->add_option("--target", dv.target, "Target description");
  diversify_cmd->add_option("--variants", dv.cfg.k, "Pool size K, optimum included")->capture_default_str();
  diversify_cmd->add_option("--gap", dv.cfg.p, "Optimality gap as a fraction")->capture_default_str();
  diversify_cmd->add_option("--mindist", dv.cfg.h, "Minimum pairwise distance")->capture_default_str();
  diversify_cmd->add_option("--metric", dv.metric, "hd or ld")->capture_default_str();
  diversify_cmd->add_option("--method", dv.method, "lns, rs or maxdiv")->capture_default_str();
  diversify_cmd->add_option("--relax-rate", dv.cfg.relax_rate, "LNS destroy probability")->capture_default_str();
  diversify_cmd->add_option("--fail-limit", dv.cfg.fail_limit, "Failures per restart")->capture_default_str();
  diversify_cmd->add_option("--time-limit", dv.cfg.time_limit, "Seconds per run")->capture_default_str();
  diversify_cmd->add_option("--seed", dv.cfg.seed, "Seed (first seed with --seeds)")->capture_default_str();
  diversify_cmd->add_option("--seeds", dv.seeds, "Run this many consecutive seeds, one subdirectory each");
  diversify_cmd->add_option("--jobs", dv.jobs, "Parallel runs with --seeds")->check(CLI::PositiveNumber);
  diversify_cmd->add_option("--out", dv.out, "Output directory (default: $DIVSCHED_OUT or divsched-out)");

  AnalyzeOpts an;
  auto* analyze = app.add_subcommand("analyze", "Distance and gadget survival reports for a pool");
  analyze->add_option("pool-dir", an.dir, "Directory written by diversify")->required();
  analyze->add_flag("--gadgets", an.gadgets, "Gadget survival report");
  analyze->add_flag("--distances", an.distances, "Pairwise distance summary");
  analyze->add_flag("--matrix", an.matrix, "Also dump the per-pair srate matrix");
  analyze->add_option("--max-gadget-len", an.max_len, "Longest gadget")->check(CLI::PositiveNumber);
  analyze->add_option("--out", an.out, "Report directory (default: the pool directory)");

  BenchOpts bo;
  auto* bench = app.add_subcommand("bench", "Sweep fixtures x gaps x methods x seeds");
  bench->add_option("suite-dir", bo.suite, "Directory of .ir fixtures")->required();
  bench->add_option("--target", bo.target, "Target description");
  bench->add_option("--gaps", bo.gaps, "Optimality gaps in percent")->capture_default_str();
  bench->add_option("--methods", bo.methods, "Comma-separated methods")->capture_default_str();
  bench->add_option("--metric", bo.metric, "hd or ld")->capture_default_str();
  bench->add_option("--seeds", bo.cfg.seeds, "Seeds 1..N")->capture_default_str();
  bench->add_option("--variants", bo.cfg.base.k, "Pool size K")->capture_default_str();
  bench->add_option("--mindist", bo.cfg.base.h, "Minimum pairwise distance")->capture_default_str();
  bench->add_option("--relax-rate", bo.cfg.base.relax_rate, "LNS destroy probability")->capture_default_str();
  bench->add_option("--fail-limit", bo.cfg.base.fail_limit, "Failures per restart")->capture_default_str();
  bench->add_option("--time-limit", bo.cfg.base.time_limit, "Seconds per run")->capture_default_str();
  bench->add_option("--max-gadget-len", bo.cfg.gadget_len, "Longest gadget")->check(CLI::PositiveNumber);
  bench->add_option("--jobs", bo.cfg.jobs, "Parallel runs")->check(CLI::PositiveNumber);
  bench->add_option("--out", bo.out, "Output directory (default: $DIVSCHED_OUT or divsched-out)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitInput;
  }

  const std::string command = joined_args(argc, argv);
  try {
    if (*compile) return cmd_compile(co);
    if (*diversify_cmd) return cmd_diversify(dv, command);
    if (*analyze) return cmd_analyze(an);
    if (*bench) return cmd_bench(bo, command);
  } catch (const Exit& e) {
    std::cerr << "divsched: " << e.message << "\n";
    return e.code;
  } catch (const std::exception& e) {
    std::cerr << "divsched: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
