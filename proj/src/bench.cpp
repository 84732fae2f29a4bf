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

#include "divsched/bench.hpp"

#include <atomic>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>
#include <thread>
#include <tuple>

#include <boost/math/distributions/students_t.hpp>

#include "divsched/distance.hpp"
#include "divsched/emit.hpp"
#include "divsched/gadget.hpp"
#include "divsched/records.hpp"

namespace divsched {

void parallel_for(int n, int jobs, const std::function<void(int)>& fn) {
  jobs = std::max(1, std::min(jobs, n));
  if (jobs == 1) {
    for (int i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<int> next{0};
  std::vector<std::exception_ptr> errors(n);
  std::vector<std::thread> workers;
  for (int w = 0; w < jobs; ++w)
    workers.emplace_back([&] {
      for (int i; (i = next++) < n;) {
        try {
          fn(i);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    });
  for (auto& t : workers) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

namespace {

RunRow run_one(const Fixture& fx, const TargetDesc& tgt, const BenchConfig& cfg, double gap, Method method,
               std::uint64_t seed) {
  RunRow row;
  row.fixture = fx.name;
  row.method = method;
  row.gap = gap;
  row.seed = seed;
  try {
    const Csp csp = build_csp(fx.program, tgt);
    DivConfig dc = cfg.base;
    dc.p = gap;
    dc.method = method;
    dc.seed = seed;
    const VariantPool pool = diversify(csp, dc);
    row.ok = true;
    row.pool_size = static_cast<int>(pool.solutions.size());
    row.optimum = pool.optimum;
    row.wall_time = pool.wall_time;
    row.records = pool_records(pool);
    if (pool.solutions.size() >= 2) {
      row.d_hd = pairwise_diversity(fx.program, pool.solutions, Metric::HD);
      row.d_ld = pairwise_diversity(fx.program, pool.solutions, Metric::LD);
      std::vector<AsmListing> listings;
      for (const auto& s : pool.solutions) listings.push_back(emit(fx.program, tgt, s));
      const auto report = survival_report(listings, cfg.gadget_len);
      row.srate_mean = report.mean();
      row.histogram = report.histogram;
    }
  } catch (const std::exception& e) {
    row.ok = false;
    row.error = e.what();
  }
  return row;
}

std::string fmt(double x) {
  std::ostringstream o;
  o.precision(6);
  o << x;
  return o.str();
}

/// Rows grouped by (fixture, method, gap) in first-seen order.
std::vector<std::vector<const RunRow*>> groups(std::span<const RunRow> rows) {
  std::map<std::tuple<std::string, int, double>, std::size_t> index;
  std::vector<std::vector<const RunRow*>> out;
  for (const auto& r : rows) {
    auto key = std::make_tuple(r.fixture, static_cast<int>(r.method), r.gap);
    auto [it, fresh] = index.emplace(key, out.size());
    if (fresh) out.emplace_back();
    out[it->second].push_back(&r);
  }
  return out;
}

MeanStd stat_of(const std::vector<const RunRow*>& g, double RunRow::*field) {
  std::vector<double> xs;
  for (const auto* r : g)
    if (r->ok) xs.push_back(r->*field);
  return mean_std(xs);
}

double pool_size_mean(const std::vector<const RunRow*>& g) {
  std::vector<double> xs;
  for (const auto* r : g)
    if (r->ok) xs.push_back(r->pool_size);
  return mean_std(xs).mean;
}

int ok_count(const std::vector<const RunRow*>& g) {
  int n = 0;
  for (const auto* r : g) n += r->ok;
  return n;
}

}  // namespace

std::vector<RunRow> run_bench(std::span<const Fixture> fixtures, const TargetDesc& tgt, const BenchConfig& cfg) {
  struct Task {
    const Fixture* fx;
    double gap;
    Method method;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (const auto& fx : fixtures)
    for (double gap : cfg.gaps)
      for (Method m : cfg.methods)
        for (int s = 1; s <= cfg.seeds; ++s) tasks.push_back({&fx, gap, m, static_cast<std::uint64_t>(s)});
  std::vector<RunRow> rows(tasks.size());
  parallel_for(static_cast<int>(tasks.size()), cfg.jobs, [&](int i) {
    const auto& t = tasks[i];
    rows[i] = run_one(*t.fx, tgt, cfg, t.gap, t.method, t.seed);
  });
  return rows;
}

MeanStd mean_std(std::span<const double> xs) {
  MeanStd r;
  if (xs.empty()) return r;
  r.mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  if (xs.size() < 2) return r;
  double ss = 0;
  for (double x : xs) ss += (x - r.mean) * (x - r.mean);
  r.stddev = std::sqrt(ss / static_cast<double>(xs.size() - 1));
  return r;
}

PairedTest paired_t_greater(std::span<const double> x, std::span<const double> y) {
  PairedTest out;
  if (x.size() != y.size() || x.size() < 2) return out;
  std::vector<double> diff;
  for (std::size_t i = 0; i < x.size(); ++i) diff.push_back(x[i] - y[i]);
  const auto ms = mean_std(diff);
  out.df = static_cast<int>(diff.size()) - 1;
  if (ms.stddev == 0) {
    out.t = ms.mean > 0 ? INFINITY : (ms.mean < 0 ? -INFINITY : 0.0);
    out.p = ms.mean > 0 ? 0.0 : 1.0;
    return out;
  }
  out.t = ms.mean / (ms.stddev / std::sqrt(static_cast<double>(diff.size())));
  boost::math::students_t dist(out.df);
  out.p = boost::math::cdf(boost::math::complement(dist, out.t));
  return out;
}

std::string runs_csv(std::span<const RunRow> rows) {
  std::ostringstream o;
  o << "fixture,method,gap,seed,status,pool_size,optimum,d_hd,d_ld,srate_mean,b0,b1,b2,b3,wall_s,error\n";
  for (const auto& r : rows) {
    o << r.fixture << ',' << to_string(r.method) << ',' << fmt(r.gap) << ',' << r.seed << ','
      << (r.ok ? "ok" : "failed") << ',' << r.pool_size << ',' << r.optimum << ',' << fmt(r.d_hd) << ','
      << fmt(r.d_ld) << ',' << fmt(r.srate_mean);
    for (long b : r.histogram) o << ',' << b;
    std::string err = r.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n') ch = ';';
    o << ',' << fmt(r.wall_time) << ',' << err << '\n';
  }
  return o.str();
}

std::string methods_csv(std::span<const RunRow> rows) {
  std::ostringstream o;
  o << "fixture,method,gap,runs,d_hd_mean,d_hd_std,d_ld_mean,d_ld_std,variants_mean,time_mean\n";
  for (const auto& g : groups(rows)) {
    const auto* r = g.front();
    const auto hd = stat_of(g, &RunRow::d_hd);
    const auto ld = stat_of(g, &RunRow::d_ld);
    o << r->fixture << ',' << to_string(r->method) << ',' << fmt(r->gap) << ',' << ok_count(g) << ',' << fmt(hd.mean)
      << ',' << fmt(hd.stddev) << ',' << fmt(ld.mean) << ',' << fmt(ld.stddev) << ',' << fmt(pool_size_mean(g)) << ','
      << fmt(stat_of(g, &RunRow::wall_time).mean) << '\n';
  }
  return o.str();
}

std::string gaps_csv(std::span<const RunRow> rows) {
  // One row per (fixture, method), one d_hd mean/std pair per gap.
  std::vector<double> gaps;
  for (const auto& r : rows)
    if (std::find(gaps.begin(), gaps.end(), r.gap) == gaps.end()) gaps.push_back(r.gap);
  std::ostringstream o;
  o << "fixture,method";
  for (double g : gaps) o << ",d_mean@" << fmt(g) << ",d_std@" << fmt(g) << ",variants@" << fmt(g);
  o << '\n';
  std::vector<std::pair<std::string, Method>> keys;
  for (const auto& r : rows) {
    std::pair<std::string, Method> key{r.fixture, r.method};
    if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
  }
  const auto grouped = groups(rows);
  for (const auto& [fixture, method] : keys) {
    o << fixture << ',' << to_string(method);
    for (double gap : gaps) {
      const std::vector<const RunRow*>* hit = nullptr;
      for (const auto& g : grouped)
        if (g.front()->fixture == fixture && g.front()->method == method && g.front()->gap == gap) hit = &g;
      if (hit == nullptr) {
        o << ",,,";
        continue;
      }
      const auto hd = stat_of(*hit, &RunRow::d_hd);
      o << ',' << fmt(hd.mean) << ',' << fmt(hd.stddev) << ',' << fmt(pool_size_mean(*hit));
    }
    o << '\n';
  }
  return o.str();
}

std::string survival_csv(std::span<const RunRow> rows) {
  std::ostringstream o;
  o << "fixture,method,gap,pairs,pct_0,pct_0_10,pct_10_40,pct_40_100,srate_mean\n";
  for (const auto& g : groups(rows)) {
    std::array<long, 4> total{};
    for (const auto* r : g)
      for (int b = 0; b < 4; ++b) total[b] += r->histogram[b];
    const long pairs = std::accumulate(total.begin(), total.end(), 0L);
    const auto* r = g.front();
    o << r->fixture << ',' << to_string(r->method) << ',' << fmt(r->gap) << ',' << pairs;
    for (long b : total) o << ',' << fmt(pairs == 0 ? 0.0 : 100.0 * static_cast<double>(b) / static_cast<double>(pairs));
    o << ',' << fmt(stat_of(g, &RunRow::srate_mean).mean) << '\n';
  }
  return o.str();
}

}  // namespace divsched
