// Copyright 2026 The msparallel Authors
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

#include "msp/sweep.hpp"

#include "msp/errors.hpp"
#include "msp/protocols.hpp"
#include "msp/run.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <set>
#include <thread>

namespace msp {
namespace {

constexpr double kChiCheck = 1e-6;

int pairs_in(Pattern pattern, int n) {
  switch (pattern) {
    case Pattern::kAllPairs: return n * (n - 1) / 2;
    case Pattern::kHalfDisjoint: return n / 2;
    case Pattern::kTwoDisjoint: return 2;
  }
  return 0;
}

// Uniform integer in [0, bound) by rejection, independent of the standard
// library's distribution implementation.
std::uint64_t draw(std::mt19937_64& rng, std::uint64_t bound) {
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return x % bound;
}

using PairList = std::vector<std::pair<int, int>>;

GateSpec to_spec(const PairList& pairs) {
  GateSpec s;
  for (const auto& [a, b] : pairs) s.gates.push_back({a, b});
  return s;
}

// Number of ways to pick k disjoint unordered pairs from n ions.
double disjoint_count(int n, int k) {
  double c = 1.0;
  for (int g = 0; g < k; ++g) c *= static_cast<double>((n - 2 * g) * (n - 2 * g - 1)) / 2.0;
  for (int g = 2; g <= k; ++g) c /= g;
  return c;
}

void enumerate_disjoint(int n, int k, int start, std::vector<char>& used, PairList& cur,
                        std::set<PairList>& out) {
  if (static_cast<int>(cur.size()) == k) {
    out.insert(cur);
    return;
  }
  // Pairs are generated in increasing order of their first ion.
  for (int a = start; a < n; ++a) {
    if (used[a]) continue;
    used[a] = 1;
    for (int b = a + 1; b < n; ++b) {
      if (used[b]) continue;
      used[b] = 1;
      cur.emplace_back(a, b);
      enumerate_disjoint(n, k, a + 1, used, cur, out);
      cur.pop_back();
      used[b] = 0;
    }
    used[a] = 0;
  }
}

double chi_deviation(const PulseSolution& s, const SolverContext& ctx) {
  const Eigen::MatrixXd chi = s.chi_matrix(ctx.kernels, ctx.spectrum);
  Eigen::MatrixXd expected = Eigen::MatrixXd::Zero(s.ion_count, s.ion_count);
  for (const auto& g : s.gates) {
    expected(g.pair.first, g.pair.second) = g.achieved_chi;
    expected(g.pair.second, g.pair.first) = g.achieved_chi;
  }
  return (chi - expected).cwiseAbs().maxCoeff();
}

PulseSolution solve_spec(const GateSpec& spec, const SolverContext& ctx, Protocol protocol) {
  switch (protocol) {
    case Protocol::kSequencing: return sequencing_synthesize(spec, ctx);
    case Protocol::kDisjoint: return disjoint_synthesize(spec, ctx);
    case Protocol::kCommon: break;
  }
  return synthesize(spec, ctx);
}

SweepPoint solve_with_context(const SweepConfig& config, const SolverContext& ctx, int n,
                              double tau, Pattern pattern) {
  SweepPoint p;
  p.ion_count = n;
  p.tau_us = tau;
  p.pattern = pattern;
  p.gates = pairs_in(pattern, n);
  const auto specs = pattern_instances(pattern, n, config.instances, config.seed);
  if (specs.empty()) {
    p.instances = 1;
    p.failed = 1;
    p.reason = "pattern " + std::string(to_string(pattern)) + " needs more ions";
    return p;
  }
  p.instances = static_cast<int>(specs.size());
  double mean_sum = 0.0;
  for (const auto& spec : specs) {
    try {
      const PulseSolution s = solve_spec(spec, ctx, config.protocol);
      const double dev = chi_deviation(s, ctx);
      if (!(dev < kChiCheck))
        fail(ErrorKind::kNumericalFailure,
             "chi check failed: deviation " + format_number(dev) + " rad");
      double mean = 0.0;
      for (const auto& g : s.gates) {
        const double gb = gate_gbar(g);
        mean += gb;
        p.max_gbar = std::max(p.max_gbar, gb);
      }
      mean_sum += mean / static_cast<double>(s.gates.size());
      if (p.rows.empty())
        for (std::size_t m = 0; m < s.gates.size(); ++m) {
          const auto& g = s.gates[m];
          p.rows.push_back({static_cast<int>(m) + 1, g.pair.first + 1, g.pair.second + 1,
                            g.mode + 1, g.eigen_index, gate_gbar(g)});
        }
    } catch (const Error& e) {
      ++p.failed;
      if (p.reason.empty()) p.reason = e.what();
    }
  }
  const int solved = p.instances - p.failed;
  if (solved > 0) p.mean_gbar = mean_sum / solved;
  return p;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c == '\n' ? ' ' : c;
  }
  return q + "\"";
}

std::string header_text(const std::vector<std::string>& header) {
  std::string s;
  for (const auto& h : header) s += "# " + h + "\n";
  return s;
}

std::string metrics(const SweepPoint& p) {
  if (!p.ok()) return ",";
  return format_number(p.mean_gbar) + "," + format_number(p.max_gbar);
}

std::string tail(const SweepPoint& p) {
  return std::to_string(p.instances) + "," + std::to_string(p.failed) + "," + csv_field(p.reason);
}

}  // namespace

std::vector<GateSpec> pattern_instances(Pattern pattern, int n, int count, std::uint64_t seed) {
  std::vector<GateSpec> out;
  if (pattern == Pattern::kAllPairs) {
    if (n >= 2) out.push_back(GateSpec::all_pairs(n));
    return out;
  }
  const int k = pairs_in(pattern, n);
  if (k < 1 || 2 * k > n) return out;
  std::set<PairList> chosen;
  if (disjoint_count(n, k) <= count) {
    std::vector<char> used(static_cast<std::size_t>(n), 0);
    PairList cur;
    enumerate_disjoint(n, k, 0, used, cur, chosen);
    for (const auto& c : chosen) out.push_back(to_spec(c));
    return out;
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(pattern)};
  std::mt19937_64 rng(seq);
  std::vector<int> perm(static_cast<std::size_t>(n));
  while (static_cast<int>(out.size()) < count) {
    std::iota(perm.begin(), perm.end(), 0);
    for (int i = 0; i < 2 * k; ++i)
      std::swap(perm[i], perm[i + static_cast<int>(draw(rng, static_cast<std::uint64_t>(n - i)))]);
    PairList pairs;
    for (int g = 0; g < k; ++g) pairs.push_back(std::minmax(perm[2 * g], perm[2 * g + 1]));
    std::sort(pairs.begin(), pairs.end());
    if (chosen.insert(pairs).second) out.push_back(to_spec(pairs));
  }
  return out;
}

SweepPoint solve_point(const SweepConfig& config, int ion_count, double tau_us, Pattern pattern) {
  try {
    const SolverContext ctx = SolverContext::build(config.chain(ion_count), tau_us,
                                                   config.guard_mhz, config.stabilization_order);
    return solve_with_context(config, ctx, ion_count, tau_us, pattern);
  } catch (const Error& e) {
    SweepPoint p;
    p.ion_count = ion_count;
    p.tau_us = tau_us;
    p.pattern = pattern;
    p.gates = pairs_in(pattern, ion_count);
    p.instances = 1;
    p.failed = 1;
    p.reason = e.what();
    return p;
  }
}

SweepResult sweep(const SweepConfig& config) {
  config.validate();
  SweepResult r;
  r.config = config;
  r.hash = config_hash(config);

  // One task per (N, tau); the context is shared by that task's patterns.
  struct Task {
    int n;
    double tau;
  };
  std::vector<Task> tasks;
  for (int n : config.ions)
    for (double t : config.tau_us) tasks.push_back({n, t});
  const std::size_t per_task = config.patterns.size();
  r.points.resize(tasks.size() * per_task);

  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t = next++; t < tasks.size(); t = next++) {
      const Task& task = tasks[t];
      try {
        const SolverContext ctx = SolverContext::build(
            config.chain(task.n), task.tau, config.guard_mhz, config.stabilization_order);
        for (std::size_t k = 0; k < per_task; ++k)
          r.points[t * per_task + k] =
              solve_with_context(config, ctx, task.n, task.tau, config.patterns[k]);
      } catch (const Error&) {
        for (std::size_t k = 0; k < per_task; ++k)
          r.points[t * per_task + k] = solve_point(config, task.n, task.tau, config.patterns[k]);
      }
    }
  };
  const int threads = std::min<int>(config.workers, static_cast<int>(tasks.size()));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  if (config.output_dir.empty()) return r;
  namespace fs = std::filesystem;
  const fs::path dir(config.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorKind::kConfigError, "cannot create output directory " + dir.string());
  std::vector<std::string> header{"config_hash=" + hex_hash(r.hash)};
  header.push_back(config.computed_chain
                       ? "provenance=computed chain axial_mhz=" + format_number(config.axial_mhz) +
                             " transverse_mhz=" + format_number(config.transverse_mhz) +
                             " eta_scale=" + format_number(config.lamb_dicke)
                       : "provenance=fixtures data/fixtures");
  auto write = [&](const fs::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    out << text;
    if (!out) fail(ErrorKind::kConfigError, "failed writing " + path.string());
    r.files.push_back(path.string());
  };
  switch (config.kind) {
    case SweepKind::kPowerVsIndex:
      for (const auto& p : r.points)
        write(dir / ("power_vs_index_n" + std::to_string(p.ion_count) + "_tau" +
                     format_number(p.tau_us) + "_" + std::string(to_string(p.pattern)) + ".csv"),
              power_vs_index_csv(p, header));
      break;
    case SweepKind::kPowerVsN:
      write(dir / "power_vs_n.csv", power_vs_n_csv(r, header));
      break;
    case SweepKind::kPowerVsTau:
      write(dir / "power_vs_tau.csv", power_vs_tau_csv(r, header));
      break;
  }
  return r;
}

std::string power_vs_index_csv(const SweepPoint& p, const std::vector<std::string>& header) {
  std::string s = header_text(header);
  if (!p.ok()) s += "# failed: " + p.reason + "\n";
  s += "gate_rank,ion_i,ion_j,mode_p,lambda,gbar\n";
  for (const auto& row : p.rows)
    s += std::to_string(row.gate_rank) + "," + std::to_string(row.ion_i) + "," +
         std::to_string(row.ion_j) + "," + std::to_string(row.mode_p) + "," +
         std::to_string(row.lambda) + "," + format_number(row.gbar) + "\n";
  return s;
}

std::string power_vs_n_csv(const SweepResult& r, const std::vector<std::string>& header) {
  std::string s = header_text(header);
  s += "n_ions,pattern,mean_gbar,max_gbar,n_gates,instances,failed,reason\n";
  for (const auto& p : r.points)
    s += std::to_string(p.ion_count) + "," + std::string(to_string(p.pattern)) + "," + metrics(p) +
         "," + std::to_string(p.gates) + "," + tail(p) + "\n";
  return s;
}

std::string power_vs_tau_csv(const SweepResult& r, const std::vector<std::string>& header) {
  std::string s = header_text(header);
  s += "n_ions,pattern,tau_us,mean_gbar,max_gbar,n_gates,instances,failed,reason\n";
  for (const auto& p : r.points)
    s += std::to_string(p.ion_count) + "," + std::string(to_string(p.pattern)) + "," +
         format_number(p.tau_us) + "," + metrics(p) + "," + std::to_string(p.gates) + "," +
         tail(p) + "\n";
  return s;
}

}  // namespace msp
