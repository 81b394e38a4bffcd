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

#include "msp/assignment.hpp"

#include "msp/errors.hpp"
#include "ranked_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace msp {
namespace {

struct Hungarian {
  Matching matching;
  std::vector<double> u, v;  // duals for the min-cost form, 1-based
};

// Rectangular assignment (n <= m), minimising cost. Potentials method with
// Dijkstra-style augmentation, O(n^2 m).
Hungarian solve_min_cost(const Eigen::MatrixXd& cost) {
  const int n = static_cast<int>(cost.rows());
  const int m = static_cast<int>(cost.cols());
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> p(m + 1, 0), way(m + 1, 0);
  std::vector<char> used(m + 1);
  for (int i = 1; i <= n; ++i) {
    p[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::fill(used.begin(), used.end(), 0);
    do {
      used[j0] = 1;
      const int i0 = p[j0];
      double delta = inf;
      int j1 = 0;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[p[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (p[j0] != 0);
    do {
      const int j1 = way[j0];
      p[j0] = p[j1];
      j0 = j1;
    } while (j0);
  }
  Hungarian h;
  h.matching.column_of_row.assign(n, -1);
  for (int j = 1; j <= m; ++j)
    if (p[j] != 0) h.matching.column_of_row[p[j] - 1] = j - 1;
  h.u = std::move(u);
  h.v = std::move(v);
  return h;
}

double matched_weight(const Eigen::MatrixXd& w, const std::vector<int>& cols) {
  double s = 0.0;
  for (std::size_t r = 0; r < cols.size(); ++r) s += w(static_cast<Eigen::Index>(r), cols[r]);
  return s;
}

// Optimal weight with rows [0, fixed.size()) pinned to the given columns.
double constrained_optimum(const Eigen::MatrixXd& w, const std::vector<int>& fixed) {
  const auto rows = w.rows();
  const auto nfixed = static_cast<Eigen::Index>(fixed.size());
  double total = 0.0;
  std::vector<char> taken(static_cast<std::size_t>(w.cols()), 0);
  for (Eigen::Index r = 0; r < nfixed; ++r) {
    total += w(r, fixed[r]);
    taken[fixed[r]] = 1;
  }
  if (nfixed == rows) return total;
  std::vector<int> free_cols;
  for (Eigen::Index c = 0; c < w.cols(); ++c)
    if (!taken[c]) free_cols.push_back(static_cast<int>(c));
  Eigen::MatrixXd sub(rows - nfixed, static_cast<Eigen::Index>(free_cols.size()));
  for (Eigen::Index r = nfixed; r < rows; ++r)
    for (std::size_t c = 0; c < free_cols.size(); ++c)
      sub(r - nfixed, static_cast<Eigen::Index>(c)) = w(r, free_cols[c]);
  const double top = sub.maxCoeff();
  const Hungarian h = solve_min_cost((top - sub.array()).matrix());
  return total + matched_weight(sub, h.matching.column_of_row);
}

}  // namespace

IonPair IonPair::canonical(int a, int b) {
  if (a == b) fail(ErrorKind::kInvalidPair, "a gate needs two distinct ions");
  return a < b ? IonPair{a, b} : IonPair{b, a};
}

std::vector<Eigen::MatrixXd> reduced_kernels(const NullBasis& null, const CouplingKernel& kernels) {
  if (kernels.basis_size() != null.matrix.rows())
    fail(ErrorKind::kInvalidInput, "null basis and kernels disagree on the basis size");
  std::vector<Eigen::MatrixXd> out;
  out.reserve(kernels.per_mode.size());
  for (const auto& s : kernels.per_mode) {
    Eigen::MatrixXd r = null.matrix.transpose() * s * null.matrix;
    out.push_back(0.5 * (r + r.transpose()));
  }
  return out;
}

int candidate_depth(int touched_ions, int mode_count) {
  if (mode_count < 1) fail(ErrorKind::kInvalidInput, "mode count must be positive");
  const long pairs = static_cast<long>(touched_ions) * (touched_ions - 1) / 2;
  return static_cast<int>(std::max(1L, (pairs + mode_count - 1) / mode_count));
}

std::vector<Candidate> rank_candidates(const std::vector<Eigen::MatrixXd>& reduced, int nu) {
  if (nu < 1) fail(ErrorKind::kInvalidInput, "candidate depth must be >= 1");
  std::vector<Candidate> out;
  for (std::size_t p = 0; p < reduced.size(); ++p) {
    const Eigen::MatrixXd& r = reduced[p];
    if (nu > r.rows())
      fail(ErrorKind::kInsufficientDof, "null space of dimension " + std::to_string(r.rows()) +
                                            " cannot supply " + std::to_string(nu) +
                                            " candidates per mode");
    for (auto& pair : detail::ranked_eigenpairs(r, nu)) {
      Candidate c;
      c.mode = static_cast<int>(p);
      c.eigen_index = static_cast<int>(out.size() % static_cast<std::size_t>(nu)) + 1;
      c.eigenvalue = pair.value;
      c.vector = std::move(pair.vector);
      out.push_back(std::move(c));
    }
  }
  return out;
}

Matching max_weight_matching(const Eigen::MatrixXd& weights) {
  const auto n = weights.rows();
  const auto m = weights.cols();
  Matching result;
  if (n == 0) return result;
  if (n > m) fail(ErrorKind::kTooManyGates, "more rows than columns in the matching problem");
  if (!weights.allFinite()) fail(ErrorKind::kInvalidInput, "matching weights must be finite");

  const double top = weights.maxCoeff();
  const Eigen::MatrixXd cost = (top - weights.array()).matrix();
  const Hungarian h = solve_min_cost(cost);
  const double best = matched_weight(weights, h.matching.column_of_row);
  const double scale = std::max(1.0, weights.cwiseAbs().maxCoeff());
  const double tol = 1e-12 * scale * static_cast<double>(n + m);

  // Any optimal matching only uses edges that are tight for the optimal
  // duals, so the lexicographic search only has to look at those.
  std::vector<int> fixed;
  std::vector<char> taken(static_cast<std::size_t>(m), 0);
  for (Eigen::Index r = 0; r < n; ++r) {
    std::vector<int> tight;
    for (Eigen::Index c = 0; c < m; ++c) {
      if (taken[c]) continue;
      const double slack = cost(r, c) - h.u[r + 1] - h.v[c + 1];
      if (slack <= tol) tight.push_back(static_cast<int>(c));
    }
    int chosen = -1;
    if (tight.size() == 1) {
      chosen = tight.front();
    } else {
      for (int c : tight) {
        fixed.push_back(c);
        const bool ok = constrained_optimum(weights, fixed) >= best - tol;
        fixed.pop_back();
        if (ok) {
          chosen = c;
          break;
        }
      }
    }
    if (chosen < 0) chosen = h.matching.column_of_row[r];
    fixed.push_back(chosen);
    taken[chosen] = 1;
  }
  result.column_of_row = fixed;
  result.weight = matched_weight(weights, fixed);
  return result;
}

Assignment assign_gates(const std::vector<IonPair>& pairs, const std::vector<Candidate>& candidates,
                        const ModeSpectrum& spectrum) {
  Assignment a;
  if (pairs.empty()) return a;
  std::vector<IonPair> sorted;
  for (const auto& p : pairs) {
    const IonPair c = IonPair::canonical(p.first, p.second);
    if (c.first < 0 || c.second >= spectrum.ion_count())
      fail(ErrorKind::kInvalidPair, "ion index out of range");
    sorted.push_back(c);
  }
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
    fail(ErrorKind::kInvalidPair, "duplicate gate pair");
  const auto slots = static_cast<Eigen::Index>(candidates.size());
  if (static_cast<Eigen::Index>(sorted.size()) > slots)
    fail(ErrorKind::kTooManyGates, std::to_string(sorted.size()) + " gates but only " +
                                       std::to_string(slots) + " candidate slots");

  Eigen::MatrixXd w(static_cast<Eigen::Index>(sorted.size()), slots);
  for (std::size_t g = 0; g < sorted.size(); ++g) {
    for (Eigen::Index c = 0; c < slots; ++c) {
      const Candidate& cand = candidates[c];
      w(static_cast<Eigen::Index>(g), c) =
          std::abs(spectrum.lamb_dicke(sorted[g].first, cand.mode) *
                   spectrum.lamb_dicke(sorted[g].second, cand.mode) * cand.eigenvalue);
    }
    if (w.row(static_cast<Eigen::Index>(g)).maxCoeff() <= 0.0)
      fail(ErrorKind::kInfeasibleAssignment,
           "pair (" + std::to_string(sorted[g].first + 1) + ", " +
               std::to_string(sorted[g].second + 1) +
               ") has zero weight on every candidate");
  }

  const Matching m = max_weight_matching(w);
  a.total_weight = m.weight;
  int depth = 0;
  for (const auto& c : candidates) depth = std::max(depth, c.eigen_index);
  a.depth = depth;
  for (std::size_t g = 0; g < sorted.size(); ++g) {
    const int c = m.column_of_row[g];
    a.entries.push_back({sorted[g], c, candidates[c].mode, candidates[c].eigen_index,
                         candidates[c].eigenvalue, w(static_cast<Eigen::Index>(g), c)});
  }
  a.solve_order.resize(sorted.size());
  std::iota(a.solve_order.begin(), a.solve_order.end(), 0);
  std::stable_sort(a.solve_order.begin(), a.solve_order.end(),
                   [&](int x, int y) { return a.entries[x].weight < a.entries[y].weight; });
  return a;
}

}  // namespace msp
