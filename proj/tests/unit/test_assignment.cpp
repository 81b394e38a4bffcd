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

#include "msp_test.hpp"

#include "msp/assignment.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

using namespace msp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

// Exhaustive maximum over injective row -> column maps, lexicographically
// smallest column sequence among the optima.
Matching brute_force(const Eigen::MatrixXd& w) {
  const int n = static_cast<int>(w.rows());
  const int m = static_cast<int>(w.cols());
  Matching best;
  best.weight = -1.0;
  std::vector<int> cols(static_cast<std::size_t>(m));
  std::iota(cols.begin(), cols.end(), 0);
  std::vector<int> choice(static_cast<std::size_t>(n));
  std::vector<char> used(static_cast<std::size_t>(m), 0);
  std::function<void(int, double)> rec = [&](int r, double acc) {
    if (r == n) {
      if (acc > best.weight + 1e-12) {
        best.weight = acc;
        best.column_of_row = choice;
      }
      return;
    }
    for (int c = 0; c < m; ++c) {
      if (used[c]) continue;
      used[c] = 1;
      choice[r] = c;
      rec(r + 1, acc + w(r, c));
      used[c] = 0;
    }
  };
  rec(0, 0.0);
  return best;
}

Candidate slot(int mode, int lambda, double value) {
  Candidate c;
  c.mode = mode;
  c.eigen_index = lambda;
  c.eigenvalue = value;
  c.vector = Eigen::VectorXd::Ones(1);
  return c;
}

}  // namespace

TEST_CASE("candidate depth", "[assignment]") {
  CHECK(candidate_depth(5, 7) == 2);
  CHECK(candidate_depth(7, 7) == 3);
  CHECK(candidate_depth(2, 7) == 1);
  CHECK(candidate_depth(13, 13) == 6);
}

TEST_CASE("matching on the 3x3 example", "[assignment]") {
  Eigen::MatrixXd w(3, 3);
  w << 3, 1, 1, 1, 3, 1, 1, 1, 3;
  const Matching m = max_weight_matching(w);
  CHECK(m.column_of_row == std::vector<int>{0, 1, 2});
  CHECK(m.weight == 9.0);
}

TEST_CASE("matching ties resolve lexicographically", "[assignment]") {
  const Matching m = max_weight_matching(Eigen::MatrixXd::Ones(3, 5));
  CHECK(m.column_of_row == std::vector<int>{0, 1, 2});
  Eigen::MatrixXd w(2, 3);
  w << 1, 2, 2, 2, 1, 2;  // optima: (1,0), (1,2), (2,0)
  CHECK(max_weight_matching(w).column_of_row == std::vector<int>{1, 0});
}

TEST_CASE("matching equals exhaustive search on random instances", "[assignment]") {
  std::mt19937_64 rng(99);
  std::uniform_int_distribution<int> rows_d(1, 8), small(0, 4);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = rows_d(rng);
    const int m = std::uniform_int_distribution<int>(n, 8)(rng);
    Eigen::MatrixXd w(n, m);
    // Half the instances use small integers, which produce many ties.
    for (int r = 0; r < n; ++r)
      for (int c = 0; c < m; ++c) w(r, c) = trial % 2 ? u(rng) : small(rng);
    const Matching fast = max_weight_matching(w);
    const Matching slow = brute_force(w);
    INFO("trial " << trial);
    CHECK(fast.weight == slow.weight);
    if (trial % 2 == 0) CHECK(fast.column_of_row == slow.column_of_row);
    std::vector<int> cols = fast.column_of_row;
    std::sort(cols.begin(), cols.end());
    CHECK(std::adjacent_find(cols.begin(), cols.end()) == cols.end());
  }
}

TEST_CASE("more rows than columns", "[assignment]") {
  REQUIRE_THROWS_KIND(max_weight_matching(Eigen::MatrixXd::Ones(3, 2)), kTooManyGates);
}

TEST_CASE("reduced kernels", "[assignment]") {
  const auto& c = test::context(7, 300.0);
  REQUIRE(c.reduced.size() == 7);
  const int d = c.null.dimension();
  for (const auto& r : c.reduced) {
    CHECK(r.rows() == d);
    CHECK(r.cols() == d);
    CHECK((r - r.transpose()).cwiseAbs().maxCoeff() <= 1e-13 * r.cwiseAbs().maxCoeff());
  }
}

TEST_CASE("top eigenvalue is the maximal Rayleigh quotient over span(A)", "[assignment]") {
  const auto& c = test::context(7, 300.0);
  const auto candidates = rank_candidates(c.reduced, 1);
  std::mt19937_64 rng(8);
  for (int p : {0, 3, 6}) {
    const double lambda = candidates[p].eigenvalue;
    const auto& s = c.kernels.per_mode[p];
    // Randomised power iteration on the shifted form, in the sine basis.
    Eigen::VectorXd v = c.null.matrix * test::random_vector(rng, c.null.dimension());
    const double shift = std::abs(lambda) * 2.0;
    const double sign = lambda >= 0 ? 1.0 : -1.0;
    for (int it = 0; it < 5000; ++it) {
      Eigen::VectorXd w = c.null.matrix * (c.null.matrix.transpose() * (sign * (s * v) + shift * v));
      v = w.normalized();
    }
    double best = -1e300;
    for (int t = 0; t < 200; ++t) {
      Eigen::VectorXd x = c.null.matrix * test::random_vector(rng, c.null.dimension());
      x.normalize();
      best = std::max(best, sign * x.dot(s * x));
      CHECK(sign * x.dot(s * x) <= std::abs(lambda) * (1 + 1e-12));
    }
    CHECK(best < std::abs(lambda));
    CHECK_THAT(sign * v.dot(s * v), WithinRel(std::abs(lambda), 1e-6));
  }
}

TEST_CASE("candidates are ordered by modulus with deterministic signs", "[assignment]") {
  const auto& c = test::context(7, 300.0);
  const auto cands = rank_candidates(c.reduced, 3);
  REQUIRE(cands.size() == 21);
  for (int p = 0; p < 7; ++p) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> full(c.reduced[p]);
    std::vector<double> mods(full.eigenvalues().data(), full.eigenvalues().data() + full.eigenvalues().size());
    for (double& x : mods) x = std::abs(x);
    std::sort(mods.rbegin(), mods.rend());
    for (int l = 0; l < 3; ++l) {
      const Candidate& k = cands[3 * p + l];
      CHECK(k.mode == p);
      CHECK(k.eigen_index == l + 1);
      CHECK_THAT(std::abs(k.eigenvalue), WithinRel(mods[l], 1e-10));
      CHECK_THAT(k.vector.norm(), WithinAbs(1.0, 1e-12));
      Eigen::Index at = 0;
      k.vector.cwiseAbs().maxCoeff(&at);
      CHECK(k.vector[at] > 0);
      const Eigen::VectorXd residual = c.reduced[p] * k.vector - k.eigenvalue * k.vector;
      CHECK(residual.norm() < 1e-9 * mods[0]);
    }
    CHECK(std::abs(cands[3 * p].eigenvalue) >= std::abs(cands[3 * p + 1].eigenvalue));
  }
}

TEST_CASE("single pair takes the best candidate", "[assignment]") {
  const auto& c = test::context(7, 300.0);
  const auto cands = rank_candidates(c.reduced, 2);
  const Assignment a = assign_gates({{4, 2}}, cands, c.spectrum);
  REQUIRE(a.entries.size() == 1);
  CHECK(a.entries[0].pair == IonPair{2, 4});
  double best = 0.0;
  for (const auto& k : cands)
    best = std::max(best, std::abs(c.spectrum.lamb_dicke(2, k.mode) * c.spectrum.lamb_dicke(4, k.mode) * k.eigenvalue));
  CHECK(a.entries[0].weight == best);
  CHECK(a.depth == 2);
}

TEST_CASE("assignment is invariant to pair order and sorted by weight", "[assignment]") {
  const auto& c = test::context(7, 300.0);
  const auto cands = rank_candidates(c.reduced, 2);
  std::vector<IonPair> pairs;
  for (int i = 1; i <= 5; ++i)
    for (int j = i + 1; j <= 5; ++j) pairs.push_back({i, j});
  const Assignment a = assign_gates(pairs, cands, c.spectrum);
  std::vector<IonPair> shuffled = pairs;
  std::mt19937_64 rng(3);
  std::shuffle(shuffled.begin(), shuffled.end(), rng);
  for (auto& p : shuffled) std::swap(p.first, p.second);
  const Assignment b = assign_gates(shuffled, cands, c.spectrum);
  REQUIRE(a.entries.size() == 10);
  for (std::size_t g = 0; g < a.entries.size(); ++g) {
    CHECK(a.entries[g].pair == b.entries[g].pair);
    CHECK(a.entries[g].candidate == b.entries[g].candidate);
  }
  CHECK(a.solve_order == b.solve_order);
  for (std::size_t k = 0; k + 1 < a.solve_order.size(); ++k)
    CHECK(a.entries[a.solve_order[k]].weight <= a.entries[a.solve_order[k + 1]].weight);
  std::vector<int> used;
  for (const auto& e : a.entries) used.push_back(e.candidate);
  std::sort(used.begin(), used.end());
  CHECK(std::adjacent_find(used.begin(), used.end()) == used.end());

  // Optimality against the exhaustive search would be 14^10; compare with
  // the matching routine on the same weight matrix instead.
  Eigen::MatrixXd w(10, static_cast<Eigen::Index>(cands.size()));
  for (int g = 0; g < 10; ++g)
    for (std::size_t k = 0; k < cands.size(); ++k)
      w(g, static_cast<Eigen::Index>(k)) = std::abs(c.spectrum.lamb_dicke(a.entries[g].pair.first, cands[k].mode) *
                                                     c.spectrum.lamb_dicke(a.entries[g].pair.second, cands[k].mode) *
                                                     cands[k].eigenvalue);
  CHECK_THAT(a.total_weight, WithinRel(max_weight_matching(w).weight, 1e-15));
}

TEST_CASE("solve order ties break by pair", "[assignment]") {
  ModeSpectrum s;
  s.mode_frequencies = Eigen::Vector2d(10.0, 11.0);
  s.lamb_dicke = Eigen::MatrixXd::Constant(4, 2, 0.1);
  const std::vector<Candidate> cands{slot(0, 1, 2.0), slot(1, 1, 2.0)};
  const Assignment a = assign_gates({{2, 3}, {0, 1}}, cands, s);
  CHECK(a.entries[0].pair == IonPair{0, 1});
  CHECK(a.entries[0].candidate == 0);
  CHECK(a.entries[1].candidate == 1);
  CHECK(a.solve_order == std::vector<int>{0, 1});
}

TEST_CASE("assignment errors", "[assignment]") {
  ModeSpectrum s;
  s.mode_frequencies = Eigen::Vector2d(10.0, 11.0);
  s.lamb_dicke = Eigen::MatrixXd::Constant(4, 2, 0.1);
  const std::vector<Candidate> cands{slot(0, 1, 2.0), slot(1, 1, 2.0)};
  REQUIRE_THROWS_KIND(assign_gates({{0, 1}, {1, 2}, {2, 3}}, cands, s), kTooManyGates);
  REQUIRE_THROWS_KIND(assign_gates({{0, 0}}, cands, s), kInvalidPair);
  REQUIRE_THROWS_KIND(assign_gates({{0, 1}, {1, 0}}, cands, s), kInvalidPair);
  s.lamb_dicke.row(3).setZero();
  REQUIRE_THROWS_KIND(assign_gates({{0, 3}}, cands, s), kInfeasibleAssignment);
  REQUIRE_THROWS_KIND(rank_candidates({Eigen::MatrixXd::Identity(2, 2)}, 3), kInsufficientDof);
}
