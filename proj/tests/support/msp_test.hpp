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

#pragma once

#include <catch_amalgamated.hpp>

#include "msp/errors.hpp"
#include "msp/spectrum.hpp"
#include "msp/synthesis.hpp"

#include <map>
#include <mutex>
#include <random>
#include <tuple>

// Asserts that `expr` throws msp::Error of the given kind.
#define REQUIRE_THROWS_KIND(expr, error_kind)                   \
  do {                                                          \
    bool thrown_ = false;                                       \
    try {                                                       \
      (void)(expr);                                             \
    } catch (const msp::Error& e_) {                            \
      thrown_ = true;                                           \
      INFO(e_.what());                                          \
      REQUIRE(e_.kind() == msp::ErrorKind::error_kind);         \
    }                                                           \
    REQUIRE(thrown_);                                           \
  } while (0)

namespace msp::test {

inline const ModeSpectrum& fixture(int n) {
  static std::map<int, ModeSpectrum> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, load_fixture(n)).first;
  return it->second;
}

// Shared solver contexts on the fixtures, keyed by (n, tau, K).
inline const SolverContext& context(int n, double tau, int order = 0) {
  static std::map<std::tuple<int, double, int>, SolverContext> cache;
  static std::mutex mu;
  std::lock_guard lock(mu);
  const auto key = std::make_tuple(n, tau, order);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, SolverContext::build(fixture(n), tau, 0.1, order)).first;
  return it->second;
}

inline Eigen::VectorXd random_vector(std::mt19937_64& rng, Eigen::Index n) {
  std::normal_distribution<double> d;
  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
  return v;
}

inline GateSpec pairs(std::initializer_list<std::pair<int, int>> list) {
  GateSpec s;
  for (auto [a, b] : list) s.gates.push_back({a, b});
  return s;
}

}  // namespace msp::test
