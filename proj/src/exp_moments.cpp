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

#include "exp_moments.hpp"

#include <array>
#include <cmath>

namespace msp::detail {
namespace {

constexpr cplx kI{0.0, 1.0};
constexpr int kSeriesTermCap = 60;
constexpr int kDividedDifferenceTerms = 8;

}  // namespace

void exp_moments(double beta, double tau, std::span<cplx> out) {
  if (out.empty()) return;
  const double phase = beta * tau;
  if (std::abs(phase) < 1.0) {
    const cplx z{0.0, phase};
    for (std::size_t k = 0; k < out.size(); ++k) {
      // tau^{k+1} * sum_n z^n / (n! (n + k + 1))
      cplx sum = 0.0;
      cplx term = 1.0;  // z^n / n!
      for (int n = 0; n < kSeriesTermCap; ++n) {
        const cplx contrib = term / static_cast<double>(n + k + 1);
        sum += contrib;
        if (std::abs(contrib) < 1e-18 * std::abs(sum)) break;
        term *= z / static_cast<double>(n + 1);
      }
      out[k] = sum * std::pow(tau, static_cast<double>(k + 1));
    }
    return;
  }
  const cplx e = std::polar(1.0, phase);
  const cplx inv = 1.0 / (kI * beta);
  out[0] = (e - 1.0) * inv;
  double tau_k = 1.0;
  for (std::size_t k = 1; k < out.size(); ++k) {
    tau_k *= tau;
    out[k] = (tau_k * e - static_cast<double>(k) * out[k - 1]) * inv;
  }
}

cplx exp_moment0(double beta, double tau) {
  std::array<cplx, 1> j{};
  exp_moments(beta, tau, j);
  return j[0];
}

cplx ordered_exp_integral(double x, double y, double tau, cplx j0_sum, cplx j0_y) {
  if (std::abs(x) * tau >= kDividedDifferenceCutoff)
    return (j0_sum - j0_y) / (kI * x);
  std::array<cplx, kDividedDifferenceTerms + 1> j{};
  exp_moments(y, tau, j);
  cplx sum = 0.0;
  cplx factor = 1.0;  // (i x)^{n-1} / n!
  for (int n = 1; n <= kDividedDifferenceTerms; ++n) {
    factor /= static_cast<double>(n);
    sum += factor * j[n];
    factor *= kI * x;
  }
  return sum;
}

cplx ordered_exp_integral(double x, double y, double tau) {
  if (std::abs(x) * tau >= kDividedDifferenceCutoff)
    return ordered_exp_integral(x, y, tau, exp_moment0(x + y, tau), exp_moment0(y, tau));
  return ordered_exp_integral(x, y, tau, cplx{}, cplx{});
}

}  // namespace msp::detail
