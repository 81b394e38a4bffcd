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

#include <complex>
#include <span>

namespace msp::detail {

using cplx = std::complex<double>;

// J_k(beta) = int_0^tau t^k exp(i beta t) dt for k = 0..out.size()-1.
//
// |beta| tau < 1 uses the power series in (i beta tau); otherwise the
// upward recursion J_k = (tau^k e^{i beta tau} - k J_{k-1}) / (i beta).
void exp_moments(double beta, double tau, std::span<cplx> out);

cplx exp_moment0(double beta, double tau);

// D(x, y) = int_0^tau dt2 e^{i y t2} int_0^{t2} dt1 e^{i x t1}.
//
// For |x| tau below `kDividedDifferenceCutoff` the divided difference
// (J_0(x + y) - J_0(y)) / (i x) is replaced by its Taylor series
// sum_{n>=1} (i x)^{n-1} J_n(y) / n!.
inline constexpr double kDividedDifferenceCutoff = 1e-3;

cplx ordered_exp_integral(double x, double y, double tau);

// Same as ordered_exp_integral with J_0(x + y) and J_0(y) supplied.
cplx ordered_exp_integral(double x, double y, double tau, cplx j0_sum, cplx j0_y);

}  // namespace msp::detail
