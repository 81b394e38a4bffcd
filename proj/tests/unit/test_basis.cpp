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

#include "msp/basis.hpp"
#include "msp/units.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numeric>

using namespace msp;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

using cplx = std::complex<double>;

// int_0^tau f(t) dt with Gauss-Kronrod on short panels, so every panel sees
// only a few oscillations.
template <typename F>
cplx panel_quadrature(F f, double tau, double max_omega) {
  const int panels = std::max(8, static_cast<int>(std::ceil(max_omega * tau / 4.0)));
  const double h = tau / panels;
  cplx sum = 0.0;
  for (int k = 0; k < panels; ++k) {
    const double a = k * h;
    const double b = a + h;
    const double re = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return f(t).real(); }, a, b, 0, 1e-15);
    const double im = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        [&](double t) { return f(t).imag(); }, a, b, 0, 1e-15);
    sum += cplx{re, im};
  }
  return sum;
}

cplx alpha_by_quadrature(double wl, double wp, double tau, int k) {
  const cplx ik = std::pow(cplx{0.0, 1.0}, k);
  return panel_quadrature(
      [&](double t) { return ik * std::pow(t, k) * std::sin(wl * t) * std::exp(cplx{0.0, wp * t}); },
      tau, std::abs(wl) + std::abs(wp));
}

ModeSpectrum single_mode(double mhz) {
  ModeSpectrum s;
  s.mode_frequencies = Eigen::VectorXd::Constant(1, mhz_to_angular(mhz));
  s.lamb_dicke = Eigen::MatrixXd::Constant(1, 1, 0.1);
  return s;
}

}  // namespace

TEST_CASE("basis window on the seven ion fixture", "[basis]") {
  const BasisSet b = build_basis(300.0, test::fixture(7), 0.1, 0);
  REQUIRE(b.size() == 127);
  CHECK(b.indices.front() == 783);
  CHECK(b.indices.back() == 909);
  for (int k = 0; k + 1 < b.size(); ++k) CHECK(b.indices[k + 1] == b.indices[k] + 1);
  CHECK_THAT(b.frequency(0), WithinRel(kTwoPi * 783 / 300.0, 1e-15));
}

TEST_CASE("basis window at 2000 us", "[basis]") {
  // ceil((2.70769 - 0.1) * 2000) = 5216, floor((2.93070 + 0.1) * 2000) = 6061.
  const BasisSet b = build_basis(2000.0, test::fixture(7), 0.1, 0);
  CHECK(b.indices.front() == 5216);
  CHECK(b.indices.back() == 6061);
  CHECK(b.size() == 846);
}

TEST_CASE("degenerate window is an empty basis", "[basis]") {
  REQUIRE_THROWS_KIND(build_basis(300.0, single_mode(2.93070), 0.0, 0), kEmptyBasis);
  CHECK(build_basis(300.0, single_mode(2.93070), 0.1, 0).size() > 0);
}

TEST_CASE("basis arguments are validated", "[basis]") {
  REQUIRE_THROWS_KIND(build_basis(0.0, test::fixture(7)), kInvalidInput);
  REQUIRE_THROWS_KIND(build_basis(300.0, test::fixture(7), -0.1), kInvalidInput);
  BasisSet b;
  b.tau = 10.0;
  b.indices = {3, 3};
  REQUIRE_THROWS_KIND(b.validate(), kInvalidInput);
  b.indices = {};
  REQUIRE_THROWS_KIND(b.validate(), kEmptyBasis);
}

TEST_CASE("basis functions are orthogonal over full periods", "[basis]") {
  const double tau = 300.0;
  const double wl = kTwoPi * 843 / tau;
  for (int lp : {783, 842, 844, 909}) {
    const cplx a = alpha_row(wl, kTwoPi * lp / tau, tau, 0);
    CHECK(std::abs(a) < 1e-12 * tau);
  }
  const cplx res = alpha_row(wl, wl, tau, 0);
  CHECK_THAT(res.real(), WithinAbs(0.0, 1e-12 * tau));
  CHECK_THAT(res.imag(), WithinRel(tau / 2, 1e-13));
}

TEST_CASE("alpha rows match quadrature", "[basis]") {
  const double tau = 300.0;
  const double wp = mhz_to_angular(2.8017);
  const double wl = mhz_to_angular(2.81);
  for (int k = 0; k <= 2; ++k) {
    INFO("k = " << k);
    const cplx closed = alpha_row(wl, wp, tau, k);
    const cplx quad = alpha_by_quadrature(wl, wp, tau, k);
    CHECK(std::abs(closed - quad) <= 1e-10 * std::abs(quad));
  }
}

TEST_CASE("alpha rows match quadrature near resonance", "[basis]") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> freq(15.0, 20.0), tau_d(20.0, 200.0);
  std::uniform_real_distribution<double> log_gap(-6.0, -1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const double tau = tau_d(rng);
    const double wl = freq(rng);
    const double wp = wl + (trial % 2 ? 1 : -1) * std::pow(10.0, log_gap(rng));
    for (int k = 0; k <= 2; ++k) {
      INFO("trial " << trial << " k " << k << " gap " << wp - wl);
      const cplx closed = alpha_row(wl, wp, tau, k);
      const cplx quad = alpha_by_quadrature(wl, wp, tau, k);
      CHECK(std::abs(closed - quad) <= 1e-10 * std::abs(quad));
    }
  }
}

TEST_CASE("constraint matrix shape", "[basis]") {
  const auto& s = test::fixture(7);
  CHECK(build_constraint_matrix(build_basis(300.0, s, 0.1, 0), s).row_count() == 14);
  const auto m2 = build_constraint_matrix(build_basis(300.0, s, 0.1, 2), s);
  CHECK(m2.row_count() == 42);
  CHECK(m2.col_count() == 127);
  CHECK(m2.rows.allFinite());
}

TEST_CASE("resonant column has rows (0, tau/2)", "[basis]") {
  // A mode exactly on the harmonic l = 850 of 1/tau.
  const double tau = 300.0;
  const ModeSpectrum s = single_mode(850.0 / tau);
  const BasisSet b = build_basis(tau, s, 0.1, 0);
  const auto it = std::find(b.indices.begin(), b.indices.end(), 850);
  REQUIRE(it != b.indices.end());
  const auto col = static_cast<Eigen::Index>(it - b.indices.begin());
  const auto m = build_constraint_matrix(b, s);
  CHECK(std::abs(m.rows(0, col)) < 1e-12 * tau);
  CHECK_THAT(m.rows(1, col), WithinRel(tau / 2, 1e-13));
}

TEST_CASE("null space dimensions on the seven ion fixture", "[basis]") {
  // For integer harmonics the real and imaginary rows of one mode are
  // proportional, so each (mode, order) pair removes one dimension.
  const auto& s = test::fixture(7);
  const int expected[] = {120, 113, 106};
  for (int k = 0; k <= 2; ++k) {
    INFO("K = " << k);
    const auto m = build_constraint_matrix(build_basis(300.0, s, 0.1, k), s);
    const NullBasis n = null_space(m);
    CHECK(n.rank == 7 * (k + 1));
    CHECK(n.dimension() == expected[k]);
    CHECK((m.rows * n.matrix).cwiseAbs().maxCoeff() < 1e-11 * m.rows.cwiseAbs().maxCoeff());
    const Eigen::MatrixXd gram = n.matrix.transpose() * n.matrix;
    CHECK((gram - Eigen::MatrixXd::Identity(gram.rows(), gram.cols())).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("duplicated constraint row is detected as rank deficient", "[basis]") {
  const auto& s = test::fixture(7);
  ConstraintMatrix m = build_constraint_matrix(build_basis(300.0, s, 0.1, 0), s);
  const NullBasis before = null_space(m);
  Eigen::MatrixXd rows(m.rows.rows() + 1, m.rows.cols());
  rows << m.rows, m.rows.row(4);
  m.rows = rows;
  const NullBasis after = null_space(m);
  CHECK(after.rank == before.rank);
  CHECK(after.dimension() == before.dimension());
}

TEST_CASE("too few basis functions", "[basis]") {
  ConstraintMatrix m;
  m.rows = Eigen::MatrixXd::Random(14, 10);
  REQUIRE_THROWS_KIND(null_space(m), kInsufficientDof);
  m.rows = Eigen::MatrixXd::Random(4, 4);
  REQUIRE_THROWS_KIND(null_space(m), kInsufficientDof);
}

TEST_CASE("null space vectors decouple every mode under quadrature", "[basis]") {
  const auto& s = test::fixture(7);
  const double tau = 60.0;
  const BasisSet b = build_basis(tau, s, 0.1, 0);
  const NullBasis n = null_space(build_constraint_matrix(b, s));
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 3; ++trial) {
    const Eigen::VectorXd v = n.matrix * test::random_vector(rng, n.dimension());
    const Eigen::VectorXd w = b.frequencies();
    for (int p = 0; p < s.mode_count(); ++p) {
      const double wp = s.mode_frequencies[p];
      const cplx a = panel_quadrature(
          [&](double t) {
            double g = 0.0;
            for (Eigen::Index l = 0; l < v.size(); ++l) g += v[l] * std::sin(w[l] * t);
            return g * std::exp(cplx{0.0, -wp * t});
          },
          tau, w.maxCoeff() + wp);
      CHECK(std::abs(a) < 1e-9 * v.norm() * tau);
    }
  }
}
