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

#include "msp/oracle.hpp"
#include "msp/units.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <numbers>

using namespace msp;
using namespace msp::oracle;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace {

std::complex<double> reference_alpha(const Waveform& g, double omega) {
  const double tau = g.tau();
  const int panels = static_cast<int>(std::ceil((g.max_frequency() + omega) * tau / 4.0)) + 4;
  const double h = tau / panels;
  std::complex<double> sum = 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
  for (int k = 0; k < panels; ++k) {
    const double a = k * h;
    sum += std::complex<double>{
        GK::integrate([&](double t) { return g(t) * std::cos(omega * t); }, a, a + h, 0, 1e-15),
        -GK::integrate([&](double t) { return g(t) * std::sin(omega * t); }, a, a + h, 0, 1e-15)};
  }
  return sum;
}

}  // namespace

TEST_CASE("zero waveform", "[oracle]") {
  const Waveform z(100.0, {}, {});
  CHECK(z.is_zero());
  CHECK(alpha_residual(z, 17.0).value == std::complex<double>{});
  CHECK(power_metric(z) == 0.0);
  const Waveform zero_amp(100.0, {17.0}, {0.0});
  CHECK(power_metric(zero_amp) == 0.0);
}

TEST_CASE("Fourier orthogonality and the power of a sine", "[oracle]") {
  const double tau = 300.0;
  const double wl = kTwoPi * 850 / tau;
  const Waveform g(tau, {wl}, {0.7});
  for (int lp : {849, 851, 800}) {
    const auto a = alpha_residual(g, kTwoPi * lp / tau);
    CHECK(std::abs(a.value) < 1e-12 * 0.7 * tau);
  }
  CHECK_THAT(std::abs(alpha_residual(g, wl).value), WithinRel(0.7 * tau / 2, 1e-12));
  CHECK_THAT(power_metric(g), WithinRel(0.7 / std::sqrt(2.0), 1e-12));
}

TEST_CASE("gbar of a sine series is the coefficient norm over sqrt 2", "[oracle]") {
  const auto& c = test::context(7, 300.0);
  std::mt19937_64 rng(21);
  const Eigen::VectorXd v = test::random_vector(rng, c.basis.size());
  const Waveform g = Waveform::from_coefficients(c.basis, v);
  CHECK_THAT(power_metric(g), WithinRel(v.norm() / std::sqrt(2.0), 1e-11));
}

TEST_CASE("alpha matches an adaptive reference quadrature", "[oracle]") {
  const auto& c = test::context(7, 300.0);
  std::mt19937_64 rng(22);
  const Eigen::VectorXd v = test::random_vector(rng, c.basis.size());
  const Waveform g = Waveform::from_coefficients(c.basis, v);
  for (double omega : {c.spectrum.mode_frequencies[0], 17.3, mhz_to_angular(2.80)}) {
    const auto est = alpha_residual(g, omega);
    const auto ref = reference_alpha(g, omega);
    CHECK(std::abs(est.value - ref) < 1e-11 * power_metric(g) * g.tau());
  }
}

TEST_CASE("batched sampling agrees with direct evaluation", "[oracle]") {
  std::vector<double> f, a;
  // Two equally spaced runs and a stray frequency.
  for (int k = 0; k < 40; ++k) {
    f.push_back(kTwoPi * (700 + k) / 250.0);
    a.push_back(std::cos(0.3 * k));
  }
  f.push_back(kTwoPi * 760.5 / 250.0);
  a.push_back(0.4);
  for (int k = 0; k < 30; ++k) {
    f.push_back(kTwoPi * (800 + 2 * k) / 250.0);
    a.push_back(std::sin(0.7 * k));
  }
  const Waveform g(250.0, f, a);
  std::vector<double> t, out(997);
  for (int k = 0; k < 997; ++k) t.push_back(250.0 * k / 996.0);
  g.sample(t, out);
  double scale = 0.0;
  for (double x : a) scale += std::abs(x);
  for (int k = 0; k < 997; ++k) CHECK_THAT(out[k], WithinAbs(g(t[k]), 1e-12 * scale));
}

TEST_CASE("quadrature grids", "[oracle]") {
  const QuadratureGrid grid = make_grid(3.0, 5);
  double sum = 0.0, cube = 0.0;
  for (std::size_t k = 0; k < grid.nodes.size(); ++k) {
    sum += grid.weights[k];
    cube += grid.weights[k] * std::pow(grid.nodes[k], 3);
  }
  CHECK_THAT(sum, WithinRel(3.0, 1e-14));
  CHECK_THAT(cube, WithinRel(81.0 / 4.0, 1e-14));
  REQUIRE_THROWS_KIND(make_grid(3.0, 0), kInvalidInput);
}

TEST_CASE("tighter tolerance moves the answer by less than the reported error", "[oracle]") {
  const auto& c = test::context(7, 300.0);
  std::mt19937_64 rng(23);
  const Eigen::VectorXd v = test::random_vector(rng, c.basis.size());
  const Waveform g = Waveform::from_coefficients(c.basis, v);
  OracleOptions tight;
  tight.alpha_tolerance = 5e-13;
  const double scale = power_metric(g) * g.tau();
  const auto a = alpha_residual(g, c.spectrum.mode_frequencies[3]);
  const auto b = alpha_residual(g, c.spectrum.mode_frequencies[3], tight);
  CHECK(std::abs(a.value - b.value) <= std::max(a.error, 1e-12 * scale));

  std::vector<Waveform> waves{g, Waveform::from_coefficients(c.basis, test::random_vector(rng, c.basis.size()))};
  ModeSpectrum two;
  two.mode_frequencies = c.spectrum.mode_frequencies.head(2);
  two.lamb_dicke = c.spectrum.lamb_dicke.topLeftCorner(2, 2);
  OracleOptions tight_chi;
  tight_chi.chi_tolerance = 1e-12;
  const auto x = chi_matrix(waves, two);
  const auto y = chi_matrix(waves, two, tight_chi);
  CHECK(std::abs(x.chi(0, 1) - y.chi(0, 1)) <= std::max(x.error, 1e-12));
  CHECK(x.chi(0, 1) == x.chi(1, 0));
  CHECK(x.chi(0, 0) == 0.0);
}

TEST_CASE("non-convergence is reported", "[oracle]") {
  const Waveform g(300.0, {17.0, 18.0}, {1.0, 1.0});
  OracleOptions none;
  none.max_refinements = 0;
  REQUIRE_THROWS_KIND(alpha_residual(g, 17.5, none), kNumericalFailure);
  const double d[] = {0.0, 1e-3};
  REQUIRE_THROWS_KIND(detuning_scan(g, 17.5, 0, d, none), kNumericalFailure);
}

TEST_CASE("detuning scan and slope fit", "[oracle]") {
  const double tau = 100.0;
  const double wl = kTwoPi * 280 / tau;
  const Waveform g(tau, {wl}, {1.0});
  const double deltas[] = {0.0, 1e-3, 2e-3};
  const auto scan = detuning_scan(g, kTwoPi * 281 / tau, 4, deltas);
  REQUIRE(scan.size() == 3);
  CHECK(scan[0].mode == 4);
  CHECK(scan[0].alpha_abs < 1e-12 * tau);
  CHECK(scan[1].alpha_abs > scan[0].alpha_abs);
  const double bad[] = {std::nan("")};
  REQUIRE_THROWS_KIND(detuning_scan(g, 1.0, 0, bad), kInvalidInput);

  std::vector<DetuningPoint> synth;
  for (double x : {1e-4, 1e-3, 1e-2}) synth.push_back({x, 0, 5.0 * x * x});
  CHECK_THAT(log_log_slope(synth), WithinRel(2.0, 1e-12));
  REQUIRE_THROWS_KIND(log_log_slope({{1e-3, 0, 1.0}}), kInvalidInput);
}

TEST_CASE("stabilised pulses flatten the detuning response", "[oracle]") {
  std::vector<double> deltas;
  for (int k = 0; k <= 8; ++k) deltas.push_back(1e-4 * std::pow(10.0, k / 4.0));
  const double half_khz = mhz_to_angular(0.0005);
  const GateSpec spec = test::pairs({{1, 3}, {2, 4}});
  double at_half[2] = {0.0, 0.0};
  for (int k : {0, 1}) {
    const auto& c = test::context(7, 100.0, k);
    const PulseSolution s = synthesize(spec, c);
    const Waveform g = Waveform::from_coefficients(c.basis, s.gates[0].coefficients);
    const double zero[] = {0.0};
    for (int p = 0; p < 7; ++p) {
      const double w = c.spectrum.mode_frequencies[p];
      CHECK(detuning_scan(g, w, p, zero)[0].alpha_abs < 1e-9 * power_metric(g) * c.basis.tau);
      const double h[] = {half_khz};
      at_half[k] = std::max(at_half[k], detuning_scan(g, w, p, h)[0].alpha_abs);
      if (k == 1) {
        const double slope = log_log_slope(detuning_scan(g, w, p, deltas));
        INFO("mode " << p + 1 << " slope " << slope);
        CHECK(slope >= 1.8);
      }
    }
  }
  INFO("K=0 " << at_half[0] << " K=1 " << at_half[1]);
  CHECK(at_half[1] * 10.0 <= at_half[0]);
}
