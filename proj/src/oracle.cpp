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

#include "msp/oracle.hpp"

#include "msp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

namespace msp::oracle {
namespace {


struct LegendreRule {
  std::vector<double> x;          // nodes on [-1, 1]
  std::vector<double> w;
  Eigen::MatrixXd integration;    // integration(k, j) = int_{-1}^{x_k} l_j(s) ds
};

// P_0..P_n at x.
std::vector<double> legendre_values(int n, double x) {
  std::vector<double> p(static_cast<std::size_t>(n + 1));
  p[0] = 1.0;
  if (n >= 1) p[1] = x;
  for (int k = 1; k < n; ++k) p[k + 1] = ((2.0 * k + 1.0) * x * p[k] - k * p[k - 1]) / (k + 1.0);
  return p;
}

LegendreRule build_rule(int q) {
  LegendreRule r;
  r.x.resize(q);
  r.w.resize(q);
  for (int i = 0; i < q; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (q + 0.5));
    for (int it = 0; it < 100; ++it) {
      const auto p = legendre_values(q, x);
      const double dp = q * (x * p[q] - p[q - 1]) / (x * x - 1.0);
      const double dx = p[q] / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    const auto p = legendre_values(q, x);
    const double dp = q * (x * p[q] - p[q - 1]) / (x * x - 1.0);
    r.x[q - 1 - i] = x;
    r.w[q - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
  // l_j(s) = sum_n (2n + 1)/2 w_j P_n(x_j) P_n(s); int_{-1}^{x} P_0 = x + 1,
  // int_{-1}^{x} P_n = (P_{n+1}(x) - P_{n-1}(x)) / (2n + 1).
  r.integration.resize(q, q);
  std::vector<std::vector<double>> pn_nodes(q);
  for (int j = 0; j < q; ++j) pn_nodes[j] = legendre_values(q, r.x[j]);
  for (int k = 0; k < q; ++k) {
    const auto pk = legendre_values(q, r.x[k]);
    for (int j = 0; j < q; ++j) {
      double sum = 0.0;
      for (int n = 0; n < q; ++n) {
        const double antideriv =
            n == 0 ? r.x[k] + 1.0 : (pk[n + 1] - pk[n - 1]) / (2.0 * n + 1.0);
        sum += 0.5 * (2.0 * n + 1.0) * r.w[j] * pn_nodes[j][n] * antideriv;
      }
      r.integration(k, j) = sum;
    }
  }
  return r;
}

const LegendreRule& rule(int q) {
  static const LegendreRule r20 = build_rule(kPanelOrder);
  if (q == kPanelOrder) return r20;
  thread_local LegendreRule other;
  if (static_cast<int>(other.x.size()) != q) other = build_rule(q);
  return other;
}

double max_mode_frequency(const ModeSpectrum& s) { return s.mode_frequencies.maxCoeff(); }

std::vector<double> sampled(const Waveform& g, const QuadratureGrid& grid) {
  std::vector<double> out(grid.nodes.size());
  g.sample(grid.nodes, out);
  return out;
}

std::complex<double> alpha_on_grid(const std::vector<double>& samples,
                                   const QuadratureGrid& grid, double omega) {
  double re = 0.0, im = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    const double f = grid.weights[k] * samples[k];
    re += f * std::cos(omega * grid.nodes[k]);
    im -= f * std::sin(omega * grid.nodes[k]);
  }
  return {re, im};
}

// theta[p](i, j) for sampled waveforms; zero rows/cols for zero waveforms.
std::vector<Eigen::MatrixXd> theta_on_grid(const std::vector<std::vector<double>>& samples,
                                           const std::vector<bool>& active,
                                           const Eigen::VectorXd& omegas,
                                           const QuadratureGrid& grid) {
  using Panels = Eigen::Map<const Eigen::MatrixXd>;
  const auto n = static_cast<Eigen::Index>(samples.size());
  const LegendreRule& lr = rule(grid.order);
  const Eigen::Index q = grid.order;
  const Eigen::Index panels = grid.panels;
  const double half_h = 0.5 * grid.tau / grid.panels;
  const Eigen::Index count = q * panels;
  const Eigen::RowVectorXd w = Eigen::Map<const Eigen::RowVectorXd>(lr.w.data(), q);
  const Panels weights(grid.weights.data(), count, 1);

  std::vector<Eigen::MatrixXd> theta;
  Eigen::ArrayXd cs(count), sn(count);
  Eigen::MatrixXd fs(q, panels), fc(q, panels);
  for (Eigen::Index p = 0; p < omegas.size(); ++p) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Zero(n, n);
    for (Eigen::Index k = 0; k < count; ++k) {
      cs[k] = std::cos(omegas[p] * grid.nodes[k]);
      sn[k] = std::sin(omegas[p] * grid.nodes[k]);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const Eigen::Map<const Eigen::ArrayXd> g(samples[i].data(), count);
      Eigen::Map<Eigen::ArrayXd>(fs.data(), count) = g * sn;
      Eigen::Map<Eigen::ArrayXd>(fc.data(), count) = g * cs;
      // Within-panel running integrals plus the exclusive prefix of whole panels.
      Eigen::MatrixXd cum_s = half_h * (lr.integration * fs);
      Eigen::MatrixXd cum_c = half_h * (lr.integration * fc);
      const Eigen::RowVectorXd inc_s = half_h * (w * fs);
      const Eigen::RowVectorXd inc_c = half_h * (w * fc);
      double base_s = 0.0, base_c = 0.0;
      for (Eigen::Index c = 0; c < panels; ++c) {
        cum_s.col(c).array() += base_s;
        cum_c.col(c).array() += base_c;
        base_s += inc_s[c];
        base_c += inc_c[c];
      }
      const Eigen::ArrayXd h = cs * Eigen::Map<const Eigen::ArrayXd>(cum_s.data(), count) -
                               sn * Eigen::Map<const Eigen::ArrayXd>(cum_c.data(), count);
      const Eigen::ArrayXd wh = weights.array() * h;
      for (Eigen::Index j = 0; j < n; ++j) {
        if (!active[j]) continue;
        t(i, j) = 4.0 * (Eigen::Map<const Eigen::ArrayXd>(samples[j].data(), count) * wh).sum();
      }
    }
    theta.push_back(std::move(t));
  }
  return theta;
}

}  // namespace

Waveform::Waveform(double tau, std::vector<double> frequencies, std::vector<double> amplitudes)
    : tau_(tau) {
  if (!(tau > 0.0)) fail(ErrorKind::kInvalidInput, "waveform duration must be positive");
  if (frequencies.size() != amplitudes.size())
    fail(ErrorKind::kInvalidInput, "waveform frequency/amplitude length mismatch");
  std::vector<std::size_t> order(frequencies.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](auto a, auto b) { return frequencies[a] < frequencies[b]; });
  for (auto k : order) {
    frequencies_.push_back(frequencies[k]);
    amplitudes_.push_back(amplitudes[k]);
  }
}

Waveform Waveform::from_coefficients(const BasisSet& basis, const Eigen::VectorXd& coefficients) {
  if (coefficients.size() != basis.size())
    fail(ErrorKind::kInvalidInput, "coefficient vector does not match the basis size");
  std::vector<double> f, a;
  for (int k = 0; k < basis.size(); ++k) {
    // Independent of BasisSet::frequency on purpose.
    f.push_back(2.0 * std::numbers::pi * basis.indices[k] / basis.tau);
    a.push_back(coefficients[k]);
  }
  return Waveform(basis.tau, std::move(f), std::move(a));
}

double Waveform::max_frequency() const {
  double m = 0.0;
  for (double f : frequencies_) m = std::max(m, std::abs(f));
  return m;
}

bool Waveform::is_zero() const {
  return std::all_of(amplitudes_.begin(), amplitudes_.end(), [](double a) { return a == 0.0; });
}

double Waveform::operator()(double t) const {
  double sum = 0.0;
  for (std::size_t k = 0; k < frequencies_.size(); ++k)
    sum += amplitudes_[k] * std::sin(frequencies_[k] * t);
  return sum;
}

void Waveform::sample(std::span<const double> times, std::span<double> out) const {
  const std::size_t n = frequencies_.size();
  // Split into runs of equal spacing, allowing for rounding in the stored
  // frequencies; the step is then taken from the run's end points.
  double fmax = 0.0;
  for (double f : frequencies_) fmax = std::max(fmax, std::abs(f));
  const double eps = 8.0 * std::numeric_limits<double>::epsilon() * fmax;
  struct Run {
    std::size_t begin, end;
    double step;
  };
  std::vector<Run> runs;
  std::size_t begin = 0;
  while (begin < n) {
    std::size_t end = begin + 1;
    if (end < n) {
      const double step = frequencies_[end] - frequencies_[begin];
      while (end + 1 < n &&
             std::abs(frequencies_[end + 1] - frequencies_[begin] -
                      static_cast<double>(end + 1 - begin) * step) <=
                 eps * static_cast<double>(end + 2 - begin))
        ++end;
      ++end;
    }
    const double step = end - begin > 1 ? (frequencies_[end - 1] - frequencies_[begin]) /
                                              static_cast<double>(end - 1 - begin)
                                        : 0.0;
    runs.push_back({begin, end, step});
    begin = end;
  }
  // Times are processed in blocks so the rotations of independent samples
  // interleave instead of forming one long dependency chain.
  constexpr std::size_t kBlock = 8;
  for (std::size_t s0 = 0; s0 < times.size(); s0 += kBlock) {
    const std::size_t nb = std::min(kBlock, times.size() - s0);
    std::array<double, kBlock> t{}, sum{}, rc{}, rs{}, zc{}, zs{};
    for (std::size_t s = 0; s < nb; ++s) t[s] = times[s0 + s];
    for (const auto& [b, e, df] : runs) {
      if (e - b == 1) {
        for (std::size_t s = 0; s < nb; ++s) sum[s] += amplitudes_[b] * std::sin(frequencies_[b] * t[s]);
        continue;
      }
      // Im(e^{i f_b t} sum_k a_k z^{k - b}) with z = e^{i df t}, by Horner.
      for (std::size_t s = 0; s < kBlock; ++s) {
        rc[s] = std::cos(df * t[s]);
        rs[s] = std::sin(df * t[s]);
        zc[s] = 0.0;
        zs[s] = 0.0;
      }
      for (std::size_t k = e; k-- > b;) {
        const double a = amplitudes_[k];
        for (std::size_t s = 0; s < kBlock; ++s) {
          const double nc = zc[s] * rc[s] - zs[s] * rs[s] + a;
          zs[s] = zc[s] * rs[s] + zs[s] * rc[s];
          zc[s] = nc;
        }
      }
      for (std::size_t s = 0; s < nb; ++s) {
        const double ph = frequencies_[b] * t[s];
        sum[s] += std::sin(ph) * zc[s] + std::cos(ph) * zs[s];
      }
    }
    for (std::size_t s = 0; s < nb; ++s) out[s0 + s] = sum[s];
  }
}

QuadratureGrid make_grid(double tau, int panels, int order) {
  if (panels < 1) fail(ErrorKind::kInvalidInput, "quadrature grid needs at least one panel");
  const LegendreRule& lr = rule(order);
  QuadratureGrid g;
  g.tau = tau;
  g.panels = panels;
  g.order = order;
  const double h = tau / panels;
  g.nodes.reserve(static_cast<std::size_t>(panels) * order);
  g.weights.reserve(static_cast<std::size_t>(panels) * order);
  for (int p = 0; p < panels; ++p) {
    const double mid = (p + 0.5) * h;
    for (int k = 0; k < order; ++k) {
      g.nodes.push_back(mid + 0.5 * h * lr.x[k]);
      g.weights.push_back(0.5 * h * lr.w[k]);
    }
  }
  return g;
}

int panels_for(double tau, double max_frequency, double phase_per_panel) {
  return std::max(4, static_cast<int>(std::ceil(tau * max_frequency / phase_per_panel)));
}

Estimate<std::complex<double>> alpha_residual(const Waveform& g, double omega,
                                              const OracleOptions& options) {
  Estimate<std::complex<double>> est;
  if (g.is_zero()) return est;
  int panels = panels_for(g.tau(), g.max_frequency() + std::abs(omega), options.phase_per_panel);
  auto grid = make_grid(g.tau(), panels);
  auto samples = sampled(g, grid);
  std::complex<double> coarse = alpha_on_grid(samples, grid, omega);
  double gbar2 = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) gbar2 += grid.weights[k] * samples[k] * samples[k];
  const double scale = std::sqrt(gbar2 / g.tau()) * g.tau();
  for (int level = 1; level <= options.max_refinements; ++level) {
    panels *= 2;
    grid = make_grid(g.tau(), panels);
    samples = sampled(g, grid);
    const std::complex<double> fine = alpha_on_grid(samples, grid, omega);
    est.value = fine;
    est.error = std::abs(fine - coarse);
    est.panels = panels;
    if (est.error <= options.alpha_tolerance * scale) return est;
    coarse = fine;
  }
  fail(ErrorKind::kNumericalFailure, "alpha quadrature did not converge");
}

double power_metric(const Waveform& g, const OracleOptions& options) {
  if (g.is_zero()) return 0.0;
  const int panels = 2 * panels_for(g.tau(), 2.0 * g.max_frequency(), options.phase_per_panel);
  const auto grid = make_grid(g.tau(), panels);
  const auto samples = sampled(g, grid);
  double sum = 0.0;
  for (std::size_t k = 0; k < samples.size(); ++k) sum += grid.weights[k] * samples[k] * samples[k];
  return std::sqrt(sum / g.tau());
}

Estimate<double> ordered_theta(const Waveform& g_i, const Waveform& g_j, double omega,
                               const OracleOptions& options) {
  ModeSpectrum single;
  single.mode_frequencies = Eigen::VectorXd::Constant(1, omega);
  single.lamb_dicke = Eigen::MatrixXd::Ones(2, 1);
  const ChiEstimate c = chi_matrix({g_i, g_j}, single, options);
  return {c.ordered(0, 1), c.error, c.panels};
}

TimeDomainAnalysis analyze(const std::vector<Waveform>& ion_waveforms,
                           const ModeSpectrum& spectrum, const OracleOptions& options) {
  const auto n = static_cast<Eigen::Index>(ion_waveforms.size());
  const Eigen::Index modes = spectrum.mode_count();
  if (n != spectrum.ion_count())
    fail(ErrorKind::kInvalidInput, "one waveform per ion is required");
  TimeDomainAnalysis out;
  out.alpha = Eigen::MatrixXcd::Zero(n, modes);
  out.ordered = Eigen::MatrixXd::Zero(n, n);
  out.chi = Eigen::MatrixXd::Zero(n, n);
  out.gbar = Eigen::VectorXd::Zero(n);
  std::vector<bool> active(static_cast<std::size_t>(n));
  double tau = 0.0, fmax = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    active[i] = !ion_waveforms[i].is_zero();
    if (active[i]) {
      if (tau != 0.0 && ion_waveforms[i].tau() != tau)
        fail(ErrorKind::kInvalidInput, "all waveforms must share one duration");
      tau = ion_waveforms[i].tau();
      fmax = std::max(fmax, ion_waveforms[i].max_frequency());
    }
  }
  if (tau == 0.0) return out;

  struct Level {
    Eigen::MatrixXcd alpha;
    Eigen::MatrixXd ordered;
    Eigen::VectorXd gbar;
  };
  auto evaluate = [&](int panels) {
    const auto grid = make_grid(tau, panels);
    std::vector<std::vector<double>> samples(static_cast<std::size_t>(n));
    Level lv{Eigen::MatrixXcd::Zero(n, modes), Eigen::MatrixXd::Zero(n, n),
             Eigen::VectorXd::Zero(n)};
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      samples[i] = sampled(ion_waveforms[i], grid);
      double g2 = 0.0;
      for (std::size_t k = 0; k < samples[i].size(); ++k)
        g2 += grid.weights[k] * samples[i][k] * samples[i][k];
      lv.gbar[i] = std::sqrt(g2 / tau);
      for (Eigen::Index p = 0; p < modes; ++p)
        lv.alpha(i, p) = alpha_on_grid(samples[i], grid, spectrum.mode_frequencies[p]);
    }
    const auto theta = theta_on_grid(samples, active, spectrum.mode_frequencies, grid);
    for (Eigen::Index p = 0; p < modes; ++p)
      for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j)
          if (i != j)
            lv.ordered(i, j) += spectrum.lamb_dicke(i, p) * spectrum.lamb_dicke(j, p) *
                                theta[static_cast<std::size_t>(p)](i, j);
    return lv;
  };

  int panels = panels_for(tau, fmax + max_mode_frequency(spectrum), options.phase_per_panel);
  Level coarse = evaluate(panels);
  for (int level = 1; level <= options.max_refinements; ++level) {
    panels *= 2;
    Level fine = evaluate(panels);
    out.chi_error = (fine.ordered - coarse.ordered).cwiseAbs().maxCoeff();
    out.alpha_error = 0.0;
    bool alpha_ok = true;
    for (Eigen::Index i = 0; i < n; ++i) {
      if (!active[i]) continue;
      const double e = (fine.alpha.row(i) - coarse.alpha.row(i)).cwiseAbs().maxCoeff();
      const double scale = fine.gbar[i] * tau;
      out.alpha_error = std::max(out.alpha_error, e / scale);
      alpha_ok = alpha_ok && e <= options.alpha_tolerance * scale;
    }
    out.alpha = fine.alpha;
    out.ordered = fine.ordered;
    out.gbar = fine.gbar;
    out.panels = panels;
    if (alpha_ok && out.chi_error <= options.chi_tolerance) break;
    if (level == options.max_refinements)
      fail(ErrorKind::kNumericalFailure, "time-domain quadrature did not converge");
    coarse = std::move(fine);
  }
  out.chi = 0.5 * (out.ordered + out.ordered.transpose());
  out.max_asymmetry = (out.ordered - out.ordered.transpose()).cwiseAbs().maxCoeff();
  return out;
}

ChiEstimate chi_matrix(const std::vector<Waveform>& ion_waveforms, const ModeSpectrum& spectrum,
                       const OracleOptions& options) {
  const TimeDomainAnalysis a = analyze(ion_waveforms, spectrum, options);
  return {a.chi, a.ordered, a.chi_error, a.max_asymmetry, a.panels};
}

std::vector<DetuningPoint> detuning_scan(const Waveform& g, double omega, int mode,
                                         std::span<const double> deltas,
                                         const OracleOptions& options) {
  std::vector<DetuningPoint> out;
  double wmax = std::abs(omega);
  for (double d : deltas) {
    if (!std::isfinite(d)) fail(ErrorKind::kInvalidInput, "detuning must be finite");
    wmax = std::max(wmax, std::abs(omega + d));
    out.push_back({d, mode, 0.0});
  }
  if (g.is_zero() || deltas.empty()) return out;
  int panels = panels_for(g.tau(), g.max_frequency() + wmax, options.phase_per_panel);
  auto level = [&](int np, double& gbar) {
    const auto grid = make_grid(g.tau(), np);
    const auto samples = sampled(g, grid);
    double g2 = 0.0;
    for (std::size_t k = 0; k < samples.size(); ++k) g2 += grid.weights[k] * samples[k] * samples[k];
    gbar = std::sqrt(g2 / g.tau());
    std::vector<std::complex<double>> a;
    for (double d : deltas) a.push_back(alpha_on_grid(samples, grid, omega + d));
    return a;
  };
  double gbar = 0.0;
  auto coarse = level(panels, gbar);
  for (int lv = 1; lv <= options.max_refinements; ++lv) {
    panels *= 2;
    auto fine = level(panels, gbar);
    double err = 0.0;
    for (std::size_t k = 0; k < fine.size(); ++k) err = std::max(err, std::abs(fine[k] - coarse[k]));
    if (err <= options.alpha_tolerance * gbar * g.tau()) {
      for (std::size_t k = 0; k < fine.size(); ++k) out[k].alpha_abs = std::abs(fine[k]);
      return out;
    }
    coarse = std::move(fine);
  }
  fail(ErrorKind::kNumericalFailure, "detuning scan quadrature did not converge");
}

double log_log_slope(const std::vector<DetuningPoint>& scan) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (const auto& p : scan) {
    if (p.delta <= 0.0 || p.alpha_abs <= 0.0) continue;
    const double x = std::log(p.delta), y = std::log(p.alpha_abs);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) fail(ErrorKind::kInvalidInput, "slope fit needs two positive points");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace msp::oracle
