// Copyright 2026 The adiabound Authors
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

#include "adiabound/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "adiabound/error.hpp"
#include "adiabound/pathsum.hpp"
#include "adiabound/quadrature.hpp"

namespace adiabound {
namespace {

constexpr double kSeriesSwitch = 1e-8;
constexpr double kSymmetryTolerance = 1e-9;
constexpr double kCouplingTolerance = 1e-9;

void require_positive_gap(double gamma_min) {
  if (!(gamma_min > 0.0)) throw Error(ErrorKind::ValidationError, "gamma_min must be positive");
}

void require_positive_time(double t) {
  if (!(t > 0.0)) throw Error(ErrorKind::ValidationError, "T must be positive");
}

double simpson(const std::vector<double>& f, double h) {
  double acc = f.front() + f.back();
  for (std::size_t i = 1; i + 1 < f.size(); ++i) acc += (i % 2 ? 4.0 : 2.0) * f[i];
  return acc * h / 3.0;
}

bool blocks_coupled(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& op, double op_norm) {
  if (op_norm == 0.0) return false;
  return (a.adjoint() * op * b).cwiseAbs().maxCoeff() > kCouplingTolerance * op_norm;
}

}  // namespace

double delta1(double h1, double h2, double h3, double gamma_min) {
  require_positive_gap(gamma_min);
  const double g = gamma_min;
  return (h3 / g + std::pow(h2 / g, 3) + std::pow(h1 / g, 6)) / g;
}

double delta0(double h1, double ground_gap_min, double delta1_value, double gamma_min, double total_time) {
  require_positive_gap(gamma_min);
  require_positive_gap(ground_gap_min);
  require_positive_time(total_time);
  return h1 / (ground_gap_min * ground_gap_min) + delta1_value / (gamma_min * total_time);
}

Timescales timescales(const DerivativeNorms& norms, double total_time) {
  Timescales out;
  out.delta1 = delta1(norms.h1, norms.h2, norms.h3, norms.gamma_min);
  out.delta0 = delta0(norms.h1, norms.ground_gap_min, out.delta1, norms.gamma_min, total_time);
  return out;
}

double gamma_factor(double h1, double h2, double gamma_min) {
  require_positive_gap(gamma_min);
  const double r = h1 / gamma_min;
  return 6.0 * r * r * r + h1 * h2 / (gamma_min * gamma_min) + 2.0 * r * r;
}

double expm1_minus_x(double x) {
  if (std::abs(x) < kSeriesSwitch) return x * x * (0.5 + x * (1.0 / 6 + x * (1.0 / 24 + x / 120)));
  return std::expm1(x) - x;
}

double tail_bound(double gamma, double h1, double gamma_min, double total_time) {
  require_positive_gap(gamma_min);
  require_positive_time(total_time);
  if (gamma == 0.0) return 0.0;
  const double x = gamma / (gamma_min * total_time);
  // (1 + G/(h1 T))(e^x - 1) - x rearranged so nothing cancels.
  return expm1_minus_x(x) + gamma / (h1 * total_time) * std::expm1(x);
}

double two_level_tail(double gamma, double h1, double gamma_min, double total_time) {
  require_positive_gap(gamma_min);
  require_positive_time(total_time);
  if (gamma == 0.0) return 0.0;
  return gamma / (h1 * total_time) * std::expm1(gamma / (gamma_min * total_time));
}

double remainder_polynomial(double h1, double h2, double h3, double gamma_min) {
  require_positive_gap(gamma_min);
  const double g = gamma_min;
  const double g3 = g * g * g;
  return (2 * h2 + h3) / g3 + (25 * h1 * h2 + 16 * h1 * h1 + h2 * h2) / (g3 * g) +
         (12 * h2 * h1 * h1 + 118 * h1 * h1 * h1) / (g3 * g * g) + 36 * std::pow(h1, 4) / (g3 * g3);
}

double remainder_R(double h1, double h2, double h3, double gamma_min, double total_time) {
  const double poly = remainder_polynomial(h1, h2, h3, gamma_min);
  const double gamma = gamma_factor(h1, h2, gamma_min);
  return poly + total_time * total_time * tail_bound(gamma, h1, gamma_min, total_time);
}

OneJumpRemainders lemma7_bounds(double h1, double h2, double h3, double gamma_min, double total_time) {
  require_positive_gap(gamma_min);
  require_positive_time(total_time);
  const double g = gamma_min;
  const double t2 = total_time * total_time;
  const double g3 = g * g * g;
  OneJumpRemainders out;
  out.R0 = ((2 * h2 + h3) / g3 + (20 * h1 * h2 + 12 * h1 * h1) / (g3 * g) + 88 * h1 * h1 * h1 / (g3 * g * g)) / t2;
  out.C2_bound = ((h2 * h2 + 4 * h1 * h1 + 5 * h1 * h2) / (g3 * g) +
                  (12 * h2 * h1 * h1 + 30 * h1 * h1 * h1) / (g3 * g * g) + 36 * std::pow(h1, 4) / (g3 * g3)) /
                 t2;
  return out;
}

BetaDerivativeBounds beta_derivative_bounds(double h1, double h2, double h3, double gamma_min) {
  require_positive_gap(gamma_min);
  const double g = gamma_min;
  BetaDerivativeBounds out;
  out.beta_dot = 4 * h1 * h1 / (g * g) + h2 / g;
  out.beta_ddot = 44 * std::pow(h1 / g, 3) + 12 * h1 * h2 / (g * g) + h3 / g;
  out.gap_ddot = 2 * h2 + 8 * h1 * h1 / g;
  return out;
}

double JrsProfile::value(double total_time, int m) const {
  require_positive_time(total_time);
  if (m < 1) throw Error(ErrorKind::ValidationError, "JRS degeneracy m must be >= 1");
  const double md = m;
  return (md * hdot0 / (gap0 * gap0) + md * hdot1 / (gap1 * gap1) + md * hddot_integral +
          7.0 * md * std::sqrt(md) * hdot_sq_integral) /
         total_time;
}

JrsProfile jrs_profile(const HamiltonianModel& model, int points) {
  if (points <= 0) points = static_cast<int>(default_grid(model).s.size());
  points = std::max(points, 513);
  if (points % 2 == 0) ++points;
  std::vector<double> f2(points), f1(points);
  JrsProfile out;
  out.points = points;
  const double h = 1.0 / (points - 1);
  for (int i = 0; i < points; ++i) {
    const double s = i == points - 1 ? 1.0 : i * h;
    const double g = hermitian_eigs(model.evaluate(s), s).ground_gap();
    require_positive_gap(g);
    const double n1 = spectral_norm(model_derivative(model, s, 1));
    const double n2 = spectral_norm(model_derivative(model, s, 2));
    f2[i] = n2 / (g * g);
    f1[i] = n1 * n1 / (g * g * g);
    if (i == 0) {
      out.hdot0 = n1;
      out.gap0 = g;
    }
    if (i == points - 1) {
      out.hdot1 = n1;
      out.gap1 = g;
    }
  }
  out.hddot_integral = simpson(f2, h);
  out.hdot_sq_integral = simpson(f1, h);
  return out;
}

double jrs_bound(const HamiltonianModel& model, double total_time, int m) {
  return jrs_profile(model).value(total_time, m);
}

bool two_level_applicable(const HamiltonianModel& model, const SampleGrid& grid) {
  for (double s : grid.s) {
    const Spectrum sp = hermitian_eigs(model.evaluate(s), s);
    const int clusters = *std::max_element(sp.cluster.begin(), sp.cluster.end()) + 1;
    if (clusters < 2) return false;
    std::vector<ComplexMatrix> blocks(clusters);
    for (int c = 0; c < clusters; ++c) {
      std::vector<int> cols;
      for (int i = 0; i < sp.dimension(); ++i) {
        if (sp.cluster[i] == c) cols.push_back(i);
      }
      blocks[c].resize(sp.dimension(), static_cast<Eigen::Index>(cols.size()));
      for (std::size_t j = 0; j < cols.size(); ++j) blocks[c].col(j) = sp.vectors.col(cols[j]);
    }
    const ComplexMatrix d1 = model_derivative(model, s, 1);
    const ComplexMatrix d2 = model_derivative(model, s, 2);
    const double n1 = spectral_norm(d1);
    const double n2 = spectral_norm(d2);
    std::vector<bool> seen(clusters, false);
    std::vector<int> queue{sp.cluster[0]};
    seen[sp.cluster[0]] = true;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const int a = queue[head];
      for (int b = 0; b < clusters; ++b) {
        if (seen[b]) continue;
        if (blocks_coupled(blocks[a], blocks[b], d1, n1) || blocks_coupled(blocks[a], blocks[b], d2, n2)) {
          seen[b] = true;
          queue.push_back(b);
        }
      }
    }
    if (queue.size() > 2) return false;
  }
  return true;
}

BoundReport assemble_bounds(const DerivativeNorms& norms, double total_time, double leading_norm, double jrs,
                            bool two_level, bool t_dependent) {
  require_positive_time(total_time);
  BoundReport r;
  r.T = total_time;
  r.norms = norms;
  r.norms.samples.clear();
  r.gamma_min = norms.gamma_min;
  r.ground_gap_min = norms.ground_gap_min;
  const Timescales ts = timescales(norms, total_time);
  r.delta0 = ts.delta0;
  r.delta1 = ts.delta1;
  r.Gamma = gamma_factor(norms.h1, norms.h2, r.gamma_min);
  r.R = remainder_R(norms.h1, norms.h2, norms.h3, r.gamma_min, total_time);
  const OneJumpRemainders l7 = lemma7_bounds(norms.h1, norms.h2, norms.h3, r.gamma_min, total_time);
  r.R0 = l7.R0;
  r.C2_bound = l7.C2_bound;
  r.tail = tail_bound(r.Gamma, norms.h1, r.gamma_min, total_time);
  r.leading_norm = leading_norm;
  const double width = r.R / (total_time * total_time);
  r.upper = leading_norm + width;
  r.lower = std::max(0.0, leading_norm - width);
  r.jrs = jrs;
  r.two_level = two_level;
  r.two_level_upper = two_level ? leading_norm + r.R0 + two_level_tail(r.Gamma, norms.h1, r.gamma_min, total_time)
                                : std::numeric_limits<double>::quiet_NaN();
  r.t_dependent = t_dependent;
  return r;
}

BoundReport theorem_bounds(const HamiltonianModel& model, double total_time, const BoundOptions& options) {
  require_positive_time(total_time);
  const DerivativeNorms norms = derivative_norms(model, default_grid(model), options.derivatives);
  const double leading = first_order_term(model, total_time).norm;
  const double jrs = jrs_profile(model).value(total_time, options.jrs_m);
  const bool two = two_level_applicable(model, SampleGrid::uniform(129));
  return assemble_bounds(norms, total_time, leading, jrs, two, model.t_dependent());
}

CancellationTimes cancellation_times(const HamiltonianModel& model, int n_max) {
  if (n_max < 1) throw Error(ErrorKind::ValidationError, "n_max must be >= 1");
  const LevelProfile prof = level_profile(model, smooth_panel_count(model));
  const ComplexMatrix b0 = beta_matrix(prof.start, model.derivative(0.0, 1));
  const ComplexMatrix b1 = beta_matrix(prof.end, model.derivative(1.0, 1));
  int level = -1;
  for (int nu = 1; nu < model.dimension(); ++nu) {
    if (b0(nu, 0) == 0.0 && b1(nu, 0) == 0.0) continue;
    if (level >= 0) throw Error(ErrorKind::NotApplicable, "more than one level couples to the ground state");
    level = nu;
  }
  if (level < 0) throw Error(ErrorKind::NotApplicable, "no level couples to the ground state at the ends");

  const double g0 = prof.start.energies[level] - prof.start.energies[0];
  const double g1 = prof.end.energies[level] - prof.end.energies[0];
  if (std::abs(g0 - g1) > kSymmetryTolerance * std::max(1.0, std::abs(g0))) {
    throw Error(ErrorKind::NotApplicable, "gap differs at s=0 and s=1");
  }
  const cplx c0 = b0(level, 0);
  const cplx c1 = b1(level, 0);
  if (std::abs(c0 - c1) > kSymmetryTolerance * std::max(1.0, std::abs(c0))) {
    throw Error(ErrorKind::NotApplicable, "coupling to the ground state differs at s=0 and s=1");
  }

  CancellationTimes out;
  out.kappa = adaptive_simpson(
      [&](double s) {
        const Spectrum sp = hermitian_eigs(model.evaluate(s), s);
        return sp.energies[level] - sp.energies[0];
      },
      0.0, 1.0, 1e-10);
  for (int n = 1; n <= n_max; ++n) out.times.push_back(2.0 * std::numbers::pi * n / out.kappa);
  return out;
}

}  // namespace adiabound
