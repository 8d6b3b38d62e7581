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

#include "adiabound/pathsum.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <ostream>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "adiabound/error.hpp"

namespace adiabound {
namespace {

constexpr int kGround = 0;
constexpr double kGridSlack = 1e-9;
// Couplings at roundoff level relative to ||H'|| are treated as exact zeros.
constexpr double kCouplingFloor = 256 * std::numeric_limits<double>::epsilon();

ComplexVector in_computational_basis(const Spectrum& frame, const ComplexVector& amplitudes) {
  return frame.vectors * amplitudes;
}

double max_level_spread(const HamiltonianModel& model) {
  double spread = 0.0;
  for (int i = 0; i <= 128; ++i) {
    const Spectrum sp = hermitian_eigs(model.evaluate(i / 128.0));
    spread = std::max(spread, sp.energies[sp.dimension() - 1] - sp.energies[0]);
  }
  return spread;
}

// C_1 and C_2 amplitudes on one profile.
std::vector<ComplexVector> jump_amplitudes(const LevelProfile& prof, double t, int max_order) {
  const int n = prof.start.dimension();
  const std::size_t m = prof.grid.nodes().size();
  const cplx mit(0.0, -t);
  std::vector<ComplexVector> out;

  std::vector<std::vector<cplx>> g1(n, std::vector<cplx>(m, 0.0));
  ComplexVector a1 = ComplexVector::Zero(n);
  std::vector<cplx> f(m);
  for (int nu = 0; nu < n; ++nu) {
    if (nu == kGround) continue;
    for (std::size_t i = 0; i < m; ++i) {
      const double dk = prof.phases[i][kGround] - prof.phases[i][nu];
      f[i] = std::exp(mit * dk) * prof.betas[i](nu, kGround);
    }
    a1[nu] = prof.grid.cumulative(f, g1[nu]);
  }
  out.push_back(a1);

  if (max_order >= 2) {
    ComplexVector a2 = ComplexVector::Zero(n);
    for (int nu = 0; nu < n; ++nu) {
      if (nu == kGround) continue;
      for (std::size_t i = 0; i < m; ++i) {
        cplx acc = 0.0;
        for (int mu = 0; mu < n; ++mu) {
          if (mu == nu || mu == kGround) continue;
          const cplx b = prof.betas[i](nu, mu);
          if (b == 0.0) continue;
          acc += std::exp(mit * (prof.phases[i][mu] - prof.phases[i][nu])) * b * g1[mu][i];
        }
        f[i] = acc;
      }
      a2[nu] = prof.grid.integrate(f);
    }
    out.push_back(a2);
  }
  for (auto& a : out) {
    for (int nu = 0; nu < n; ++nu) a[nu] *= std::exp(mit * prof.total_phase[nu]);
  }
  return out;
}

}  // namespace

cplx beta(const Spectrum& spectrum, const ComplexMatrix& hdot, int n, int m) {
  if (n == m || spectrum.degenerate(n, m)) return 0.0;
  const cplx num = spectrum.vectors.col(n).dot(hdot * spectrum.vectors.col(m));
  if (std::abs(num) <= kCouplingFloor * spectral_norm(hdot)) return 0.0;
  return num / (spectrum.energies[n] - spectrum.energies[m]);
}

cplx beta(const HamiltonianModel& model, const Spectrum& spectrum, int n, int m) {
  return beta(spectrum, model.derivative(spectrum.s, 1), n, m);
}

ComplexMatrix beta_matrix(const Spectrum& spectrum, const ComplexMatrix& hdot) {
  const ComplexMatrix couplings = spectrum.vectors.adjoint() * hdot * spectrum.vectors;
  const int n = spectrum.dimension();
  const double floor = kCouplingFloor * couplings.cwiseAbs().maxCoeff();
  ComplexMatrix out = ComplexMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      if (a != b && !spectrum.degenerate(a, b) && std::abs(couplings(a, b)) > floor) {
        out(a, b) = couplings(a, b) / (spectrum.energies[a] - spectrum.energies[b]);
      }
    }
  }
  return out;
}

void JumpPath::validate(int dimension) const {
  if (labels.empty() || labels.size() != times.size()) {
    throw Error(ErrorKind::ValidationError, "path needs one time per label");
  }
  if (labels.front() != kGround) throw Error(ErrorKind::ValidationError, "path must start in the ground level");
  if (times.front() != 0.0) throw Error(ErrorKind::ValidationError, "path must start at s = 0");
  for (std::size_t i = 0; i < labels.size(); ++i) {
    if (labels[i] < 0 || labels[i] >= dimension) {
      throw Error(ErrorKind::ValidationError, "path label " + std::to_string(labels[i]) + " out of range");
    }
    if (i == 0) continue;
    if (labels[i] == labels[i - 1]) {
      throw Error(ErrorKind::ValidationError, "consecutive path labels must differ");
    }
    if (!(times[i] > times[i - 1]) || times[i] > 1.0) {
      throw Error(ErrorKind::ValidationError, "jump times must increase strictly within (0, 1]");
    }
  }
}

PathProductCheck path_product_check(const HamiltonianModel& model, const JumpPath& path, int L, bool snap) {
  path.validate(model.dimension());
  const int q = path.jumps();
  if (L < 10 * std::max(q, 1)) {
    throw Error(ErrorKind::ValidationError, "L must be at least 10 times the number of jumps");
  }
  PathProductCheck out;
  out.L = L;
  for (int l = 1; l <= q; ++l) {
    const double x = path.times[l] * L;
    const double j = std::round(x);
    if (std::abs(x - j) > kGridSlack) {
      if (!snap) {
        throw Error(ErrorKind::TimesNotOnGrid,
                    "jump time " + std::to_string(path.times[l]) + " is not a multiple of 1/" + std::to_string(L));
      }
      out.snapped = true;
    }
    const int ji = static_cast<int>(j);
    if (ji < 1 || ji > L || (!out.grid_index.empty() && ji <= out.grid_index.back())) {
      throw Error(ErrorKind::TimesNotOnGrid, "jump times collide after snapping to the grid");
    }
    out.grid_index.push_back(ji);
  }

  std::vector<double> nodes(L + 1);
  for (int j = 0; j <= L; ++j) nodes[j] = static_cast<double>(j) / L;
  nodes.back() = 1.0;
  const auto spectra = track_spectra(model, nodes);

  const int n = model.dimension();
  out.product = ComplexMatrix::Identity(n, n);
  int block = 0;
  for (int j = 1; j <= L; ++j) {
    while (block < q && j > out.grid_index[block]) ++block;
    const ComplexVector v = spectra[j].vectors.col(path.labels[block]);
    out.product = (v * (v.adjoint() * out.product)).eval();
  }

  cplx weight = 1.0;
  for (int l = 1; l <= q; ++l) {
    const int j = out.grid_index[l - 1];
    weight *= beta(model, spectra[j], path.labels[l], path.labels[l - 1]) / static_cast<double>(L);
  }
  out.formula = weight * spectra[L].vectors.col(path.labels.back()) * spectra[0].vectors.col(kGround).adjoint();
  out.residual = spectral_norm(out.product - out.formula);
  out.normalized_residual = out.residual * std::pow(static_cast<double>(L), q);
  return out;
}

LevelProfile level_profile(const HamiltonianModel& model, int panels) {
  LevelProfile prof{PanelGrid(panels), {}, {}, {}, {}, {}, {}};
  const auto& nodes = prof.grid.nodes();
  std::vector<double> all;
  all.reserve(nodes.size() + 2);
  all.push_back(0.0);
  all.insert(all.end(), nodes.begin(), nodes.end());
  all.push_back(1.0);
  auto spectra = track_spectra(model, all);
  prof.start = std::move(spectra.front());
  prof.end = std::move(spectra.back());
  prof.spectra.assign(std::make_move_iterator(spectra.begin() + 1), std::make_move_iterator(spectra.end() - 1));

  const int n = model.dimension();
  const std::size_t m = nodes.size();
  prof.betas.reserve(m);
  for (const Spectrum& sp : prof.spectra) prof.betas.push_back(beta_matrix(sp, model.derivative(sp.s, 1)));

  prof.phases.assign(m, Eigen::VectorXd::Zero(n));
  prof.total_phase = Eigen::VectorXd::Zero(n);
  std::vector<cplx> e(m), cum(m);
  for (int nu = 0; nu < n; ++nu) {
    for (std::size_t i = 0; i < m; ++i) e[i] = prof.spectra[i].energies[nu];
    prof.total_phase[nu] = prof.grid.cumulative(e, cum).real();
    for (std::size_t i = 0; i < m; ++i) prof.phases[i][nu] = cum[i].real();
  }
  return prof;
}

int smooth_panel_count(const HamiltonianModel& model) {
  const double per_scale = 1.0 / ((std::numbers::pi / 4) * model.time_scale());
  return static_cast<int>(std::max(32.0, std::ceil(per_scale)));
}

int oscillation_panel_count(const HamiltonianModel& model, double total_time) {
  const double needed = 1.05 * max_level_spread(model) * total_time / (std::numbers::pi / 4);
  return std::max(smooth_panel_count(model), static_cast<int>(std::ceil(needed)));
}

std::vector<JumpContribution> jump_contributions(const HamiltonianModel& model, double total_time, int max_order,
                                                 const JumpOptions& options) {
  if (max_order < 1 || max_order > 2) {
    throw Error(ErrorKind::ValidationError, "jump contributions are computed for q in {1, 2}");
  }
  if (!(options.quad_tol > 0.0 && options.quad_tol <= 1e-2)) {
    throw Error(ErrorKind::ValidationError, "quad_tol must lie in (0, 1e-2]");
  }
  int panels = oscillation_panel_count(model, total_time);
  if (panels > options.max_panels) {
    throw Error(ErrorKind::QuadratureBudget, std::to_string(panels) + " panels exceed the cap");
  }
  std::vector<ComplexVector> prev;
  for (int refinements = 0;; ++refinements) {
    const LevelProfile prof = level_profile(model, panels);
    std::vector<ComplexVector> cur = jump_amplitudes(prof, total_time, max_order);
    bool converged = !prev.empty();
    for (std::size_t k = 0; converged && k < cur.size(); ++k) {
      converged = (cur[k] - prev[k]).norm() <= std::max(options.quad_tol * cur[k].norm(), options.abs_tol);
    }
    if (converged) {
      std::vector<JumpContribution> out;
      for (std::size_t k = 0; k < cur.size(); ++k) {
        JumpContribution c;
        c.order = static_cast<int>(k) + 1;
        c.amplitudes = cur[k];
        c.vector = in_computational_basis(prof.end, cur[k]);
        c.norm = cur[k].norm();
        c.panels = panels;
        c.refinements = refinements;
        out.push_back(std::move(c));
      }
      return out;
    }
    prev = std::move(cur);
    if (2 * panels > options.max_panels) {
      throw Error(ErrorKind::QuadratureBudget,
                  "no convergence within " + std::to_string(options.max_panels) + " panels");
    }
    panels *= 2;
  }
}

JumpContribution jump_contribution(const HamiltonianModel& model, double total_time, int order,
                                   const JumpOptions& options) {
  return jump_contributions(model, total_time, order, options).back();
}

FirstOrderTerm first_order_term(const HamiltonianModel& model, double total_time) {
  return first_order_term(level_profile(model, smooth_panel_count(model)), model, total_time);
}

FirstOrderTerm first_order_term(const LevelProfile& prof, const HamiltonianModel& model, double total_time) {
  if (!(total_time > 0.0)) throw Error(ErrorKind::ValidationError, "first-order term needs T > 0");
  const int n = model.dimension();
  const cplx mit(0.0, -total_time);
  const ComplexMatrix b0 = beta_matrix(prof.start, model.derivative(0.0, 1));
  const ComplexMatrix b1 = beta_matrix(prof.end, model.derivative(1.0, 1));
  FirstOrderTerm out;
  out.amplitudes = ComplexVector::Zero(n);
  for (int nu = 0; nu < n; ++nu) {
    if (nu == kGround) continue;
    const double gap0 = prof.start.energies[kGround] - prof.start.energies[nu];
    const double gap1 = prof.end.energies[kGround] - prof.end.energies[nu];
    cplx boundary = 0.0;
    if (b1(nu, kGround) != 0.0) {
      const double dk = prof.total_phase[kGround] - prof.total_phase[nu];
      boundary += b1(nu, kGround) * std::exp(mit * dk) / (-cplx(0.0, 1.0) * gap1 * total_time);
    }
    if (b0(nu, kGround) != 0.0) boundary -= b0(nu, kGround) / (-cplx(0.0, 1.0) * gap0 * total_time);
    out.amplitudes[nu] = std::exp(mit * prof.total_phase[nu]) * boundary;
  }
  out.vector = in_computational_basis(prof.end, out.amplitudes);
  out.norm = out.amplitudes.norm();
  return out;
}

std::vector<cplx> one_jump_phasors(const HamiltonianModel& model, double total_time, int count) {
  if (count < 2) throw Error(ErrorKind::ValidationError, "phasor count must be at least 2");
  auto gap = [&](double s) {
    const Spectrum sp = hermitian_eigs(model.evaluate(s), s);
    return sp.energies[1] - sp.energies[0];
  };
  std::vector<cplx> out(count);
  double tail = 0.0;  // int_{s_j}^1 gap
  out[count - 1] = 1.0;
  for (int j = count - 2; j >= 0; --j) {
    const double a = static_cast<double>(j) / (count - 1);
    const double b = static_cast<double>(j + 1) / (count - 1);
    tail += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(gap, a, b, 10, 1e-14);
    out[j] = std::polar(1.0, -tail * total_time);
  }
  return out;
}

void write_complex_csv(std::ostream& out, std::span<const cplx> values) {
  out << "index,re,im\n";
  char buf[96];
  for (std::size_t i = 0; i < values.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i, values[i].real(), values[i].imag());
    out << buf;
  }
}

}  // namespace adiabound
