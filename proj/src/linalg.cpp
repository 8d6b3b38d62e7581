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

#include "adiabound/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>

#include "adiabound/error.hpp"

namespace adiabound {
namespace {

constexpr double kCouplingTolerance = 1e-9;
constexpr double kSubClusterTolerance = 1e-8;
// Minimum overlap <prev|cur> accepted for one tracking step before bisecting.
constexpr double kTrackQuality = 0.9;
constexpr int kMaxTrackDepth = 40;

void fix_phase(Eigen::Ref<ComplexVector> v) {
  const double vmax = v.cwiseAbs().maxCoeff();
  if (vmax == 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (std::abs(v[i]) >= 0.5 * vmax) {
      v *= std::conj(v[i]) / std::abs(v[i]);
      v[i] = std::abs(v[i]);
      return;
    }
  }
}

std::vector<int> cluster_energies(const Eigen::VectorXd& e, double tol) {
  std::vector<int> ids(e.size());
  int id = 0;
  for (Eigen::Index i = 0; i < e.size(); ++i) {
    if (i > 0 && e[i] - e[i - 1] > tol) ++id;
    ids[i] = id;
  }
  return ids;
}

double level_tolerance(const Eigen::VectorXd& e) {
  const double scale = e.size() ? e.cwiseAbs().maxCoeff() : 0.0;
  return kGapTolerance * std::max(scale, std::numeric_limits<double>::min());
}

template <class F>
double golden_section_min(F&& f, double a, double b, int iterations = 80) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a);
  double d = a + invphi * (b - a);
  double fc = f(c);
  double fd = f(d);
  for (int i = 0; i < iterations && (b - a) > 1e-14; ++i) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? c : d;
}

// Groups column indices by cluster id, ordered by first occurrence.
std::vector<std::vector<int>> cluster_members(const std::vector<int>& ids) {
  std::map<int, int> slot;
  std::vector<std::vector<int>> groups;
  for (int i = 0; i < static_cast<int>(ids.size()); ++i) {
    auto [it, inserted] = slot.try_emplace(ids[i], static_cast<int>(groups.size()));
    if (inserted) groups.emplace_back();
    groups[it->second].push_back(i);
  }
  return groups;
}

ComplexMatrix gather(const ComplexMatrix& v, const std::vector<int>& cols) {
  ComplexMatrix out(v.rows(), static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) out.col(j) = v.col(cols[j]);
  return out;
}

struct PointGaps {
  double dynamic;  // ground pairs and coupled excited pairs
  double ground;   // ground pairs only
};

bool coupled(const ComplexMatrix& a, const ComplexMatrix& b, const ComplexMatrix& op, double op_norm) {
  if (op_norm == 0.0) return false;
  const ComplexMatrix block = a.adjoint() * op * b;
  return block.cwiseAbs().maxCoeff() > kCouplingTolerance * op_norm;
}

PointGaps point_gaps(const HamiltonianModel& model, double s, const DerivativeOptions& opts) {
  const Spectrum sp = hermitian_eigs(model.evaluate(s), s);
  const auto groups = cluster_members(sp.cluster);
  if (groups.front().size() > 1) {
    throw Error(ErrorKind::DegenerateGroundState,
                "ground level is " + std::to_string(groups.front().size()) + "-fold degenerate at s=" +
                    std::to_string(s));
  }
  PointGaps out{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()};
  const double e0 = sp.energies[0];
  for (std::size_t g = 1; g < groups.size(); ++g) {
    const double gap = sp.energies[groups[g].front()] - e0;
    out.ground = std::min(out.ground, gap);
  }
  out.dynamic = out.ground;
  if (groups.size() > 2) {
    const ComplexMatrix d1 = model_derivative(model, s, 1, opts);
    const ComplexMatrix d2 = model_derivative(model, s, 2, opts);
    const double n1 = spectral_norm(d1);
    const double n2 = spectral_norm(d2);
    std::vector<ComplexMatrix> blocks;
    blocks.reserve(groups.size());
    for (const auto& g : groups) blocks.push_back(gather(sp.vectors, g));
    for (std::size_t a = 1; a < groups.size(); ++a) {
      for (std::size_t b = a + 1; b < groups.size(); ++b) {
        const double gap = sp.energies[groups[b].front()] - sp.energies[groups[a].back()];
        if (gap >= out.dynamic) continue;
        if (coupled(blocks[a], blocks[b], d1, n1) || coupled(blocks[a], blocks[b], d2, n2)) {
          out.dynamic = gap;
        }
      }
    }
  }
  return out;
}

Spectrum transport_step(const HamiltonianModel& model, const Spectrum& prev, double s, int depth) {
  Spectrum cur = hermitian_eigs(model.evaluate(s), s);
  if (cur.cluster.back() + 1 < cur.dimension()) resolve_degenerate(cur, model.derivative(s, 1));
  try {
    Spectrum next = gauge_transport(prev, cur);
    double quality = 1.0;
    for (int i = 0; i < next.dimension(); ++i) {
      quality = std::min(quality, std::real(prev.vectors.col(i).dot(next.vectors.col(i))));
    }
    if (quality >= kTrackQuality || depth >= kMaxTrackDepth) return next;
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::AmbiguousMatching || depth >= kMaxTrackDepth) throw;
  }
  const double mid = 0.5 * (prev.s + s);
  const Spectrum half = transport_step(model, prev, mid, depth + 1);
  return transport_step(model, half, s, depth + 1);
}

}  // namespace

double Spectrum::ground_gap() const {
  double best = std::numeric_limits<double>::infinity();
  for (int i = 0; i < dimension(); ++i) {
    if (!degenerate(0, i)) best = std::min(best, std::abs(energies[i] - energies[0]));
  }
  return best;
}

bool is_hermitian(const ComplexMatrix& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  if (!m.allFinite()) return false;
  const double scale = m.cwiseAbs().maxCoeff();
  const double asym = (m - m.adjoint()).cwiseAbs().maxCoeff();
  return asym <= rel_tol * scale;
}

double spectral_norm(const ComplexMatrix& m) {
  if (m.size() == 0) return 0.0;
  if (m.rows() == m.cols() && is_hermitian(m, 1e-14)) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

Spectrum hermitian_eigs(const ComplexMatrix& m, double s) {
  if (m.rows() != m.cols() || m.rows() < 2) {
    throw Error(ErrorKind::DimensionMismatch, "hermitian_eigs needs a square matrix with N >= 2");
  }
  if (!is_hermitian(m)) {
    throw Error(ErrorKind::NonHermitian, "matrix fails max|M - M^dagger| <= 1e-12 max|M|");
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(m);
  if (es.info() != Eigen::Success) {
    throw Error(ErrorKind::NoConvergence, "self-adjoint eigensolver did not converge");
  }
  Spectrum out;
  out.s = s;
  out.energies = es.eigenvalues();
  out.vectors = es.eigenvectors();
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_phase(out.vectors.col(j));
  out.cluster = cluster_energies(out.energies, level_tolerance(out.energies));
  return out;
}

void resolve_degenerate(Spectrum& spectrum, const ComplexMatrix& hdot) {
  const double hnorm = spectral_norm(hdot);
  const double tol = kSubClusterTolerance * std::max(hnorm, std::numeric_limits<double>::min());
  std::vector<int> ids(spectrum.cluster.size());
  int next_id = 0;
  for (const auto& members : cluster_members(spectrum.cluster)) {
    const int d = static_cast<int>(members.size());
    if (d == 1) {
      ids[members[0]] = next_id++;
      continue;
    }
    const ComplexMatrix basis = gather(spectrum.vectors, members);
    ComplexMatrix block = basis.adjoint() * hdot * basis;
    block = 0.5 * (block + block.adjoint()).eval();
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(block);
    if (es.info() != Eigen::Success) {
      throw Error(ErrorKind::NoConvergence, "degenerate-block eigensolver did not converge");
    }
    const ComplexMatrix rotated = basis * es.eigenvectors();
    const Eigen::VectorXd& slopes = es.eigenvalues();
    for (int j = 0; j < d; ++j) {
      if (j > 0 && slopes[j] - slopes[j - 1] > tol) ++next_id;
      spectrum.vectors.col(members[j]) = rotated.col(j);
      fix_phase(spectrum.vectors.col(members[j]));
      ids[members[j]] = next_id;
    }
    ++next_id;
  }
  spectrum.cluster = std::move(ids);
}

Spectrum gauge_transport(const Spectrum& prev, const Spectrum& cur) {
  const int n = prev.dimension();
  if (cur.dimension() != n) {
    throw Error(ErrorKind::DimensionMismatch, "gauge_transport between spectra of different size");
  }
  const auto groups = cluster_members(cur.cluster);
  std::vector<ComplexMatrix> blocks;
  blocks.reserve(groups.size());
  for (const auto& g : groups) blocks.push_back(gather(cur.vectors, g));

  // Assign every previous label to the cluster holding most of its weight.
  std::vector<std::vector<int>> assigned(groups.size());
  for (int nu = 0; nu < n; ++nu) {
    int best = -1;
    double best_w = -1.0;
    for (std::size_t g = 0; g < groups.size(); ++g) {
      const double w = (blocks[g].adjoint() * prev.vectors.col(nu)).squaredNorm();
      if (w > best_w) {
        best_w = w;
        best = static_cast<int>(g);
      }
    }
    if (best_w < 0.25) {
      throw Error(ErrorKind::AmbiguousMatching,
                  "level " + std::to_string(nu) + " has overlap " + std::to_string(std::sqrt(best_w)) +
                      " < 0.5 with every level between s=" + std::to_string(prev.s) +
                      " and s=" + std::to_string(cur.s));
    }
    assigned[best].push_back(nu);
  }

  Spectrum out;
  out.s = cur.s;
  out.energies.resize(n);
  out.vectors.resize(prev.vectors.rows(), n);
  out.cluster.assign(n, 0);
  for (std::size_t g = 0; g < groups.size(); ++g) {
    const auto& labels = assigned[g];
    if (labels.size() != groups[g].size()) {
      throw Error(ErrorKind::AmbiguousMatching,
                  "cluster of size " + std::to_string(groups[g].size()) + " matched " +
                      std::to_string(labels.size()) + " previous levels at s=" + std::to_string(cur.s));
    }
    const ComplexMatrix targets = gather(prev.vectors, labels);
    const ComplexMatrix overlap = blocks[g].adjoint() * targets;
    Eigen::JacobiSVD<ComplexMatrix> svd(overlap, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const ComplexMatrix aligned = blocks[g] * (svd.matrixU() * svd.matrixV().adjoint());
    for (std::size_t j = 0; j < labels.size(); ++j) {
      out.vectors.col(labels[j]) = aligned.col(j);
      out.energies[labels[j]] = cur.energies[groups[g][j]];
      out.cluster[labels[j]] = cur.cluster[groups[g].front()];
    }
  }
  return out;
}

Spectrum anchor_spectrum(const HamiltonianModel& model) {
  Spectrum sp = hermitian_eigs(model.evaluate(0.0), 0.0);
  if (sp.cluster.back() + 1 < sp.dimension()) resolve_degenerate(sp, model.derivative(0.0, 1));
  return sp;
}

std::vector<Spectrum> track_spectra(const HamiltonianModel& model, std::span<const double> nodes) {
  std::vector<Spectrum> out;
  out.reserve(nodes.size());
  Spectrum current = anchor_spectrum(model);
  for (double s : nodes) {
    if (s < current.s) {
      throw Error(ErrorKind::ValidationError, "track_spectra needs non-decreasing nodes");
    }
    if (s > current.s) current = transport_step(model, current, s, 0);
    out.push_back(current);
  }
  return out;
}

SampleGrid SampleGrid::uniform(int points) {
  if (points < 2) throw Error(ErrorKind::ValidationError, "grid needs at least two points");
  SampleGrid g;
  g.s.resize(points);
  for (int i = 0; i < points; ++i) g.s[i] = static_cast<double>(i) / (points - 1);
  g.s.back() = 1.0;
  return g;
}

SampleGrid default_grid(const HamiltonianModel& model) {
  const double per_scale = 32.0 / model.time_scale();
  const int points = static_cast<int>(std::min(4.0e6, std::max<double>(kDefaultGridPoints, std::ceil(per_scale) + 1)));
  return SampleGrid::uniform(points);
}

GapSummary gap_summary(const HamiltonianModel& model, const SampleGrid& grid) {
  const DerivativeOptions opts;
  std::vector<PointGaps> values;
  values.reserve(grid.s.size());
  for (double s : grid.s) values.push_back(point_gaps(model, s, opts));

  auto refine = [&](auto member, double& best, double& at) {
    std::size_t idx = 0;
    for (std::size_t i = 1; i < values.size(); ++i) {
      if (values[i].*member < values[idx].*member) idx = i;
    }
    best = values[idx].*member;
    at = grid.s[idx];
    const double lo = grid.s[idx > 0 ? idx - 1 : 0];
    const double hi = grid.s[std::min(idx + 1, values.size() - 1)];
    if (hi > lo) {
      auto f = [&](double s) { return point_gaps(model, s, opts).*member; };
      const double s_star = golden_section_min(f, lo, hi);
      const double v = f(s_star);
      if (v < best) {
        best = v;
        at = s_star;
      }
    }
  };

  GapSummary out;
  refine(&PointGaps::dynamic, out.gamma_min, out.s_gamma_min);
  refine(&PointGaps::ground, out.ground_gap_min, out.s_ground_gap_min);
  const double scale = spectral_norm(model.evaluate(out.s_ground_gap_min));
  if (out.ground_gap_min <= kGapTolerance * std::max(scale, 1.0)) {
    throw Error(ErrorKind::DegenerateGroundState,
                "ground gap closes near s=" + std::to_string(out.s_ground_gap_min));
  }
  return out;
}

double min_gap(const HamiltonianModel& model, const SampleGrid& grid) {
  return gap_summary(model, grid).gamma_min;
}

std::string to_string(DerivativeMethod method) {
  return method == DerivativeMethod::Analytic ? "analytic" : "finite_difference";
}

ComplexMatrix model_derivative(const HamiltonianModel& model, double s, int order,
                               const DerivativeOptions& options) {
  if (!options.force_finite_difference && model.has_analytic_derivatives()) {
    return model.derivative(s, order);
  }
  return finite_difference_derivative(model, s, order,
                                      options.fd_step_factor * default_fd_step(order, model.time_scale()));
}

DerivativeNorms derivative_norms(const HamiltonianModel& model, const SampleGrid& grid,
                                 const DerivativeOptions& options) {
  DerivativeNorms out;
  out.method = (!options.force_finite_difference && model.has_analytic_derivatives())
                   ? DerivativeMethod::Analytic
                   : DerivativeMethod::FiniteDifference;
  auto norm_at = [&](double s, int k) { return spectral_norm(model_derivative(model, s, k, options)); };

  out.samples.reserve(grid.s.size());
  for (double s : grid.s) out.samples.push_back({s, norm_at(s, 1), norm_at(s, 2), norm_at(s, 3)});

  double DerivativeSample::*fields[3] = {&DerivativeSample::norm1, &DerivativeSample::norm2,
                                         &DerivativeSample::norm3};
  double* targets[3] = {&out.h1, &out.h2, &out.h3};
  for (int k = 0; k < 3; ++k) {
    std::size_t idx = 0;
    for (std::size_t i = 1; i < out.samples.size(); ++i) {
      if (out.samples[i].*fields[k] > out.samples[idx].*fields[k]) idx = i;
    }
    double best = out.samples[idx].*fields[k];
    const double lo = grid.s[idx > 0 ? idx - 1 : 0];
    const double hi = grid.s[std::min(idx + 1, out.samples.size() - 1)];
    if (hi > lo && best > 0.0) {
      auto f = [&](double s) { return -norm_at(s, k + 1); };
      const double s_star = golden_section_min(f, lo, hi);
      best = std::max(best, -f(s_star));
    }
    *targets[k] = best;
  }

  const GapSummary gaps = gap_summary(model, grid);
  out.gamma_min = gaps.gamma_min;
  out.ground_gap_min = gaps.ground_gap_min;
  return out;
}

}  // namespace adiabound
