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

#pragma once

#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adiabound/hamiltonian.hpp"

namespace adiabound {

/// Relative tolerance (against ||H||) below which two eigenvalues are one level.
inline constexpr double kGapTolerance = 1e-10;

/// Eigen-decomposition of H(s) at one s.
///
/// Columns of `vectors` are orthonormal eigenvectors; `energies` holds the
/// matching eigenvalues. `cluster` assigns each column to a degeneracy cluster:
/// columns sharing an id are treated as one (possibly multi-dimensional) level.
/// Straight out of hermitian_eigs the energies are ascending. After
/// gauge_transport the columns follow the labels of the previous spectrum.
struct Spectrum {
  double s = 0.0;
  Eigen::VectorXd energies;
  ComplexMatrix vectors;
  std::vector<int> cluster;

  int dimension() const { return static_cast<int>(energies.size()); }
  ComplexVector state(int level) const { return vectors.col(level); }
  bool degenerate(int a, int b) const { return cluster[a] == cluster[b]; }
  /// E_b - E_a.
  double gap(int a, int b) const { return energies[b] - energies[a]; }
  /// Smallest E_nu - E_0 over levels not degenerate with column 0.
  double ground_gap() const;
};

bool is_hermitian(const ComplexMatrix& m, double rel_tol = 1e-12);

/// Largest singular value.
double spectral_norm(const ComplexMatrix& m);

/// Ascending eigen-decomposition of a Hermitian matrix. Each eigenvector is
/// phase-fixed so that its first component of at least half the maximal
/// magnitude is real and positive.
///
/// Throws NonHermitian, NoConvergence, DimensionMismatch (N < 2 or non-square).
Spectrum hermitian_eigs(const ComplexMatrix& m, double s = 0.0);

/// Re-diagonalises every degeneracy cluster against `hdot` (degenerate
/// perturbation theory), so the cluster basis is the s -> s' continuous limit.
/// Clusters whose Hdot block is itself degenerate stay joined.
void resolve_degenerate(Spectrum& spectrum, const ComplexMatrix& hdot);

/// Matches `cur` to the labels of `prev` and fixes phases so that
/// <prev_nu|cur_nu> is real and positive (discrete parallel transport,
/// <nu'|nu> = 0). Degenerate clusters are aligned by the unitary polar factor
/// of their overlap block.
///
/// Throws AmbiguousMatching when some prev state has less than half of its
/// weight in any single cluster of `cur`.
Spectrum gauge_transport(const Spectrum& prev, const Spectrum& cur);

/// Spectrum of H(0) with degeneracies resolved against Hdot(0): the anchor of
/// every tracked path. Column 0 is the ground state |G(0)>.
Spectrum anchor_spectrum(const HamiltonianModel& model);

/// Parallel-transported spectra at the given increasing s values, starting
/// from anchor_spectrum at s = 0. Intermediate points are inserted wherever a
/// step is too coarse for an unambiguous match.
std::vector<Spectrum> track_spectra(const HamiltonianModel& model, std::span<const double> nodes);

/// Uniform sample schedule on [0, 1].
struct SampleGrid {
  std::vector<double> s;
  static SampleGrid uniform(int points);
};

inline constexpr int kDefaultGridPoints = 1025;

/// Uniform grid with at least kDefaultGridPoints samples and 32 per model time scale.
SampleGrid default_grid(const HamiltonianModel& model);

struct GapSummary {
  double gamma_min = 0.0;        // smallest gap over ground pairs and coupled excited pairs
  double s_gamma_min = 0.0;
  double ground_gap_min = 0.0;   // min over s and nu of E_nu - E_G
  double s_ground_gap_min = 0.0;
};

/// Full gap analysis; throws DegenerateGroundState when the lowest level is
/// degenerate anywhere on the grid (or at the refined minimum).
GapSummary gap_summary(const HamiltonianModel& model, const SampleGrid& grid);

/// Minimum gap between distinct levels that matter for the dynamics: every
/// gap against the ground level, and gaps between excited levels that Hdot or
/// Hddot couple. Grid minimum plus one golden-section refinement.
double min_gap(const HamiltonianModel& model, const SampleGrid& grid);

enum class DerivativeMethod { Analytic, FiniteDifference };

std::string to_string(DerivativeMethod method);

struct DerivativeSample {
  double s;
  double norm1;
  double norm2;
  double norm3;
};

struct DerivativeNorms {
  double h1 = 0.0;
  double h2 = 0.0;
  double h3 = 0.0;
  double gamma_min = 0.0;
  double ground_gap_min = 0.0;
  DerivativeMethod method = DerivativeMethod::Analytic;
  std::vector<DerivativeSample> samples;
};

struct DerivativeOptions {
  bool force_finite_difference = false;
  /// Multiplies the default step; below ~1e-3 the precision floor is hit.
  double fd_step_factor = 1.0;
};

/// Max over the grid (plus a golden-section refinement at each maximum) of the
/// spectral norms of the first three derivatives, together with the gap data.
DerivativeNorms derivative_norms(const HamiltonianModel& model, const SampleGrid& grid,
                                 const DerivativeOptions& options = {});

/// Derivative through the model, or by finite differences when requested.
ComplexMatrix model_derivative(const HamiltonianModel& model, double s, int order,
                               const DerivativeOptions& options = {});

}  // namespace adiabound
