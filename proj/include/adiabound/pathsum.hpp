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

#include <iosfwd>
#include <span>
#include <vector>

#include "adiabound/hamiltonian.hpp"
#include "adiabound/linalg.hpp"
#include "adiabound/quadrature.hpp"

namespace adiabound {

/// beta_{n,m} = <n|H'|m> / (E_n - E_m), zero on degenerate pairs.
cplx beta(const Spectrum& spectrum, const ComplexMatrix& hdot, int n, int m);
cplx beta(const HamiltonianModel& model, const Spectrum& spectrum, int n, int m);
ComplexMatrix beta_matrix(const Spectrum& spectrum, const ComplexMatrix& hdot);

/// Labels nu_0 = G, ..., nu_q and times s_0 = 0 < s_1 < ... < s_q <= 1;
/// the j-th jump (nu_{j-1} -> nu_j) happens at s_j.
struct JumpPath {
  std::vector<int> labels;
  std::vector<double> times;

  int jumps() const { return static_cast<int>(labels.size()) - 1; }
  bool non_adiabatic() const { return labels.back() != labels.front(); }
  /// Throws ValidationError when the path is malformed.
  void validate(int dimension) const;
};

struct PathProductCheck {
  int L = 0;
  ComplexMatrix product;  // projector chain, blocks j = 1..L
  ComplexMatrix formula;  // |nu_q(1)><G(0)| prod beta / L^q
  double residual = 0.0;  // spectral norm of the difference
  double normalized_residual = 0.0;  // residual * L^q
  std::vector<int> grid_index;       // j_1..j_q
  bool snapped = false;
};

/// Compares the ordered product of instantaneous projectors along a path with
/// its beta-product estimate. Times must be multiples of 1/L unless `snap`.
PathProductCheck path_product_check(const HamiltonianModel& model, const JumpPath& path, int L, bool snap = false);

/// Tracked spectra and cumulative level phases I_nu(s) = int_0^s E_nu on a panel grid.
struct LevelProfile {
  PanelGrid grid;
  Spectrum start;
  Spectrum end;
  std::vector<Spectrum> spectra;        // one per node
  std::vector<ComplexMatrix> betas;     // one per node
  std::vector<Eigen::VectorXd> phases;  // I_nu at each node
  Eigen::VectorXd total_phase;          // I_nu(1)
};

LevelProfile level_profile(const HamiltonianModel& model, int panels);

/// Panels wide enough for the model's own time scale (phases not resolved).
int smooth_panel_count(const HamiltonianModel& model);
/// Panels of width <= (pi/4) / (gamma_max T), capped at 1/32.
int oscillation_panel_count(const HamiltonianModel& model, double total_time);

struct JumpContribution {
  int order = 0;
  ComplexVector amplitudes;  // coefficients on |nu(1)>, ground entry zero
  ComplexVector vector;      // the same state in the computational basis
  double norm = 0.0;
  int panels = 0;
  int refinements = 0;
};

struct JumpOptions {
  double quad_tol = 1e-8;
  /// Changes below this absolute size count as converged.
  double abs_tol = 1e-13;
  int max_panels = 1 << 16;
};

/// C_1 and (when max_order == 2) C_2.
std::vector<JumpContribution> jump_contributions(const HamiltonianModel& model, double total_time, int max_order,
                                                 const JumpOptions& options = {});
JumpContribution jump_contribution(const HamiltonianModel& model, double total_time, int order,
                                   const JumpOptions& options = {});

struct FirstOrderTerm {
  ComplexVector amplitudes;
  ComplexVector vector;
  double norm = 0.0;
};

/// Boundary term of the one-jump integral after one integration by parts.
FirstOrderTerm first_order_term(const HamiltonianModel& model, double total_time);
FirstOrderTerm first_order_term(const LevelProfile& profile, const HamiltonianModel& model, double total_time);

/// exp(-i T int_{s_j}^1 (E_1 - E_G)) for s_j = j / (count - 1).
std::vector<cplx> one_jump_phasors(const HamiltonianModel& model, double total_time, int count);

/// CSV with columns index, re, im at 17 significant digits.
void write_complex_csv(std::ostream& out, std::span<const cplx> values);

}  // namespace adiabound
