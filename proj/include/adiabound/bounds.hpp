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

#include <vector>

#include "adiabound/hamiltonian.hpp"
#include "adiabound/linalg.hpp"

namespace adiabound {

struct Timescales {
  double delta0 = 0.0;
  double delta1 = 0.0;
};

/// (1/g)(h3/g + h2^3/g^3 + h1^6/g^6).
double delta1(double h1, double h2, double h3, double gamma_min);
/// h1 / ground_gap_min^2 + delta1 / (gamma_min T).
double delta0(double h1, double ground_gap_min, double delta1_value, double gamma_min, double total_time);
Timescales timescales(const DerivativeNorms& norms, double total_time);

/// 6 h1^3/g^3 + h1 h2/g^2 + 2 h1^2/g^2.
double gamma_factor(double h1, double h2, double gamma_min);

/// e^x - 1 - x without cancellation for small x.
double expm1_minus_x(double x);

/// (1 + G/(h1 T))(e^x - 1) - x with x = G/(g T); zero when G = 0.
double tail_bound(double gamma, double h1, double gamma_min, double total_time);
/// (G/(h1 T))(e^x - 1), the bound left when only two levels are coupled.
double two_level_tail(double gamma, double h1, double gamma_min, double total_time);

/// T-independent part of the remainder.
double remainder_polynomial(double h1, double h2, double h3, double gamma_min);
/// polynomial + T^2 * tail_bound.
double remainder_R(double h1, double h2, double h3, double gamma_min, double total_time);

struct OneJumpRemainders {
  double R0 = 0.0;        // || C_1 - leading ||
  double C2_bound = 0.0;  // || C_2 ||
};

OneJumpRemainders lemma7_bounds(double h1, double h2, double h3, double gamma_min, double total_time);

struct BetaDerivativeBounds {
  double beta_dot = 0.0;
  double beta_ddot = 0.0;
  double gap_ddot = 0.0;
};

BetaDerivativeBounds beta_derivative_bounds(double h1, double h2, double h3, double gamma_min);

/// Everything the JRS bound needs apart from T and m.
struct JrsProfile {
  double hdot0 = 0.0;
  double hdot1 = 0.0;
  double gap0 = 0.0;
  double gap1 = 0.0;
  double hddot_integral = 0.0;    // int ||H''|| / g^2
  double hdot_sq_integral = 0.0;  // int ||H'||^2 / g^3
  int points = 0;

  double value(double total_time, int m = 1) const;
};

/// Composite Simpson over at least 513 samples of the ground gap.
JrsProfile jrs_profile(const HamiltonianModel& model, int points = 0);
double jrs_bound(const HamiltonianModel& model, double total_time, int m = 1);

/// True when the levels reachable from the ground state through H' or H''
/// couplings form exactly two eigenvalue clusters at every grid sample.
bool two_level_applicable(const HamiltonianModel& model, const SampleGrid& grid);

struct BoundReport {
  double T = 0.0;
  DerivativeNorms norms;
  double gamma_min = 0.0;
  double ground_gap_min = 0.0;
  double delta0 = 0.0;
  double delta1 = 0.0;
  double Gamma = 0.0;
  double R = 0.0;
  double R0 = 0.0;
  double C2_bound = 0.0;
  double leading_norm = 0.0;
  double upper = 0.0;
  double lower = 0.0;
  double jrs = 0.0;
  double two_level_upper = 0.0;  // meaningful when two_level is set
  double tail = 0.0;
  bool two_level = false;
  bool t_dependent = false;
};

struct BoundOptions {
  DerivativeOptions derivatives;
  int jrs_m = 1;
};

BoundReport theorem_bounds(const HamiltonianModel& model, double total_time, const BoundOptions& options = {});

/// Assembles a report from precomputed pieces; used when sweeping T on a
/// T-independent model.
BoundReport assemble_bounds(const DerivativeNorms& norms, double total_time, double leading_norm, double jrs,
                            bool two_level, bool t_dependent);

struct CancellationTimes {
  double kappa = 0.0;  // int_0^1 (E_1 - E_G)
  std::vector<double> times;
};

/// T_n = 2 pi n / kappa. Throws NotApplicable unless one level couples to G
/// at the ends and both its gap and coupling agree at s = 0 and s = 1.
CancellationTimes cancellation_times(const HamiltonianModel& model, int n_max);

}  // namespace adiabound
