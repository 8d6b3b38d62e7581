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

#include <optional>
#include <string>
#include <vector>

#include "adiabound/hamiltonian.hpp"

namespace adiabound {

enum class ScheduleKind { Uniform, Phi };

std::string to_string(ScheduleKind kind);
ScheduleKind schedule_kind_from_string(const std::string& text);

struct Schedule {
  ScheduleKind kind = ScheduleKind::Uniform;
  std::vector<double> breakpoints;  // s_0 = 0 < s_1 < ... < s_L = 1

  int steps() const { return static_cast<int>(breakpoints.size()) - 1; }
};

Schedule uniform_schedule(int steps);

/// Breakpoints with phi(s_j) = j * phi(1) / L. Throws NoAnalytics for models
/// without a closed-form rotation angle.
Schedule phi_schedule(const HamiltonianModel& model, int steps);

/// phi_schedule when requested and available, uniform otherwise.
Schedule make_schedule(const HamiltonianModel& model, ScheduleKind kind, int steps);

/// Where each piecewise-constant factor samples H: the interval midpoint
/// (second order) or its left end s_j (first order).
enum class StepRule { Midpoint, Left };

struct RefinementStep {
  int steps;
  double error;
};

struct EvolutionResult {
  ComplexVector final_state;
  int L_used = 0;
  double error = 0.0;
  std::string method;
  double norm_drift = 0.0;  // | ||psi|| - 1 | before any renormalisation
  int accepted_steps = 0;
  int rejected_steps = 0;
  std::vector<RefinementStep> history;
};

/// |G(0)>: ground column of the anchored spectrum at s = 0.
ComplexVector initial_ground_state(const HamiltonianModel& model);

EvolutionResult evolve_product(const HamiltonianModel& model, double total_time, const Schedule& schedule,
                               StepRule rule = StepRule::Midpoint);

struct AdaptiveOptions {
  double rel_tol = 0.01;
  double error_floor = 1e-12;
  /// Optional extra stop condition on ||psi(2L) - psi(L)||.
  std::optional<double> state_tol;
  int max_steps = 1 << 26;
  StepRule rule = StepRule::Midpoint;
};

/// Doubles L from max(64, ceil(8 T max||H||)) until successive errors agree.
EvolutionResult evolve_adaptive(const HamiltonianModel& model, double total_time, ScheduleKind kind,
                                const AdaptiveOptions& options = {});

struct RkOptions {
  double tol = 1e-10;
  double min_step = 1e-14;
  bool renormalize = true;
};

/// Dormand-Prince 5(4) on d psi / ds = -i T H(s) psi.
EvolutionResult evolve_rk(const HamiltonianModel& model, double total_time, const RkOptions& options = {});
EvolutionResult evolve_rk(const HamiltonianModel& model, double total_time, const ComplexVector& initial,
                          const RkOptions& options = {});

/// Non-degenerate ground state of H(1).
ComplexVector final_ground_state(const HamiltonianModel& model);

/// ||(1 - |G(1)><G(1)|) psi||.
double adiabatic_error(const ComplexVector& state, const ComplexVector& ground);
double adiabatic_error(const EvolutionResult& result, const HamiltonianModel& model);

/// (1 - |G(1)><G(1)|) psi.
ComplexVector error_vector(const ComplexVector& state, const ComplexVector& ground);
ComplexVector error_vector(const EvolutionResult& result, const HamiltonianModel& model);

/// max over s of ||H(s)|| on a coarse grid including both ends.
double max_hamiltonian_norm(const HamiltonianModel& model);

}  // namespace adiabound
