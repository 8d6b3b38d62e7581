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

#include "adiabound/propagator.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "adiabound/error.hpp"
#include "adiabound/linalg.hpp"
#include "adiabound/models.hpp"

namespace adiabound {
namespace {

void apply_step(const ComplexMatrix& h, double dt, ComplexVector& psi) {
  const Spectrum sp = hermitian_eigs(h);
  ComplexVector c = sp.vectors.adjoint() * psi;
  for (Eigen::Index i = 0; i < c.size(); ++i) c[i] *= std::polar(1.0, -sp.energies[i] * dt);
  psi = sp.vectors * c;
}

ComplexVector ground_at(const HamiltonianModel& model, double s) {
  const Spectrum sp = hermitian_eigs(model.evaluate(s), s);
  if (sp.degenerate(0, 1)) {
    throw Error(ErrorKind::DegenerateGroundState, "ground level degenerate at s=" + std::to_string(s));
  }
  return sp.vectors.col(0);
}

}  // namespace

std::string to_string(ScheduleKind kind) { return kind == ScheduleKind::Phi ? "phi" : "uniform"; }

ScheduleKind schedule_kind_from_string(const std::string& text) {
  if (text == "phi") return ScheduleKind::Phi;
  if (text == "uniform") return ScheduleKind::Uniform;
  throw Error(ErrorKind::ValidationError, "schedule must be 'uniform' or 'phi', got '" + text + "'");
}

Schedule uniform_schedule(int steps) {
  if (steps < 1) throw Error(ErrorKind::ValidationError, "schedule needs at least one step");
  Schedule out;
  out.kind = ScheduleKind::Uniform;
  out.breakpoints.resize(steps + 1);
  for (int j = 0; j <= steps; ++j) out.breakpoints[j] = static_cast<double>(j) / steps;
  out.breakpoints.back() = 1.0;
  return out;
}

Schedule phi_schedule(const HamiltonianModel& model, int steps) {
  const SearchAnalytics* an = model.search_analytics();
  if (an == nullptr) {
    throw Error(ErrorKind::NoAnalytics, "model '" + model.name() + "' has no closed-form phi(s)");
  }
  if (steps < 2) throw Error(ErrorKind::ValidationError, "phi schedule needs L >= 2");
  const double total = an->phi(1.0);
  Schedule out;
  out.kind = ScheduleKind::Phi;
  out.breakpoints.resize(steps + 1);
  out.breakpoints.front() = 0.0;
  out.breakpoints.back() = 1.0;
  double lo = 0.0;
  for (int j = 1; j < steps; ++j) {
    const double target = total * j / steps;
    auto f = [&](double s) { return an->phi(s) - target; };
    boost::uintmax_t iters = 200;
    const auto [a, b] = boost::math::tools::toms748_solve(f, lo, 1.0, f(lo), f(1.0),
                                                          boost::math::tools::eps_tolerance<double>(), iters);
    out.breakpoints[j] = 0.5 * (a + b);
    lo = out.breakpoints[j];
  }
  return out;
}

Schedule make_schedule(const HamiltonianModel& model, ScheduleKind kind, int steps) {
  if (kind == ScheduleKind::Phi && model.search_analytics() != nullptr) return phi_schedule(model, steps);
  return uniform_schedule(steps);
}

ComplexVector initial_ground_state(const HamiltonianModel& model) {
  const Spectrum sp = anchor_spectrum(model);
  if (sp.degenerate(0, 1)) throw Error(ErrorKind::DegenerateGroundState, "ground level degenerate at s=0");
  return sp.vectors.col(0);
}

ComplexVector final_ground_state(const HamiltonianModel& model) { return ground_at(model, 1.0); }

double max_hamiltonian_norm(const HamiltonianModel& model) {
  double best = 0.0;
  for (int i = 0; i <= 64; ++i) best = std::max(best, spectral_norm(model.evaluate(i / 64.0)));
  return best;
}

EvolutionResult evolve_product(const HamiltonianModel& model, double total_time, const Schedule& schedule,
                               StepRule rule) {
  if (!(total_time >= 0.0)) throw Error(ErrorKind::ValidationError, "T must be non-negative");
  const auto& s = schedule.breakpoints;
  if (s.size() < 2 || s.front() != 0.0 || s.back() != 1.0) {
    throw Error(ErrorKind::ValidationError, "schedule must run from 0 to 1");
  }
  EvolutionResult out;
  out.final_state = initial_ground_state(model);
  out.method = rule == StepRule::Midpoint ? "product-midpoint" : "product-left";
  out.L_used = schedule.steps();
  if (total_time > 0.0) {
    for (int j = 0; j < schedule.steps(); ++j) {
      const double ds = s[j + 1] - s[j];
      const double at = rule == StepRule::Midpoint ? 0.5 * (s[j] + s[j + 1]) : s[j];
      apply_step(model.evaluate(at), total_time * ds, out.final_state);
    }
  }
  out.accepted_steps = schedule.steps();
  out.norm_drift = std::abs(out.final_state.norm() - 1.0);
  out.error = adiabatic_error(out.final_state, final_ground_state(model));
  return out;
}

EvolutionResult evolve_adaptive(const HamiltonianModel& model, double total_time, ScheduleKind kind,
                                const AdaptiveOptions& options) {
  if (!(options.rel_tol > 0.0 && options.rel_tol <= 0.5)) {
    throw Error(ErrorKind::ValidationError, "rel_tol must lie in (0, 0.5]");
  }
  const double hmax = max_hamiltonian_norm(model);
  long long steps = std::max<long long>(64, static_cast<long long>(std::ceil(8.0 * total_time * hmax)));
  if (steps > options.max_steps) {
    throw Error(ErrorKind::BudgetExceeded, "initial L=" + std::to_string(steps) + " exceeds the cap");
  }
  EvolutionResult coarse = evolve_product(model, total_time, make_schedule(model, kind, steps), options.rule);
  std::vector<RefinementStep> history{{static_cast<int>(steps), coarse.error}};
  while (true) {
    if (2 * steps > options.max_steps) {
      throw Error(ErrorKind::BudgetExceeded,
                  "L=" + std::to_string(2 * steps) + " exceeds the cap of " + std::to_string(options.max_steps));
    }
    steps *= 2;
    EvolutionResult fine =
        evolve_product(model, total_time, make_schedule(model, kind, static_cast<int>(steps)), options.rule);
    history.push_back({static_cast<int>(steps), fine.error});
    bool done = std::abs(fine.error - coarse.error) <= options.rel_tol * std::max(fine.error, options.error_floor);
    if (done && options.state_tol) done = (fine.final_state - coarse.final_state).norm() <= *options.state_tol;
    if (done) {
      fine.method = "adaptive-" + fine.method;
      fine.history = std::move(history);
      return fine;
    }
    coarse = std::move(fine);
  }
}

EvolutionResult evolve_rk(const HamiltonianModel& model, double total_time, const RkOptions& options) {
  return evolve_rk(model, total_time, initial_ground_state(model), options);
}

EvolutionResult evolve_rk(const HamiltonianModel& model, double total_time, const ComplexVector& initial,
                          const RkOptions& options) {
  // Dormand-Prince tableau.
  static constexpr double c[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b4[7] = {5179.0 / 57600, 0.0,          7571.0 / 16695, 393.0 / 640,
                                   -92097.0 / 339200, 187.0 / 2100, 1.0 / 40};

  if (!(total_time >= 0.0)) throw Error(ErrorKind::ValidationError, "T must be non-negative");
  EvolutionResult out;
  out.method = "rk45";
  ComplexVector psi = initial;
  const cplx mit(0.0, -total_time);
  auto rhs = [&](double s, const ComplexVector& y) -> ComplexVector { return mit * (model.evaluate(s) * y); };

  if (total_time > 0.0) {
    double s = 0.0;
    double h = std::min(0.05, 0.05 / (total_time * max_hamiltonian_norm(model) + 1e-300));
    ComplexVector k[7];
    k[0] = rhs(0.0, psi);
    while (s < 1.0) {
      h = std::min(h, 1.0 - s);
      if (h < options.min_step) {
        throw Error(ErrorKind::StepUnderflow, "RK step " + std::to_string(h) + " at s=" + std::to_string(s));
      }
      for (int i = 1; i < 7; ++i) {
        ComplexVector y = psi;
        for (int j = 0; j < i; ++j) {
          if (a[i][j] != 0.0) y += (h * a[i][j]) * k[j];
        }
        k[i] = rhs(s + c[i] * h, y);
      }
      ComplexVector y5 = psi;
      ComplexVector err = ComplexVector::Zero(psi.size());
      for (int j = 0; j < 7; ++j) {
        const double b5 = j < 6 ? a[6][j] : 0.0;
        if (b5 != 0.0) y5 += (h * b5) * k[j];
        err += (h * (b5 - b4[j])) * k[j];
      }
      const double e = err.cwiseAbs().maxCoeff();
      if (e <= options.tol) {
        s = (1.0 - s - h <= 0.0) ? 1.0 : s + h;
        psi = std::move(y5);
        k[0] = k[6];  // first-same-as-last
        ++out.accepted_steps;
      } else {
        ++out.rejected_steps;
      }
      const double factor = e == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(options.tol / e, 0.2), 0.2, 5.0);
      h *= factor;
    }
  }
  out.norm_drift = std::abs(psi.norm() - 1.0);
  if (options.renormalize && total_time > 0.0) psi.normalize();
  out.final_state = std::move(psi);
  out.error = adiabatic_error(out.final_state, final_ground_state(model));
  return out;
}

ComplexVector error_vector(const ComplexVector& state, const ComplexVector& ground) {
  return state - ground * ground.dot(state);
}

double adiabatic_error(const ComplexVector& state, const ComplexVector& ground) {
  return std::min(1.0, error_vector(state, ground).norm());
}

double adiabatic_error(const EvolutionResult& result, const HamiltonianModel& model) {
  return adiabatic_error(result.final_state, final_ground_state(model));
}

ComplexVector error_vector(const EvolutionResult& result, const HamiltonianModel& model) {
  return error_vector(result.final_state, final_ground_state(model));
}

}  // namespace adiabound
