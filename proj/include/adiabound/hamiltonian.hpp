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

#include <complex>
#include <memory>
#include <string>

#include <Eigen/Dense>
#include <nlohmann/json.hpp>

namespace adiabound {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;

struct SearchAnalytics;

/// A Hamiltonian H(s) on dimensionless time s in [0, 1].
///
/// Models whose entries depend on the total evolution time T (Marzlin-Sanders)
/// are constructed for one T; `t_dependent()` tells callers that a new
/// instance is needed whenever T changes.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;

  virtual int dimension() const = 0;
  virtual ComplexMatrix evaluate(double s) const = 0;

  /// k-th derivative in s for k in {1, 2, 3}. The default implementation uses
  /// fourth-order central finite differences.
  virtual ComplexMatrix derivative(double s, int order) const;

  virtual bool has_analytic_derivatives() const { return false; }
  virtual bool t_dependent() const { return false; }

  /// Characteristic scale in s over which H varies; scales finite-difference steps.
  virtual double time_scale() const { return 1.0; }

  virtual const SearchAnalytics* search_analytics() const { return nullptr; }

  virtual std::string name() const = 0;
  virtual nlohmann::json parameters() const { return nlohmann::json::object(); }
};

using ModelPtr = std::shared_ptr<const HamiltonianModel>;

/// Default finite-difference step for derivative order k: eps^(1/(k+2)) * scale.
double default_fd_step(int order, double scale = 1.0);

/// Fourth-order central-difference estimate of the k-th derivative of H at s.
/// Throws DifferentiationFailure when `step` is below the precision floor for
/// that order.
ComplexMatrix finite_difference_derivative(const HamiltonianModel& model, double s, int order,
                                           double step);

}  // namespace adiabound
