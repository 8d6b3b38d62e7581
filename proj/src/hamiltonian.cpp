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

#include "adiabound/hamiltonian.hpp"

#include <cmath>
#include <limits>

#include "adiabound/error.hpp"

namespace adiabound {

double default_fd_step(int order, double scale) {
  const double eps = std::numeric_limits<double>::epsilon();
  return std::pow(eps, 1.0 / (order + 2)) * scale;
}

ComplexMatrix finite_difference_derivative(const HamiltonianModel& model, double s, int order,
                                           double step) {
  if (order < 1 || order > 3) {
    throw Error(ErrorKind::DifferentiationFailure, "derivative order must be 1, 2 or 3");
  }
  const double floor = 1e-3 * default_fd_step(order, model.time_scale());
  if (!(step >= floor)) {
    throw Error(ErrorKind::DifferentiationFailure,
                "finite-difference step " + std::to_string(step) + " below precision floor " +
                    std::to_string(floor));
  }
  const double h = step;
  auto f = [&](double k) { return model.evaluate(s + k * h); };
  switch (order) {
    case 1:
      return (-f(2) + 8.0 * f(1) - 8.0 * f(-1) + f(-2)) / (12.0 * h);
    case 2:
      return (-f(2) + 16.0 * f(1) - 30.0 * f(0) + 16.0 * f(-1) - f(-2)) / (12.0 * h * h);
    default:
      return (-f(3) + 8.0 * f(2) - 13.0 * f(1) + 13.0 * f(-1) - 8.0 * f(-2) + f(-3)) /
             (8.0 * h * h * h);
  }
}

ComplexMatrix HamiltonianModel::derivative(double s, int order) const {
  return finite_difference_derivative(*this, s, order, default_fd_step(order, time_scale()));
}

}  // namespace adiabound
