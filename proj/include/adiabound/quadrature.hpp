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
#include <functional>
#include <span>
#include <vector>

namespace adiabound {

inline constexpr int kPanelOrder = 16;

/// Composite Gauss-Legendre rule of order 16 on [0, 1] with uniform panels.
class PanelGrid {
 public:
  explicit PanelGrid(int panels);

  int panels() const { return panels_; }
  double width() const { return 1.0 / panels_; }
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& weights() const { return weights_; }

  /// F_i = integral of the interpolant of f from 0 to nodes()[i]; returns the
  /// integral over [0, 1].
  std::complex<double> cumulative(std::span<const std::complex<double>> f,
                                  std::span<std::complex<double>> out) const;
  std::complex<double> integrate(std::span<const std::complex<double>> f) const;

 private:
  int panels_;
  std::vector<double> nodes_;
  std::vector<double> weights_;
};

/// Adaptive Simpson quadrature with relative tolerance.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        int max_depth = 50);

/// Composite Simpson on `points` (odd) equally spaced samples.
double composite_simpson(const std::function<double(double)>& f, double a, double b, int points);

}  // namespace adiabound
