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

#include "adiabound/quadrature.hpp"

#include <array>
#include <cmath>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/special_functions/legendre.hpp>

#include "adiabound/error.hpp"

namespace adiabound {
namespace {

using cplx = std::complex<double>;
using Gauss = boost::math::quadrature::gauss<double, kPanelOrder>;

struct Reference {
  std::array<double, kPanelOrder> x{};
  std::array<double, kPanelOrder> w{};
  // cum[i][k]: integral from -1 to x_i of the k-th Lagrange basis polynomial.
  std::array<std::array<double, kPanelOrder>, kPanelOrder> cum{};
};

const Reference& reference() {
  static const Reference ref = [] {
    Reference r;
    const auto& abs = Gauss::abscissa();
    const auto& wts = Gauss::weights();
    const int half = kPanelOrder / 2;
    for (int i = 0; i < half; ++i) {
      r.x[half - 1 - i] = -abs[i];
      r.w[half - 1 - i] = wts[i];
      r.x[half + i] = abs[i];
      r.w[half + i] = wts[i];
    }
    // Expand the Lagrange basis in Legendre polynomials, then integrate termwise:
    // int_{-1}^x P_0 = x + 1, int_{-1}^x P_k = (P_{k+1} - P_{k-1}) / (2k + 1).
    for (int j = 0; j < kPanelOrder; ++j) {
      std::array<double, kPanelOrder> coef{};
      for (int k = 0; k < kPanelOrder; ++k) {
        coef[k] = 0.5 * (2 * k + 1) * r.w[j] * boost::math::legendre_p(k, r.x[j]);
      }
      for (int i = 0; i < kPanelOrder; ++i) {
        const double x = r.x[i];
        double acc = coef[0] * (x + 1.0);
        for (int k = 1; k < kPanelOrder; ++k) {
          acc += coef[k] * (boost::math::legendre_p(k + 1, x) - boost::math::legendre_p(k - 1, x)) / (2 * k + 1);
        }
        r.cum[i][j] = acc;
      }
    }
    return r;
  }();
  return ref;
}

double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                    double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

PanelGrid::PanelGrid(int panels) : panels_(panels) {
  if (panels < 1) throw Error(ErrorKind::ValidationError, "panel grid needs at least one panel");
  const Reference& ref = reference();
  nodes_.reserve(static_cast<std::size_t>(panels) * kPanelOrder);
  weights_.reserve(nodes_.capacity());
  const double h = width();
  for (int p = 0; p < panels; ++p) {
    const double a = p * h;
    for (int i = 0; i < kPanelOrder; ++i) {
      nodes_.push_back(a + 0.5 * h * (ref.x[i] + 1.0));
      weights_.push_back(0.5 * h * ref.w[i]);
    }
  }
}

cplx PanelGrid::cumulative(std::span<const cplx> f, std::span<cplx> out) const {
  if (f.size() != nodes_.size() || out.size() != nodes_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "cumulative integral needs one value per node");
  }
  const Reference& ref = reference();
  const double half = 0.5 * width();
  cplx base = 0.0;
  for (int p = 0; p < panels_; ++p) {
    const std::size_t off = static_cast<std::size_t>(p) * kPanelOrder;
    cplx panel_total = 0.0;
    for (int j = 0; j < kPanelOrder; ++j) panel_total += ref.w[j] * f[off + j];
    for (int i = 0; i < kPanelOrder; ++i) {
      cplx acc = 0.0;
      for (int j = 0; j < kPanelOrder; ++j) acc += ref.cum[i][j] * f[off + j];
      out[off + i] = base + half * acc;
    }
    base += half * panel_total;
  }
  return base;
}

cplx PanelGrid::integrate(std::span<const cplx> f) const {
  if (f.size() != nodes_.size()) {
    throw Error(ErrorKind::DimensionMismatch, "integral needs one value per node");
  }
  cplx total = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) total += weights_[i] * f[i];
  return total;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double rel_tol,
                        int max_depth) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  // Seed the absolute tolerance from a coarse estimate of the integral.
  const double scale = std::max(std::abs(whole), std::abs(composite_simpson(f, a, b, 65)));
  return simpson_step(f, a, b, fa, fm, fb, whole, rel_tol * std::max(scale, 1e-300), max_depth);
}

double composite_simpson(const std::function<double(double)>& f, double a, double b, int points) {
  if (points < 3 || points % 2 == 0) {
    throw Error(ErrorKind::ValidationError, "composite Simpson needs an odd number of points >= 3");
  }
  const int intervals = points - 1;
  const double h = (b - a) / intervals;
  double acc = f(a) + f(b);
  for (int i = 1; i < intervals; ++i) acc += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return acc * h / 3.0;
}

}  // namespace adiabound
