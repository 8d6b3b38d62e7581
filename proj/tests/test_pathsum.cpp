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

#include <cmath>
#include <numbers>
#include <sstream>

#include "doctest.h"

#include "adiabound/error.hpp"
#include "adiabound/models.hpp"
#include "adiabound/pathsum.hpp"
#include "adiabound/propagator.hpp"

using namespace adiabound;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix diag2(double a, double b) {
  ComplexMatrix m = ComplexMatrix::Zero(2, 2);
  m(0, 0) = a;
  m(1, 1) = b;
  return m;
}

// Trapezoid on 200001 points; the gap is smooth so this is accurate to ~1e-11.
double gap_integral_oracle(int n) {
  const double c = 4.0 * (1.0 - 1.0 / n);
  const int pts = 200000;
  double acc = 0.0;
  for (int i = 0; i <= pts; ++i) {
    const double s = static_cast<double>(i) / pts;
    const double w = (i == 0 || i == pts) ? 0.5 : 1.0;
    acc += w * std::sqrt(1.0 - c * s * (1.0 - s));
  }
  return acc / pts;
}

double tail_oracle(double gamma_factor, double h1, double gmin, double t) {
  const double x = gamma_factor / (gmin * t);
  return (1.0 + gamma_factor / (h1 * t)) * std::expm1(x) - x;
}

}  // namespace

TEST_CASE("panel quadrature against closed forms") {
  const PanelGrid grid(40);
  const double t = 75.0;
  SUBCASE("constant amplitude, constant gap") {
    const double a = 0.8;
    std::vector<cplx> f(grid.nodes().size()), cum(grid.nodes().size());
    for (std::size_t i = 0; i < f.size(); ++i) f[i] = std::exp(cplx(0.0, -t * a * grid.nodes()[i]));
    const cplx total = grid.cumulative(f, cum);
    const cplx oracle = (1.0 - std::exp(cplx(0.0, -t * a))) / cplx(0.0, t * a);
    CHECK(std::abs(total - oracle) < 1e-13);
    CHECK(std::abs(grid.integrate(f) - oracle) < 1e-13);
    for (std::size_t i = 0; i < f.size(); i += 37) {
      const double s = grid.nodes()[i];
      const cplx partial = (1.0 - std::exp(cplx(0.0, -t * a * s))) / cplx(0.0, t * a);
      CHECK(std::abs(cum[i] - partial) < 1e-13);
    }
  }
  SUBCASE("amplitude proportional to a linear gap") {
    const double a = 0.5, b = 1.0;
    std::vector<cplx> f(grid.nodes().size()), cum(grid.nodes().size());
    for (std::size_t i = 0; i < f.size(); ++i) {
      const double s = grid.nodes()[i];
      f[i] = (a + b * s) * std::exp(cplx(0.0, -t * (a * s + 0.5 * b * s * s)));
    }
    const cplx oracle = (1.0 - std::exp(cplx(0.0, -t * (a + 0.5 * b)))) / cplx(0.0, t);
    CHECK(std::abs(grid.cumulative(f, cum) - oracle) < 1e-13);
  }
  SUBCASE("Simpson rules") {
    CHECK(adaptive_simpson([](double x) { return std::sin(x); }, 0.0, kPi, 1e-12) ==
          doctest::Approx(2.0).epsilon(1e-11));
    CHECK(composite_simpson([](double x) { return x * x * x - x; }, 0.0, 2.0, 3) ==
          doctest::Approx(2.0).epsilon(1e-14));
  }
}

TEST_CASE("tunneling amplitudes") {
  const auto flat = linear_interpolation_model(diag2(0, 1), diag2(0, 1));
  const Spectrum fs = hermitian_eigs(flat->evaluate(0.3), 0.3);
  CHECK(beta(*flat, fs, 0, 1) == cplx(0.0));
  CHECK(beta(*flat, fs, 1, 0) == cplx(0.0));

  const auto model = search_model(4);
  const std::vector<double> nodes{0.5};
  const Spectrum sp = track_spectra(*model, nodes).front();
  CHECK(beta(*model, sp, 1, 1) == cplx(0.0));
  const double b = std::abs(beta(*model, sp, 1, 0));
  CHECK(b == doctest::Approx(model->search_analytics()->phi_dot(0.5)).epsilon(1e-12));
  CHECK(b == doctest::Approx(std::sqrt(3.0)).epsilon(1e-12));
  // |<G'|1>| by central differences of the closed-form eigenvectors.
  const auto& an = *model->search_analytics();
  const double h = 1e-5;
  const ComplexVector gdot = (an.eigenvectors(0.5 + h).first - an.eigenvectors(0.5 - h).first) / (2 * h);
  CHECK(std::abs(gdot.dot(an.eigenvectors(0.5).second)) == doctest::Approx(b).epsilon(1e-8));
  // Uncoupled degenerate levels carry no amplitude.
  CHECK(beta(*model, sp, 2, 0) == cplx(0.0));
}

TEST_CASE("jump paths") {
  const auto model = search_model(4);
  CHECK_THROWS_AS(JumpPath({{0, 0}, {0.0, 0.5}}).validate(4), Error);
  CHECK_THROWS_AS(JumpPath({{0, 1}, {0.0, 1.5}}).validate(4), Error);
  CHECK_THROWS_AS(JumpPath({{1, 0}, {0.0, 0.5}}).validate(4), Error);
  CHECK(JumpPath({{0, 1, 0}, {0.0, 0.2, 0.4}}).jumps() == 2);
  CHECK(!JumpPath({{0, 1, 0}, {0.0, 0.2, 0.4}}).non_adiabatic());

  SUBCASE("off-grid times") {
    const JumpPath path{{0, 1}, {0.0, 0.3}};
    try {
      path_product_check(*model, path, 512);
      FAIL("expected TimesNotOnGrid");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::TimesNotOnGrid);
    }
    const PathProductCheck c = path_product_check(*model, path, 512, true);
    CHECK(c.snapped);
    CHECK(c.grid_index.front() == 154);
  }
  SUBCASE("constant Hamiltonian") {
    const auto flat = linear_interpolation_model(diag2(0, 1), diag2(0, 1));
    const PathProductCheck c = path_product_check(*flat, JumpPath{{0, 1}, {0.0, 0.5}}, 64);
    CHECK(c.product.norm() == 0.0);
    CHECK(c.formula.norm() == 0.0);
  }
  SUBCASE("residual shrinks as 1/L after normalisation") {
    for (const JumpPath& path : {JumpPath{{0, 1}, {0.0, 0.5}}, JumpPath{{0, 1, 0}, {0.0, 0.25, 0.75}}}) {
      double prev = 0.0;
      for (int L : {256, 512, 1024}) {
        const PathProductCheck c = path_product_check(*model, path, L);
        CHECK(c.formula.norm() > 0.0);
        if (prev > 0.0) CHECK(prev / c.normalized_residual == doctest::Approx(2.0).epsilon(0.2));
        prev = c.normalized_residual;
      }
    }
  }
}

TEST_CASE("first-order term on the search model") {
  const auto model = search_model(4);
  const double kappa = gap_integral_oracle(4);
  for (double t : {13.0, 50.0, 333.0}) {
    const FirstOrderTerm fo = first_order_term(*model, t);
    const double oracle = std::sqrt(3.0) / (2 * t) * std::abs(std::sin(kappa * t / 2));
    CHECK(fo.norm == doctest::Approx(oracle).epsilon(1e-8));
    CHECK(fo.vector.norm() == doctest::Approx(fo.norm).epsilon(1e-12));
    CHECK(fo.norm <= std::sqrt(3.0) / (2 * t) * (1 + 1e-12));
  }
  for (int n = 1; n <= 3; ++n) {
    CHECK(first_order_term(*model, 2 * kPi * n / kappa).norm < 1e-9 / n);
  }
  const auto flat = linear_interpolation_model(diag2(0, 1), diag2(0, 1));
  CHECK(first_order_term(*flat, 10.0).norm == 0.0);
}

TEST_CASE("first-order term predicts the exact error at large T") {
  const auto model = search_model(4);
  const EvolutionResult r = evolve_adaptive(*model, 1000.0, ScheduleKind::Phi);
  const FirstOrderTerm fo = first_order_term(*model, 1000.0);
  CHECK(std::abs(r.error - fo.norm) <= 0.01 * fo.norm);
}

TEST_CASE("jump contributions") {
  const auto flat = linear_interpolation_model(diag2(0, 1), diag2(0, 1));
  const JumpContribution zero = jump_contribution(*flat, 20.0, 2);
  CHECK(zero.norm == 0.0);
  CHECK(zero.vector.norm() == 0.0);

  const auto model = search_model(4);
  SUBCASE("integration-by-parts estimate") {
    const double h1 = std::sqrt(3.0) / 2, gmin = 0.5;
    for (double t : {500.0, 1000.0}) {
      CHECK(jump_contribution(*model, t, 1).norm * t <= 2 * h1 / (gmin * gmin));
    }
  }
  SUBCASE("reconstruction of the exact error vector") {
    const double h1 = std::sqrt(3.0) / 2, gmin = 0.5;
    const double gamma_factor = 6 * std::pow(h1 / gmin, 3) + 2 * std::pow(h1 / gmin, 2);
    for (double t : {30.0, 60.0}) {
      const auto cs = jump_contributions(*model, t, 2);
      REQUIRE(cs.size() == 2);
      AdaptiveOptions opts;
      opts.state_tol = 1e-9;
      const ComplexVector exact = error_vector(evolve_adaptive(*model, t, ScheduleKind::Phi, opts), *model);
      const double miss = (exact - cs[0].vector - cs[1].vector).norm();
      CHECK(miss <= tail_oracle(gamma_factor, h1, gmin, t) + 1e-9);
      // One-jump paths already carry almost all of the error.
      CHECK(miss < 0.5 * exact.norm());
    }
  }
  SUBCASE("reversal keeps the one-jump norm") {
    const ReversedModel reversed(model);
    const double a = jump_contribution(*model, 40.0, 1).norm;
    const double b = jump_contribution(reversed, 40.0, 1).norm;
    CHECK(b == doctest::Approx(a).epsilon(1e-8));
  }
  SUBCASE("argument validation") {
    JumpOptions bad;
    bad.quad_tol = 0.5;
    CHECK_THROWS_AS(jump_contribution(*model, 10.0, 1, bad), Error);
    CHECK_THROWS_AS(jump_contribution(*model, 10.0, 3), Error);
    JumpOptions tiny;
    tiny.max_panels = 8;
    try {
      jump_contribution(*model, 10.0, 1, tiny);
      FAIL("expected QuadratureBudget");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::QuadratureBudget);
    }
  }
}

TEST_CASE("one-jump phasors") {
  const auto toy = linear_interpolation_model(diag2(0, 1), diag2(0, 2));
  auto mean = [](const std::vector<cplx>& v) {
    cplx acc = 0.0;
    for (cplx z : v) acc += z;
    return std::abs(acc) / static_cast<double>(v.size());
  };
  for (cplx z : one_jump_phasors(*toy, 0.0, 21)) CHECK(z == cplx(1.0));
  const auto slow = one_jump_phasors(*toy, 0.01, 21);
  CHECK(slow.size() == 21);
  CHECK(mean(slow) * 21 >= 20.9);
  const auto fast = one_jump_phasors(*toy, 4.0, 21);
  CHECK(mean(fast) < 0.5);
  for (int j = 0; j < 21; ++j) {
    const double s = j / 20.0;
    const double phase = -4.0 * ((1 - s) + 0.5 * (1 - s * s));
    CHECK(std::abs(fast[j] - std::polar(1.0, phase)) < 1e-12);
  }
  std::ostringstream csv;
  write_complex_csv(csv, fast);
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "index,re,im");
  int rows = 0;
  while (std::getline(in, line)) {
    int idx;
    double re, im;
    REQUIRE(std::sscanf(line.c_str(), "%d,%lf,%lf", &idx, &re, &im) == 3);
    CHECK(cplx(re, im) == fast[idx]);
    ++rows;
  }
  CHECK(rows == 21);
  CHECK_THROWS_AS(one_jump_phasors(*toy, 1.0, 1), Error);
}
