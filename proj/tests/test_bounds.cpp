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

#include "doctest.h"

#include "adiabound/bounds.hpp"
#include "adiabound/error.hpp"
#include "adiabound/models.hpp"
#include "adiabound/pathsum.hpp"
#include "adiabound/propagator.hpp"

using namespace adiabound;

namespace {

constexpr double kPi = std::numbers::pi;

ComplexMatrix diag(std::initializer_list<double> d) {
  ComplexMatrix m = ComplexMatrix::Zero(static_cast<Eigen::Index>(d.size()), static_cast<Eigen::Index>(d.size()));
  Eigen::Index i = 0;
  for (double x : d) m(i, i) = x, ++i;
  return m;
}

DerivativeNorms unit_norms() {
  DerivativeNorms n;
  n.h1 = n.h2 = n.h3 = 1.0;
  n.gamma_min = n.ground_gap_min = 1.0;
  return n;
}

// Series sum of e^x - 1 - x, accurate for moderate x without expm1.
double expm1x_series(double x) {
  double term = x, acc = 0.0;
  for (int k = 2; k < 60; ++k) {
    term *= x / k;
    acc += term;
  }
  return acc;
}

}  // namespace

TEST_CASE("timescales at the unit configuration") {
  CHECK(delta1(1, 1, 1, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(delta0(1, 1, 3, 1, 3) == doctest::Approx(2.0).epsilon(1e-14));
  const Timescales t = timescales(unit_norms(), 3.0);
  CHECK(t.delta1 == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(t.delta0 == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(delta1(0, 0, 0, 1) == 0.0);
  CHECK(delta0(0, 1, 0, 1, 1) == 0.0);
  CHECK_THROWS_AS(delta1(1, 1, 1, 0), Error);
  CHECK_THROWS_AS(delta0(1, 1, 1, 1, 0), Error);
}

TEST_CASE("gamma factor") {
  CHECK(gamma_factor(1, 1, 1) == doctest::Approx(9.0).epsilon(1e-14));
  CHECK(gamma_factor(0, 5, 0.3) == 0.0);
  // Search N=4: h1 = sqrt(3)/2, h2 = 0, gamma_min = 1/2 gives 18 sqrt(3) + 6.
  CHECK(std::abs(gamma_factor(std::sqrt(3.0) / 2, 0.0, 0.5) - (18 * std::sqrt(3.0) + 6)) < 1e-12);
}

TEST_CASE("remainder polynomial and tail") {
  CHECK(remainder_polynomial(1, 1, 1, 1) == doctest::Approx(211.0).epsilon(1e-14));
  const double bracket = 1.09 * std::expm1(0.09) - 0.09;
  CHECK(tail_bound(9, 1, 1, 100) == doctest::Approx(bracket).epsilon(1e-12));
  CHECK(tail_bound(9, 1, 1, 100) == doctest::Approx(0.012645).epsilon(1e-4));
  CHECK(remainder_R(1, 1, 1, 1, 100) == doctest::Approx(211 + 1e4 * bracket).epsilon(1e-12));
  CHECK(remainder_R(1, 1, 1, 1, 100) == doctest::Approx(337.4).epsilon(1e-3));
  CHECK(tail_bound(0, 1, 1, 100) == 0.0);
  CHECK(remainder_R(0, 0, 0, 1, 10) == 0.0);
  CHECK(two_level_tail(9, 1, 1, 100) == doctest::Approx(0.09 * std::expm1(0.09)).epsilon(1e-13));
}

TEST_CASE("small-argument tail against a long series") {
  for (double x : {1e-12, 1e-9, 3e-8, 1e-6, 1e-3, 0.5}) {
    CHECK(expm1_minus_x(x) == doctest::Approx(expm1x_series(x)).epsilon(1e-7));
  }
  // Gamma/(gamma_min T) = 1e-10: tail is x^2/2 + (Gamma/(h1 T)) x to leading order.
  const double t = 9e10;
  const double x = 9.0 / t;
  CHECK(tail_bound(9, 1, 1, t) == doctest::Approx(x * x / 2 + x * x * (1 + x / 2)).epsilon(1e-6));
  CHECK(tail_bound(9, 1, 1, t) > 0.0);
}

TEST_CASE("tail and R decrease with T; tail falls like 1/T^2") {
  double prev_tail = tail_bound(9, 1, 1, 10);
  double prev_r = remainder_R(1, 1, 1, 1, 10);
  for (double t = 20; t <= 1e6; t *= 2) {
    const double tail = tail_bound(9, 1, 1, t);
    const double r = remainder_R(1, 1, 1, 1, t);
    CHECK(tail < prev_tail);
    CHECK(r < prev_r);
    if (t >= 1e4) CHECK(prev_tail / tail == doctest::Approx(4.0).epsilon(0.01));
    prev_tail = tail;
    prev_r = r;
  }
}

TEST_CASE("one-jump remainders") {
  const OneJumpRemainders u = lemma7_bounds(1, 1, 1, 1, 1);
  CHECK(std::abs(u.R0 - 123.0) < 1e-12);
  CHECK(std::abs(u.C2_bound - 88.0) < 1e-12);
  const OneJumpRemainders a = lemma7_bounds(0.7, 1.3, 2.1, 0.4, 37.0);
  const OneJumpRemainders b = lemma7_bounds(0.7, 1.3, 2.1, 0.4, 74.0);
  CHECK(b.R0 == doctest::Approx(a.R0 / 4).epsilon(1e-14));
  CHECK(b.C2_bound == doctest::Approx(a.C2_bound / 4).epsilon(1e-14));
  // R/T^2 splits into R0 + C2 bound + the multi-jump tail.
  for (double t : {1.0, 13.0, 250.0}) {
    const double h1 = 0.7, h2 = 1.3, h3 = 2.1, g = 0.4;
    const OneJumpRemainders l = lemma7_bounds(h1, h2, h3, g, t);
    const double tail = tail_bound(gamma_factor(h1, h2, g), h1, g, t);
    CHECK(remainder_R(h1, h2, h3, g, t) / (t * t) == doctest::Approx(l.R0 + l.C2_bound + tail).epsilon(1e-13));
  }
}

TEST_CASE("beta derivative bounds") {
  const BetaDerivativeBounds b = beta_derivative_bounds(1, 1, 1, 1);
  CHECK(b.beta_dot == doctest::Approx(5.0).epsilon(1e-14));
  CHECK(b.beta_ddot == doctest::Approx(57.0).epsilon(1e-14));
  CHECK(b.gap_ddot == doctest::Approx(10.0).epsilon(1e-14));

  // Sampled |d|beta|/ds| and |gap''| stay under the bounds on search N=4.
  const auto model = search_model(4);
  const SearchAnalytics& an = *model->search_analytics();
  const DerivativeNorms n = derivative_norms(*model, SampleGrid::uniform(257));
  const BetaDerivativeBounds sb = beta_derivative_bounds(n.h1, n.h2, n.h3, n.gamma_min);
  auto abs_beta = [&](double s) { return std::abs(beta(*model, hermitian_eigs(model->evaluate(s), s), 1, 0)); };
  double max_dot = 0.0, max_gap_ddot = 0.0;
  const double h = 1e-5;
  for (int i = 1; i < 200; ++i) {
    const double s = i / 200.0;
    max_dot = std::max(max_dot, std::abs(abs_beta(s + h) - abs_beta(s - h)) / (2 * h));
    const double g2 = (an.gap(s + 1e-4) - 2 * an.gap(s) + an.gap(s - 1e-4)) / 1e-8;
    max_gap_ddot = std::max(max_gap_ddot, std::abs(g2));
  }
  CHECK(max_dot > 0.0);
  CHECK(max_dot <= sb.beta_dot);
  CHECK(max_gap_ddot <= sb.gap_ddot);
}

TEST_CASE("JRS bound") {
  JrsProfile p;
  p.hdot0 = p.hdot1 = 1.0;
  p.gap0 = p.gap1 = 1.0;
  p.hddot_integral = 0.0;
  p.hdot_sq_integral = 1.0;
  CHECK(std::abs(p.value(9.0, 1) - 1.0) < 1e-12);
  CHECK(p.value(9.0, 4) == doctest::Approx((2 * 4 + 7 * 8) / 9.0).epsilon(1e-14));
  CHECK_THROWS_AS(p.value(9.0, 0), Error);

  // Hdot = identity on diag(0,1) -> diag(1,2): unit norms and a unit gap everywhere.
  const auto unit = linear_interpolation_model(diag({0, 1}), diag({1, 2}));
  CHECK(std::abs(jrs_bound(*unit, 9.0) - 1.0) < 1e-12);
  const JrsProfile up = jrs_profile(*unit);
  CHECK(up.points >= 513);
  CHECK(up.points % 2 == 1);

  const auto flat = linear_interpolation_model(diag({0, 1}), diag({0, 1}));
  CHECK(jrs_bound(*flat, 5.0) == 0.0);
}

TEST_CASE("JRS on search N=4 scales like 1/T and loses to the theorem bound at large T") {
  const auto model = search_model(4);
  const JrsProfile p = jrs_profile(*model);
  CHECK(p.value(100.0, 1) * 100.0 == doctest::Approx(p.value(1000.0, 1) * 1000.0).epsilon(1e-14));
  CHECK(p.gap0 == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(p.hdot0 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-12));
  const BoundReport r = theorem_bounds(*model, 2000.0);
  CHECK(r.upper < r.jrs);
}

TEST_CASE("two-level applicability") {
  CHECK(two_level_applicable(*search_model(4), SampleGrid::uniform(33)));
  CHECK(two_level_applicable(*search_model(16), SampleGrid::uniform(33)));
  CHECK(two_level_applicable(*marzlin_sanders_model(1.0, 20.0, 1.0), SampleGrid::uniform(33)));
  ComplexMatrix h1 = ComplexMatrix::Constant(3, 3, cplx(0.5, 0.0));
  h1.diagonal() << 0.0, 1.0, 2.0;
  const auto three = linear_interpolation_model(diag({0, 1, 2}), h1);
  CHECK_FALSE(two_level_applicable(*three, SampleGrid::uniform(33)));
}

TEST_CASE("theorem bounds on constant and search models") {
  const auto flat = linear_interpolation_model(diag({0, 1, 3}), diag({0, 1, 3}));
  const BoundReport z = theorem_bounds(*flat, 10.0);
  CHECK(z.leading_norm == 0.0);
  CHECK(z.R == 0.0);
  CHECK(z.upper == 0.0);
  CHECK(z.lower == 0.0);
  CHECK(z.delta0 == 0.0);
  CHECK(z.delta1 == 0.0);

  const auto model = search_model(4);
  const BoundReport r = theorem_bounds(*model, 100.0);
  CHECK(r.norms.h1 == doctest::Approx(std::sqrt(3.0) / 2).epsilon(1e-10));
  CHECK(r.norms.h2 < 1e-12);
  CHECK(r.gamma_min == doctest::Approx(0.5).epsilon(1e-10));
  CHECK(r.Gamma == doctest::Approx(18 * std::sqrt(3.0) + 6).epsilon(1e-9));
  CHECK(r.two_level);
  CHECK_FALSE(r.t_dependent);
  CHECK(r.lower <= r.leading_norm);
  CHECK(r.leading_norm <= r.upper);
  CHECK(r.two_level_upper <= r.upper);
  CHECK(r.R == doctest::Approx(remainder_R(r.norms.h1, r.norms.h2, r.norms.h3, r.gamma_min, 100.0)).epsilon(1e-15));
  CHECK(r.delta1 == doctest::Approx(delta1(r.norms.h1, r.norms.h2, r.norms.h3, r.gamma_min)).epsilon(1e-15));
}

TEST_CASE("exact error lies inside the bounds on search N in {2, 4}") {
  for (int n : {2, 4}) {
    const auto model = search_model(n);
    for (double t : {20.0, 80.0, 320.0}) {
      const BoundReport r = theorem_bounds(*model, t);
      const EvolutionResult ev = evolve_adaptive(*model, t, ScheduleKind::Phi);
      CAPTURE(n);
      CAPTURE(t);
      CHECK(ev.error >= r.lower - 1e-9);
      CHECK(ev.error <= r.upper + 1e-9);
      CHECK(ev.error <= r.two_level_upper + 1e-9);
    }
  }
}

TEST_CASE("bounds are invariant under H -> lambda H, T -> T / lambda") {
  const auto base = search_model(4);
  const BoundReport r = theorem_bounds(*base, 150.0);
  for (double lambda : {0.5, 2.0}) {
    const ScaledModel scaled(base, lambda);
    const BoundReport q = theorem_bounds(scaled, 150.0 / lambda);
    CHECK(q.upper == doctest::Approx(r.upper).epsilon(1e-9));
    CHECK(q.lower == doctest::Approx(r.lower).epsilon(1e-9));
    CHECK(q.leading_norm == doctest::Approx(r.leading_norm).epsilon(1e-9));
    CHECK(q.jrs == doctest::Approx(r.jrs).epsilon(1e-9));
    CHECK(q.delta0 / q.T == doctest::Approx(r.delta0 / r.T).epsilon(1e-9));
  }
}

TEST_CASE("cancellation times for search") {
  const auto model = search_model(4);
  const CancellationTimes c = cancellation_times(*model, 20);
  REQUIRE(c.times.size() == 20);
  CHECK(c.kappa == doctest::Approx(0.6900864990752366).epsilon(1e-9));
  CHECK(c.times[0] == doctest::Approx(2 * kPi / 0.6900864990752366).epsilon(1e-9));
  CHECK(c.times[0] == doctest::Approx(9.105).epsilon(1e-3));
  CHECK(c.times[19] == doctest::Approx(20 * c.times[0]).epsilon(1e-14));

  // The leading term nearly vanishes at T_n and not halfway between.
  const double tn = c.times[9];
  const double mid = 0.5 * (c.times[9] + c.times[10]);
  const double at = first_order_term(*model, tn).norm;
  const double off = first_order_term(*model, mid).norm;
  CHECK(at < 1e-6 * off);
  const BoundReport r = theorem_bounds(*model, tn);
  CHECK(r.lower == 0.0);
  CHECK(r.upper == doctest::Approx(r.R / (tn * tn)).epsilon(1e-6));

  CHECK_THROWS_AS(cancellation_times(*model, 0), Error);
}

TEST_CASE("cancellation times reject asymmetric or multi-level coupling") {
  ComplexMatrix h1 = diag({0, 3});
  h1(0, 1) = h1(1, 0) = 0.4;
  const auto asym = linear_interpolation_model(diag({0, 1}), h1);
  try {
    cancellation_times(*asym, 3);
    FAIL("expected NotApplicable");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::NotApplicable);
  }
  ComplexMatrix c = ComplexMatrix::Constant(3, 3, cplx(0.3, 0.0));
  c.diagonal() << 0.0, 1.0, 2.0;
  const auto three = linear_interpolation_model(diag({0, 1, 2}), c);
  CHECK_THROWS_AS(cancellation_times(*three, 3), Error);
}
