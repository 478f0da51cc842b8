#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "fvpnet/algorithm.hpp"
#include "fvpnet/errors.hpp"
#include "fvpnet/objective.hpp"

using namespace fvpnet;

TEST_CASE("quadratic gradient examples") {
  Rng rng(1);
  StackedState d(3, 2);
  for (double& v : d.values()) v = rng.normal();
  const QuadraticObjective q(d);
  const StackedState g = q.grad(d);
  for (double v : g.values()) CHECK(v == 0.0);

  const QuadraticObjective one(StackedState(1, 1, {1.0}));
  CHECK(one.grad(StackedState(1, 1, {3.0}))[0] == 2.0);

  const QuadraticObjective zero(StackedState(2, 2));
  const StackedState x(2, 2, {1, 0, 0, 1});
  CHECK(zero.grad(x) == x);
}

TEST_CASE("gradient matches central differences") {
  Rng rng(2);
  StackedState d(4, 3);
  for (double& v : d.values()) v = 5 * rng.normal();
  const DiagonalQuadraticObjective f(d, {1.0, 2.5, 4.0});
  const double h = 1e-6;
  for (int k = 0; k < 100; ++k) {
    StackedState x(4, 3);
    for (double& v : x.values()) v = 10 * rng.normal();
    const StackedState g = f.grad(x);
    for (std::size_t c = 0; c < x.size(); ++c) {
      StackedState xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      const double fd = (f.value(xp) - f.value(xm)) / (2 * h);
      CHECK(std::abs(fd - g[c]) <= 1e-5 * std::max(1.0, std::abs(g[c])));
    }
  }
}

TEST_CASE("quadratic gradient is affine") {
  Rng rng(3);
  StackedState d(5, 2);
  for (double& v : d.values()) v = rng.normal();
  const QuadraticObjective q(d);
  for (int k = 0; k < 50; ++k) {
    StackedState x(5, 2), y(5, 2);
    for (double& v : x.values()) v = rng.normal();
    for (double& v : y.values()) v = rng.normal();
    const double a = 0.25;  // dyadic weights keep the arithmetic exact
    StackedState mix(5, 2);
    for (std::size_t c = 0; c < mix.size(); ++c) mix[c] = a * x[c] + (1 - a) * y[c];
    const StackedState gx = q.grad(x), gy = q.grad(y), gm = q.grad(mix);
    for (std::size_t c = 0; c < mix.size(); ++c) CHECK(std::abs(gm[c] - (a * gx[c] + (1 - a) * gy[c])) <= 1e-14);
  }
}

TEST_CASE("analytic consensus minimizer") {
  // the mean of 10 [cos, sin]((i-1) 2pi/22), i = 1..20, written as a
  // geometric-series closed form: sum_{k<20} e^{ik theta} = (1 - e^{20 i theta}) / (1 - e^{i theta})
  const double theta = 2 * std::numbers::pi / 22;
  const double re_num = 1 - std::cos(20 * theta), im_num = -std::sin(20 * theta);
  const double re_den = 1 - std::cos(theta), im_den = -std::sin(theta);
  const double den = re_den * re_den + im_den * im_den;
  const double sx = 10 * (re_num * re_den + im_num * im_den) / den / 20;
  const double sy = 10 * (im_num * re_den - re_num * im_den) / den / 20;

  const QuadraticObjective ex1(initial_positions_example1());
  const std::vector<double> s = analytic_consensus_minimizer(ex1);
  CHECK(s[0] == doctest::Approx(sx).epsilon(1e-13));
  CHECK(s[1] == doctest::Approx(sy).epsilon(1e-13));
  CHECK(std::abs(s[0] - -0.9002) <= 5e-4);
  CHECK(std::abs(s[1] - 0.4111) <= 5e-4);

  const std::vector<double> c = {3.0, -1.5};
  CHECK(analytic_consensus_minimizer(QuadraticObjective(StackedState::replicate(7, c))) == c);
  const QuadraticObjective two(StackedState(2, 2, {0, 0, 2, 4}));
  CHECK(analytic_consensus_minimizer(two) == std::vector<double>{1.0, 2.0});
}

TEST_CASE("constant probe") {
  Rng rng(4);
  StackedState d(3, 2);
  for (double& v : d.values()) v = rng.normal();
  const ConstantProbe q = probe_constants(QuadraticObjective(d), 1000, rng, 10.0);
  CHECK(std::abs(q.rho_hat - 1.0) <= 1e-12);
  CHECK(std::abs(q.k_hat - 1.0) <= 1e-12);
  CHECK(q.consistent);

  const ConstantProbe three = probe_constants(DiagonalQuadraticObjective(StackedState(2, 2), {3.0, 3.0}), 500, rng, 10.0);
  CHECK(three.rho_hat == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(three.k_hat == doctest::Approx(3.0).epsilon(1e-12));

  const DiagonalQuadraticObjective hess(StackedState(1, 2), {1.0, 4.0});
  CHECK(hess.rho() == 1.0);
  CHECK(hess.lipschitz() == 4.0);
  const ConstantProbe few = probe_constants(hess, 20, rng, 10.0);
  const ConstantProbe many = probe_constants(hess, 20000, rng, 10.0);
  for (const ConstantProbe* p : {&few, &many}) {
    CHECK(p->rho_hat >= 1.0 - 1e-12);
    CHECK(p->k_hat <= 4.0 + 1e-12);
    CHECK(p->rho_hat <= p->k_hat);
    CHECK(p->consistent);
  }
  CHECK(many.rho_hat - 1.0 <= few.rho_hat - 1.0);
  CHECK(4.0 - many.k_hat <= 4.0 - few.k_hat);
  CHECK(many.rho_hat < 1.01);
  CHECK(many.k_hat > 3.99);

  // declaring a K that is too small is caught
  const DiagonalQuadraticObjective lying(StackedState(1, 2), {1.0, 4.0}, 1.0, 2.0);
  CHECK(!probe_constants(lying, 200, rng, 10.0).consistent);
}

TEST_CASE("objective validation") {
  CHECK_THROWS_AS(DiagonalQuadraticObjective(StackedState(2, 2), {1.0}), InvalidInput);
  CHECK_THROWS_AS(DiagonalQuadraticObjective(StackedState(2, 2), {1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(DiagonalQuadraticObjective(StackedState(2, 2), {1.0, 2.0}, 3.0, 2.0), InvalidInput);
  const QuadraticObjective q(StackedState(2, 2));
  CHECK_THROWS_AS(q.grad(StackedState(3, 2)), InvalidInput);
  CHECK(q.rho() <= q.lipschitz());
}
