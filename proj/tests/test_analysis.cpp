#include <cmath>
#include <memory>
#include <vector>

#include "doctest.h"
#include "fvpnet/analysis.hpp"
#include "fvpnet/errors.hpp"

using namespace fvpnet;

namespace {

StackedState random_state(std::size_t m, std::size_t n, Rng& rng, double scale = 10.0) {
  StackedState x(m, n);
  for (double& v : x.values()) v = scale * rng.normal();
  return x;
}

GraphSet line_without(std::size_t m, std::size_t missing_edge) {
  const Topology l = Topology::line(m);
  std::vector<EdgeMask> graphs;
  for (std::size_t e = 0; e < l.edge_count(); ++e)
    if (e != missing_edge) graphs.push_back(EdgeMask::single(l.edge_count(), e));
  return make_graph_set(l, graphs);
}

}  // namespace

TEST_CASE("consensus projection") {
  Rng rng(1);
  for (int k = 0; k < 200; ++k) {
    const StackedState x = random_state(7, 3, rng);
    const StackedState p = project_consensus(x);
    CHECK(in_consensus(p));
    const StackedState pp = project_consensus(p);
    for (std::size_t c = 0; c < p.size(); ++c) CHECK(std::abs(pp[c] - p[c]) <= 1e-12);
    const std::vector<double> zc = {rng.normal(), rng.normal(), rng.normal()};
    const StackedState z = StackedState::replicate(7, zc);
    const double lhs = std::pow(distance_to_consensus(x), 2) + std::pow(distance(p.values(), z.values()), 2);
    const double rhs = std::pow(distance(x.values(), z.values()), 2);
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::max(1.0, rhs));
    const StackedState y = random_state(7, 3, rng);
    CHECK(distance(p.values(), project_consensus(y).values()) <= distance(x.values(), y.values()) + 1e-12);
  }
}

TEST_CASE("error and residual metrics") {
  const std::vector<double> s = {2.0};
  const StackedState x(2, 1, {0.0, 4.0});
  CHECK(consensus_error(x, s) == doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));
  CHECK(consensus_error(StackedState::replicate(5, s), s) == 0.0);
  Rng rng(2);
  const Topology l5 = Topology::line(5);
  for (int k = 0; k < 20; ++k) {
    EdgeMask mask(4);
    for (std::size_t e = 0; e < 4; ++e) mask.set(e, rng.uniform01() < 0.5);
    const std::vector<double> c = {rng.normal(), rng.normal()};
    CHECK(fixed_point_residual(StackedState::replicate(5, c), l5, mask, CuckerSmale{}) == 0.0);
  }
}

TEST_CASE("quasi-nonexpansivity") {
  Rng rng(3);
  const GraphSet ex1 = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 10000;
  const CheckReport r = check_quasi_nonexpansive(ex1, CuckerSmale{}, rng, opts);
  CHECK(r.passed);
  CHECK(r.violations == 0);
  CHECK(r.samples == 10000);

  const GraphSet k5 = single_link_graph_set(Topology::complete(5));
  CHECK(check_quasi_nonexpansive(k5, ConstantWeight{0.25}, rng, opts).passed);
  CHECK(check_quasi_nonexpansive(make_graph_set(Topology::complete(5), {EdgeMask::all(10)}), ConstantWeight{0.25}, rng,
                                 opts)
            .passed);
}

TEST_CASE("quasi-nonexpansive margin is zero on the consensus subspace") {
  Rng rng(4);
  const Topology l6 = Topology::line(6);
  for (int k = 0; k < 100; ++k) {
    const StackedState x = StackedState::replicate(6, std::vector<double>{rng.normal(), rng.normal()});
    const StackedState z = StackedState::replicate(6, std::vector<double>{rng.normal(), rng.normal()});
    const StackedState tx = apply_T(l6, EdgeMask::all(5), CuckerSmale{}, x);
    CHECK(distance(x.values(), z.values()) - distance(tx.values(), z.values()) == 0.0);
  }
}

TEST_CASE("lemma 4 on the two-agent example by hand") {
  const Topology l2 = Topology::line(2);
  const StackedState x(2, 1, {0.0, 4.0});
  const StackedState z(2, 1, {2.0, 2.0});
  const double w = 0.25 / 17.0;
  for (double eta : {0.2, 0.5, 0.8}) {
    const StackedState th = apply_T_hat(eta, l2, EdgeMask::all(1), CuckerSmale{}, x);
    const StackedState t = apply_T(l2, EdgeMask::all(1), CuckerSmale{}, x);
    const StackedState r = difference(x, th);
    const double lhs = dot(r.values(), difference(x, z).values());
    const double rhs = eta / 2 * std::pow(norm2(difference(x, t).values()), 2);
    // <x - T-hat x, x - z> = 16 eta w and |x - T x|^2 = 32 w^2
    CHECK(lhs == doctest::Approx(16 * eta * w).epsilon(1e-13));
    CHECK(rhs == doctest::Approx(16 * eta * w * w).epsilon(1e-13));
    CHECK(lhs - rhs == doctest::Approx(16 * eta * w * (1 - w)).epsilon(1e-12));
    CHECK(norm2(r.values()) == doctest::Approx(eta * norm2(difference(x, t).values())).epsilon(1e-14));
  }
}

TEST_CASE("lemma 4 checker") {
  Rng rng(5);
  const GraphSet ex1 = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 2000;
  for (double eta : {0.2, 0.5, 0.8}) {
    const Lemma4Report r = check_lemma4(ex1, CuckerSmale{}, eta, rng, opts);
    CHECK(r.fixed_points.passed);
    CHECK(r.inner_product.passed);
    CHECK(r.quasi_nonexpansive.passed);
    CHECK(r.passed());
  }
  CHECK_THROWS_AS(check_lemma4(ex1, CuckerSmale{}, 1.0, rng, opts), InvalidInput);
}

TEST_CASE("doubly stochastic and norm bound checks") {
  Rng rng(6);
  const GraphSet ex1 = single_link_graph_set(Topology::line(20));
  CheckOptions opts;
  opts.samples = 300;
  CHECK(check_doubly_stochastic(ex1, CuckerSmale{}, rng, opts).passed);
  CHECK(check_norm_bound(ex1, LogDistance{}, rng, opts).passed);
  CHECK(check_fixed_value_points(ex1, CuckerSmale{}, rng, opts).passed);

  const GraphSet empty = make_graph_set(Topology::line(4), {EdgeMask(3)});
  const CheckReport id = check_doubly_stochastic(empty, CuckerSmale{}, rng, opts);
  CHECK(id.passed);
  CHECK(id.worst_margin == 0.0);

  const GraphSet k4 = make_graph_set(Topology::complete(4), {EdgeMask::all(6)});
  const CheckReport bad = check_doubly_stochastic(k4, ConstantWeight{0.6}, rng, opts);
  CHECK(!bad.passed);
  CHECK(bad.detail.find("construction error") != std::string::npos);
}

TEST_CASE("union connectivity") {
  Rng rng(7);
  const ConnectivityReport ok = check_union_connectivity(single_link_graph_set(Topology::line(20)), CuckerSmale{}, 100, rng);
  CHECK(ok.combinatorial);
  CHECK(ok.spectral_applicable);
  CHECK(ok.min_lambda2 > 1e-9);
  CHECK(ok.passed());

  const ConnectivityReport cut = check_union_connectivity(line_without(20, 4), CuckerSmale{}, 100, rng);
  CHECK(!cut.combinatorial);
  CHECK(cut.min_lambda2 < 1e-9);
  CHECK(!cut.spectral.passed);
  CHECK(!cut.passed());

  const ConnectivityReport single = check_union_connectivity(make_graph_set(Topology::line(1), {EdgeMask(0)}), CuckerSmale{}, 10, rng);
  CHECK(single.passed());
  CHECK(!single.spectral_applicable);
}

TEST_CASE("spectral and combinatorial connectivity agree") {
  Rng rng(8);
  for (std::size_t m = 2; m <= 50; m += 3) {
    for (int trial = 0; trial < 4; ++trial) {
      // random graph sets over a random subset of complete(m) edges
      const Topology k = Topology::complete(m);
      const double keep = trial == 0 ? 1.0 : 2.0 / static_cast<double>(m) * (0.5 + trial * 0.5);
      std::vector<EdgeMask> graphs;
      for (int g = 0; g < 3; ++g) {
        EdgeMask mask(k.edge_count());
        for (std::size_t e = 0; e < k.edge_count(); ++e) mask.set(e, rng.uniform01() < keep / 3.0 * 2.0);
        graphs.push_back(mask);
      }
      const GraphSet set = make_graph_set(k, graphs);
      const WeightModel model = ConstantWeight{0.9 / static_cast<double>(m - 1)};
      const ConnectivityReport r = check_union_connectivity(set, model, 3, rng);
      const double lambda2 = union_laplacian_spectrum(set, model, StackedState(m, 2))[1];
      CHECK((lambda2 > 1e-9) == r.combinatorial);
      CHECK(r.passed() == r.combinatorial);
    }
  }
}

TEST_CASE("contraction ratios") {
  Rng rng(9);
  StackedState d(4, 2);
  for (double& v : d.values()) v = rng.normal();
  const QuadraticObjective q(d);
  const ContractionReport one = check_contraction(q, 1.0, rng, 500);
  CHECK(one.max_ratio <= 1e-12);
  CHECK(one.gamma_hat == doctest::Approx(1.0));
  const ContractionReport half = check_contraction(q, 0.5, rng, 500);
  CHECK(half.max_ratio == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(half.gamma_hat == doctest::Approx(0.5).epsilon(1e-12));
  for (double beta : {0.25, 0.5, 1.0, 1.5}) {
    const ContractionReport r = check_contraction(q, beta, rng, 500);
    CHECK(std::abs(r.max_ratio - std::abs(1 - beta)) <= 1e-9);
    CHECK(r.report.passed);
  }
  const DiagonalQuadraticObjective diag(StackedState(1, 2), {1.0, 4.0});
  const ContractionReport r = check_contraction(diag, 0.4, rng, 5000);
  CHECK(r.bound == doctest::Approx(0.6));
  CHECK(r.max_ratio <= 0.6 + 1e-9);
  CHECK(r.max_ratio > 0.59);
}

TEST_CASE("contraction estimate is invariant to translating the anchors") {
  StackedState d(3, 2);
  Rng seed_rng(10);
  for (double& v : d.values()) v = seed_rng.normal();
  StackedState shifted = d;
  for (double& v : shifted.values()) v += 123.5;
  const DiagonalQuadraticObjective a(d, {1.0, 3.0}), b(shifted, {1.0, 3.0});
  Rng r1(11), r2(11);
  const ContractionReport ca = check_contraction(a, 0.3, r1, 1000);
  const ContractionReport cb = check_contraction(b, 0.3, r2, 1000);
  CHECK(std::abs(ca.gamma_hat - cb.gamma_hat) <= 1e-12);
}

TEST_CASE("occurrence checks") {
  const Topology l20 = Topology::line(20);
  const GraphSet set = single_link_graph_set(l20);
  GraphProcess iid(l20, IidCategorical{set, std::vector<double>(19, 1.0 / 19.0)}, 1);
  const CheckReport a = check_occurrence(iid, 10000, set);
  CHECK(a.passed);
  CHECK(a.worst_margin > 0);
  GraphProcess dep(l20, MinOccurrenceDependency{0.5, 20}, 1);
  CHECK(check_occurrence(dep, 10000, set).passed);
  std::vector<double> only_first(19, 0.0);
  only_first[0] = 1.0;
  GraphProcess stuck(l20, IidCategorical{set, only_first}, 1);
  const CheckReport c = check_occurrence(stuck, 1000, set);
  CHECK(!c.passed);
  CHECK(c.violations >= 18);
}

TEST_CASE("boundedness and residual decay on a run") {
  const Scenario s = example1_scenario(Example1Variant::Cucker, 3, 5000);
  const CheckReport b = check_boundedness(s);
  CHECK(b.passed);
  CHECK(b.samples == 5001);
  const Trajectory tr = run(s);
  CHECK(check_trajectory_sanity(tr, 5000).passed);
  CHECK(!check_trajectory_sanity(tr, 4000).passed);
  CHECK(check_residual_decay(tr, 250, 0.5).passed);
  CHECK(!check_residual_decay(tr, 250, 1e-6).passed);
}

TEST_CASE("monte-carlo curve") {
  const std::vector<double> d = {1.0, -2.0};
  Scenario still;
  still.topology = Topology::line(5);
  still.process = MinOccurrenceDependency{0.5, 20};
  still.weight = CuckerSmale{};
  still.objective = std::make_shared<QuadraticObjective>(StackedState::replicate(5, d));
  still.x0 = StackedState::replicate(5, d);
  validate_scenario(still);
  const MeanSquareCurve zero = monte_carlo_mean_square(still, 4, 100, 2);
  CHECK(zero.mean.size() == 101);
  for (double v : zero.mean) CHECK(v == 0.0);
  CHECK_THROWS_AS(monte_carlo_mean_square(still, 1, 100), InvalidInput);

  const Scenario ex = example1_scenario(Example1Variant::Cucker, 1, 300);
  const MeanSquareCurve one = monte_carlo_mean_square(ex, 6, 300, 1);
  const MeanSquareCurve three = monte_carlo_mean_square(ex, 6, 300, 3);
  CHECK(one.mean == three.mean);
  CHECK(one.half_width == three.half_width);
  CHECK(one.mean[0] == doctest::Approx(std::pow(consensus_error(ex.x0, ex.reference), 2)));
  CHECK(one.half_width[0] == 0.0);
  CHECK(one.mean[300] < one.mean[0]);
  CHECK(run_seed(1, 0) != run_seed(1, 1));
}
