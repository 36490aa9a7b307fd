#include <doctest.h>

#include "common.hpp"
#include "oracle/hp_oracle.hpp"
#include "parisian/errors.hpp"
#include "parisian/formulas.hpp"
#include "parisian/simulator.hpp"

using namespace parisian;
using testing::jump_diffusion;
using testing::jump_drift;
using testing::rel_err;

namespace {

Query make_query(const ModelParams& m, double x, double b, TransformSpec t = {}, double k = 0.8) {
  Query q;
  q.x = x;
  q.b = b;
  q.transform = t;
  q.drawdown = DrawdownSpec::linear(k);
  q.model = m;
  return q;
}

const double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST_CASE("boundary values at x = b are exact") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    const auto q = make_query(m, 3.0, 3.0, {0.05, 0.2, 0.1, 0.3});
    CHECK(upcross_laplace(q) == 1.0);
    CHECK(parisian_ruin_laplace(q) == 0.0);
    CHECK(u_xi(q) == 1.0);
    CHECK(joint_laplace_g(q) == std::exp(0.1 * 3.0));
    CHECK(expected_injections(q) == 0.0);
    CHECK(ResolventDensity(q)(2.0) == 0.0);
  }
}

TEST_CASE("exit transforms match nested quadrature of the high precision kernels") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    const auto ref = oracle::Kernels(m, 0.05, 0.2, 0, 0, [](double x) { return 0.8 * x; });
    for (double x : {0.5, 1.0, 2.0}) {
      const auto q = make_query(m, x, 3.0);
      CHECK(rel_err(upcross_laplace(q), oracle::upcross(ref, x, 3.0)) < 1e-7);
      CHECK(rel_err(parisian_ruin_laplace(q), oracle::parisian_ruin(ref, x, 3.0)) < 1e-7);
    }
  }
}

TEST_CASE("fast clock reduces the upcrossing to the classical draw-down formula") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    const auto q = make_query(m, 1.0, 3.0, {0.05, 1e8, 0, 0});
    const auto ref = oracle::Kernels(m, 0.05, 0.2, 0, 0, [](double x) { return 0.8 * x; });
    const double classical = std::exp(-oracle::integrate([&](double w) { return ref.rho(w); }, 1.0, 3.0));
    CHECK(rel_err(upcross_laplace(q), classical) < 1e-4);
  }
}

TEST_CASE("limits of the clock rate and the discount") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    CHECK(parisian_ruin_laplace(make_query(m, 1.0, 3.0, {0.05, 1e-8, 0, 0})) < 1e-6);
    CHECK(std::abs(u_xi(make_query(m, 1.0, 3.0, {1e-8, 0.2, 0, 0})) - 1.0) < 1e-4);
  }
}

TEST_CASE("u_xi is the sum of its parts and the untilted joint transform") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    const auto base = make_query(m, 0.5, 3.0);
    const std::vector<double> xs{0.5, 1.0, 2.0, 3.0};
    const auto curve = exit_laplace_curve(base, xs);
    const auto g = joint_laplace_curve(base, xs);
    for (std::size_t i = 0; i < xs.size(); ++i) {
      auto q = base;
      q.x = xs[i];
      CHECK(u_xi(q) == upcross_laplace(q) + parisian_ruin_laplace(q));
      CHECK(curve[i].total() == curve[i].upcross + curve[i].ruin);
      CHECK(rel_err(g[i], curve[i].total()) < 1e-6);
      CHECK(curve[i].upcross > 0.0);
      CHECK(curve[i].upcross <= 1.0);
      CHECK(curve[i].ruin >= 0.0);
      CHECK(curve[i].total() <= 1.0 + 1e-12);
    }
  }
}

TEST_CASE("joint transform rejects tilts at the pole and infinite barriers") {
  auto q = make_query(jump_diffusion(), 1.0, 3.0, {0.05, 0.2, 100.0, 0.3});
  CHECK_THROWS_AS((void)joint_laplace_g(q), PoleError);
  q.transform.u = 0.1;
  q.b = kInf;
  CHECK_THROWS_AS((void)joint_laplace_g(q), InvalidArgument);
  CHECK_THROWS_AS((void)upcross_laplace(q), InvalidArgument);
}

TEST_CASE("query validation") {
  auto q = make_query(jump_diffusion(), 4.0, 3.0);
  CHECK_THROWS_AS((void)u_xi(q), DomainError);
  q.x = 0.0;
  CHECK_THROWS_AS((void)u_xi(q), DomainViolation);
  q.x = 1.0;
  q.quad.panel = 4;
  CHECK_THROWS_AS((void)u_xi(q), InvalidArgument);
}

TEST_CASE("ruin probability shape") {
  const auto m = jump_diffusion();
  const auto dd = DrawdownSpec::linear(0.8);
  const double far = ruin_probability(50.0, 0.2, m, dd);
  CHECK(far < 0.01);
  CHECK(far > 0.0);
  std::vector<double> xs;
  for (int i = 0; i < 60; ++i) xs.push_back(0.1 + i);
  const auto p = ruin_probability_curve(xs, 0.2, m, dd);
  for (std::size_t i = 1; i < p.size(); ++i) CHECK(p[i] <= p[i - 1]);
  for (double x : {0.5, 2.0, 8.0}) {
    CHECK(ruin_probability(x, 0.5, m, dd) >= ruin_probability(x, 0.1, m, dd));
    CHECK(ruin_probability(x, 0.2, m, dd) > ruin_probability(x, 0.2, jump_drift(), dd));
    CHECK(ruin_probability(x, 0.2, m, DrawdownSpec::linear(0.8)) >= ruin_probability(x, 0.2, m, DrawdownSpec::linear(0.6)));
  }
}

TEST_CASE("ruin probability truncation fails loudly") {
  QuadratureConfig quad;
  quad.max_upper = 12.0;
  CHECK_THROWS_AS((void)ruin_probability(10.0, 0.2, jump_diffusion(), DrawdownSpec::linear(0.8), quad),
                  TruncationFailure);
}

TEST_CASE("expected injections shape") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    std::vector<double> xs;
    for (int i = 0; i < 40; ++i) xs.push_back(0.25 + 0.25 * i);
    const auto v = expected_injections_curve(make_query(m, 0.25, kInf), xs);
    for (std::size_t i = 0; i < v.size(); ++i) {
      CHECK(v[i] >= 0.0);
      if (i > 0) CHECK(v[i] < v[i - 1]);
    }
    const auto vb = expected_injections_curve(make_query(m, 0.25, 3.0), {0.5, 1.0, 2.0, 3.0});
    CHECK(vb[3] == 0.0);
    CHECK(vb[0] > vb[1]);
  }
  const ModelParams drift{0.075, 0.0, 0.0, 9.0};
  CHECK(std::abs(expected_injections(make_query(drift, 1.0, 3.0))) < 1e-14);
  CHECK(std::abs(expected_injections(make_query(drift, 1.0, kInf))) < 1e-14);
}

TEST_CASE("resolvent density mass balance") {
  struct Case {
    ModelParams m;
    double k, lambda, b;
  };
  const Case cases[] = {{jump_diffusion(), 0.8, 0.1, 2.0}, {jump_drift(), 0.6, 0.5, 5.0}, {jump_diffusion(), 0.6, 0.5, 5.0}};
  for (const auto& c : cases) {
    const auto q = make_query(c.m, 1.0, c.b, {0.05, c.lambda, 0, 0}, c.k);
    const ResolventDensity density(q);
    const double mass = density.killed_mass(density.support_min(), c.b);
    CHECK(std::abs(mass + u_xi(q) - 1.0) < 1e-5);
    CHECK(density(c.b + 0.1) == 0.0);
    CHECK(density(density.support_min() - 0.1) == 0.0);
    for (int i = 0; i <= 100; ++i) CHECK(density(density.support_min() + (c.b - density.support_min()) * i / 100.0) >= 0.0);
  }
}

TEST_CASE("resolvent density matches killed positions of exact paths") {
  const auto m = jump_drift();
  const TransformSpec t{0.05, 0.2, 0, 0};
  const auto q = make_query(m, 1.0, 3.0, t);
  const ResolventDensity density(q);
  SimConfig sim;
  sim.seed = 99;
  const auto paths = simulate_paths(m, q.drawdown, t, 1.0, 3.0, sim);
  std::vector<double> edges;
  for (int i = 0; i <= 12; ++i) edges.push_back(0.8 + (3.0 - 0.8) * i / 12.0);
  const auto hist = killed_position_histogram(paths, edges);
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    const double want = density.killed_mass(edges[i], edges[i + 1]);
    INFO("bin " << edges[i] << " mc " << hist[i].mean << " +- " << hist[i].std_error << " formula " << want);
    CHECK(std::abs(hist[i].mean - want) < 3.0 * hist[i].std_error + 1e-12);
  }
}

TEST_CASE("doubling the panel density leaves headline values unchanged") {
  for (const auto& m : {jump_diffusion(), jump_drift()}) {
    auto q = make_query(m, 1.0, 3.0, {0.05, 0.2, 0.1, 0.3});
    auto fine = q;
    fine.quad.panel *= 2;
    const double tol = 10 * q.quad.rel_tol;
    CHECK(rel_err(upcross_laplace(fine), upcross_laplace(q)) < tol);
    CHECK(rel_err(parisian_ruin_laplace(fine), parisian_ruin_laplace(q)) < tol);
    CHECK(rel_err(joint_laplace_g(fine), joint_laplace_g(q)) < tol);
    CHECK(rel_err(expected_injections(fine), expected_injections(q)) < tol);
    CHECK(rel_err(ruin_probability(1.0, 0.2, m, q.drawdown, fine.quad), ruin_probability(1.0, 0.2, m, q.drawdown)) <
          tol);
  }
}

TEST_CASE("capped draw-down has its kink on the grid") {
  const auto m = jump_diffusion();
  Query q = make_query(m, 0.5, 4.0);
  q.drawdown = DrawdownSpec::capped(1.0, 0.8);
  const auto ref = oracle::Kernels(m, 0.05, 0.2, 0, 0, [](double x) { return std::min(1.0, 0.8 * x); });
  const double want = std::exp(-(oracle::integrate([&](double w) { return ref.ell1(w); }, 0.5, 1.25) +
                                 oracle::integrate([&](double w) { return ref.ell1(w); }, 1.25, 4.0)));
  CHECK(rel_err(upcross_laplace(q), want) < 1e-7);
}
