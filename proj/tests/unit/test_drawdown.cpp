#include <doctest.h>

#include <cmath>

#include "parisian/drawdown.hpp"
#include "parisian/errors.hpp"

using namespace parisian;

TEST_CASE("linear draw-down values") {
  const auto d = DrawdownSpec::linear(0.8);
  CHECK(d.xi(1.0) == doctest::Approx(0.8));
  CHECK(d.xi_bar(1.0) == doctest::Approx(0.2));
  for (double x : {0.01, 0.5, 3.0, 100.0}) CHECK(d.xi_bar(x) == doctest::Approx(0.2 * x).epsilon(1e-14));
}

TEST_CASE("capped draw-down values") {
  const auto d = DrawdownSpec::capped(1.0, 0.8);
  CHECK(d.xi(2.0) == 1.0);
  CHECK(d.xi(1.0) == doctest::Approx(0.8));
  for (double x : {1.3, 2.0, 10.0}) CHECK(d.xi_bar(x) == doctest::Approx(x - 1.0).epsilon(1e-14));
}

TEST_CASE("gap is positive and increasing on the domain") {
  for (const auto& d : {DrawdownSpec::linear(0.6), DrawdownSpec::capped(1.0, 0.8)}) {
    double prev = 0.0;
    for (int i = 1; i <= 2000; ++i) {
      const double x = 0.01 * i;
      const double g = d.xi_bar(x);
      CHECK(g > 0.0);
      CHECK(g > prev);
      prev = g;
    }
  }
}

TEST_CASE("evaluation below the domain is rejected") {
  const auto d = DrawdownSpec::linear(0.8);
  CHECK_THROWS_AS((void)d.xi(0.0), DomainViolation);
  CHECK_THROWS_AS((void)d.xi(-1.0), DomainViolation);
  CHECK_THROWS_AS((void)d.xi_bar(1e-7), DomainViolation);
  CHECK_THROWS_AS(DrawdownSpec::linear(0.8, 0.0), InvalidArgument);
  CHECK_THROWS_AS(DrawdownSpec::linear(1.0), InvalidArgument);
  CHECK_THROWS_AS(DrawdownSpec::linear(0.0), InvalidArgument);
  CHECK_THROWS_AS(DrawdownSpec::capped(-1.0, 0.5), InvalidArgument);
}

TEST_CASE("custom draw-down is sample validated") {
  const auto ok = DrawdownSpec::custom([](double x) { return 0.5 * x - 0.1; }, 0.01, 50.0);
  CHECK(ok.xi(2.0) == doctest::Approx(0.9));
  CHECK(ok.preimage_sup(0.9) == doctest::Approx(2.0).epsilon(1e-9));
  CHECK_THROWS_AS(DrawdownSpec::custom([](double x) { return 1.2 * x; }, 0.01, 5.0), DomainViolation);
  CHECK_THROWS_AS(DrawdownSpec::custom([](double x) { return x < 2 ? 0.5 * x : 0.1; }, 0.01, 5.0), InvalidArgument);
}

TEST_CASE("text form round trips") {
  const auto a = DrawdownSpec::parse("linear:0.8");
  CHECK(a.kind() == DrawdownSpec::Kind::Linear);
  CHECK(a.slope() == 0.8);
  const auto b = DrawdownSpec::parse("capped:1:0.6");
  CHECK(b.kind() == DrawdownSpec::Kind::CappedLinear);
  CHECK(b.cap() == 1.0);
  CHECK(b.slope() == 0.6);
  CHECK(DrawdownSpec::parse(b.to_string()).xi(3.0) == b.xi(3.0));
  CHECK(DrawdownSpec::parse(DrawdownSpec::linear(0.1234567890123).to_string()).slope() == 0.1234567890123);
  CHECK_THROWS_AS(DrawdownSpec::parse("linear"), InvalidArgument);
  CHECK_THROWS_AS(DrawdownSpec::parse("linear:x"), InvalidArgument);
  CHECK_THROWS_AS(DrawdownSpec::parse("square:1"), InvalidArgument);
}

TEST_CASE("preimage and kinks") {
  const auto lin = DrawdownSpec::linear(0.8);
  CHECK(lin.preimage_sup(0.8) == doctest::Approx(1.0));
  CHECK(lin.kinks(0.1, 10.0).empty());
  const auto cap = DrawdownSpec::capped(1.0, 0.8);
  CHECK(cap.preimage_sup(0.5) == doctest::Approx(0.625));
  CHECK(std::isinf(cap.preimage_sup(1.5)));
  const auto k = cap.kinks(0.1, 10.0);
  REQUIRE(k.size() == 1);
  CHECK(k[0] == doctest::Approx(1.25));
  CHECK(cap.kinks(2.0, 10.0).empty());
}
