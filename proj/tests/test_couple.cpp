#include <random>

#include "doctest.h"
#include "interp/couple.hpp"
#include "interp/error.hpp"
#include "test_support.hpp"

using namespace interp;
using namespace interp::testing;

TEST_CASE("norm: direct evaluations") {
  CHECK(norm(CoupleElement{0, 0, 0}, SpaceSpec::unit(ex(3), 3)) == 0.0);
  CHECK(norm(CoupleElement{3, -4}, SpaceSpec::unit(ex(2), 2)) == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(norm(CoupleElement{1, 2}, SpaceSpec(inf(), {2, 1})) == 2.0);
  CHECK(norm(CoupleElement{1, -2, 3}, SpaceSpec::unit(ex(1), 3)) == 6.0);
}

TEST_CASE("norm: large exponents do not overflow") {
  const CoupleElement x{1e200, 1e200};
  CHECK(norm(x, SpaceSpec::unit(ex(50), 2)) == doctest::Approx(1e200 * std::pow(2.0, 1.0 / 50)));
}

TEST_CASE("norm: dimension mismatch is rejected") {
  CHECK_THROWS_AS(norm(CoupleElement{1, 2}, SpaceSpec::unit(ex(2), 3)), InvalidInput);
}

TEST_CASE("spec construction validates inputs") {
  CHECK_THROWS_AS(Exponent::finite(0.5), InvalidInput);
  CHECK_THROWS_AS(Exponent::finite(std::nan("")), InvalidInput);
  CHECK_THROWS_AS(SpaceSpec(ex(2), {1.0, 0.0}), InvalidInput);
  CHECK_THROWS_AS(CoupleElement({1.0, std::numeric_limits<double>::infinity()}), InvalidInput);
  CHECK_THROWS_AS(CoupleSpec(SpaceSpec::unit(ex(1), 2), SpaceSpec::unit(ex(2), 3)), InvalidInput);
}

TEST_CASE("conjugate exponents") {
  CHECK(ex(1).conjugate().is_infinite());
  CHECK(inf().conjugate().is_one());
  CHECK(ex(2).conjugate().value() == 2.0);
  CHECK(ex(4).conjugate().value() == doctest::Approx(4.0 / 3.0));
}

TEST_CASE("embedding certificate") {
  CHECK(unit_couple(ex(1), inf(), 4).embedding_certified());
  CHECK(unit_couple(ex(1), ex(2), 4).embedding_certified());
  CHECK_FALSE(unit_couple(ex(2), ex(1), 4).embedding_certified());
  CHECK_FALSE(CoupleSpec(SpaceSpec(ex(1), {1, 1}), SpaceSpec(inf(), {1, 2})).embedding_certified());
  CHECK_THROWS_AS(CoupleSpec::source(SpaceSpec::unit(ex(2), 2), SpaceSpec::unit(ex(1), 2)),
                  InvalidInput);

  // The certificate really does imply ||x||_X1 <= ||x||_X0.
  std::mt19937_64 rng(11);
  const CoupleSpec c(SpaceSpec(ex(1.5), {3, 2, 1.5, 1}), SpaceSpec(ex(4), {1, 1, 1, 0.5}));
  REQUIRE(c.embedding_certified());
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_element(rng, 4);
    CHECK(norm(x, c.space1()) <= norm(x, c.space0()) * (1 + 1e-14));
  }
}

TEST_CASE("intersection norm") {
  const auto c = unit_couple(ex(1), inf(), 2);
  CHECK(intersection_norm(CoupleElement{0, 0}, c) == 0.0);
  CHECK(intersection_norm(CoupleElement{1, 1}, c) == 2.0);
  const auto d = unit_couple(ex(2), ex(2), 2);
  CHECK(intersection_norm(CoupleElement{3, 4}, d) == doctest::Approx(5.0));
}

TEST_CASE("norm properties on random inputs") {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> lam(-10, 10);
  const std::vector<Exponent> ps{ex(1), ex(1.5), ex(2), ex(3), inf()};
  for (const auto& p : ps) {
    const SpaceSpec s(p, random_weights(rng, 6, 0.5, 2.0));
    for (int k = 0; k < 200; ++k) {
      const auto x = random_element(rng, 6);
      const auto y = random_element(rng, 6);
      const double l = lam(rng);
      CHECK(rel_diff(norm(l * x, s), std::abs(l) * norm(x, s)) <= 1e-12);
      CHECK(norm(x + y, s) <= (norm(x, s) + norm(y, s)) * (1 + 1e-12));
      CHECK(intersection_norm(x + y, CoupleSpec(s, s)) <=
            (intersection_norm(x, CoupleSpec(s, s)) + intersection_norm(y, CoupleSpec(s, s))) *
                (1 + 1e-12));
    }
  }
}

TEST_CASE("norm is monotone in the weights") {
  std::mt19937_64 rng(9);
  for (const auto& p : {ex(1), ex(2.5), inf()}) {
    for (int k = 0; k < 200; ++k) {
      auto w = random_weights(rng, 5, 0.1, 3);
      const auto x = random_element(rng, 5);
      const double before = norm(x, SpaceSpec(p, w));
      w[static_cast<std::size_t>(k % 5)] *= 1.5;
      CHECK(norm(x, SpaceSpec(p, w)) >= before);
    }
  }
}

TEST_CASE("dual norm pairs with the norm (Hoelder)") {
  std::mt19937_64 rng(21);
  for (const auto& p : {ex(1), ex(1.5), ex(3), inf()}) {
    const SpaceSpec s(p, random_weights(rng, 4, 0.5, 2));
    for (int k = 0; k < 200; ++k) {
      const auto x = random_element(rng, 4);
      const auto y = random_element(rng, 4);
      double dot = 0;
      for (std::size_t i = 0; i < 4; ++i) dot += x[i] * y[i];
      CHECK(std::abs(dot) <= norm(x, s) * dual_norm(y.values(), s) * (1 + 1e-12));
    }
  }
}

TEST_CASE("diagonal operator norms") {
  const std::vector<double> d{0.5, 0.25, 0.125};
  // p_from <= p_to: the largest entry.
  CHECK(diagonal_operator_norm(d, SpaceSpec::unit(ex(1), 3), SpaceSpec::unit(ex(1), 3)) == 0.5);
  CHECK(diagonal_operator_norm(d, SpaceSpec::unit(ex(2), 3), SpaceSpec::unit(inf(), 3)) == 0.5);
  // l^inf -> l^1: the l^1 norm of d.
  CHECK(diagonal_operator_norm(d, SpaceSpec::unit(inf(), 3), SpaceSpec::unit(ex(1), 3)) ==
        doctest::Approx(0.875));
  // l^2 -> l^1: the l^2 norm of d.
  CHECK(diagonal_operator_norm(d, SpaceSpec::unit(ex(2), 3), SpaceSpec::unit(ex(1), 3)) ==
        doctest::Approx(std::sqrt(0.25 + 0.0625 + 0.015625)));

  // Never exceeded on random inputs.
  std::mt19937_64 rng(3);
  const SpaceSpec from(ex(3), random_weights(rng, 3, 1, 2));
  const SpaceSpec to(ex(1.5), random_weights(rng, 3, 0.5, 1));
  const double bound = diagonal_operator_norm(d, from, to);
  for (int k = 0; k < 1000; ++k) {
    const auto x = random_element(rng, 3);
    std::vector<double> dx(3);
    for (std::size_t i = 0; i < 3; ++i) dx[i] = d[i] * x[i];
    CHECK(norm(dx, to) <= bound * norm(x, from) * (1 + 1e-12));
  }
}
