#include <random>

#include "doctest.h"
#include "interp/error.hpp"
#include "interp/real_method.hpp"
#include "test_support.hpp"

using namespace interp;
using namespace interp::testing;

namespace {

// The functional straight from its definition, one compute_k per grid point.
double reference_norm(const CoupleElement& a, const CoupleSpec& c, const InterpParams& ip,
                      double shift = 1.0) {
  std::vector<double> terms;
  for (int m = -ip.M; m <= ip.M; ++m) {
    const double t = std::ldexp(shift, m);
    terms.push_back(std::pow(t, -ip.theta) * solve_k_general(t, a, c).objective);
  }
  return aggregate_terms(terms, ip.p);
}

InterpParams params(double theta, Exponent p, int M = 12) { return {theta, p, M}; }

}  // namespace

TEST_CASE("parameter validation") {
  const auto c = unit_couple(ex(1), inf(), 2);
  CHECK_THROWS_AS(interp_norm(CoupleElement{1, 1}, c, params(0.0, ex(2))), InvalidInput);
  CHECK_THROWS_AS(interp_norm(CoupleElement{1, 1}, c, params(1.0, ex(2))), InvalidInput);
  CHECK_THROWS_AS(interp_norm(CoupleElement{1, 1}, c, params(0.5, ex(2), 0)), InvalidInput);
  CHECK_THROWS_AS(interp_norm(CoupleElement{1, 1}, c, params(0.5, ex(2)), 1e-9, -1.0),
                  InvalidInput);
  CHECK_THROWS_AS(interp_norm(CoupleElement{1, 1, 1}, c, params(0.5, ex(2))), InvalidInput);
}

TEST_CASE("zero element") {
  for (auto p : {ex(1), ex(2), inf()}) {
    const auto r = interp_norm(CoupleElement::zeros(3), unit_couple(ex(2), ex(3), 3),
                               params(0.5, p));
    CHECK(r.value == 0.0);
    CHECK(r.slack == 0.0);
    CHECK(r.per_term.size() == 25);
  }
}

TEST_CASE("degenerate couple, p = inf: the largest term sits at t = 1") {
  const auto c = unit_couple(ex(2), ex(2), 3);
  const CoupleElement a{3, 4, 12};
  const auto r = interp_norm(a, c, params(0.3, inf()));
  CHECK(r.value == doctest::Approx(13.0).epsilon(1e-14));
  // p = 1 has the geometric series closed form.
  const InterpParams ip = params(0.5, ex(1), 12);
  double expected = 0.0;
  for (int m = -12; m <= 12; ++m) {
    const double t = std::ldexp(1.0, m);
    expected += std::pow(t, -0.5) * std::min(1.0, t) * 13.0;
  }
  CHECK(interp_norm(a, c, ip).value == doctest::Approx(expected).epsilon(1e-13));
}

TEST_CASE("closed-form fast paths agree with the per-term solver") {
  std::mt19937_64 rng(31);
  const std::vector<CoupleSpec> couples{unit_couple(ex(1), inf(), 7), unit_couple(inf(), inf(), 7),
                                        unit_couple(ex(2), ex(2), 7)};
  for (const auto& c : couples) {
    for (int k = 0; k < 20; ++k) {
      const auto a = random_element(rng, 7, 3.0);
      for (auto p : {ex(1), ex(2), inf()}) {
        for (double shift : {1.0, 0.37, 5.5}) {
          const auto ip = params(0.4, p, 6);
          CHECK(rel_diff(interp_norm(a, c, ip, 1e-9, shift).value,
                         reference_norm(a, c, ip, shift)) < 1e-8);
        }
      }
    }
  }
}

TEST_CASE("norm properties: homogeneity, triangle inequality, monotone in M") {
  std::mt19937_64 rng(8);
  const std::vector<CoupleSpec> couples{
      unit_couple(ex(1), inf(), 5), unit_couple(ex(1), ex(2), 5),
      CoupleSpec(SpaceSpec(ex(2), {3, 2, 2, 1, 1}), SpaceSpec(inf(), {1, 1, 0.5, 0.5, 0.5}))};
  for (const auto& c : couples) {
    for (auto p : {ex(1), ex(2), inf()}) {
      const auto ip = params(0.5, p, 8);
      for (int k = 0; k < 10; ++k) {
        const auto a = random_element(rng, 5);
        const auto b = random_element(rng, 5);
        const auto na = interp_norm(a, c, ip);
        const auto nb = interp_norm(b, c, ip);
        const auto nab = interp_norm(a + b, c, ip);
        CHECK(nab.lower <= (na.value + nb.value) * (1 + 1e-12));
        CHECK(interp_norm(-2.5 * a, c, ip).value ==
              doctest::Approx(2.5 * na.value).epsilon(1e-8));
        CHECK(na.lower <= na.value);
        CHECK(interp_norm(a, c, params(0.5, p, 10)).value >= na.lower);
      }
    }
  }
}

TEST_CASE("comparison semantics") {
  auto c = compare_bounds(1.0, 1.0, 2.0, 2.0);
  CHECK(c.holds);
  CHECK_FALSE(c.certified_violation);
  CHECK(c.margin == 1.0);
  c = compare_bounds(3.0, 2.9, 2.0, 2.0);
  CHECK_FALSE(c.holds);
  CHECK(c.certified_violation);
  // Within the combined slack: not refuted, not strictly confirmed.
  c = compare_bounds(2.01, 1.99, 2.0, 2.0);
  CHECK(c.holds);
  CHECK_FALSE(c.certified_violation);
  CHECK(c.margin < 0.0);
}

TEST_CASE("pointwise estimate on a dyadic grid for several operators") {
  const std::size_t n = 6;
  const auto cA = unit_couple(inf(), inf(), n);
  const auto cB = unit_couple(ex(1), inf(), n);
  const auto kappa = std::vector<double>{0.5, 0.25, 0.125, 0.0625, 0.03125, 0.015625};
  const std::vector<LipschitzOpSpec> ops{
      make_operator(OperatorDef::envelope_compact(kappa, {NonlinearityKind::soft_clamp, 1.0}), cA,
                    cB),
      make_operator(OperatorDef::scalar_multiple(-0.75, n), cA, cB),
      make_operator(OperatorDef::zero(n), cA, cB)};
  std::mt19937_64 rng(12);
  for (const auto& T : ops) {
    for (int k = 0; k < 20; ++k) {
      const auto a = random_element(rng, n, 2.0);
      for (int m = -10; m <= 10; ++m) {
        const auto r = verify_theorem1_pointwise(T, a, cA, cB, std::ldexp(1.0, m));
        CHECK(r.cmp.holds);
        CHECK_FALSE(r.cmp.certified_violation);
        CHECK(r.transported_ok);
      }
    }
  }
}

TEST_CASE("norm estimate across theta and p") {
  const std::size_t n = 5;
  const CoupleSpec cA(SpaceSpec(ex(1), {2, 2, 1.5, 1, 1}), SpaceSpec(ex(2), {1, 1, 1, 1, 0.5}));
  const auto cB = unit_couple(ex(1), inf(), n);
  REQUIRE(cA.embedding_certified());
  const auto T = make_operator(
      OperatorDef::custom_composition({Stage::apply({NonlinearityKind::shrink, 0.1}),
                                       Stage::multiply({1, -0.5, 0.25, 2, 1})},
                                      n),
      cA, cB);
  std::mt19937_64 rng(44);
  for (double theta : {0.25, 0.5, 0.75}) {
    for (auto p : {ex(1), ex(2), inf()}) {
      for (int k = 0; k < 5; ++k) {
        const auto r = verify_theorem1_norm(T, cA, cB, params(theta, p), random_element(rng, n));
        CHECK(r.cmp.holds);
        CHECK(r.term_violations == 0);
      }
    }
  }
}

TEST_CASE("scalar multiple on a degenerate couple attains equality") {
  const std::size_t n = 4;
  const auto c = unit_couple(ex(2), ex(2), n);
  const auto T = make_operator(OperatorDef::scalar_multiple(1.7, n), c, c);
  std::mt19937_64 rng(2);
  for (double theta : {0.25, 0.5, 0.75}) {
    for (auto p : {ex(1), ex(2), inf()}) {
      const auto a = random_element(rng, n);
      const auto r = verify_theorem1_norm(T, c, c, params(theta, p), a);
      CHECK(rel_diff(r.lhs.value, r.rhs) < 1e-9);
    }
  }
}

TEST_CASE("zero map: left side vanishes") {
  const auto c = unit_couple(ex(1), inf(), 3);
  const auto T = make_operator(OperatorDef::zero(3), c, c);
  const auto r = verify_theorem1_norm(T, c, c, params(0.5, ex(2)), CoupleElement{1, -2, 3});
  CHECK(r.lhs.value == 0.0);
  CHECK(r.cmp.holds);
  CHECK(r.cmp.margin > 0.0);
}
