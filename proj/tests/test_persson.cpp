#include <random>

#include "doctest.h"
#include "interp/error.hpp"
#include "interp/persson.hpp"
#include "test_support.hpp"

using namespace interp;
using namespace interp::testing;

namespace {

// The corner of the envelope box with all signs positive: for lattice norms
// it realizes sup_{b in K} ||P_N b - b||.
CoupleElement extreme_point(const CompactEnvelope& env) { return CoupleElement(env.kappa); }

}  // namespace

TEST_CASE("geometric envelope") {
  const auto env = CompactEnvelope::geometric(0.5, 4);
  CHECK(env.kappa == std::vector<double>{0.5, 0.25, 0.125, 0.0625});
  CHECK(CompactEnvelope::geometric(0.5, 2, 0).kappa == std::vector<double>{1.0, 0.5});
  CHECK_THROWS_AS(CompactEnvelope::geometric(1.5, 3), InvalidInput);
  CompactEnvelope bad{{0.1, 0.2}, 1.0};
  CHECK_THROWS_AS(bad.validate(), InvalidInput);
  CompactEnvelope other_c{{0.2, 0.1}, 2.0};
  CHECK_THROWS_AS(other_c.validate(), InvalidInput);
}

TEST_CASE("truncation") {
  const PerssonFamily fam(unit_couple(ex(1), inf(), 4));
  const CoupleElement b{1, -2, 3, -4};
  CHECK(fam.truncate(0, b).is_zero());
  CHECK(fam.truncate(2, b).vector() == std::vector<double>{1, -2, 0, 0});
  CHECK(fam.truncate(4, b).vector() == b.vector());
  CHECK_THROWS_AS(fam.truncate(5, b), InvalidInput);
  CHECK(fam.norm_into_intersection(0) == 0.0);
  CHECK(fam.norm_into_intersection(4) == doctest::Approx(4.0));  // l^inf -> l^1
}

TEST_CASE("truncations commute and are idempotent") {
  const PerssonFamily fam(unit_couple(ex(2), inf(), 6));
  std::mt19937_64 rng(4);
  for (int k = 0; k < 50; ++k) {
    const auto b = random_element(rng, 6);
    for (std::size_t N = 0; N <= 6; ++N) {
      for (std::size_t M = 0; M <= 6; ++M) {
        CHECK(fam.truncate(N, fam.truncate(M, b)).vector() ==
              fam.truncate(std::min(N, M), b).vector());
      }
    }
  }
}

TEST_CASE("norm into the intersection on a weighted couple") {
  // Identity-like truncation from l^1_w into l^inf_v: norm max_{i<N} v_i / w_i.
  const PerssonFamily fam(CoupleSpec(SpaceSpec(ex(1), {1, 1, 1}), SpaceSpec(inf(), {1, 3, 5})));
  CHECK(fam.norm_into_intersection(1) == doctest::Approx(1.0));
  CHECK(fam.norm_into_intersection(2) == doctest::Approx(3.0));
  CHECK(fam.norm_into_intersection(3) == doctest::Approx(5.0));
}

TEST_CASE("select_p_epsilon examples") {
  const auto env = CompactEnvelope::geometric(0.5, 6);  // 1/2, 1/4, ..., 1/64
  const PerssonFamily fam(unit_couple(inf(), inf(), 6));
  CHECK(select_p_epsilon(env, fam, 0.3).N == 1);    // tail sup = 1/4
  CHECK(select_p_epsilon(env, fam, 0.6).N == 0);    // eps above kappa_1
  CHECK(select_p_epsilon(env, fam, 0.25).N == 2);   // strict: 1/4 is not < 1/4
  CHECK(select_p_epsilon(env, fam, 1.0 / 64).N == 6);
  CHECK(select_p_epsilon(env, fam, 1e-9).N == 6);
  CHECK(select_p_epsilon(env, fam, 1e-9).worst_error == 0.0);
  CHECK_THROWS_AS(select_p_epsilon(env, fam, 0.0), InvalidInput);
  CHECK_THROWS_AS(select_p_epsilon(env, PerssonFamily(unit_couple(inf(), inf(), 5)), 0.1),
                  InvalidInput);
}

TEST_CASE("select_p_epsilon: error bound at the extreme point, and minimality") {
  const auto env = CompactEnvelope::geometric(0.7, 20);
  for (auto p0 : {ex(1), ex(2), inf()}) {
    const PerssonFamily fam(unit_couple(p0, inf(), 20));
    std::size_t last = 0;
    for (double eps : {1.0, 0.5, 0.25, 0.125}) {
      const auto P = select_p_epsilon(env, fam, eps);
      const auto x = extreme_point(env);
      const double err = norm(fam.truncate(P.N, x) - x, fam.couple().space0());
      CHECK(err < eps);
      CHECK(err == doctest::Approx(P.worst_error).epsilon(1e-14));
      if (P.N > 0) {
        CHECK(norm(fam.truncate(P.N - 1, x) - x, fam.couple().space0()) >= eps * (1 - 1e-12));
      }
      CHECK(P.N >= last);  // smaller eps never needs fewer coordinates
      last = P.N;
    }
  }
}

TEST_CASE("h bound on 1000 random elements") {
  std::mt19937_64 rng(9);
  const CoupleSpec c(SpaceSpec(ex(1.5), random_weights(rng, 8, 0.5, 3.0)),
                     SpaceSpec(inf(), random_weights(rng, 8, 0.5, 3.0)));
  const PerssonFamily fam(c);
  for (int k = 0; k < 1000; ++k) {
    const auto r = verify_h_bound(fam, random_element(rng, 8, 2.0));
    CHECK(r.pass);
    CHECK(r.worst_ratio <= 1.0);
    CHECK(r.checks == 18);
  }
  CHECK(verify_h_bound(fam, CoupleElement::zeros(8)).pass);
}

TEST_CASE("homogeneous Persson bound for the envelope operator") {
  const std::size_t n = 10;
  const auto env = CompactEnvelope::geometric(0.5, n);
  const auto cA = unit_couple(inf(), inf(), n);
  const auto cB = unit_couple(ex(1), inf(), n);
  const auto T = make_operator(
      OperatorDef::envelope_compact(env.kappa, {NonlinearityKind::soft_clamp, 1.0}), cA, cB);
  const PerssonFamily fam(cB);
  std::mt19937_64 rng(21);
  for (double eps : {0.5, 0.1, 0.02}) {
    const auto P = select_p_epsilon(env, fam, eps);
    const auto zero = verify_brahms(T, fam, P, CoupleElement::zeros(n), cA);
    CHECK(zero.homogeneous == 0.0);
    CHECK(zero.homogeneous_ok);
    for (int k = 0; k < 300; ++k) {
      const auto r = verify_brahms(T, fam, P, random_element(rng, n, 5.0), cA);
      CHECK(r.homogeneous_ok);
      CHECK(r.normalized_ok);
      CHECK(r.margin >= 0.0);
    }
  }
}

TEST_CASE("defect operator constants") {
  const std::size_t n = 8;
  const auto env = CompactEnvelope::geometric(0.5, n);
  const auto cA = unit_couple(inf(), inf(), n);
  const auto cB = unit_couple(ex(1), inf(), n);
  const auto T = make_operator(OperatorDef::envelope_compact(env.kappa, {}), cA, cB);
  const PerssonFamily fam(cB);
  const auto P = select_p_epsilon(env, fam, 0.1);
  const auto D = persson_defect(T, P, env, cA, cB);
  CHECK(D.C0 == 0.1);
  CHECK(D.C1 == doctest::Approx(2.0 * T.C1));
  CHECK(D.audit.c0_observed < 0.1);
  // (P T - T) a is minus the tail of T a.
  const CoupleElement a{1, 1, 1, 1, 1, 1, 1, 1};
  const auto d = D.apply(a);
  const auto ta = T.apply(a);
  for (std::size_t i = 0; i < n; ++i) CHECK(d[i] == (i < P.N ? 0.0 : -ta[i]));
}

TEST_CASE("defect of an operator outside its envelope is rejected") {
  const std::size_t n = 6;
  const auto env = CompactEnvelope::geometric(0.5, n);
  const auto cA = unit_couple(inf(), inf(), n);
  const auto cB = unit_couple(ex(1), inf(), n);
  const auto T = make_operator(OperatorDef::identity_control(env.kappa), cA, cB);
  const auto P = select_p_epsilon(env, PerssonFamily(cB), 0.1);
  CHECK_THROWS_AS(persson_defect(T, P, env, cA, cB), HypothesisFailure);
}
