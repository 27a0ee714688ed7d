#include "interp/persson.hpp"

#include <cmath>
#include <sstream>

#include "interp/error.hpp"

namespace interp {

CompactEnvelope CompactEnvelope::geometric(double r, std::size_t n, int start) {
  if (!(r > 0.0 && r <= 1.0)) throw InvalidInput("geometric envelope: ratio must be in (0, 1]");
  CompactEnvelope env;
  env.kappa.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    env.kappa[i] = std::pow(r, static_cast<double>(static_cast<long long>(i) + start));
  }
  env.validate();
  return env;
}

void CompactEnvelope::validate() const {
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] >= 0.0) || !std::isfinite(kappa[i])) {
      throw InvalidInput("envelope entries must be finite and >= 0");
    }
    if (i > 0 && kappa[i] > kappa[i - 1]) throw InvalidInput("envelope must be nonincreasing");
  }
  if (cK != 1.0) throw InvalidInput("truncation families have c(K) = 1");
}

CoupleElement PerssonFamily::truncate(std::size_t N, const CoupleElement& b) const {
  require_same_dim(b.dim(), couple_.dim(), "truncate");
  if (N > b.dim()) throw InvalidInput("truncate: rank exceeds the dimension");
  std::vector<double> v = b.vector();
  std::fill(v.begin() + static_cast<std::ptrdiff_t>(N), v.end(), 0.0);
  return CoupleElement(std::move(v));
}

double PerssonFamily::norm_into_intersection(std::size_t N) const {
  if (N > couple_.dim()) throw InvalidInput("norm_into_intersection: rank exceeds the dimension");
  std::vector<double> d(couple_.dim(), 0.0);
  std::fill(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(N), 1.0);
  double out = 0.0;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      out = std::max(out, diagonal_operator_norm(d, couple_.space(i), couple_.space(j)));
    }
  }
  return out;
}

namespace {

double tail_norm(const std::vector<double>& kappa, std::size_t N, const SpaceSpec& s) {
  std::vector<double> tail(kappa.size(), 0.0);
  for (std::size_t i = N; i < kappa.size(); ++i) tail[i] = kappa[i];
  return norm(tail, s);
}

}  // namespace

PerssonSelection select_p_epsilon(const CompactEnvelope& env, const PerssonFamily& fam,
                                  double eps) {
  if (!(eps > 0.0)) throw InvalidInput("select_p_epsilon: eps must be > 0");
  env.validate();
  require_same_dim(env.kappa.size(), fam.max_rank(), "select_p_epsilon");
  const SpaceSpec& b0 = fam.couple().space0();
  // The tail norm is nonincreasing in N, so the first admissible N is the
  // smallest. A relative guard keeps the strict inequality robust to the
  // rounding of later recomputations of the same norm.
  for (std::size_t N = 0; N <= fam.max_rank(); ++N) {
    const double err = tail_norm(env.kappa, N, b0);
    if (err * (1.0 + 1e-12) < eps) return {N, eps, err};
  }
  return {fam.max_rank(), eps, 0.0};
}

HBoundReport verify_h_bound(const PerssonFamily& fam, const CoupleElement& b, double cK) {
  HBoundReport out;
  for (std::size_t N = 0; N <= fam.max_rank(); ++N) {
    const auto pb = fam.truncate(N, b);
    for (int j = 0; j < 2; ++j) {
      const double lhs = norm(pb, fam.couple().space(j));
      const double rhs = norm(b, fam.couple().space(j));
      ++out.checks;
      if (rhs > 0.0) out.worst_ratio = std::max(out.worst_ratio, lhs / rhs);
      if (lhs > cK * rhs) out.pass = false;
    }
  }
  return out;
}

BrahmsReport verify_brahms(const LipschitzOpSpec& T, const PerssonFamily& fam,
                           const PerssonSelection& P, const CoupleElement& a,
                           const CoupleSpec& cA) {
  BrahmsReport out;
  const SpaceSpec& b0 = fam.couple().space0();
  const double na = norm(a, cA.space0());
  const auto ta = T.apply(a);
  out.homogeneous = norm(fam.truncate(P.N, ta) - ta, b0);
  out.bound = P.eps * na;
  out.homogeneous_ok = out.homogeneous <= out.bound;
  out.margin = out.bound - out.homogeneous;
  if (na > 0.0) {
    const auto scaled = (1.0 / na) * ta;
    out.normalized = norm(fam.truncate(P.N, scaled) - scaled, b0);
    out.normalized_ok = out.normalized < P.eps;
  }
  return out;
}

LipschitzOpSpec persson_defect(const LipschitzOpSpec& T, const PerssonSelection& P,
                               const CompactEnvelope& env, const CoupleSpec& cA,
                               const CoupleSpec& cB, std::uint64_t seed, std::size_t samples) {
  const std::size_t n = T.dim();
  std::vector<Stage> stages = T.def.stages();
  std::vector<double> minus_tail(n, 0.0);
  for (std::size_t i = P.N; i < n; ++i) minus_tail[i] = -1.0;
  stages.push_back(Stage::multiply(std::move(minus_tail)));
  auto def = OperatorDef::custom_composition(std::move(stages), n);
  try {
    return make_operator(std::move(def), cA, cB, P.eps, T.C1 * (env.cK + 1.0), seed, samples);
  } catch (const InvalidInput& e) {
    throw HypothesisFailure("Persson defect constants", e.what());
  }
}

}  // namespace interp
