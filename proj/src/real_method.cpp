#include "interp/real_method.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "interp/error.hpp"
#include "interp/parallel.hpp"
#include "interp/summation.hpp"

namespace interp {

void InterpParams::validate() const {
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("theta must lie in (0, 1)");
  if (M < 1) throw InvalidInput("grid M must be >= 1");
}

double aggregate_terms(const std::vector<double>& terms, const Exponent& p) {
  return norm(terms, SpaceSpec::unit(p, terms.size()));
}

namespace {

double relative_slack(double upper, double lower) {
  if (upper == 0.0) return 0.0;
  if (!(lower > 0.0)) return std::numeric_limits<double>::infinity();
  return std::max(0.0, upper / lower - 1.0);
}

// Closed-form couples admit the whole grid from one pass over the data: the
// degenerate couple has K(t) = min(1, t) ||a||, the unit (l^1, l^inf) couple
// has K(t) = (sum of the floor(t) largest |a_i|) + frac(t) * (next one).
bool closed_form_terms(const CoupleElement& a, const CoupleSpec& c, const InterpParams& ip,
                       double shift, std::vector<InterpTerm>& terms) {
  const std::size_t count = terms.size();
  if (c.degenerate()) {
    const double na = norm(a, c.space0());
    for (std::size_t idx = 0; idx < count; ++idx) {
      const int m = static_cast<int>(idx) - ip.M;
      const double t = std::ldexp(shift, m);
      const double v = std::pow(t, -ip.theta) * std::min(1.0, t) * na;
      terms[idx] = {m, t, v, v, 0.0};
    }
    return true;
  }
  if (!c.is_unit_l1_linf()) return false;
  const std::size_t n = a.dim();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(a[i]);
  std::sort(mag.begin(), mag.end(), std::greater<>());
  std::vector<double> prefix(n + 1, 0.0);
  CompensatedSum acc;
  for (std::size_t i = 0; i < n; ++i) {
    acc.add(mag[i]);
    prefix[i + 1] = acc.value();
  }
  for (std::size_t idx = 0; idx < count; ++idx) {
    const int m = static_cast<int>(idx) - ip.M;
    const double t = std::ldexp(shift, m);
    const double whole = std::floor(t);
    double k;
    if (whole >= static_cast<double>(n)) {
      k = prefix[n];
    } else {
      const auto j = static_cast<std::size_t>(whole);
      k = prefix[j] + (t - whole) * mag[j];
    }
    const double v = std::pow(t, -ip.theta) * k;
    terms[idx] = {m, t, v, v, 0.0};
  }
  return true;
}

}  // namespace

InterpNormResult interp_norm(const CoupleElement& a, const CoupleSpec& c, const InterpParams& ip,
                             double tol, double shift, unsigned parallel) {
  ip.validate();
  if (!(shift > 0.0) || !std::isfinite(shift)) throw InvalidInput("interp_norm: shift must be > 0");
  require_same_dim(a.dim(), c.dim(), "interp_norm");
  const std::size_t count = static_cast<std::size_t>(2 * ip.M + 1);
  InterpNormResult out;
  out.params = ip;
  out.shift = shift;
  out.per_term.resize(count);
  if (!closed_form_terms(a, c, ip, shift, out.per_term)) {
    parallel_for(count, parallel, [&](std::size_t idx) {
      const int m = static_cast<int>(idx) - ip.M;
      const double t = std::ldexp(shift, m);
      const auto d = compute_k(t, a, c, tol);
      const double w = std::pow(t, -ip.theta);
      out.per_term[idx] = {m, t, w * d.objective, w * d.lower_bound, d.slack};
    });
  }
  std::vector<double> upper(count);
  std::vector<double> lower(count);
  for (std::size_t i = 0; i < count; ++i) {
    upper[i] = out.per_term[i].value;
    lower[i] = out.per_term[i].lower;
  }
  out.value = aggregate_terms(upper, ip.p);
  out.lower = std::min(aggregate_terms(lower, ip.p), out.value);
  out.slack = relative_slack(out.value, out.lower);
  out.last_term = std::max(upper.front(), upper.back());
  return out;
}

Comparison compare_bounds(double lhs_upper, double lhs_lower, double rhs_upper,
                          double rhs_lower) {
  constexpr double kRound = 1e-12;
  Comparison c;
  const double slack = relative_slack(lhs_upper, lhs_lower) + relative_slack(rhs_upper, rhs_lower);
  c.holds = lhs_upper <= rhs_upper * (1.0 + slack + kRound);
  c.certified_violation = lhs_lower > rhs_upper * (1.0 + kRound);
  c.margin = rhs_lower - lhs_upper;
  return c;
}

PointwiseReport verify_theorem1_pointwise(const LipschitzOpSpec& T, const CoupleElement& a,
                                          const CoupleSpec& cA, const CoupleSpec& cB, double t,
                                          double tol) {
  if (!(T.C0 > 0.0) || !(T.C1 > 0.0)) throw InvalidInput("operator constants must be > 0");
  PointwiseReport r;
  r.t = t;
  r.shifted_t = t * T.C1 / T.C0;
  const auto ta = T.apply(a);
  const auto left = compute_k(t, ta, cB, tol);
  const auto right = compute_k(r.shifted_t, a, cA, tol);
  r.lhs = left.objective;
  r.lhs_lower = left.lower_bound;
  r.rhs = T.C0 * right.objective;
  r.rhs_lower = T.C0 * right.lower_bound;

  const auto ta0 = T.apply(right.a0);
  r.transported = k_objective(ta0, ta - ta0, t, cB);
  r.transported_ok = r.transported <= r.rhs * (1.0 + 1e-12);
  r.cmp = compare_bounds(r.lhs, r.lhs_lower, r.rhs, r.rhs_lower);
  return r;
}

NormReport verify_theorem1_norm(const LipschitzOpSpec& T, const CoupleSpec& cA,
                                const CoupleSpec& cB, const InterpParams& ip,
                                const CoupleElement& a, double tol, unsigned parallel) {
  if (!(T.C0 > 0.0) || !(T.C1 > 0.0)) throw InvalidInput("operator constants must be > 0");
  NormReport r;
  const double shift = T.C1 / T.C0;
  r.lhs = interp_norm(T.apply(a), cB, ip, tol, 1.0, parallel);
  r.rhs_shifted = interp_norm(a, cA, ip, tol, shift, parallel);
  r.source = interp_norm(a, cA, ip, tol, 1.0, parallel);
  r.constant = std::pow(T.C0, 1.0 - ip.theta) * std::pow(T.C1, ip.theta);
  r.rhs = r.constant * r.rhs_shifted.value;
  r.rhs_lower = r.constant * r.rhs_shifted.lower;
  for (std::size_t i = 0; i < r.lhs.per_term.size(); ++i) {
    const double bound = r.constant * r.rhs_shifted.per_term[i].value;
    if (r.lhs.per_term[i].lower > bound * (1.0 + 1e-12)) ++r.term_violations;
  }
  r.cmp = compare_bounds(r.lhs.value, r.lhs.lower, r.rhs, r.rhs_lower);
  return r;
}

}  // namespace interp
