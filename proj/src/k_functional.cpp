#include "interp/k_functional.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "interp/error.hpp"
#include "interp/parallel.hpp"
#include "interp/summation.hpp"
#include "k_solver.hpp"

namespace interp {

std::string to_string(KRoute r) {
  switch (r) {
    case KRoute::degenerate: return "degenerate";
    case KRoute::l1_linf_closed: return "l1_linf_closed";
    case KRoute::general: return "general";
  }
  return "unknown";
}

double k_objective(const CoupleElement& a0, const CoupleElement& a1, double t,
                   const CoupleSpec& c) {
  return norm(a0, c.space0()) + t * norm(a1, c.space1());
}

namespace {

void check_args(double t, const CoupleElement& a, const CoupleSpec& c, double tol) {
  if (!(t > 0.0) || !std::isfinite(t)) throw InvalidInput("compute_k: t must be finite and > 0");
  if (!(tol > 0.0)) throw InvalidInput("compute_k: tol must be > 0");
  require_same_dim(a.dim(), c.dim(), "compute_k");
}

// Splits a into (a0, a - a0) with a0 close to `wanted` and a0 + a1 == a
// exactly. Whichever piece has at least half the magnitude is computed as
// a difference, which is exact by Sterbenz' lemma.
KDecomposition split_exact(double t, const CoupleElement& a, std::vector<double> wanted,
                           const CoupleSpec& c) {
  std::vector<double> rest(a.dim());
  for (std::size_t i = 0; i < a.dim(); ++i) {
    const double ai = a[i];
    if (std::abs(wanted[i]) >= 0.5 * std::abs(ai)) {
      rest[i] = ai - wanted[i];
    } else {
      rest[i] = ai - wanted[i];
      wanted[i] = ai - rest[i];
    }
  }
  KDecomposition d;
  d.t = t;
  d.a0 = CoupleElement(std::move(wanted));
  d.a1 = CoupleElement(std::move(rest));
  d.objective = k_objective(d.a0, d.a1, t, c);
  return d;
}

KDecomposition zero_decomposition(double t, std::size_t n, KRoute route) {
  KDecomposition d;
  d.t = t;
  d.a0 = CoupleElement::zeros(n);
  d.a1 = CoupleElement::zeros(n);
  d.route = route;
  return d;
}

KDecomposition degenerate_k(double t, const CoupleElement& a, const CoupleSpec& c) {
  KDecomposition d;
  d.t = t;
  if (t < 1.0) {
    d.a0 = CoupleElement::zeros(a.dim());
    d.a1 = a;
  } else {
    d.a0 = a;
    d.a1 = CoupleElement::zeros(a.dim());
  }
  d.objective = k_objective(d.a0, d.a1, t, c);
  d.lower_bound = d.objective;
  d.route = KRoute::degenerate;
  return d;
}

// K(t, a; l^1, l^inf) = sum of the floor(t) largest |a_i| plus the
// fractional part of t times the next one. The optimal a1 clips |a| at the
// (floor(t)+1)-th largest magnitude.
KDecomposition l1_linf_k(double t, const CoupleElement& a, const CoupleSpec& c) {
  const std::size_t n = a.dim();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(a[i]);
  std::vector<double> sorted = mag;
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  const double whole = std::floor(t);
  std::vector<double> wanted(n);
  if (whole >= static_cast<double>(n)) {
    wanted = a.vector();
  } else {
    const double level = sorted[static_cast<std::size_t>(whole)];
    for (std::size_t i = 0; i < n; ++i) {
      const double excess = std::max(mag[i] - level, 0.0);
      wanted[i] = std::copysign(excess, a[i]);
    }
  }
  KDecomposition d = split_exact(t, a, std::move(wanted), c);
  d.lower_bound = d.objective;
  d.route = KRoute::l1_linf_closed;
  return d;
}

KDecomposition general_k(double t, const CoupleElement& a, const CoupleSpec& c) {
  const std::size_t n = a.dim();
  std::vector<double> mag(n);
  for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(a[i]);
  const auto sol = detail::solve_reduced(t, mag, c.space0(), c.space1());
  std::vector<double> wanted(n);
  for (std::size_t i = 0; i < n; ++i) wanted[i] = sol.share[i] * a[i];
  KDecomposition d = split_exact(t, a, std::move(wanted), c);
  d.lower_bound = std::min(sol.lower_bound, d.objective);
  d.route = KRoute::general;
  return d;
}

KDecomposition certify(KDecomposition d, double tol) {
  if (d.objective == 0.0) {
    d.slack = 0.0;
  } else if (d.lower_bound > 0.0) {
    d.slack = std::max(0.0, d.objective / d.lower_bound - 1.0);
  } else {
    d.slack = std::numeric_limits<double>::infinity();
  }
  if (d.slack > tol) {
    std::ostringstream os;
    os << "compute_k: certified slack " << d.slack << " exceeds tol " << tol << " at t=" << d.t
       << " (route " << to_string(d.route) << ")";
    throw UncertifiedError(os.str(), std::move(d));
  }
  return d;
}

}  // namespace

KDecomposition compute_k(double t, const CoupleElement& a, const CoupleSpec& c, double tol) {
  check_args(t, a, c, tol);
  if (c.degenerate()) return certify(degenerate_k(t, a, c), tol);
  if (a.is_zero()) return zero_decomposition(t, a.dim(), KRoute::general);
  if (c.is_unit_l1_linf()) return certify(l1_linf_k(t, a, c), tol);
  return certify(general_k(t, a, c), tol);
}

KDecomposition solve_k_general(double t, const CoupleElement& a, const CoupleSpec& c,
                               double tol) {
  check_args(t, a, c, tol);
  if (a.is_zero()) return zero_decomposition(t, a.dim(), KRoute::general);
  return certify(general_k(t, a, c), tol);
}

double sum_norm(const CoupleElement& x, const CoupleSpec& c, double tol) {
  return compute_k(1.0, x, c, tol).objective;
}

KCurve compute_k_curve(const CoupleElement& a, const CoupleSpec& c, int M, double tol,
                       unsigned parallel) {
  if (M < 1) throw InvalidInput("compute_k_curve: M must be >= 1");
  const std::size_t count = static_cast<std::size_t>(2 * M + 1);
  KCurve curve;
  curve.points.resize(count);
  parallel_for(count, parallel, [&](std::size_t idx) {
    const int m = static_cast<int>(idx) - M;
    const double t = std::ldexp(1.0, m);
    try {
      const auto d = compute_k(t, a, c, tol);
      curve.points[idx] = {m, t, d.objective, d.slack, d.lower_bound};
    } catch (const UncertifiedError& e) {
      throw UncertifiedError(std::string(e.what()) + " [grid m=" + std::to_string(m) + "]",
                             e.best());
    }
  });
  if (auto problem = validate_k_curve(curve); !problem.empty()) {
    throw std::logic_error("compute_k_curve: " + problem);
  }
  return curve;
}

std::string validate_k_curve(const KCurve& curve) {
  const auto& p = curve.points;
  constexpr double kRound = 1e-12;
  for (std::size_t i = 1; i < p.size(); ++i) {
    if (p[i].k < p[i - 1].lower * (1.0 - kRound)) {
      return "K decreases between m=" + std::to_string(p[i - 1].m) + " and m=" +
             std::to_string(p[i].m);
    }
  }
  for (std::size_t i = 1; i + 1 < p.size(); ++i) {
    // Concavity: K(t_i) >= the chord of its neighbours at t_i.
    const double lam = (p[i + 1].t - p[i].t) / (p[i + 1].t - p[i - 1].t);
    const double chord = lam * p[i - 1].lower + (1.0 - lam) * p[i + 1].lower;
    if (p[i].k < chord * (1.0 - kRound)) {
      return "K is not concave at m=" + std::to_string(p[i].m);
    }
  }
  return {};
}

std::string to_csv(const KCurve& curve) {
  std::ostringstream os;
  os.precision(17);
  os << "m,t,K,slack\n";
  for (const auto& pt : curve.points) {
    os << pt.m << ',' << pt.t << ',' << pt.k << ',' << pt.slack << '\n';
  }
  return os.str();
}

}  // namespace interp
