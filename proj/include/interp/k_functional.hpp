#pragma once

// Peetre's K-functional K(t, a; X0, X1) = inf { ||a0||_X0 + t ||a1||_X1 : a = a0 + a1 }
// with near-optimal decompositions and a certified lower bound.

#include <stdexcept>
#include <string>
#include <vector>

#include "interp/couple.hpp"

namespace interp {

enum class KRoute {
  degenerate,       // X0 == X1: K = min(1, t) ||a||
  l1_linf_closed,   // unit-weight (l^1, l^inf): decreasing rearrangement
  general,          // convex solver with a certified lower bound
};

std::string to_string(KRoute r);

struct KDecomposition {
  double t = 0.0;
  CoupleElement a0;
  CoupleElement a1;           // stored as a - a0, so a0 + a1 == a exactly
  double objective = 0.0;     // ||a0||_X0 + t ||a1||_X1
  double lower_bound = 0.0;   // certified: lower_bound <= K(t, a)
  double slack = 0.0;         // objective <= (1 + slack) K(t, a)
  KRoute route = KRoute::general;
};

/// compute_k could not certify the requested tolerance. Carries the best
/// decomposition found so callers can still inspect it.
class UncertifiedError : public std::runtime_error {
 public:
  UncertifiedError(const std::string& what, KDecomposition best)
      : std::runtime_error(what), best_(std::move(best)) {}
  const KDecomposition& best() const noexcept { return best_; }

 private:
  KDecomposition best_;
};

/// ||a0||_X0 + t ||a1||_X1.
double k_objective(const CoupleElement& a0, const CoupleElement& a1, double t,
                   const CoupleSpec& c);

/// Near-optimal decomposition with relative slack <= tol. Uses the closed
/// forms when the couple admits one, the general solver otherwise.
/// Throws InvalidInput for t <= 0 or tol <= 0 and UncertifiedError when the
/// certified slack exceeds tol.
KDecomposition compute_k(double t, const CoupleElement& a, const CoupleSpec& c,
                         double tol = 1e-9);

/// The general convex route, never taking a closed-form shortcut. Exposed so
/// the closed forms can be cross-checked against it.
KDecomposition solve_k_general(double t, const CoupleElement& a, const CoupleSpec& c,
                               double tol = 1e-9);

struct KCurvePoint {
  int m = 0;
  double t = 0.0;
  double k = 0.0;       // decomposition objective (upper bound on K)
  double slack = 0.0;
  double lower = 0.0;   // certified lower bound
};

struct KCurve {
  std::vector<KCurvePoint> points;  // ordered by m = -M..M, t = 2^m
};

/// K at t = 2^m for m = -M..M. Grid points are independent and may be
/// evaluated on `parallel` threads; the result does not depend on it.
/// Monotonicity and concavity are validated before returning.
KCurve compute_k_curve(const CoupleElement& a, const CoupleSpec& c, int M, double tol = 1e-9,
                       unsigned parallel = 1);

/// Checks that t -> K is nondecreasing and concave on the grid using the
/// certified bounds of each point. Returns an empty string on success,
/// otherwise a description of the first failure.
std::string validate_k_curve(const KCurve& curve);

/// CSV with header "m,t,K,slack".
std::string to_csv(const KCurve& curve);

}  // namespace interp
