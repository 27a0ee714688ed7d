#pragma once

// Persson's approximation condition realized by coordinate truncations.
//
// The compact set is the envelope box K = { b : |b_i| <= kappa_i }. The
// truncation P_N keeps coordinates 0..N-1 and zeroes the rest; it is linear,
// idempotent and has norm <= 1 in every weighted l^p space, so c(K) = 1.

#include <cstddef>
#include <vector>

#include "interp/couple.hpp"
#include "interp/operators.hpp"

namespace interp {

struct CompactEnvelope {
  std::vector<double> kappa;  // nonnegative, nonincreasing
  double cK = 1.0;

  /// kappa_i = r^(i + start) for i = 0..n-1.
  static CompactEnvelope geometric(double r, std::size_t n, int start = 1);

  /// Throws InvalidInput unless kappa is nonnegative, nonincreasing and cK == 1.
  void validate() const;
};

class PerssonFamily {
 public:
  explicit PerssonFamily(CoupleSpec couple) : couple_(std::move(couple)) {}

  const CoupleSpec& couple() const noexcept { return couple_; }
  std::size_t max_rank() const noexcept { return couple_.dim(); }

  /// P_N b.
  CoupleElement truncate(std::size_t N, const CoupleElement& b) const;

  /// Exact norm of P_N : B0 + B1 -> B0 ∩ B1. The unit ball of the sum space
  /// is the closed convex hull of the two unit balls, so the norm is the
  /// largest of the four diagonal norms P_N : B_i -> B_j.
  double norm_into_intersection(std::size_t N) const;

 private:
  CoupleSpec couple_;
};

struct PerssonSelection {
  std::size_t N = 0;
  double eps = 0.0;
  /// sup over b in K of ||P_N b - b||_B0, which for lattice norms is the B0
  /// norm of the tail of kappa and is computed exactly.
  double worst_error = 0.0;
};

/// Smallest N with sup_{b in K} ||P_N b - b||_B0 < eps. Throws for eps <= 0.
PerssonSelection select_p_epsilon(const CompactEnvelope& env, const PerssonFamily& fam,
                                  double eps);

struct HBoundReport {
  bool pass = true;
  double worst_ratio = 0.0;  // max ||P_N b||_Bj / ||b||_Bj over N and j
  std::size_t checks = 0;
};

/// ||P_N b||_Bj <= cK ||b||_Bj for every N = 0..n and j = 0, 1.
HBoundReport verify_h_bound(const PerssonFamily& fam, const CoupleElement& b, double cK = 1.0);

struct BrahmsReport {
  double normalized = 0.0;   // ||P(Ta / ||a||) - Ta / ||a|| ||_B0, 0 for a = 0
  double homogeneous = 0.0;  // ||(PT - T) a||_B0
  double bound = 0.0;        // eps ||a||_A0
  bool normalized_ok = true; // normalized < eps (vacuous for a = 0)
  bool homogeneous_ok = true;
  double margin = 0.0;       // bound - homogeneous
};

BrahmsReport verify_brahms(const LipschitzOpSpec& T, const PerssonFamily& fam,
                           const PerssonSelection& P, const CoupleElement& a,
                           const CoupleSpec& cA);

/// The operator P_N T - T with the constants eps (boundedness) and
/// C1 (cK + 1) (Lipschitz), audited on (cA, cB). Its boundedness constant is
/// valid when T satisfies the envelope condition with this envelope.
LipschitzOpSpec persson_defect(const LipschitzOpSpec& T, const PerssonSelection& P,
                               const CompactEnvelope& env, const CoupleSpec& cA,
                               const CoupleSpec& cB, std::uint64_t seed = 1,
                               std::size_t samples = 1000);

}  // namespace interp
