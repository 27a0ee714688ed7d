#pragma once

// Constructive total boundedness: greedy epsilon-nets with independent
// coverage audits, the Lions-Peetre style pipeline for sequences bounded in
// the (theta, inf) functional, and the net for T(M) built through a Persson
// truncation.

#include <cstdint>
#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "interp/couple.hpp"
#include "interp/operators.hpp"
#include "interp/persson.hpp"
#include "interp/real_method.hpp"

namespace interp {

/// A norm used as a distance d(x, y) = norm(x - y), with the tag reported in
/// every net it certifies.
struct Metric {
  std::string tag;
  std::function<double(const CoupleElement&)> norm;

  double distance(const CoupleElement& x, const CoupleElement& y) const { return norm(x - y); }
};

Metric space_metric(const SpaceSpec& s, std::string tag);
/// The norm of B0 + B1 (K at t = 1, decomposition objective).
Metric sum_metric(const CoupleSpec& c, double tol = 1e-9);
/// The discrete (theta, p) functional on the couple.
Metric interp_metric(const CoupleSpec& c, const InterpParams& ip, double tol = 1e-9);

struct SampleSet {
  std::vector<CoupleElement> elements;
  double bound = 0.0;       // every element has tagged norm <= bound
  std::uint64_t seed = 0;
  std::string norm_tag;
};

/// `count` seeded Gaussian vectors rescaled onto the sphere of radius
/// `bound` in `metric` (nudged inward if rounding lands them outside).
SampleSet make_sample_set(std::size_t n, std::size_t count, double bound, std::uint64_t seed,
                          const Metric& metric, unsigned parallel = 1);

struct EpsNet {
  double eps = 0.0;
  std::string norm_tag;
  std::vector<std::size_t> center_indices;  // indices into the input points
  std::vector<CoupleElement> centers;
  std::vector<std::size_t> assignment;      // nearest center (position in centers) per point
  std::size_t count = 0;
  double coverage_max_dist = 0.0;           // from the independent audit
};

/// Farthest-point greedy net with closed balls: the first point is the first
/// center; each further center is the point farthest from the current
/// centers (lowest index on ties) until every point is within eps. The
/// coverage figure comes from audit_coverage, not from the greedy pass.
EpsNet greedy_net(const std::vector<CoupleElement>& points, double eps, const Metric& metric,
                  unsigned parallel = 1);

struct CoverageAudit {
  double max_dist = 0.0;
  std::size_t worst_index = 0;
  bool covered = true;
  std::vector<std::size_t> nearest;  // index into centers, lowest on ties
};

/// Recomputes every point-to-center distance from scratch. `strict` asks for
/// open balls (distance < eps).
CoverageAudit audit_coverage(const std::vector<CoupleElement>& points,
                             const std::vector<CoupleElement>& centers, double eps,
                             const Metric& metric, bool strict, unsigned parallel = 1);

// ---------------------------------------------------------------------------
// Lions-Peetre pipeline

struct LemmaOptions {
  double theta = 0.5;
  int grid_M = 8;                    // decompositions at m in [-grid_M, grid_M]
  std::vector<double> eps_list;
  double tol = 1e-9;
  unsigned parallel = 1;
  /// Reject samples whose (theta, inf) functional exceeds this, when set.
  double bound = std::numeric_limits<double>::infinity();
  /// Check the three-term bound on every pair (n, k), not only on (n, center).
  bool all_pairs = true;
};

struct LPDecomposition {
  int m = 0;
  CoupleElement u;  // a = u + v exactly
  CoupleElement v;
  double objective = 0.0;  // ||u||_A0 + 2^m ||v||_A1
  double slack = 0.0;
};

struct GqqRecord {
  int m = 0;
  double bound = 0.0;        // C3 2^{-(1-theta) m}
  double worst = 0.0;        // max_n ||Ta_n - Tu_n(m)||_B1
  std::size_t violations = 0;
};

struct LemmaEpsReport {
  double eps = 0.0;
  int m = 0;                 // m(eps)
  double C2 = 0.0;           // may grow when m(eps) leaves the grid
  double C3 = 0.0;
  double tail_bound = 0.0;   // 2 C3 2^{-(1-theta) m} < eps / 2
  EpsNet b0_net;             // (eps/2)-net of {Tu_n(m)} in B0
  EpsNet net;                // centers Ta_k, audited in B0 + B1
  double max_rho = 0.0;      // max B0 distance of a point to its center
  std::size_t pair_checks = 0;
  std::size_t pair_violations = 0;
  bool covered = false;
};

struct LemmaReport {
  double C0 = 0.0;
  double C1 = 0.0;
  double C2 = 0.0;           // max over samples of the (theta, inf) grid functional
  double C3 = 0.0;           // max(C0, C1) C2 (1 + slack)
  double slack = 0.0;        // max decomposition slack
  std::vector<GqqRecord> per_m;
  std::size_t gqq_violations = 0;
  std::size_t decomposition_violations = 0;
  std::vector<LemmaEpsReport> per_eps;
  bool pass = false;
};

/// Smallest integer m with 2 C3 2^{-(1-theta) m} < eps / 2.
int choose_m(double C3, double theta, double eps);

LemmaReport lp_pipeline(const SampleSet& samples, const LipschitzOpSpec& T, const CoupleSpec& cA,
                        const CoupleSpec& cB, const LemmaOptions& opt);

// ---------------------------------------------------------------------------
// Persson defect in interpolation norm, and the net for T(M)

struct BachSetup {
  PerssonSelection P;
  LipschitzOpSpec defect;  // P T - T with constants eps and C1 (cK + 1)
  double constant = 0.0;   // eps^(1-theta) (C1 (cK + 1))^theta
};

/// Selects P_eps and audits the defect operator. Throws HypothesisFailure
/// naming the failed bound.
BachSetup prepare_bach(const LipschitzOpSpec& T, const CompactEnvelope& env,
                       const PerssonFamily& fam, double eps, const CoupleSpec& cA,
                       const CoupleSpec& cB, double theta, std::uint64_t seed = 1);

struct BachReport {
  double eps = 0.0;
  std::size_t N = 0;
  NormReport norm;  // interpolation estimate for the defect operator
};

BachReport verify_bach(const BachSetup& setup, const CoupleSpec& cA, const CoupleSpec& cB,
                       const InterpParams& ip, const CoupleElement& a, double tol = 1e-9,
                       unsigned parallel = 1);

struct MainNetOptions {
  double eps = 0.25;
  InterpParams ip;
  double tol = 1e-9;
  unsigned parallel = 1;
  std::uint64_t seed = 1;
};

struct MainNetReport {
  double eps = 0.0;
  double eps0 = 0.0;
  double sup_source = 0.0;   // sup over M of the source (theta, p) functional
  double sup_shifted = 0.0;  // same on the grid shifted by C1 (cK + 1) / eps0
  double defect_constant = 0.0;  // eps0^(1-theta) (C1 (cK + 1))^theta
  PerssonSelection P;
  double defect_max = 0.0;   // max_a of the measured ||(P T - T) a||
  double bound_max = 0.0;    // max_a of constant * shifted source functional
  std::size_t defect_failures = 0;  // defect >= eps / 2 or above its bound
  EpsNet net;                // (eps/2)-net of P T(M); its centers serve T(M)
  CoverageAudit audit;       // T(M) against the centers, open eps-balls
  bool pass = false;
};

/// Throws HypothesisFailure if some sample violates the envelope condition.
MainNetReport build_net_for_T(const SampleSet& M, const LipschitzOpSpec& T,
                              const CompactEnvelope& env, const CoupleSpec& cA,
                              const CoupleSpec& cB, const MainNetOptions& opt);

/// Direct greedy eps-net of T(M) in the (theta, p) functional of B, audited.
/// Used for operators without a valid envelope.
EpsNet direct_image_net(const SampleSet& M, const LipschitzOpSpec& T, const CoupleSpec& cB,
                        const InterpParams& ip, double eps, double tol = 1e-9,
                        unsigned parallel = 1);

}  // namespace interp
