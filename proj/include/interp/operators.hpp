#pragma once

// Concrete (possibly nonlinear) Lipschitz operators between two couples of
// the same dimension, with audited constants C0 (A0 -> B0 boundedness) and
// C1 (A1 -> B1 Lipschitz bound).

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interp/couple.hpp"

namespace interp {

enum class OpKind { envelope_compact, scalar_multiple, zero, identity_control, custom_composition };

std::string to_string(OpKind k);
OpKind parse_op_kind(const std::string& s);

enum class NonlinearityKind { identity, abs, soft_clamp, shrink };

std::string to_string(NonlinearityKind k);
NonlinearityKind parse_nonlinearity(const std::string& s);

/// A coordinatewise scalar map with sigma(0) = 0, |sigma(x) - sigma(y)| <= |x - y|
/// and |sigma(x)| <= |x|.
///   soft_clamp: c tanh(x / c)     shrink: sign(x) max(|x| - c, 0)
struct Nonlinearity {
  NonlinearityKind kind = NonlinearityKind::identity;
  double param = 1.0;

  double operator()(double x) const;
  friend bool operator==(const Nonlinearity&, const Nonlinearity&) = default;
};

/// One step of a composition: either a diagonal multiplier or a nonlinearity.
struct Stage {
  std::optional<std::vector<double>> diagonal;
  Nonlinearity sigma;  // used when diagonal is absent

  static Stage multiply(std::vector<double> d) { return {std::move(d), {}}; }
  static Stage apply(Nonlinearity s) { return {std::nullopt, s}; }
};

/// The shape of an operator, independent of the couples it acts between.
class OperatorDef {
 public:
  /// T a = kappa * sigma(a); kappa must be nonnegative and nonincreasing.
  static OperatorDef envelope_compact(std::vector<double> kappa, Nonlinearity sigma);
  static OperatorDef scalar_multiple(double lambda, std::size_t n);
  static OperatorDef zero(std::size_t n);
  /// The identity, carrying an envelope it does not actually respect.
  static OperatorDef identity_control(std::vector<double> fake_envelope);
  /// Stages applied left to right.
  static OperatorDef custom_composition(std::vector<Stage> stages, std::size_t n);

  OpKind kind() const noexcept { return kind_; }
  std::size_t dim() const noexcept { return dim_; }
  const std::vector<Stage>& stages() const noexcept { return stages_; }
  const std::optional<std::vector<double>>& envelope() const noexcept { return envelope_; }
  double lambda() const noexcept { return lambda_; }
  const Nonlinearity& sigma() const noexcept { return sigma_; }

  CoupleElement apply(const CoupleElement& a) const;

  /// m with |(Ta - Ta')_i| <= m_i |a_i - a'_i| for all a, a'. Every stage is
  /// coordinatewise, so m is the product of the absolute diagonal factors.
  std::vector<double> lipschitz_multiplier() const;

  /// Returns a copy with an envelope attached (used by custom compositions
  /// that are known to satisfy the envelope condition).
  OperatorDef with_envelope(std::vector<double> kappa) const;

 private:
  OperatorDef(OpKind k, std::size_t n) : kind_(k), dim_(n) {}

  OpKind kind_;
  std::size_t dim_;
  std::vector<Stage> stages_;
  std::optional<std::vector<double>> envelope_;
  double lambda_ = 1.0;
  Nonlinearity sigma_;
};

struct AuditResult {
  double c0_observed = 0.0;  // max ||Ta||_B0 / ||a||_A0
  double c1_observed = 0.0;  // max ||Ta - Ta'||_B1 / ||a - a'||_A1, net of rounding
  std::size_t samples = 0;
};

/// An operator bound to a source couple A and a target couple B, with valid
/// constants. C0 and C1 need not be minimal; the exact minimal bounds of the
/// diagonal majorant are kept alongside for reference.
struct LipschitzOpSpec {
  OperatorDef def;
  double C0 = 1.0;
  double C1 = 1.0;
  double C0_majorant = 0.0;  // exact norm of diag(m) : A0 -> B0
  double C1_majorant = 0.0;  // exact norm of diag(m) : A1 -> B1
  AuditResult audit;

  CoupleElement apply(const CoupleElement& a) const { return def.apply(a); }
  std::size_t dim() const noexcept { return def.dim(); }
};

/// Binds `def` to (cA, cB). Missing constants default to the majorant norms
/// (or 1 when those vanish). Supplied constants below the majorant norm are
/// rejected. Verifies T0 = 0 and audits both bounds on `samples` seeded
/// random pairs; throws HypothesisFailure if an observed ratio exceeds its
/// constant.
LipschitzOpSpec make_operator(OperatorDef def, const CoupleSpec& cA, const CoupleSpec& cB,
                              std::optional<double> C0 = std::nullopt,
                              std::optional<double> C1 = std::nullopt, std::uint64_t seed = 1,
                              std::size_t samples = 1000);

/// Empirical maxima of the two ratios over seeded random samples.
AuditResult audit_constants(const OperatorDef& def, const CoupleSpec& cA, const CoupleSpec& cB,
                            std::size_t samples, std::uint64_t seed);

/// |(Ta)_i| <= ||a||_{A0} kappa_i for every i.
bool check_envelope_condition(const OperatorDef& def, const CoupleElement& a, const SpaceSpec& a0,
                              const std::vector<double>& kappa);

/// A basis vector e_j on which the envelope condition fails, if any.
std::optional<std::size_t> find_envelope_witness(const OperatorDef& def, const SpaceSpec& a0,
                                                 const std::vector<double>& kappa);

/// Compatibility required by the compactness experiments: matching
/// dimensions, an embedding-certified source couple, and for operators with
/// an envelope an A0 norm dominating the sup norm. Throws InvalidInput.
void check_pairing(const OperatorDef& def, const CoupleSpec& cA, const CoupleSpec& cB);

}  // namespace interp
