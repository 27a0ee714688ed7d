#pragma once

// Finite-dimensional weighted l^p spaces and the couples built from them.

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace interp {

/// An l^p exponent in [1, inf]. Infinity is a distinguished state rather than
/// a large float, so (sum |x|^p)^(1/p) is never evaluated for it.
class Exponent {
 public:
  static Exponent finite(double p);
  static Exponent infinity() noexcept { return Exponent(); }

  bool is_infinite() const noexcept { return infinite_; }
  bool is_one() const noexcept { return !infinite_ && p_ == 1.0; }

  /// The finite value; throws InvalidInput when infinite.
  double value() const;

  /// Hoelder conjugate p' with 1/p + 1/p' = 1.
  Exponent conjugate() const noexcept;

  std::string to_string() const;

  friend bool operator==(const Exponent&, const Exponent&) = default;
  friend bool operator<=(const Exponent& a, const Exponent& b) noexcept {
    if (b.infinite_) return true;
    if (a.infinite_) return false;
    return a.p_ <= b.p_;
  }

 private:
  Exponent() = default;
  bool infinite_ = true;
  double p_ = 0.0;
};

/// A finite real vector regarded as an element of both spaces of a couple.
class CoupleElement {
 public:
  CoupleElement() = default;
  explicit CoupleElement(std::vector<double> values);
  CoupleElement(std::initializer_list<double> values);

  static CoupleElement zeros(std::size_t n) {
    return CoupleElement(std::vector<double>(n, 0.0));
  }

  std::size_t dim() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  std::span<const double> values() const noexcept { return values_; }
  const std::vector<double>& vector() const noexcept { return values_; }
  bool is_zero() const noexcept;

  CoupleElement& operator+=(const CoupleElement& other);
  CoupleElement& operator-=(const CoupleElement& other);
  CoupleElement& operator*=(double s) noexcept;

  friend CoupleElement operator+(CoupleElement a, const CoupleElement& b) { return a += b; }
  friend CoupleElement operator-(CoupleElement a, const CoupleElement& b) { return a -= b; }
  friend CoupleElement operator*(double s, CoupleElement a) { return a *= s; }
  friend bool operator==(const CoupleElement&, const CoupleElement&) = default;

 private:
  std::vector<double> values_;
};

/// The weighted norm (sum_i (w_i |x_i|)^p)^(1/p), or max_i w_i |x_i| for p = inf.
class SpaceSpec {
 public:
  SpaceSpec(Exponent p, std::vector<double> weights);
  static SpaceSpec unit(Exponent p, std::size_t n);

  const Exponent& exponent() const noexcept { return p_; }
  std::span<const double> weights() const noexcept { return weights_; }
  std::size_t dim() const noexcept { return weights_.size(); }
  bool has_unit_weights() const noexcept;

  /// True when ||x|| >= ||x||_inf for every x (every weight is >= 1).
  bool dominates_sup_norm() const noexcept;

  friend bool operator==(const SpaceSpec&, const SpaceSpec&) = default;

 private:
  Exponent p_;
  std::vector<double> weights_;
};

/// Two weighted l^p norms on a common index set.
class CoupleSpec {
 public:
  CoupleSpec(SpaceSpec space0, SpaceSpec space1);

  /// Builds a couple whose first space embeds with norm <= 1 into the second;
  /// throws InvalidInput otherwise.
  static CoupleSpec source(SpaceSpec space0, SpaceSpec space1);

  const SpaceSpec& space0() const noexcept { return space0_; }
  const SpaceSpec& space1() const noexcept { return space1_; }
  const SpaceSpec& space(int j) const noexcept { return j == 0 ? space0_ : space1_; }
  std::size_t dim() const noexcept { return space0_.dim(); }

  /// ||x||_{X1} <= ||x||_{X0} for all x. Certified when p0 <= p1 and
  /// ||e_i||_{X1} <= ||e_i||_{X0} on every basis vector: the weight comparison
  /// bounds ||x||_{X1} by the l^{p1} norm with X0's weights, and l^p norms
  /// on counting measure decrease in p.
  bool embedding_certified() const noexcept { return embedding_certified_; }

  bool degenerate() const noexcept { return space0_ == space1_; }
  bool is_unit_l1_linf() const noexcept;

  friend bool operator==(const CoupleSpec& a, const CoupleSpec& b) {
    return a.space0_ == b.space0_ && a.space1_ == b.space1_;
  }

 private:
  SpaceSpec space0_;
  SpaceSpec space1_;
  bool embedding_certified_ = false;
};

double norm(std::span<const double> x, const SpaceSpec& s);
double norm(const CoupleElement& x, const SpaceSpec& s);

/// Norm of the dual space: ||(y_i / w_i)||_{p'}.
double dual_norm(std::span<const double> y, const SpaceSpec& s);

/// max(||x||_{X0}, ||x||_{X1}).
double intersection_norm(const CoupleElement& x, const CoupleSpec& c);

/// K(1, x; X0, X1), the norm of X0 + X1. Defined alongside compute_k.
double sum_norm(const CoupleElement& x, const CoupleSpec& c, double tol = 1e-9);

/// Exact norm of the diagonal map x -> d * x from `from` into `to`.
/// For p_from <= p_to this is max_i |e_i|, otherwise ||e||_r with
/// 1/r = 1/p_to - 1/p_from, where e_i = d_i * w_to_i / w_from_i.
double diagonal_operator_norm(std::span<const double> d, const SpaceSpec& from,
                              const SpaceSpec& to);

void require_same_dim(std::size_t a, std::size_t b, const char* what);

}  // namespace interp
