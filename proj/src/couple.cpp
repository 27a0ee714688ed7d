#include "interp/couple.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "interp/error.hpp"
#include "interp/summation.hpp"

namespace interp {

Exponent Exponent::finite(double p) {
  if (!std::isfinite(p) || !(p >= 1.0)) {
    throw InvalidInput("exponent must be a finite number >= 1 (use Exponent::infinity())");
  }
  Exponent e;
  e.infinite_ = false;
  e.p_ = p;
  return e;
}

double Exponent::value() const {
  if (infinite_) throw InvalidInput("Exponent::value() called on p = inf");
  return p_;
}

Exponent Exponent::conjugate() const noexcept {
  if (infinite_) return finite(1.0);
  if (p_ == 1.0) return infinity();
  return finite(p_ / (p_ - 1.0));
}

std::string Exponent::to_string() const {
  if (infinite_) return "inf";
  std::ostringstream os;
  os << p_;
  return os.str();
}

CoupleElement::CoupleElement(std::vector<double> values) : values_(std::move(values)) {
  for (double v : values_) {
    if (!std::isfinite(v)) throw InvalidInput("CoupleElement entries must be finite");
  }
}

CoupleElement::CoupleElement(std::initializer_list<double> values)
    : CoupleElement(std::vector<double>(values)) {}

bool CoupleElement::is_zero() const noexcept {
  return std::all_of(values_.begin(), values_.end(), [](double v) { return v == 0.0; });
}

CoupleElement& CoupleElement::operator+=(const CoupleElement& other) {
  require_same_dim(dim(), other.dim(), "CoupleElement +");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

CoupleElement& CoupleElement::operator-=(const CoupleElement& other) {
  require_same_dim(dim(), other.dim(), "CoupleElement -");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

CoupleElement& CoupleElement::operator*=(double s) noexcept {
  for (double& v : values_) v *= s;
  return *this;
}

SpaceSpec::SpaceSpec(Exponent p, std::vector<double> weights)
    : p_(p), weights_(std::move(weights)) {
  for (double w : weights_) {
    if (!std::isfinite(w) || !(w > 0.0)) throw InvalidInput("weights must be finite and > 0");
  }
}

SpaceSpec SpaceSpec::unit(Exponent p, std::size_t n) {
  return SpaceSpec(p, std::vector<double>(n, 1.0));
}

bool SpaceSpec::has_unit_weights() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w == 1.0; });
}

bool SpaceSpec::dominates_sup_norm() const noexcept {
  return std::all_of(weights_.begin(), weights_.end(), [](double w) { return w >= 1.0; });
}

CoupleSpec::CoupleSpec(SpaceSpec space0, SpaceSpec space1)
    : space0_(std::move(space0)), space1_(std::move(space1)) {
  require_same_dim(space0_.dim(), space1_.dim(), "CoupleSpec");
  bool basis_ok = true;
  for (std::size_t i = 0; i < dim(); ++i) {
    // ||e_i||_{X_j} is just the weight.
    if (space1_.weights()[i] > space0_.weights()[i]) basis_ok = false;
  }
  embedding_certified_ = basis_ok && space0_.exponent() <= space1_.exponent();
}

CoupleSpec CoupleSpec::source(SpaceSpec space0, SpaceSpec space1) {
  CoupleSpec c(std::move(space0), std::move(space1));
  if (!c.embedding_certified()) {
    throw InvalidInput(
        "source couple requires p0 <= p1 and weights1 <= weights0 (||x||_X1 <= ||x||_X0)");
  }
  return c;
}

bool CoupleSpec::is_unit_l1_linf() const noexcept {
  return space0_.exponent().is_one() && space1_.exponent().is_infinite() &&
         space0_.has_unit_weights() && space1_.has_unit_weights();
}

void require_same_dim(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": dimension mismatch (" << a << " vs " << b << ")";
    throw InvalidInput(os.str());
  }
}

namespace {

// ||(scale_i * |x_i|)||_p with unit weights on the scaled values.
template <class Magnitude>
double lp_of(std::size_t n, const Exponent& p, Magnitude mag) {
  double top = 0.0;
  for (std::size_t i = 0; i < n; ++i) top = std::max(top, mag(i));
  if (p.is_infinite() || top == 0.0) return top;
  CompensatedSum acc;
  if (p.is_one()) {
    for (std::size_t i = 0; i < n; ++i) acc.add(mag(i));
    return acc.value();
  }
  const double e = p.value();
  for (std::size_t i = 0; i < n; ++i) acc.add(std::pow(mag(i) / top, e));
  return top * std::pow(acc.value(), 1.0 / e);
}

}  // namespace

double norm(std::span<const double> x, const SpaceSpec& s) {
  require_same_dim(x.size(), s.dim(), "norm");
  const auto w = s.weights();
  return lp_of(x.size(), s.exponent(), [&](std::size_t i) { return w[i] * std::abs(x[i]); });
}

double norm(const CoupleElement& x, const SpaceSpec& s) { return norm(x.values(), s); }

double dual_norm(std::span<const double> y, const SpaceSpec& s) {
  require_same_dim(y.size(), s.dim(), "dual_norm");
  const auto w = s.weights();
  return lp_of(y.size(), s.exponent().conjugate(),
               [&](std::size_t i) { return std::abs(y[i]) / w[i]; });
}

double intersection_norm(const CoupleElement& x, const CoupleSpec& c) {
  return std::max(norm(x, c.space0()), norm(x, c.space1()));
}

double diagonal_operator_norm(std::span<const double> d, const SpaceSpec& from,
                              const SpaceSpec& to) {
  require_same_dim(d.size(), from.dim(), "diagonal_operator_norm");
  require_same_dim(d.size(), to.dim(), "diagonal_operator_norm");
  const auto wf = from.weights();
  const auto wt = to.weights();
  auto e = [&](std::size_t i) { return std::abs(d[i]) * wt[i] / wf[i]; };
  if (from.exponent() <= to.exponent()) {
    return lp_of(d.size(), Exponent::infinity(), e);
  }
  // p_from > p_to, so p_to is finite.
  const double inv_from = from.exponent().is_infinite() ? 0.0 : 1.0 / from.exponent().value();
  const double inv_r = 1.0 / to.exponent().value() - inv_from;
  return lp_of(d.size(), Exponent::finite(1.0 / inv_r), e);
}

}  // namespace interp
