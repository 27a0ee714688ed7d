#include "interp/operators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "interp/error.hpp"

namespace interp {

std::string to_string(OpKind k) {
  switch (k) {
    case OpKind::envelope_compact: return "envelope_compact";
    case OpKind::scalar_multiple: return "scalar_multiple";
    case OpKind::zero: return "zero";
    case OpKind::identity_control: return "identity_control";
    case OpKind::custom_composition: return "custom_composition";
  }
  return "unknown";
}

OpKind parse_op_kind(const std::string& s) {
  for (OpKind k : {OpKind::envelope_compact, OpKind::scalar_multiple, OpKind::zero,
                   OpKind::identity_control, OpKind::custom_composition}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidInput("unknown operator kind '" + s + "'");
}

std::string to_string(NonlinearityKind k) {
  switch (k) {
    case NonlinearityKind::identity: return "identity";
    case NonlinearityKind::abs: return "abs";
    case NonlinearityKind::soft_clamp: return "soft_clamp";
    case NonlinearityKind::shrink: return "shrink";
  }
  return "unknown";
}

NonlinearityKind parse_nonlinearity(const std::string& s) {
  for (NonlinearityKind k : {NonlinearityKind::identity, NonlinearityKind::abs,
                             NonlinearityKind::soft_clamp, NonlinearityKind::shrink}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidInput("unknown nonlinearity '" + s + "'");
}

double Nonlinearity::operator()(double x) const {
  switch (kind) {
    case NonlinearityKind::identity: return x;
    case NonlinearityKind::abs: return std::abs(x);
    case NonlinearityKind::soft_clamp: {
      // tanh(y) <= y holds exactly but not always after rounding; clip so the
      // defining bound |sigma(x)| <= |x| is exact in floating point too.
      const double v = param * std::tanh(x / param);
      return std::copysign(std::min(std::abs(v), std::abs(x)), x);
    }
    case NonlinearityKind::shrink: return std::copysign(std::max(std::abs(x) - param, 0.0), x);
  }
  return x;
}

namespace {

constexpr double kUnitRoundoff = std::numeric_limits<double>::epsilon() / 2;

void check_sigma(const Nonlinearity& s) {
  const bool needs_param =
      s.kind == NonlinearityKind::soft_clamp || s.kind == NonlinearityKind::shrink;
  if (needs_param && !(s.param > 0.0 && std::isfinite(s.param))) {
    throw InvalidInput("nonlinearity " + to_string(s.kind) + " needs a finite parameter > 0");
  }
}

void check_envelope(const std::vector<double>& kappa, const char* what) {
  for (std::size_t i = 0; i < kappa.size(); ++i) {
    if (!(kappa[i] >= 0.0) || !std::isfinite(kappa[i])) {
      throw InvalidInput(std::string(what) + ": envelope entries must be finite and >= 0");
    }
    if (i > 0 && kappa[i] > kappa[i - 1]) {
      throw InvalidInput(std::string(what) + ": envelope must be nonincreasing");
    }
  }
}

}  // namespace

OperatorDef OperatorDef::envelope_compact(std::vector<double> kappa, Nonlinearity sigma) {
  check_envelope(kappa, "envelope_compact");
  check_sigma(sigma);
  OperatorDef op(OpKind::envelope_compact, kappa.size());
  op.sigma_ = sigma;
  op.stages_ = {Stage::apply(sigma), Stage::multiply(kappa)};
  op.envelope_ = std::move(kappa);
  return op;
}

OperatorDef OperatorDef::scalar_multiple(double lambda, std::size_t n) {
  if (!std::isfinite(lambda)) throw InvalidInput("scalar_multiple: lambda must be finite");
  OperatorDef op(OpKind::scalar_multiple, n);
  op.lambda_ = lambda;
  op.stages_ = {Stage::multiply(std::vector<double>(n, lambda))};
  return op;
}

OperatorDef OperatorDef::zero(std::size_t n) {
  OperatorDef op(OpKind::zero, n);
  op.lambda_ = 0.0;
  op.stages_ = {Stage::multiply(std::vector<double>(n, 0.0))};
  return op;
}

OperatorDef OperatorDef::identity_control(std::vector<double> fake_envelope) {
  check_envelope(fake_envelope, "identity_control");
  OperatorDef op(OpKind::identity_control, fake_envelope.size());
  op.envelope_ = std::move(fake_envelope);
  return op;
}

OperatorDef OperatorDef::custom_composition(std::vector<Stage> stages, std::size_t n) {
  for (const auto& s : stages) {
    if (s.diagonal) {
      require_same_dim(s.diagonal->size(), n, "custom_composition stage");
      for (double d : *s.diagonal) {
        if (!std::isfinite(d)) throw InvalidInput("custom_composition: non-finite multiplier");
      }
    } else {
      check_sigma(s.sigma);
    }
  }
  OperatorDef op(OpKind::custom_composition, n);
  op.stages_ = std::move(stages);
  return op;
}

OperatorDef OperatorDef::with_envelope(std::vector<double> kappa) const {
  check_envelope(kappa, "with_envelope");
  require_same_dim(kappa.size(), dim_, "with_envelope");
  OperatorDef op = *this;
  op.envelope_ = std::move(kappa);
  return op;
}

CoupleElement OperatorDef::apply(const CoupleElement& a) const {
  require_same_dim(a.dim(), dim_, "operator apply");
  std::vector<double> x = a.vector();
  for (const auto& s : stages_) {
    if (s.diagonal) {
      for (std::size_t i = 0; i < x.size(); ++i) x[i] *= (*s.diagonal)[i];
    } else {
      for (double& v : x) v = s.sigma(v);
    }
  }
  // -0.0 from a zero multiplier would be harmless, but keep outputs canonical.
  for (double& v : x) v += 0.0;
  return CoupleElement(std::move(x));
}

std::vector<double> OperatorDef::lipschitz_multiplier() const {
  std::vector<double> m(dim_, 1.0);
  for (const auto& s : stages_) {
    if (!s.diagonal) continue;
    for (std::size_t i = 0; i < dim_; ++i) m[i] *= std::abs((*s.diagonal)[i]);
  }
  return m;
}

AuditResult audit_constants(const OperatorDef& def, const CoupleSpec& cA, const CoupleSpec& cB,
                            std::size_t samples, std::uint64_t seed) {
  const std::size_t n = def.dim();
  require_same_dim(cA.dim(), n, "audit_constants (A)");
  require_same_dim(cB.dim(), n, "audit_constants (B)");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> log_scale(-3.0, 3.0);
  std::uniform_int_distribution<int> mode(0, 3);
  std::uniform_int_distribution<std::size_t> coord(0, n == 0 ? 0 : n - 1);

  auto gaussian = [&](double scale) {
    std::vector<double> v(n);
    for (auto& x : v) x = scale * g(rng);
    return CoupleElement(std::move(v));
  };

  AuditResult out;
  out.samples = samples;
  if (n == 0) return out;
  for (std::size_t k = 0; k < samples; ++k) {
    CoupleElement a = gaussian(std::pow(10.0, log_scale(rng)));
    CoupleElement b;
    switch (mode(rng)) {
      case 0: b = a + gaussian(1e-3 * std::pow(10.0, log_scale(rng))); break;  // nearby
      case 1: b = gaussian(std::pow(10.0, log_scale(rng))); break;             // independent
      case 2: b = CoupleElement::zeros(n); break;
      default: {  // a single coordinate moved
        std::vector<double> v = a.vector();
        v[coord(rng)] += std::pow(10.0, log_scale(rng)) * g(rng);
        b = CoupleElement(std::move(v));
      }
    }
    const auto ta = def.apply(a);
    const double na = norm(a, cA.space0());
    if (na > 0.0) out.c0_observed = std::max(out.c0_observed, norm(ta, cB.space0()) / na);
    const double dab = norm(a - b, cA.space1());
    if (dab > 0.0) {
      // For nearby pairs Ta - Tb cancels, and the rounding left in each Ta_i
      // and Tb_i would show up as a spurious excess over the true constant.
      // Every stage rounds once per coordinate, so removing
      // (stages + 2) u (|Ta| + |Tb|) leaves a ratio that is never above the
      // exact one.
      const auto tb = def.apply(b);
      std::vector<double> mag(n);
      for (std::size_t i = 0; i < n; ++i) mag[i] = std::abs(ta[i]) + std::abs(tb[i]);
      const double allowance =
          static_cast<double>(def.stages().size() + 2) * kUnitRoundoff * norm(mag, cB.space1());
      const double diff = std::max(0.0, norm(ta - tb, cB.space1()) - allowance);
      out.c1_observed = std::max(out.c1_observed, diff / dab);
    }
  }
  return out;
}

LipschitzOpSpec make_operator(OperatorDef def, const CoupleSpec& cA, const CoupleSpec& cB,
                              std::optional<double> C0, std::optional<double> C1,
                              std::uint64_t seed, std::size_t samples) {
  require_same_dim(cA.dim(), def.dim(), "make_operator (A)");
  require_same_dim(cB.dim(), def.dim(), "make_operator (B)");
  if (!def.apply(CoupleElement::zeros(def.dim())).is_zero()) {
    throw HypothesisFailure("T0 = 0", "operator does not map 0 to 0");
  }
  LipschitzOpSpec spec{std::move(def), 1.0, 1.0, 0.0, 0.0, {}};
  const auto m = spec.def.lipschitz_multiplier();
  spec.C0_majorant = diagonal_operator_norm(m, cA.space0(), cB.space0());
  spec.C1_majorant = diagonal_operator_norm(m, cA.space1(), cB.space1());

  auto pick = [](std::optional<double> given, double majorant, const char* name) {
    if (!given) return majorant > 0.0 ? majorant : 1.0;
    if (!(*given > 0.0) || !std::isfinite(*given)) {
      throw InvalidInput(std::string(name) + " must be finite and > 0");
    }
    if (*given < majorant * (1.0 - 1e-12)) {
      std::ostringstream os;
      os.precision(17);
      os << name << " = " << *given << " is below the exact bound " << majorant;
      throw InvalidInput(os.str());
    }
    return *given;
  };
  spec.C0 = pick(C0, spec.C0_majorant, "C0");
  spec.C1 = pick(C1, spec.C1_majorant, "C1");

  spec.audit = audit_constants(spec.def, cA, cB, samples, seed);
  constexpr double kRound = 1e-12;
  if (spec.audit.c0_observed > spec.C0 * (1.0 + kRound)) {
    std::ostringstream os;
    os.precision(17);
    os << "observed ||Ta||_B0 / ||a||_A0 = " << spec.audit.c0_observed << " > C0 = " << spec.C0;
    throw HypothesisFailure("boundedness A0 -> B0", os.str());
  }
  if (spec.audit.c1_observed > spec.C1 * (1.0 + kRound)) {
    std::ostringstream os;
    os.precision(17);
    os << "observed Lipschitz ratio " << spec.audit.c1_observed << " > C1 = " << spec.C1;
    throw HypothesisFailure("Lipschitz A1 -> B1", os.str());
  }
  return spec;
}

bool check_envelope_condition(const OperatorDef& def, const CoupleElement& a, const SpaceSpec& a0,
                              const std::vector<double>& kappa) {
  require_same_dim(kappa.size(), a.dim(), "check_envelope_condition");
  const auto ta = def.apply(a);
  const double na = norm(a, a0);
  for (std::size_t i = 0; i < a.dim(); ++i) {
    if (std::abs(ta[i]) > na * kappa[i]) return false;
  }
  return true;
}

std::optional<std::size_t> find_envelope_witness(const OperatorDef& def, const SpaceSpec& a0,
                                                 const std::vector<double>& kappa) {
  for (std::size_t j = 0; j < def.dim(); ++j) {
    std::vector<double> e(def.dim(), 0.0);
    e[j] = 1.0;
    if (!check_envelope_condition(def, CoupleElement(std::move(e)), a0, kappa)) return j;
  }
  return std::nullopt;
}

void check_pairing(const OperatorDef& def, const CoupleSpec& cA, const CoupleSpec& cB) {
  require_same_dim(cA.dim(), def.dim(), "pairing (A)");
  require_same_dim(cB.dim(), def.dim(), "pairing (B)");
  if (!cA.embedding_certified()) {
    throw InvalidInput("pairing: the source couple must satisfy ||.||_A1 <= ||.||_A0");
  }
  if (def.envelope() && !cA.space0().dominates_sup_norm()) {
    throw InvalidInput("pairing: A0 must dominate the sup norm (all weights >= 1)");
  }
}

}  // namespace interp
