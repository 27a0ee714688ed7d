#include "k_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "interp/summation.hpp"

namespace interp::detail {
namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kInf = std::numeric_limits<double>::infinity();

struct Sample {
  double x;
  double f;
};

// Rounding allowance for one objective evaluation, relative to its value.
double rounding_allowance(std::size_t n) { return 8.0 * static_cast<double>(n + 4) * kEps; }

class Objective {
 public:
  Objective(double t, std::vector<double> u, const SpaceSpec& x0, const SpaceSpec& x1)
      : t_(t), u_(std::move(u)), x0_(x0), x1_(x1), part0_(u_.size()), part1_(u_.size()) {}

  double operator()(std::span<const double> share) const {
    split(share);
    return norm(part0_, x0_) + t_ * norm(part1_, x1_);
  }

  double norm0(std::span<const double> share) const {
    split(share);
    return norm(part0_, x0_);
  }

  double norm1(std::span<const double> share) const {
    split(share);
    return norm(part1_, x1_);
  }

  std::span<const double> part0() const { return part0_; }
  std::span<const double> part1() const { return part1_; }

  double t() const { return t_; }
  const std::vector<double>& u() const { return u_; }
  const SpaceSpec& x0() const { return x0_; }
  const SpaceSpec& x1() const { return x1_; }
  std::size_t n() const { return u_.size(); }

  void split(std::span<const double> share) const {
    for (std::size_t i = 0; i < u_.size(); ++i) {
      part0_[i] = share[i] * u_[i];
      part1_[i] = u_[i] - part0_[i];
    }
  }

 private:
  double t_;
  std::vector<double> u_;
  const SpaceSpec& x0_;
  const SpaceSpec& x1_;
  mutable std::vector<double> part0_;
  mutable std::vector<double> part1_;
};

// <y, u> / max(||y||_X0*, ||y||_X1* / t) <= K(t, u) for every y. Hoelder on
// each piece of any decomposition gives the bound.
double dual_lower_bound(const Objective& obj, std::span<const double> y) {
  CompensatedSum num;
  for (std::size_t i = 0; i < obj.n(); ++i) num.add(y[i] * obj.u()[i]);
  const double den = std::max(dual_norm(y, obj.x0()), dual_norm(y, obj.x1()) / obj.t());
  if (!(den > 0.0) || !(num.value() > 0.0)) return 0.0;
  return num.value() / den * (1.0 - rounding_allowance(obj.n()));
}

// Lower bound for min of a convex function known only through noisy samples
// (|f_true - f| <= noise * |f|). Each gap between samples is bounded below
// by chords of neighbouring samples extended across it. Chords are taken
// over a base at least as wide as the gap so that noise is not amplified.
double convex_envelope_lower_bound(std::vector<Sample> pts, double noise) {
  std::sort(pts.begin(), pts.end(), [](const Sample& a, const Sample& b) { return a.x < b.x; });
  std::vector<Sample> xs;
  for (const auto& s : pts) {
    if (!xs.empty() && xs.back().x == s.x) {
      xs.back().f = std::min(xs.back().f, s.f);
    } else {
      xs.push_back(s);
    }
  }
  const std::size_t k = xs.size();
  if (k < 3) return -kInf;
  auto lo = [&](std::size_t i) { return xs[i].f - noise * std::abs(xs[i].f) - 1e-300; };
  auto hi = [&](std::size_t i) { return xs[i].f + noise * std::abs(xs[i].f) + 1e-300; };

  double bound = kInf;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    const double xa = xs[j].x;
    const double xb = xs[j + 1].x;
    const double gap = xb - xa;

    bool has_left = j >= 1;
    double left_slope = 0.0;
    if (has_left) {
      std::size_t i = j - 1;
      while (i > 0 && xa - xs[i].x < gap) --i;
      left_slope = (lo(j) - hi(i)) / (xa - xs[i].x);
    }
    bool has_right = j + 2 < k;
    double right_slope = 0.0;
    if (has_right) {
      std::size_t i = j + 2;
      while (i + 1 < k && xs[i].x - xb < gap) ++i;
      right_slope = (hi(i) - lo(j + 1)) / (xs[i].x - xb);
    }
    auto left = [&](double x) { return lo(j) + left_slope * (x - xa); };
    auto right = [&](double x) { return lo(j + 1) + right_slope * (x - xb); };
    auto env = [&](double x) {
      if (has_left && has_right) return std::max(left(x), right(x));
      return has_left ? left(x) : right(x);
    };
    double m = std::min(env(xa), env(xb));
    if (has_left && has_right && left_slope != right_slope) {
      const double xc = (lo(j + 1) - right_slope * xb - lo(j) + left_slope * xa) /
                        (left_slope - right_slope);
      if (xc > xa && xc < xb) m = std::min(m, left(xc));
    }
    bound = std::min(bound, m);
  }
  return bound;
}

// Scan then golden-section refinement of a unimodal function on [lo, hi].
// Every evaluation is recorded in `samples`.
template <class Phi>
Sample minimize_unimodal(Phi&& phi, double lo, double hi, std::vector<double> extra,
                         std::size_t scan, std::vector<Sample>& samples, Sample* bracket_lo,
                         Sample* bracket_hi) {
  std::vector<double> xs = std::move(extra);
  xs.push_back(lo);
  xs.push_back(hi);
  for (std::size_t i = 1; i < scan; ++i) {
    xs.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(scan));
  }
  for (double& x : xs) x = std::clamp(x, lo, hi);
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());

  std::vector<Sample> grid;
  grid.reserve(xs.size());
  for (double x : xs) grid.push_back({x, phi(x)});
  samples.insert(samples.end(), grid.begin(), grid.end());

  std::size_t best = 0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (grid[i].f < grid[best].f) best = i;
  }
  Sample a = grid[best > 0 ? best - 1 : best];
  Sample b = grid[best];
  Sample c = grid[best + 1 < grid.size() ? best + 1 : best];
  if (bracket_lo) *bracket_lo = a;
  if (bracket_hi) *bracket_hi = c;

  constexpr double kGolden = 0.3819660112501051;
  for (int iter = 0; iter < 400; ++iter) {
    const double width = c.x - a.x;
    if (width <= 4.0 * kEps * std::max(std::abs(b.x), 1e-300) || width <= 0.0) break;
    const bool right_larger = (c.x - b.x) >= (b.x - a.x);
    const double x = right_larger ? b.x + kGolden * (c.x - b.x) : b.x - kGolden * (b.x - a.x);
    if (x == b.x || x <= a.x || x >= c.x) break;
    const Sample s{x, phi(x)};
    samples.push_back(s);
    if (s.f < b.f) {
      if (right_larger) {
        a = b;
      } else {
        c = b;
      }
      b = s;
    } else if (right_larger) {
      c = s;
    } else {
      a = s;
    }
  }
  return b;
}

// Subgradient of ||.|| (weighted l^p, finite p) at z >= 0, when single valued.
bool lp_gradient(std::span<const double> z, const SpaceSpec& s, double scale,
                 std::vector<double>& y) {
  const double p = s.exponent().value();
  const double nz = norm(z, s);
  if (!(nz > 0.0)) return false;
  const auto w = s.weights();
  y.assign(z.size(), 0.0);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (p == 1.0) {
      y[i] = z[i] > 0.0 ? scale * w[i] : -1.0;  // -1 marks a free coordinate
    } else {
      y[i] = scale * w[i] * std::pow(w[i] * z[i] / nz, p - 1.0);
    }
  }
  return true;
}

// Roles of the two sides when one of them is weighted l^inf. The level side
// carries min(u_i, L / w_i); the other side carries the rest r_i(L). The
// coefficients are 1 for X0 and t for X1, which are also the radii of the
// dual constraints.
struct LevelSetup {
  const SpaceSpec* level;
  const SpaceSpec* other;
  double c_level;
  double c_other;
  bool level_on_1;
};

LevelSetup level_setup(const Objective& obj) {
  const bool on1 = obj.x1().exponent().is_infinite();
  if (on1) return {&obj.x1(), &obj.x0(), obj.t(), 1.0, true};
  return {&obj.x0(), &obj.x1(), 1.0, obj.t(), false};
}

void level_share(const Objective& obj, const LevelSetup& ls, double level,
                 std::vector<double>& share) {
  const auto w = ls.level->weights();
  share.assign(obj.n(), 0.0);
  for (std::size_t i = 0; i < obj.n(); ++i) {
    const double v = w[i] * obj.u()[i];
    if (v == 0.0) continue;
    share[i] = ls.level_on_1 ? std::max(0.0, 1.0 - level / v) : std::min(1.0, level / v);
  }
}

// Both sides l^inf: the value function of the level is piecewise linear and
// convex; the certificate is the convex lower envelope of the samples.
ReducedSolution solve_level_envelope(const Objective& obj, const LevelSetup& ls) {
  const std::size_t n = obj.n();
  const auto w = ls.level->weights();
  double top = 0.0;
  std::vector<double> breaks;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = w[i] * obj.u()[i];
    top = std::max(top, v);
    if (v > 0.0) breaks.push_back(v);
  }
  if (breaks.size() > 512) breaks.clear();
  std::vector<double> share;
  auto phi = [&](double level) {
    level_share(obj, ls, level, share);
    return ls.level_on_1 ? obj.norm0(share) + obj.t() * level : level + obj.t() * obj.norm1(share);
  };
  std::vector<Sample> samples;
  const Sample best = minimize_unimodal(phi, 0.0, top, breaks, 64, samples, nullptr, nullptr);
  ReducedSolution out;
  level_share(obj, ls, best.x, out.share);
  out.lower_bound = convex_envelope_lower_bound(std::move(samples), rounding_allowance(n));
  return out;
}

// Weighted l^1 against weighted l^inf. The dual problem
//   max <y, u>  s.t.  y_i <= c_other w_other_i,  sum y_i / w_level_i <= c_level
// is a fractional knapsack, solved greedily by decreasing v_i = w_level_i u_i.
// The item where the budget runs out fixes the optimal level.
ReducedSolution solve_level_knapsack(const Objective& obj, const LevelSetup& ls) {
  const std::size_t n = obj.n();
  const auto wl = ls.level->weights();
  const auto wo = ls.other->weights();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return wl[a] * obj.u()[a] > wl[b] * obj.u()[b];
  });
  std::vector<double> y(n, 0.0);
  double budget = ls.c_level;
  double level = 0.0;
  for (std::size_t i : order) {
    if (obj.u()[i] == 0.0) break;
    const double cost = ls.c_other * wo[i] / wl[i];
    if (cost <= budget) {
      y[i] = ls.c_other * wo[i];
      budget -= cost;
    } else {
      y[i] = budget * wl[i];
      level = wl[i] * obj.u()[i];
      break;
    }
  }
  ReducedSolution out;
  level_share(obj, ls, level, out.share);
  out.lower_bound = dual_lower_bound(obj, y);
  return out;
}

// Weighted l^p (1 < p < inf) against weighted l^inf. The value function
// phi(L) = c_level L + c_other ||r(L)|| is convex with
//   phi'(L) = c_level - c_other sum_{r_i > 0} g_i / w_level_i,
// g the gradient of the l^p norm at r(L). Bisection on the sign of phi'
// locates the optimal level; the scaled gradient there is a dual certificate
// that is tight to first order in the error of the level.
ReducedSolution solve_level_smooth(const Objective& obj, const LevelSetup& ls) {
  const std::size_t n = obj.n();
  const auto wl = ls.level->weights();
  double top = 0.0;
  std::size_t arg_top = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double v = wl[i] * obj.u()[i];
    if (v > top) {
      top = v;
      arg_top = i;
    }
  }
  std::vector<double> r(n);
  std::vector<double> g;
  auto rest = [&](double level) {
    for (std::size_t i = 0; i < n; ++i) {
      r[i] = std::max(0.0, obj.u()[i] - level / wl[i]);
    }
  };
  // Returns false when the rest vanishes (phi' is then c_level > 0).
  auto gradient_at = [&](double level) {
    rest(level);
    return lp_gradient(r, *ls.other, ls.c_other, g);
  };
  auto slope = [&](double level) {
    if (!gradient_at(level)) return ls.c_level;
    CompensatedSum d;
    for (std::size_t i = 0; i < n; ++i) {
      if (r[i] > 0.0) d.add(g[i] / wl[i]);
    }
    return ls.c_level - d.value();
  };
  auto phi = [&](double level) {
    rest(level);
    return ls.c_level * level + ls.c_other * norm(r, *ls.other);
  };

  double lo = 0.0;
  double hi = top;
  if (slope(0.0) < 0.0) {
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (slope(mid) < 0.0 ? lo : hi) = mid;
    }
  } else {
    hi = 0.0;
  }

  ReducedSolution out;
  double best_f = kInf;
  double best_level = 0.0;
  for (double level : {lo, hi, top}) {
    const double f = phi(level);
    if (f < best_f) {
      best_f = f;
      best_level = level;
    }
  }
  level_share(obj, ls, best_level, out.share);

  std::vector<std::vector<double>> ys;
  for (double level : {lo, hi}) {
    if (gradient_at(level)) ys.push_back(g);
  }
  // Everything on the level side: y concentrated where the level is attained.
  std::vector<double> spike(n, 0.0);
  spike[arg_top] = ls.c_level * wl[arg_top];
  ys.push_back(spike);
  for (const auto& y : ys) out.lower_bound = std::max(out.lower_bound, dual_lower_bound(obj, y));
  if (ys.size() == 3) {
    std::vector<double> mix(n);
    for (std::size_t i = 0; i < n; ++i) mix[i] = 0.5 * (ys[0][i] + ys[1][i]);
    out.lower_bound = std::max(out.lower_bound, dual_lower_bound(obj, mix));
  }
  return out;
}

ReducedSolution solve_by_level(const Objective& obj) {
  const LevelSetup ls = level_setup(obj);
  const Exponent& other = ls.other->exponent();
  if (other.is_infinite()) return solve_level_envelope(obj, ls);
  if (other.is_one()) return solve_level_knapsack(obj, ls);
  return solve_level_smooth(obj, ls);
}

// Weighted l^1 against weighted l^p with 1 < p < inf. On the smooth side the
// optimal piece is min(u_i, N kappa_i), where N is its own norm and kappa
// makes the scaled gradient equal the l^1 weight. N solves
//   F(N) = || min(u / N, kappa) || = 1,
// F decreasing; if ||kappa|| <= 1 the smooth piece vanishes. Computed in logs
// because kappa carries the exponent 1 / (p - 1).
ReducedSolution solve_l1_smooth(const Objective& obj) {
  const std::size_t n = obj.n();
  const bool smooth_is_1 = obj.x0().exponent().is_one();
  const SpaceSpec& smooth = smooth_is_1 ? obj.x1() : obj.x0();
  const SpaceSpec& flat = smooth_is_1 ? obj.x0() : obj.x1();
  const double c_smooth = smooth_is_1 ? obj.t() : 1.0;
  const double c_flat = smooth_is_1 ? 1.0 : obj.t();
  const double p = smooth.exponent().value();
  const auto ws = smooth.weights();
  const auto wf = flat.weights();

  std::vector<double> log_kappa(n);
  std::vector<double> log_u(n, -kInf);
  for (std::size_t i = 0; i < n; ++i) {
    log_kappa[i] = (std::log(c_flat) + std::log(wf[i]) - std::log(c_smooth) - p * std::log(ws[i])) /
                   (p - 1.0);
    if (obj.u()[i] > 0.0) log_u[i] = std::log(obj.u()[i]);
  }
  std::vector<double> e(n);
  // log F(exp(x)) with the entries rescaled to avoid overflow.
  auto log_f = [&](double x) {
    double shift = -kInf;
    for (std::size_t i = 0; i < n; ++i) {
      e[i] = std::min(log_u[i] - x, log_kappa[i]);
      if (obj.u()[i] == 0.0) e[i] = -kInf;
      shift = std::max(shift, e[i]);
    }
    for (std::size_t i = 0; i < n; ++i) e[i] = std::exp(e[i] - shift);
    return shift + std::log(norm(e, smooth));
  };

  std::vector<std::vector<double>> candidates;
  std::vector<std::vector<double>> ys;
  // Smooth piece empty: all of u on the flat side, certified by y = c_flat wf.
  candidates.emplace_back(n, smooth_is_1 ? 1.0 : 0.0);
  std::vector<double> flat_y(n);
  for (std::size_t i = 0; i < n; ++i) flat_y[i] = c_flat * wf[i];
  ys.push_back(flat_y);

  double lo = kInf;
  double hi = -kInf;
  for (std::size_t i = 0; i < n; ++i) {
    if (obj.u()[i] == 0.0) continue;
    lo = std::min(lo, log_u[i] - log_kappa[i]);
    hi = std::max(hi, log_u[i] - log_kappa[i]);
  }
  hi = std::max(hi, std::log(norm(obj.u(), smooth))) + 1.0;
  lo -= 1.0;
  if (log_f(lo) > 0.0) {
    for (int it = 0; it < 300; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (log_f(mid) > 0.0 ? lo : hi) = mid;
    }
    std::vector<double> piece(n);
    for (double x : {lo, hi}) {
      std::vector<double> share(n, 0.0);
      for (std::size_t i = 0; i < n; ++i) {
        if (obj.u()[i] == 0.0) continue;
        const double log_piece = x + log_kappa[i];
        const double frac = log_piece >= log_u[i] ? 1.0 : std::exp(log_piece - log_u[i]);
        piece[i] = frac * obj.u()[i];
        share[i] = smooth_is_1 ? 1.0 - frac : frac;
      }
      candidates.push_back(share);
      std::vector<double> y;
      if (lp_gradient(piece, smooth, c_smooth, y)) ys.push_back(y);
    }
  }

  ReducedSolution out;
  double best_f = kInf;
  for (const auto& cand : candidates) {
    const double f = obj(cand);
    if (f < best_f) {
      best_f = f;
      out.share = cand;
    }
  }
  for (const auto& y : ys) out.lower_bound = std::max(out.lower_bound, dual_lower_bound(obj, y));
  return out;
}

// Both exponents finite. For fixed nu the separable problem
//   min_s sum beta_i (1-s_i)^p1 + nu * sum alpha_i s_i^p0
// has a unique solution s(nu), and these solutions trace the Pareto front of
// (||a0||_X0, ||a1||_X1). The objective along the front is unimodal in nu.
class FrontPath {
 public:
  explicit FrontPath(const Objective& obj) : obj_(obj) {
    const std::size_t n = obj.n();
    p0_ = obj.x0().exponent().value();
    p1_ = obj.x1().exponent().value();
    log_ratio_.assign(n, 0.0);
    active_.assign(n, false);
    for (std::size_t i = 0; i < n; ++i) {
      const double u = obj.u()[i];
      if (u == 0.0) continue;
      active_[i] = true;
      // log(alpha_i / beta_i)
      log_ratio_[i] = p0_ * std::log(obj.x0().weights()[i] * u) -
                      p1_ * std::log(obj.x1().weights()[i] * u);
    }
  }

  double p0() const { return p0_; }
  double p1() const { return p1_; }

  // Range of log(nu) outside which every share is saturated to machine
  // precision.
  std::pair<double, double> range() const {
    double lo = kInf;
    double hi = -kInf;
    for (std::size_t i = 0; i < log_ratio_.size(); ++i) {
      if (!active_[i]) continue;
      lo = std::min(lo, -log_ratio_[i]);
      hi = std::max(hi, -log_ratio_[i]);
    }
    const double margin =
        40.0 + 40.0 * (std::max(p0_, p1_) - 1.0) + std::abs(std::log(p1_ / p0_));
    return {lo - margin, hi + margin};
  }

  void shares(double log_nu, std::vector<double>& s) const {
    s.assign(log_ratio_.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (!active_[i]) continue;
      s[i] = share_for(log_nu + log_ratio_[i]);
    }
  }

 private:
  // Minimizer over [0,1] of (1-s)^p1 + r s^p0 with log r given.
  double share_for(double log_r) const {
    if (p0_ == 2.0 && p1_ == 2.0) return 1.0 / (1.0 + std::exp(log_r));
    // g(s) = r p0 s^(p0-1) - p1 (1-s)^(p1-1) is increasing on [0,1].
    const double r = std::exp(log_r);
    double lo = 0.0;
    double hi = 1.0;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (mid == lo || mid == hi) break;
      const double g = r * p0_ * std::pow(mid, p0_ - 1.0) - p1_ * std::pow(1.0 - mid, p1_ - 1.0);
      (g > 0.0 ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
  }

  const Objective& obj_;
  double p0_ = 1.0;
  double p1_ = 1.0;
  std::vector<double> log_ratio_;
  std::vector<bool> active_;
};

double best_dual_bound(const Objective& obj, std::span<const double> share) {
  obj.split(share);
  const std::vector<double> part0(obj.part0().begin(), obj.part0().end());
  const std::vector<double> part1(obj.part1().begin(), obj.part1().end());
  std::vector<double> y0;
  std::vector<double> y1;
  const bool has0 = lp_gradient(part0, obj.x0(), 1.0, y0);
  const bool has1 = lp_gradient(part1, obj.x1(), obj.t(), y1);
  const auto w0 = obj.x0().weights();
  const auto w1 = obj.x1().weights();
  // Coordinates left free by a p = 1 side take the other side's value,
  // clipped to the admissible interval [0, w].
  for (std::size_t i = 0; has0 && i < y0.size(); ++i) {
    if (y0[i] < 0.0) y0[i] = has1 && y1[i] >= 0.0 ? std::min(y1[i], w0[i]) : 0.0;
  }
  for (std::size_t i = 0; has1 && i < y1.size(); ++i) {
    if (y1[i] < 0.0) {
      y1[i] = has0 ? std::min(y0[i], obj.t() * w1[i]) : 0.0;
    }
  }
  double best = 0.0;
  if (has0) best = std::max(best, dual_lower_bound(obj, y0));
  if (has1) best = std::max(best, dual_lower_bound(obj, y1));
  if (has0 && has1) {
    std::vector<double> mix(y0.size());
    for (double tau : {0.25, 0.5, 0.75}) {
      for (std::size_t i = 0; i < mix.size(); ++i) mix[i] = (1.0 - tau) * y0[i] + tau * y1[i];
      best = std::max(best, dual_lower_bound(obj, mix));
    }
  }
  return best;
}

ReducedSolution solve_on_front(const Objective& obj) {
  const std::size_t n = obj.n();
  FrontPath path(obj);
  std::vector<double> s;
  auto phi = [&](double log_nu) {
    path.shares(log_nu, s);
    return obj(s);
  };

  // sign(G) is the sign of d/dnu of the objective along the front.
  auto stationarity = [&](double log_nu, bool& ok) {
    path.shares(log_nu, s);
    const double n0 = obj.norm0(s);
    const double n1 = obj.norm1(s);
    ok = n0 > 0.0 && n1 > 0.0;
    if (!ok) return 0.0;
    const double log_c0 = -std::log(path.p0()) + (1.0 - path.p0()) * std::log(n0);
    const double log_c1 = std::log(obj.t()) - std::log(path.p1()) + (1.0 - path.p1()) * std::log(n1);
    return log_nu - log_c0 + log_c1;
  };

  const auto [lo, hi] = path.range();
  std::vector<Sample> samples;
  Sample bl{};
  Sample bh{};
  const Sample golden = minimize_unimodal(phi, lo, hi, {}, 96, samples, &bl, &bh);

  std::vector<std::vector<double>> candidates;
  path.shares(golden.x, s);
  candidates.push_back(s);

  bool ok_lo = false;
  bool ok_hi = false;
  double g_lo = stationarity(bl.x, ok_lo);
  double g_hi = stationarity(bh.x, ok_hi);
  if (ok_lo && ok_hi && g_lo < 0.0 && g_hi > 0.0) {
    double a = bl.x;
    double b = bh.x;
    for (int it = 0; it < 200; ++it) {
      const double mid = 0.5 * (a + b);
      if (mid == a || mid == b) break;
      bool ok = false;
      const double g = stationarity(mid, ok);
      if (!ok) break;
      (g > 0.0 ? b : a) = mid;
    }
    path.shares(0.5 * (a + b), s);
    candidates.push_back(s);
  }
  candidates.emplace_back(n, 0.0);
  candidates.emplace_back(n, 1.0);

  ReducedSolution out;
  double best_f = kInf;
  for (const auto& cand : candidates) {
    const double f = obj(cand);
    if (f < best_f) {
      best_f = f;
      out.share = cand;
    }
    out.lower_bound = std::max(out.lower_bound, best_dual_bound(obj, cand));
  }
  return out;
}

ReducedSolution solve_both_l1(const Objective& obj) {
  const std::size_t n = obj.n();
  ReducedSolution out;
  out.share.assign(n, 0.0);
  std::vector<double> y(n, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double c0 = obj.x0().weights()[i];
    const double c1 = obj.t() * obj.x1().weights()[i];
    out.share[i] = c0 <= c1 ? 1.0 : 0.0;
    y[i] = std::min(c0, c1);
  }
  out.lower_bound = dual_lower_bound(obj, y);
  return out;
}

}  // namespace

ReducedSolution solve_reduced(double t, std::span<const double> magnitudes, const SpaceSpec& x0,
                              const SpaceSpec& x1) {
  const std::size_t n = magnitudes.size();
  double scale = 0.0;
  for (double v : magnitudes) scale = std::max(scale, v);
  ReducedSolution out;
  if (scale == 0.0) {
    out.share.assign(n, 0.0);
    return out;
  }
  std::vector<double> u(n);
  for (std::size_t i = 0; i < n; ++i) u[i] = magnitudes[i] / scale;
  const Objective obj(t, std::move(u), x0, x1);

  if (x0.exponent().is_infinite() || x1.exponent().is_infinite()) {
    out = solve_by_level(obj);
  } else if (x0.exponent().is_one() && x1.exponent().is_one()) {
    out = solve_both_l1(obj);
  } else if (x0.exponent().is_one() || x1.exponent().is_one()) {
    out = solve_l1_smooth(obj);
  } else {
    out = solve_on_front(obj);
  }
  out.lower_bound = std::max(0.0, out.lower_bound) * scale;
  return out;
}

}  // namespace interp::detail
