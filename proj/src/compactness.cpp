#include "interp/compactness.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "interp/error.hpp"
#include "interp/k_functional.hpp"
#include "interp/parallel.hpp"

namespace interp {

Metric space_metric(const SpaceSpec& s, std::string tag) {
  return {std::move(tag), [s](const CoupleElement& x) { return norm(x, s); }};
}

Metric sum_metric(const CoupleSpec& c, double tol) {
  return {"B0+B1", [c, tol](const CoupleElement& x) { return compute_k(1.0, x, c, tol).objective; }};
}

Metric interp_metric(const CoupleSpec& c, const InterpParams& ip, double tol) {
  ip.validate();
  std::ostringstream tag;
  tag << "(B0,B1)_{" << ip.theta << "," << ip.p.to_string() << "} grid M=" << ip.M;
  return {tag.str(),
          [c, ip, tol](const CoupleElement& x) { return interp_norm(x, c, ip, tol).value; }};
}

SampleSet make_sample_set(std::size_t n, std::size_t count, double bound, std::uint64_t seed,
                          const Metric& metric, unsigned parallel) {
  if (!(bound >= 0.0) || !std::isfinite(bound)) throw InvalidInput("sample bound must be >= 0");
  if (n == 0) throw InvalidInput("sample dimension must be >= 1");
  SampleSet out;
  out.bound = bound;
  out.seed = seed;
  out.norm_tag = metric.tag;
  // Draw sequentially so the set does not depend on the thread count.
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::vector<double>> raw(count, std::vector<double>(n));
  for (auto& v : raw) {
    for (auto& x : v) x = g(rng);
  }
  out.elements.resize(count);
  parallel_for(count, parallel, [&](std::size_t k) {
    CoupleElement a(raw[k]);
    const double r = metric.norm(a);
    if (!(r > 0.0) || bound == 0.0) {
      out.elements[k] = CoupleElement::zeros(n);
      return;
    }
    a *= bound / r;
    for (int guard = 0; metric.norm(a) > bound && guard < 64; ++guard) a *= 1.0 - 1e-12;
    out.elements[k] = std::move(a);
  });
  return out;
}

CoverageAudit audit_coverage(const std::vector<CoupleElement>& points,
                             const std::vector<CoupleElement>& centers, double eps,
                             const Metric& metric, bool strict, unsigned parallel) {
  CoverageAudit out;
  out.nearest.assign(points.size(), 0);
  if (points.empty()) return out;
  if (centers.empty()) {
    out.covered = false;
    out.max_dist = std::numeric_limits<double>::infinity();
    return out;
  }
  std::vector<double> best(points.size());
  parallel_for(points.size(), parallel, [&](std::size_t i) {
    double d = metric.distance(points[i], centers[0]);
    std::size_t arg = 0;
    for (std::size_t j = 1; j < centers.size(); ++j) {
      const double dj = metric.distance(points[i], centers[j]);
      if (dj < d) {
        d = dj;
        arg = j;
      }
    }
    best[i] = d;
    out.nearest[i] = arg;
  });
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (best[i] > out.max_dist) {
      out.max_dist = best[i];
      out.worst_index = i;
    }
  }
  out.covered = strict ? out.max_dist < eps : out.max_dist <= eps;
  return out;
}

EpsNet greedy_net(const std::vector<CoupleElement>& points, double eps, const Metric& metric,
                  unsigned parallel) {
  if (!(eps > 0.0)) throw InvalidInput("greedy_net: eps must be > 0");
  EpsNet net;
  net.eps = eps;
  net.norm_tag = metric.tag;
  if (points.empty()) return net;

  std::vector<double> dist(points.size(), std::numeric_limits<double>::infinity());
  std::size_t next = 0;
  for (;;) {
    net.center_indices.push_back(next);
    const CoupleElement& c = points[next];
    parallel_for(points.size(), parallel, [&](std::size_t i) {
      dist[i] = std::min(dist[i], metric.distance(points[i], c));
    });
    dist[next] = 0.0;
    std::size_t far = 0;
    for (std::size_t i = 1; i < points.size(); ++i) {
      if (dist[i] > dist[far]) far = i;
    }
    if (dist[far] <= eps) break;
    next = far;
  }
  for (std::size_t k : net.center_indices) net.centers.push_back(points[k]);
  net.count = net.centers.size();

  const auto audit = audit_coverage(points, net.centers, eps, metric, false, parallel);
  if (!audit.covered) {
    std::ostringstream os;
    os.precision(17);
    os << "point " << audit.worst_index << " at distance " << audit.max_dist << " > " << eps;
    throw HypothesisFailure("net coverage", os.str());
  }
  net.assignment = audit.nearest;
  net.coverage_max_dist = audit.max_dist;
  return net;
}

// ---------------------------------------------------------------------------

int choose_m(double C3, double theta, double eps) {
  if (!(eps > 0.0)) throw InvalidInput("choose_m: eps must be > 0");
  if (!(theta > 0.0 && theta < 1.0)) throw InvalidInput("choose_m: theta must lie in (0, 1)");
  if (!(C3 > 0.0)) return 0;
  auto ok = [&](int m) { return 2.0 * C3 * std::exp2(-(1.0 - theta) * m) < 0.5 * eps; };
  int m = static_cast<int>(std::floor(std::log2(4.0 * C3 / eps) / (1.0 - theta))) + 1;
  while (ok(m - 1)) --m;
  while (!ok(m)) ++m;
  return m;
}

namespace {

std::vector<LPDecomposition> decompose_all(const std::vector<CoupleElement>& xs, int m,
                                           const CoupleSpec& cA, double tol, unsigned parallel) {
  std::vector<LPDecomposition> out(xs.size());
  const double t = std::ldexp(1.0, m);
  parallel_for(xs.size(), parallel, [&](std::size_t i) {
    const auto d = compute_k(t, xs[i], cA, tol);
    out[i] = {m, d.a0, d.a1, d.objective, d.slack};
  });
  return out;
}

}  // namespace

LemmaReport lp_pipeline(const SampleSet& samples, const LipschitzOpSpec& T, const CoupleSpec& cA,
                        const CoupleSpec& cB, const LemmaOptions& opt) {
  if (opt.grid_M < 1) throw InvalidInput("lp_pipeline: grid_M must be >= 1");
  if (!(opt.theta > 0.0 && opt.theta < 1.0)) throw InvalidInput("lp_pipeline: theta in (0, 1)");
  const auto& xs = samples.elements;
  const double theta = opt.theta;
  LemmaReport rep;
  rep.C0 = T.C0;
  rep.C1 = T.C1;

  // Decompositions on the grid; their objectives also give the functional.
  const int G = opt.grid_M;
  std::vector<std::vector<LPDecomposition>> grid;
  for (int m = -G; m <= G; ++m) grid.push_back(decompose_all(xs, m, cA, opt.tol, opt.parallel));
  std::vector<double> functional(xs.size(), 0.0);
  for (const auto& row : grid) {
    for (std::size_t i = 0; i < xs.size(); ++i) {
      functional[i] = std::max(functional[i], std::exp2(-theta * row[i].m) * row[i].objective);
      rep.slack = std::max(rep.slack, row[i].slack);
    }
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(functional[i] <= opt.bound * (1.0 + 1e-9))) {
      std::ostringstream os;
      os << "lp_pipeline: sample " << i << " has (theta, inf) functional " << functional[i]
         << " above the bound " << opt.bound;
      throw InvalidInput(os.str());
    }
    rep.C2 = std::max(rep.C2, functional[i]);
  }
  const double cmax = std::max(T.C0, T.C1);
  rep.C3 = cmax * rep.C2 * (1.0 + rep.slack);

  std::vector<CoupleElement> ta(xs.size());
  parallel_for(xs.size(), opt.parallel, [&](std::size_t i) { ta[i] = T.apply(xs[i]); });

  for (const auto& row : grid) {
    GqqRecord g;
    g.m = row.front().m;
    g.bound = rep.C3 * std::exp2(-(1.0 - theta) * g.m);
    std::vector<double> lhs(xs.size());
    parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
      lhs[i] = norm(ta[i] - T.apply(row[i].u), cB.space1());
    });
    for (std::size_t i = 0; i < xs.size(); ++i) {
      g.worst = std::max(g.worst, lhs[i]);
      if (lhs[i] > g.bound * (1.0 + rep.slack + 1e-12)) ++g.violations;
      if (row[i].objective > rep.C2 * std::exp2(theta * g.m) * (1.0 + 1e-12)) {
        ++rep.decomposition_violations;
      }
    }
    rep.gqq_violations += g.violations;
    rep.per_m.push_back(g);
  }

  const Metric b0 = space_metric(cB.space0(), "B0");
  const Metric sum = sum_metric(cB, opt.tol);
  bool all_ok = rep.gqq_violations == 0 && rep.decomposition_violations == 0;
  for (double eps : opt.eps_list) {
    LemmaEpsReport er;
    er.eps = eps;
    er.C2 = rep.C2;
    double slack = rep.slack;
    std::vector<LPDecomposition> decomp;
    for (int guard = 0;; ++guard) {
      if (guard > 64) throw std::logic_error("lp_pipeline: m(eps) did not stabilize");
      er.C3 = cmax * er.C2 * (1.0 + slack);
      er.m = choose_m(er.C3, theta, eps);
      if (er.m >= -G && er.m <= G) {
        decomp = grid[static_cast<std::size_t>(er.m + G)];
        break;
      }
      // Off the grid: the functional bound must also cover this m.
      decomp = decompose_all(xs, er.m, cA, opt.tol, opt.parallel);
      double c2 = er.C2;
      for (const auto& d : decomp) {
        c2 = std::max(c2, std::exp2(-theta * er.m) * d.objective);
        slack = std::max(slack, d.slack);
      }
      if (c2 == er.C2 && cmax * c2 * (1.0 + slack) == er.C3) break;
      er.C2 = c2;
    }
    er.tail_bound = 2.0 * er.C3 * std::exp2(-(1.0 - theta) * er.m);

    std::vector<CoupleElement> tu(xs.size());
    parallel_for(xs.size(), opt.parallel, [&](std::size_t i) { tu[i] = T.apply(decomp[i].u); });
    er.b0_net = greedy_net(tu, 0.5 * eps, b0, opt.parallel);

    er.net.eps = eps;
    er.net.norm_tag = sum.tag;
    er.net.center_indices = er.b0_net.center_indices;
    for (std::size_t k : er.net.center_indices) er.net.centers.push_back(ta[k]);
    er.net.count = er.net.centers.size();
    const auto audit = audit_coverage(ta, er.net.centers, eps, sum, true, opt.parallel);
    er.net.assignment = audit.nearest;
    er.net.coverage_max_dist = audit.max_dist;
    er.covered = audit.covered;
    er.max_rho = er.b0_net.coverage_max_dist;

    // Three-term bound: ||Ta_n - Ta_k||_{B0+B1} <= 2 C3 2^{-(1-theta) m} + rho(n, k).
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    if (opt.all_pairs) {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        for (std::size_t k = i + 1; k < xs.size(); ++k) pairs.emplace_back(i, k);
      }
    } else {
      for (std::size_t i = 0; i < xs.size(); ++i) {
        pairs.emplace_back(i, er.b0_net.center_indices[er.b0_net.assignment[i]]);
      }
    }
    std::vector<char> bad(pairs.size(), 0);
    parallel_for(pairs.size(), opt.parallel, [&](std::size_t q) {
      const auto [i, k] = pairs[q];
      const double rho = norm(tu[i] - tu[k], cB.space0());
      const double lower = compute_k(1.0, ta[i] - ta[k], cB, opt.tol).lower_bound;
      bad[q] = lower > (er.tail_bound + rho) * (1.0 + 1e-12) ? 1 : 0;
    });
    er.pair_checks = pairs.size();
    er.pair_violations = static_cast<std::size_t>(std::count(bad.begin(), bad.end(), 1));
    all_ok = all_ok && er.covered && er.pair_violations == 0 && er.tail_bound < 0.5 * eps;
    rep.per_eps.push_back(std::move(er));
  }
  rep.pass = all_ok;
  return rep;
}

// ---------------------------------------------------------------------------

BachSetup prepare_bach(const LipschitzOpSpec& T, const CompactEnvelope& env,
                       const PerssonFamily& fam, double eps, const CoupleSpec& cA,
                       const CoupleSpec& cB, double theta, std::uint64_t seed) {
  BachSetup s{select_p_epsilon(env, fam, eps), {OperatorDef::zero(T.dim()), 1.0, 1.0, 0.0, 0.0, {}}, 0.0};
  s.defect = persson_defect(T, s.P, env, cA, cB, seed);
  s.constant = std::pow(s.defect.C0, 1.0 - theta) * std::pow(s.defect.C1, theta);
  return s;
}

BachReport verify_bach(const BachSetup& setup, const CoupleSpec& cA, const CoupleSpec& cB,
                       const InterpParams& ip, const CoupleElement& a, double tol,
                       unsigned parallel) {
  BachReport r;
  r.eps = setup.P.eps;
  r.N = setup.P.N;
  r.norm = verify_theorem1_norm(setup.defect, cA, cB, ip, a, tol, parallel);
  return r;
}

MainNetReport build_net_for_T(const SampleSet& M, const LipschitzOpSpec& T,
                              const CompactEnvelope& env, const CoupleSpec& cA,
                              const CoupleSpec& cB, const MainNetOptions& opt) {
  opt.ip.validate();
  if (!(opt.eps > 0.0)) throw InvalidInput("build_net_for_T: eps must be > 0");
  env.validate();
  check_pairing(T.def, cA, cB);
  require_same_dim(env.kappa.size(), T.dim(), "build_net_for_T envelope");
  const auto& xs = M.elements;
  const double theta = opt.ip.theta;

  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!check_envelope_condition(T.def, xs[i], cA.space0(), env.kappa)) {
      throw HypothesisFailure("envelope condition",
                              "T a is not in ||a||_A0 K for sample " + std::to_string(i));
    }
  }

  MainNetReport rep;
  rep.eps = opt.eps;
  const double c = T.C1 * (env.cK + 1.0);
  auto sup_functional = [&](double shift) {
    std::vector<double> v(xs.size(), 0.0);
    parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
      v[i] = interp_norm(xs[i], cA, opt.ip, opt.tol, shift).value;
    });
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  rep.sup_source = sup_functional(1.0);

  // eps0^(1-theta) c^theta sup_M ||a||_shifted < eps / 2, where the shift
  // c / eps0 itself depends on eps0: start from the unshifted supremum and
  // halve eps0 until the inequality holds.
  const double half = 0.5 * opt.eps;
  rep.eps0 = rep.sup_source > 0.0
                 ? 0.5 * std::pow(half / (std::pow(c, theta) * rep.sup_source), 1.0 / (1.0 - theta))
                 : half;
  for (int guard = 0;; ++guard) {
    if (guard > 200) throw std::logic_error("build_net_for_T: no admissible eps0 found");
    rep.sup_shifted = sup_functional(c / rep.eps0);
    if (std::pow(rep.eps0, 1.0 - theta) * std::pow(c, theta) * rep.sup_shifted < half) break;
    rep.eps0 *= 0.5;
  }

  const PerssonFamily fam(cB);
  const BachSetup setup = prepare_bach(T, env, fam, rep.eps0, cA, cB, theta, opt.seed);
  rep.P = setup.P;
  rep.defect_constant = setup.constant;

  std::vector<CoupleElement> images(xs.size());
  std::vector<CoupleElement> truncated(xs.size());
  std::vector<double> defect(xs.size());
  std::vector<double> bound(xs.size());
  std::vector<char> ok(xs.size());
  parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
    images[i] = T.apply(xs[i]);
    truncated[i] = fam.truncate(setup.P.N, images[i]);
    const auto r = verify_theorem1_norm(setup.defect, cA, cB, opt.ip, xs[i], opt.tol);
    defect[i] = r.lhs.value;
    bound[i] = r.rhs;
    ok[i] = r.cmp.holds && defect[i] < half ? 1 : 0;
  });
  for (std::size_t i = 0; i < xs.size(); ++i) {
    rep.defect_max = std::max(rep.defect_max, defect[i]);
    rep.bound_max = std::max(rep.bound_max, bound[i]);
    if (!ok[i]) ++rep.defect_failures;
  }

  const Metric metric = interp_metric(cB, opt.ip, opt.tol);
  rep.net = greedy_net(truncated, half, metric, opt.parallel);
  rep.audit = audit_coverage(images, rep.net.centers, opt.eps, metric, true, opt.parallel);
  rep.pass = rep.defect_failures == 0 && rep.audit.covered;
  return rep;
}

EpsNet direct_image_net(const SampleSet& M, const LipschitzOpSpec& T, const CoupleSpec& cB,
                        const InterpParams& ip, double eps, double tol, unsigned parallel) {
  std::vector<CoupleElement> images(M.elements.size());
  parallel_for(images.size(), parallel, [&](std::size_t i) { images[i] = T.apply(M.elements[i]); });
  return greedy_net(images, eps, interp_metric(cB, ip, tol), parallel);
}

}  // namespace interp
