#include "interp/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "interp/compactness.hpp"
#include "interp/k_functional.hpp"
#include "interp/parallel.hpp"

namespace interp {

using Json = nlohmann::ordered_json;

std::string to_string(VerifyKind k) {
  switch (k) {
    case VerifyKind::theorem1: return "theorem1";
    case VerifyKind::brahms: return "brahms";
    case VerifyKind::bach: return "bach";
    case VerifyKind::lemma2: return "lemma2";
    case VerifyKind::main: return "main";
  }
  return "unknown";
}

VerifyKind parse_verify_kind(const std::string& s) {
  for (auto k : {VerifyKind::theorem1, VerifyKind::brahms, VerifyKind::bach, VerifyKind::lemma2,
                 VerifyKind::main}) {
    if (to_string(k) == s) return k;
  }
  throw InvalidInput("unknown verification '" + s + "'");
}

std::string centers_digest(const std::vector<CoupleElement>& centers) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& c : centers) {
    for (double x : c.vector()) {
      std::uint64_t bits;
      std::memcpy(&bits, &x, sizeof bits);
      unsigned char bytes[8];
      for (int i = 0; i < 8; ++i) bytes[i] = static_cast<unsigned char>(bits >> (8 * i));
      h = fnv1a(bytes, 8, h);
    }
  }
  return hex64(h);
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Collects the verdict; the first failure wins so the CLI can name it.
struct Verdict {
  bool pass = true;
  std::string first;

  void fail(const std::string& what) {
    if (pass) first = what;
    pass = false;
  }
};

// Deterministic text for a double, identical to the JSON rendering.
std::string num(double x) { return Json(x).dump(); }

Json header(const ExperimentConfig& cfg, const std::string& command) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config_digest"] = cfg.digest();
  j["command"] = command;
  return j;
}

std::string csv_preamble(const ExperimentConfig& cfg) {
  return std::string("# ") + kToolName + " " + kToolVersion + " config " + cfg.digest() + "\n";
}

// One dimension of an experiment: the couples, the bound operator and the
// sample set M (on the sphere of the configured radius in the source
// functional).
struct Cell {
  std::size_t n = 0;
  CoupleSpec cA;
  CoupleSpec cB;
  LipschitzOpSpec T;
  SampleSet M;
};

Cell make_cell(const ExperimentConfig& cfg, std::size_t n, const RunOptions& opt) {
  const CoupleSpec cA = cfg.coupleA.build(n);
  const CoupleSpec cB = cfg.coupleB.build(n);
  auto T = make_operator(cfg.op.build(n), cA, cB, cfg.op.C0, cfg.op.C1, cfg.sample.seed);
  auto M = make_sample_set(n, cfg.sample.total(n), cfg.sample.bound, cfg.sample.seed,
                           interp_metric(cA, cfg.interp, cfg.tol), opt.parallel);
  return {n, cA, cB, std::move(T), std::move(M)};
}

Json operator_json(const Cell& c) {
  Json j;
  j["kind"] = to_string(c.T.def.kind());
  j["C0"] = c.T.C0;
  j["C1"] = c.T.C1;
  j["audit_c0"] = c.T.audit.c0_observed;
  j["audit_c1"] = c.T.audit.c1_observed;
  return j;
}

// Sample points plus the origin, which goes last. Margins are reported over
// the samples only: at the origin both sides vanish and the margin is 0.
std::vector<CoupleElement> with_zero(const SampleSet& M, std::size_t n) {
  std::vector<CoupleElement> xs = M.elements;
  xs.push_back(CoupleElement::zeros(n));
  return xs;
}

bool origin(std::size_t i, const std::vector<CoupleElement>& xs) { return i + 1 == xs.size(); }

struct CsvRow {
  std::size_t n;
  std::string check;
  std::size_t cases;
  std::size_t violations;
  double margin;
};

std::string rows_csv(const ExperimentConfig& cfg, const std::vector<CsvRow>& rows) {
  std::ostringstream os;
  os << csv_preamble(cfg) << "n,check,cases,violations,min_margin\n";
  for (const auto& r : rows) {
    os << r.n << ',' << r.check << ',' << r.cases << ',' << r.violations << ',' << num(r.margin)
       << '\n';
  }
  return os.str();
}

std::string sweep_label(double theta, const Exponent& p) {
  return "theta=" + num(theta) + " p=" + p.to_string();
}

// ---------------------------------------------------------------------------

void verify_theorem1(const ExperimentConfig& cfg, const RunOptions& opt, Json& rep,
                     std::vector<CsvRow>& rows, Verdict& v) {
  for (std::size_t n : cfg.dims) {
    const Cell c = make_cell(cfg, n, opt);
    const auto xs = with_zero(c.M, n);
    Json jn;
    jn["n"] = n;
    jn["operator"] = operator_json(c);
    jn["cases"] = xs.size();

    // Pointwise estimate on t = 2^m, |m| <= pointwise_M.
    const int PM = cfg.pointwise_M;
    std::vector<std::size_t> bad(xs.size(), 0), cert(xs.size(), 0), transport(xs.size(), 0);
    std::vector<double> margin(xs.size(), kInf);
    parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
      for (int m = -PM; m <= PM; ++m) {
        const auto r = verify_theorem1_pointwise(c.T, xs[i], c.cA, c.cB, std::ldexp(1.0, m), cfg.tol);
        if (!r.cmp.holds) ++bad[i];
        if (r.cmp.certified_violation) ++cert[i];
        if (!r.transported_ok) ++transport[i];
        margin[i] = std::min(margin[i], r.cmp.margin);
      }
    });
    Json pw;
    pw["grid"] = {-PM, PM};
    pw["checks"] = xs.size() * static_cast<std::size_t>(2 * PM + 1);
    std::size_t nb = 0, nc = 0, nt = 0;
    double mm = kInf;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      nb += bad[i];
      nc += cert[i];
      nt += transport[i];
      if (!origin(i, xs)) mm = std::min(mm, margin[i]);
    }
    pw["violations"] = nb;
    pw["certified_violations"] = nc;
    pw["transport_failures"] = nt;
    pw["min_margin"] = mm;
    jn["pointwise"] = pw;
    rows.push_back({n, "pointwise", pw["checks"].get<std::size_t>(), nb + nt, mm});
    if (nb + nt > 0) {
      v.fail("theorem1 pointwise estimate violated in dimension " + std::to_string(n));
    }

    // Norm estimate over the (theta, p) sweep.
    Json norms = Json::array();
    for (double theta : cfg.sweep_theta) {
      for (const auto& p : cfg.sweep_p) {
        const InterpParams ip{theta, p, cfg.interp.M};
        std::vector<char> holds(xs.size());
        std::vector<std::size_t> terms(xs.size());
        std::vector<double> marg(xs.size()), ratio(xs.size(), 0.0);
        parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
          const auto r = verify_theorem1_norm(c.T, c.cA, c.cB, ip, xs[i], cfg.tol);
          holds[i] = r.cmp.holds ? 1 : 0;
          terms[i] = r.term_violations;
          marg[i] = r.cmp.margin;
          if (r.rhs > 0.0) ratio[i] = r.lhs.value / r.rhs;
        });
        Json jp;
        jp["theta"] = theta;
        jp["p"] = p.to_string();
        jp["checks"] = xs.size();
        const auto viol = static_cast<std::size_t>(std::count(holds.begin(), holds.end(), 0));
        std::size_t tv = 0;
        for (auto t : terms) tv += t;
        jp["violations"] = viol;
        jp["term_violations"] = tv;
        jp["min_margin"] = *std::min_element(marg.begin(), marg.end() - 1);
        jp["max_ratio"] = *std::max_element(ratio.begin(), ratio.end());
        rows.push_back({n, "norm " + sweep_label(theta, p), xs.size(), viol + tv,
                        jp["min_margin"].get<double>()});
        if (viol + tv > 0) {
          v.fail("theorem1 norm estimate violated for " + sweep_label(theta, p) +
                 " in dimension " + std::to_string(n));
        }
        norms.push_back(jp);
      }
    }
    jn["norm"] = norms;
    rep["dims"].push_back(jn);
  }
}

// Envelope for the Persson checks; records a failure when there is none.
std::optional<CompactEnvelope> require_envelope(const ExperimentConfig& cfg, std::size_t n,
                                                Verdict& v, Json& jn) {
  auto env = cfg.op.compact_envelope(n);
  if (!env) {
    jn["error"] = "the operator has no compact envelope";
    v.fail("no compact envelope configured for " + to_string(cfg.op.kind));
  }
  return env;
}

std::size_t envelope_failures(const Cell& c, const CompactEnvelope& env,
                              const std::vector<CoupleElement>& xs) {
  std::size_t bad = 0;
  for (const auto& a : xs) {
    if (!check_envelope_condition(c.T.def, a, c.cA.space0(), env.kappa)) ++bad;
  }
  return bad;
}

void verify_brahms_all(const ExperimentConfig& cfg, const RunOptions& opt, Json& rep,
                       std::vector<CsvRow>& rows, Verdict& v) {
  for (std::size_t n : cfg.dims) {
    const Cell c = make_cell(cfg, n, opt);
    const auto xs = with_zero(c.M, n);
    Json jn;
    jn["n"] = n;
    jn["operator"] = operator_json(c);
    const auto env = require_envelope(cfg, n, v, jn);
    if (!env) {
      rep["dims"].push_back(jn);
      continue;
    }
    const std::size_t env_bad = envelope_failures(c, *env, xs);
    jn["envelope_condition_failures"] = env_bad;
    rows.push_back({n, "envelope condition", xs.size(), env_bad, 0.0});
    if (env_bad > 0) v.fail("envelope condition fails in dimension " + std::to_string(n));

    const PerssonFamily fam(c.cB);
    // Uniform bound on samples and their images.
    std::size_t h_checks = 0, h_bad = 0;
    double h_worst = 0.0;
    for (const auto& a : xs) {
      for (const auto& b : {a, c.T.apply(a)}) {
        const auto r = verify_h_bound(fam, b, env->cK);
        h_checks += r.checks;
        if (!r.pass) ++h_bad;
        h_worst = std::max(h_worst, r.worst_ratio);
      }
    }
    jn["h_bound"] = {{"checks", h_checks}, {"violations", h_bad}, {"worst_ratio", h_worst}};
    rows.push_back({n, "h bound", h_checks, h_bad, 1.0 - h_worst});
    if (h_bad > 0) v.fail("uniform truncation bound fails in dimension " + std::to_string(n));

    Json per_eps = Json::array();
    const CoupleElement corner(env->kappa);
    for (double eps : cfg.eps_list) {
      const auto P = select_p_epsilon(*env, fam, eps);
      const double corner_err = norm(fam.truncate(P.N, corner) - corner, c.cB.space0());
      std::vector<BrahmsReport> r(xs.size());
      parallel_for(xs.size(), opt.parallel,
                   [&](std::size_t i) { r[i] = verify_brahms(c.T, fam, P, xs[i], c.cA); });
      std::size_t hom = 0, normed = 0;
      double margin = kInf;
      for (std::size_t i = 0; i < r.size(); ++i) {
        if (!r[i].homogeneous_ok) ++hom;
        if (!r[i].normalized_ok) ++normed;
        if (!origin(i, xs)) margin = std::min(margin, r[i].margin);
      }
      Json je;
      je["eps"] = eps;
      je["N"] = P.N;
      je["worst_error"] = P.worst_error;
      je["extreme_point_error"] = corner_err;
      je["selection_ok"] = corner_err < eps;
      je["cases"] = xs.size();
      je["homogeneous_violations"] = hom;
      je["normalized_violations"] = normed;
      je["min_margin"] = margin;
      per_eps.push_back(je);
      rows.push_back({n, "selection eps=" + num(eps), 1, corner_err < eps ? 0u : 1u,
                      eps - corner_err});
      rows.push_back({n, "homogeneous eps=" + num(eps), xs.size(), hom + normed, margin});
      if (!(corner_err < eps)) v.fail("truncation error bound fails at eps=" + num(eps));
      if (hom + normed > 0) v.fail("homogeneous Persson bound fails at eps=" + num(eps));
    }
    jn["per_eps"] = per_eps;
    rep["dims"].push_back(jn);
  }
}

void verify_bach_all(const ExperimentConfig& cfg, const RunOptions& opt, Json& rep,
                     std::vector<CsvRow>& rows, Verdict& v) {
  for (std::size_t n : cfg.dims) {
    const Cell c = make_cell(cfg, n, opt);
    const auto xs = with_zero(c.M, n);
    Json jn;
    jn["n"] = n;
    jn["operator"] = operator_json(c);
    const auto env = require_envelope(cfg, n, v, jn);
    if (!env) {
      rep["dims"].push_back(jn);
      continue;
    }
    const PerssonFamily fam(c.cB);
    Json per_eps = Json::array();
    for (double eps : cfg.eps_list) {
      Json je;
      je["eps"] = eps;
      Json sweep = Json::array();
      for (double theta : cfg.sweep_theta) {
        std::optional<BachSetup> prepared;
        try {
          prepared = prepare_bach(c.T, *env, fam, eps, c.cA, c.cB, theta, cfg.sample.seed);
        } catch (const HypothesisFailure& e) {
          je["error"] = e.what();
          v.fail(std::string("defect operator audit failed: ") + e.what());
          break;
        }
        const BachSetup& setup = *prepared;
        je["N"] = setup.P.N;
        je["defect_C0"] = setup.defect.C0;
        je["defect_C1"] = setup.defect.C1;
        for (const auto& p : cfg.sweep_p) {
          const InterpParams ip{theta, p, cfg.interp.M};
          std::vector<BachReport> r(xs.size());
          parallel_for(xs.size(), opt.parallel, [&](std::size_t i) {
            r[i] = verify_bach(setup, c.cA, c.cB, ip, xs[i], cfg.tol);
          });
          std::size_t viol = 0, tv = 0;
          double margin = kInf, worst = 0.0;
          for (std::size_t i = 0; i < r.size(); ++i) {
            if (!r[i].norm.cmp.holds) ++viol;
            tv += r[i].norm.term_violations;
            if (!origin(i, xs)) margin = std::min(margin, r[i].norm.cmp.margin);
            worst = std::max(worst, r[i].norm.lhs.value);
          }
          Json jp;
          jp["theta"] = theta;
          jp["p"] = p.to_string();
          jp["constant"] = setup.constant;
          jp["cases"] = xs.size();
          jp["violations"] = viol;
          jp["term_violations"] = tv;
          jp["max_defect"] = worst;
          jp["min_margin"] = margin;
          sweep.push_back(jp);
          rows.push_back({n, "defect eps=" + num(eps) + " " + sweep_label(theta, p), xs.size(),
                          viol + tv, margin});
          if (viol + tv > 0) {
            v.fail("defect estimate violated at eps=" + num(eps) + " " + sweep_label(theta, p));
          }
        }
      }
      je["sweep"] = sweep;
      per_eps.push_back(je);
    }
    jn["per_eps"] = per_eps;
    rep["dims"].push_back(jn);
  }
}

void verify_lemma2(const ExperimentConfig& cfg, const RunOptions& opt, Json& rep,
                   std::vector<CsvRow>& rows, Verdict& v) {
  for (std::size_t n : cfg.dims) {
    const Cell c = make_cell(cfg, n, opt);
    LemmaOptions lo;
    lo.theta = cfg.interp.theta;
    lo.grid_M = cfg.lemma_grid_M;
    lo.eps_list = cfg.eps_list;
    lo.tol = cfg.tol;
    lo.parallel = opt.parallel;
    const auto r = lp_pipeline(c.M, c.T, c.cA, c.cB, lo);
    Json jn;
    jn["n"] = n;
    jn["operator"] = operator_json(c);
    jn["samples"] = c.M.elements.size();
    jn["C2"] = r.C2;
    jn["C3"] = r.C3;
    jn["slack"] = r.slack;
    Json per_m = Json::array();
    double gqq_margin = kInf;
    for (const auto& g : r.per_m) {
      per_m.push_back({{"m", g.m}, {"bound", g.bound}, {"worst", g.worst},
                       {"violations", g.violations}});
      gqq_margin = std::min(gqq_margin, g.bound - g.worst);
    }
    jn["per_m"] = per_m;
    jn["tail_violations"] = r.gqq_violations;
    jn["decomposition_violations"] = r.decomposition_violations;
    rows.push_back({n, "tail bound", r.per_m.size() * c.M.elements.size(),
                    r.gqq_violations + r.decomposition_violations, gqq_margin});
    if (r.gqq_violations + r.decomposition_violations > 0) {
      v.fail("decomposition tail bound violated in dimension " + std::to_string(n));
    }
    Json per_eps = Json::array();
    for (const auto& e : r.per_eps) {
      Json je;
      je["eps"] = e.eps;
      je["m"] = e.m;
      je["C2"] = e.C2;
      je["C3"] = e.C3;
      je["tail_bound"] = e.tail_bound;
      je["b0_net"] = {{"eps", e.b0_net.eps},
                      {"norm", e.b0_net.norm_tag},
                      {"count", e.b0_net.count},
                      {"coverage_max_dist", e.b0_net.coverage_max_dist}};
      je["net"] = {{"eps", e.net.eps},
                   {"norm", e.net.norm_tag},
                   {"count", e.net.count},
                   {"centers_digest", centers_digest(e.net.centers)},
                   {"coverage_max_dist", e.net.coverage_max_dist},
                   {"covered", e.covered}};
      je["max_rho"] = e.max_rho;
      je["pair_checks"] = e.pair_checks;
      je["pair_violations"] = e.pair_violations;
      per_eps.push_back(je);
      rows.push_back({n, "net eps=" + num(e.eps), c.M.elements.size(),
                      (e.covered ? 0u : 1u) + e.pair_violations, e.eps - e.net.coverage_max_dist});
      if (!e.covered) v.fail("net coverage fails at eps=" + num(e.eps));
      if (e.pair_violations > 0) v.fail("three-term bound violated at eps=" + num(e.eps));
      if (!(e.tail_bound < 0.5 * e.eps)) v.fail("m(eps) rule not satisfied at eps=" + num(e.eps));
    }
    jn["per_eps"] = per_eps;
    rep["dims"].push_back(jn);
  }
}

// One (dimension, eps) net of T(M). Operators satisfying their envelope
// condition go through the truncation construction; the rest get a direct
// greedy net, recorded as such.
struct NetCell {
  std::size_t n = 0;
  double eps = 0.0;
  std::string method;  // "persson" or "direct"
  std::string note;
  std::size_t count = 0;
  std::size_t direct_count = 0;
  bool certified = false;
  Json detail;
};

std::vector<NetCell> net_cells(const ExperimentConfig& cfg, const RunOptions& opt) {
  std::vector<NetCell> out;
  for (std::size_t n : cfg.dims) {
    const Cell c = make_cell(cfg, n, opt);
    const auto env = cfg.op.compact_envelope(n);
    std::string why_direct;
    if (!env) {
      why_direct = "the operator has no compact envelope";
    } else if (const auto w = find_envelope_witness(c.T.def, c.cA.space0(), env->kappa)) {
      why_direct = "envelope condition fails on basis vector " + std::to_string(*w);
    } else if (envelope_failures(c, *env, c.M.elements) > 0) {
      why_direct = "envelope condition fails on a sample";
    }
    for (double eps : cfg.eps_list) {
      NetCell nc;
      nc.n = n;
      nc.eps = eps;
      const EpsNet direct =
          direct_image_net(c.M, c.T, c.cB, cfg.interp, eps, cfg.tol, opt.parallel);
      nc.direct_count = direct.count;
      Json d;
      d["samples"] = c.M.elements.size();
      if (why_direct.empty()) {
        MainNetOptions mo;
        mo.eps = eps;
        mo.ip = cfg.interp;
        mo.tol = cfg.tol;
        mo.parallel = opt.parallel;
        mo.seed = cfg.sample.seed;
        const auto r = build_net_for_T(c.M, c.T, *env, c.cA, c.cB, mo);
        nc.method = "persson";
        nc.count = r.net.count;
        nc.certified = r.pass;
        d["eps0"] = r.eps0;
        d["truncation_rank"] = r.P.N;
        d["sup_source"] = r.sup_source;
        d["sup_shifted"] = r.sup_shifted;
        d["defect_constant"] = r.defect_constant;
        d["defect_max"] = r.defect_max;
        d["defect_failures"] = r.defect_failures;
        d["norm"] = r.net.norm_tag;
        d["centers_digest"] = centers_digest(r.net.centers);
        d["truncated_coverage_max_dist"] = r.net.coverage_max_dist;
        d["coverage_max_dist"] = r.audit.max_dist;
        d["covered"] = r.audit.covered;
      } else {
        nc.method = "direct";
        nc.note = why_direct;
        nc.count = direct.count;
        nc.certified = true;  // greedy_net throws unless its audit passes
        d["norm"] = direct.norm_tag;
        d["centers_digest"] = centers_digest(direct.centers);
        d["coverage_max_dist"] = direct.coverage_max_dist;
        d["covered"] = true;
      }
      nc.detail = std::move(d);
      out.push_back(std::move(nc));
    }
  }
  return out;
}

Json cell_json(const NetCell& c) {
  Json j;
  j["n"] = c.n;
  j["eps"] = c.eps;
  j["method"] = c.method;
  if (!c.note.empty()) j["note"] = c.note;
  j["count"] = c.count;
  j["direct_count"] = c.direct_count;
  j["certified"] = c.certified;
  for (const auto& [k, val] : c.detail.items()) j[k] = val;
  return j;
}

void verify_main(const ExperimentConfig& cfg, const RunOptions& opt, Json& rep,
                 std::vector<CsvRow>& rows, Verdict& v) {
  const auto cells = net_cells(cfg, opt);
  Json nets = Json::array();
  for (const auto& c : cells) {
    nets.push_back(cell_json(c));
    rows.push_back({c.n, "net eps=" + num(c.eps), 1, c.certified ? 0u : 1u,
                    c.detail.value("coverage_max_dist", 0.0)});
    if (c.method != "persson") v.fail(c.note + " (dimension " + std::to_string(c.n) + ")");
    if (!c.certified) v.fail("net for T(M) not certified in dimension " + std::to_string(c.n));
  }
  rep["nets"] = nets;

  // Plateau: for each eps the counts across dimensions agree within a
  // factor 2. Growth (strictly increasing counts) is reported alongside.
  Json plateau = Json::array();
  for (double eps : cfg.eps_list) {
    std::vector<std::size_t> counts;
    for (const auto& c : cells) {
      if (c.eps == eps) counts.push_back(c.count);
    }
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    const double ratio = *lo > 0 ? static_cast<double>(*hi) / static_cast<double>(*lo) : kInf;
    bool increasing = counts.size() > 1;
    for (std::size_t i = 1; i < counts.size(); ++i) increasing = increasing && counts[i] > counts[i - 1];
    const bool ok = ratio <= 2.0;
    plateau.push_back({{"eps", eps}, {"counts", counts}, {"ratio", ratio}, {"plateau", ok},
                       {"strictly_increasing", increasing}});
    rows.push_back({0, "plateau eps=" + num(eps), counts.size(), ok ? 0u : 1u, 2.0 - ratio});
    if (!ok) v.fail("net sizes do not plateau at eps=" + num(eps) + " (ratio " + num(ratio) + ")");
  }
  rep["plateau"] = plateau;
}

RunResult finish(Json rep, std::string csv, const Verdict& v) {
  rep["pass"] = v.pass;
  if (!v.pass) rep["first_failure"] = v.first;
  RunResult r;
  r.report = std::move(rep);
  r.csv = std::move(csv);
  r.pass = v.pass;
  r.first_failure = v.first;
  return r;
}

}  // namespace

RunResult run_kfun(const ExperimentConfig& cfg, const RunOptions& opt) {
  Json rep = header(cfg, "kfun");
  Verdict v;
  std::vector<double> a;
  if (cfg.kfun.a) {
    a = *cfg.kfun.a;
  } else {
    const std::size_t n = cfg.kfun.dim > 0 ? cfg.kfun.dim : cfg.dims.front();
    std::mt19937_64 rng(cfg.kfun.seed);
    std::normal_distribution<double> g(0.0, 1.0);
    a.resize(n);
    for (auto& x : a) x = g(rng);
  }
  const CoupleSpec cA = cfg.coupleA.build(a.size());
  const auto curve = compute_k_curve(CoupleElement(a), cA, cfg.kfun.M, cfg.tol, opt.parallel);
  const std::string problem = validate_k_curve(curve);
  if (!problem.empty()) v.fail("K curve: " + problem);
  rep["dim"] = a.size();
  rep["a"] = a;
  rep["M"] = cfg.kfun.M;
  Json pts = Json::array();
  for (const auto& p : curve.points) {
    pts.push_back({{"m", p.m}, {"t", p.t}, {"K", p.k}, {"lower", p.lower}, {"slack", p.slack}});
  }
  rep["curve"] = pts;
  return finish(std::move(rep), csv_preamble(cfg) + to_csv(curve), v);
}

RunResult run_verify(const ExperimentConfig& cfg, VerifyKind which, const RunOptions& opt) {
  Json rep = header(cfg, "verify");
  rep["which"] = to_string(which);
  rep["dims"] = Json::array();
  std::vector<CsvRow> rows;
  Verdict v;
  try {
    switch (which) {
      case VerifyKind::theorem1: verify_theorem1(cfg, opt, rep, rows, v); break;
      case VerifyKind::brahms: verify_brahms_all(cfg, opt, rep, rows, v); break;
      case VerifyKind::bach: verify_bach_all(cfg, opt, rep, rows, v); break;
      case VerifyKind::lemma2: verify_lemma2(cfg, opt, rep, rows, v); break;
      case VerifyKind::main: verify_main(cfg, opt, rep, rows, v); break;
    }
  } catch (const HypothesisFailure& e) {
    rep["error"] = e.what();
    v.fail(e.what());
  }
  return finish(std::move(rep), rows_csv(cfg, rows), v);
}

RunResult run_net(const ExperimentConfig& cfg, const RunOptions& opt) {
  Json rep = header(cfg, "net");
  Verdict v;
  std::ostringstream csv;
  csv << csv_preamble(cfg) << "n,eps,N\n";
  try {
    const auto cells = net_cells(cfg, opt);
    Json nets = Json::array();
    for (const auto& c : cells) {
      nets.push_back(cell_json(c));
      csv << c.n << ',' << num(c.eps) << ',' << c.count << '\n';
      if (!c.certified) v.fail("net not certified for n=" + std::to_string(c.n) + " eps=" + num(c.eps));
    }
    rep["nets"] = nets;
  } catch (const HypothesisFailure& e) {
    rep["error"] = e.what();
    v.fail(e.what());
  }
  return finish(std::move(rep), csv.str(), v);
}

}  // namespace interp
