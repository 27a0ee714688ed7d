#include "interp/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace interp {

using nlohmann::json;

ConfigError::ConfigError(std::string field, int line, const std::string& detail)
    : InvalidInput([&] {
        std::ostringstream os;
        os << "config error";
        if (line > 0) os << " at line " << line;
        if (!field.empty()) os << ", field '" << field << "'";
        os << ": " << detail;
        return os.str();
      }()),
      field_(std::move(field)),
      line_(line) {}

std::uint64_t fnv1a(const void* data, std::size_t size, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < size; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i, v >>= 4) s[static_cast<std::size_t>(i)] = digits[v & 0xF];
  return s;
}

namespace {

// Walks the document keeping the dotted path of the current node, and maps
// a path back to a source line by locating its keys in order.
class Node {
 public:
  Node(const json& j, std::string path, const std::string& text)
      : j_(j), path_(std::move(path)), text_(text) {}

  [[noreturn]] void fail(const std::string& detail) const {
    throw ConfigError(path_, line_of(path_), detail);
  }

  const json& raw() const { return j_; }
  const std::string& path() const { return path_; }

  void require_object(std::initializer_list<const char*> allowed) const {
    if (!j_.is_object()) fail("expected an object");
    const std::set<std::string> ok(allowed.begin(), allowed.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) child_path_fail(k, "unknown field");
    }
  }

  bool has(const char* key) const { return j_.is_object() && j_.contains(key); }

  Node operator[](const char* key) const {
    if (!has(key)) fail(std::string("missing field '") + key + "'");
    return {j_.at(key), join(key), text_};
  }

  Node at(std::size_t i) const {
    return {j_.at(i), path_ + "[" + std::to_string(i) + "]", text_};
  }

  double number() const {
    if (!j_.is_number()) fail("expected a number");
    const double v = j_.get<double>();
    if (!std::isfinite(v)) fail("expected a finite number");
    return v;
  }

  double positive() const {
    const double v = number();
    if (!(v > 0.0)) fail("expected a number > 0");
    return v;
  }

  std::uint64_t uint() const {
    if (!j_.is_number_integer() || j_.get<long long>() < 0) fail("expected an integer >= 0");
    return j_.get<std::uint64_t>();
  }

  int integer() const {
    if (!j_.is_number_integer()) fail("expected an integer");
    return j_.get<int>();
  }

  std::string string() const {
    if (!j_.is_string()) fail("expected a string");
    return j_.get<std::string>();
  }

  Exponent exponent() const {
    if (j_.is_string()) {
      if (j_.get<std::string>() == "inf") return Exponent::infinity();
      fail("expected a number >= 1 or \"inf\"");
    }
    const double p = number();
    if (!(p >= 1.0)) fail("expected a number >= 1 or \"inf\"");
    return Exponent::finite(p);
  }

  std::vector<double> numbers() const {
    if (!j_.is_array()) fail("expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j_.size(); ++i) out.push_back(at(i).number());
    return out;
  }

 private:
  std::string join(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  [[noreturn]] void child_path_fail(const std::string& key, const std::string& detail) const {
    const std::string p = join(key);
    throw ConfigError(p, line_of(p), detail);
  }

  int line_of(const std::string& path) const {
    std::size_t pos = 0;
    std::size_t found = std::string::npos;
    std::stringstream ss(path);
    std::string part;
    while (std::getline(ss, part, '.')) {
      const auto bracket = part.find('[');
      const std::string key = part.substr(0, bracket);
      const auto at = text_.find("\"" + key + "\"", pos);
      if (at == std::string::npos) break;
      found = at;
      pos = at + key.size() + 2;
    }
    if (found == std::string::npos) return 0;
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<std::ptrdiff_t>(found), '\n'));
  }

  const json& j_;
  std::string path_;
  const std::string& text_;
};

SpaceConfig parse_space(const Node& n) {
  n.require_object({"p", "weights"});
  SpaceConfig s;
  s.p = n["p"].exponent();
  if (n.has("weights")) {
    const Node w = n["weights"];
    if (w.raw().is_string()) {
      if (w.string() != "unit") w.fail("expected an array of weights or \"unit\"");
    } else {
      s.weights = w.numbers();
      if (s.weights->empty()) w.fail("weights must not be empty");
      for (double x : *s.weights) {
        if (!(x > 0.0)) w.fail("weights must be > 0");
      }
    }
  }
  return s;
}

CoupleConfig parse_couple(const Node& n) {
  n.require_object({"space0", "space1"});
  CoupleConfig c{parse_space(n["space0"]), parse_space(n["space1"])};
  if (c.space0.weights && c.space1.weights && c.space0.weights->size() != c.space1.weights->size()) {
    n.fail("space0 and space1 weights have different lengths");
  }
  return c;
}

EnvelopeConfig parse_envelope(const Node& n) {
  EnvelopeConfig e;
  if (n.raw().is_array()) {
    e.values = n.numbers();
    for (std::size_t i = 0; i < e.values->size(); ++i) {
      if (!((*e.values)[i] >= 0.0)) n.fail("envelope entries must be >= 0");
      if (i > 0 && (*e.values)[i] > (*e.values)[i - 1]) n.fail("envelope must be nonincreasing");
    }
    return e;
  }
  n.require_object({"geometric", "start"});
  e.ratio = n["geometric"].positive();
  if (e.ratio > 1.0) n["geometric"].fail("ratio must lie in (0, 1]");
  if (n.has("start")) e.start = n["start"].integer();
  return e;
}

Nonlinearity parse_sigma(const Node& n) {
  Nonlinearity s;
  try {
    if (n.raw().is_string()) {
      s.kind = parse_nonlinearity(n.string());
    } else {
      n.require_object({"kind", "param"});
      s.kind = parse_nonlinearity(n["kind"].string());
      if (n.has("param")) s.param = n["param"].positive();
    }
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    n.fail(e.what());
  }
  return s;
}

OperatorConfig parse_operator(const Node& n) {
  n.require_object({"kind", "envelope", "nonlinearity", "lambda", "C0", "C1", "stages"});
  OperatorConfig op;
  try {
    op.kind = parse_op_kind(n["kind"].string());
  } catch (const ConfigError&) {
    throw;
  } catch (const InvalidInput& e) {
    n["kind"].fail(e.what());
  }
  if (n.has("envelope")) op.envelope = parse_envelope(n["envelope"]);
  if (n.has("nonlinearity")) op.sigma = parse_sigma(n["nonlinearity"]);
  if (n.has("lambda")) op.lambda = n["lambda"].number();
  if (n.has("C0")) op.C0 = n["C0"].positive();
  if (n.has("C1")) op.C1 = n["C1"].positive();
  if (n.has("stages")) {
    const Node st = n["stages"];
    if (!st.raw().is_array()) st.fail("expected an array of stages");
    for (std::size_t i = 0; i < st.raw().size(); ++i) {
      const Node s = st.at(i);
      s.require_object({"multiply", "apply"});
      if (s.has("multiply") == s.has("apply")) s.fail("a stage has exactly one of multiply, apply");
      StageConfig sc;
      if (s.has("multiply")) {
        sc.multiply = s["multiply"].numbers();
      } else {
        sc.sigma = parse_sigma(s["apply"]);
      }
      op.stages.push_back(std::move(sc));
    }
  }
  const bool needs_env = op.kind == OpKind::envelope_compact || op.kind == OpKind::identity_control;
  if (needs_env && !op.envelope) n.fail(to_string(op.kind) + " needs an envelope");
  if (op.kind == OpKind::custom_composition && op.stages.empty()) {
    n.fail("custom_composition needs at least one stage");
  }
  return op;
}

}  // namespace

SpaceSpec SpaceConfig::build(std::size_t n) const {
  if (!weights) return SpaceSpec::unit(p, n);
  if (weights->size() != n) {
    throw InvalidInput("explicit weights of length " + std::to_string(weights->size()) +
                       " used in dimension " + std::to_string(n));
  }
  return SpaceSpec(p, *weights);
}

CoupleSpec CoupleConfig::build(std::size_t n) const { return {space0.build(n), space1.build(n)}; }

std::optional<std::size_t> CoupleConfig::fixed_dim() const {
  if (space0.weights) return space0.weights->size();
  if (space1.weights) return space1.weights->size();
  return std::nullopt;
}

std::vector<double> EnvelopeConfig::build(std::size_t n) const {
  if (values) {
    if (values->size() != n) {
      throw InvalidInput("explicit envelope of length " + std::to_string(values->size()) +
                         " used in dimension " + std::to_string(n));
    }
    return *values;
  }
  return CompactEnvelope::geometric(ratio, n, start).kappa;
}

OperatorDef OperatorConfig::build(std::size_t n) const {
  switch (kind) {
    case OpKind::envelope_compact: return OperatorDef::envelope_compact(envelope->build(n), sigma);
    case OpKind::scalar_multiple: return OperatorDef::scalar_multiple(lambda, n);
    case OpKind::zero: return OperatorDef::zero(n);
    case OpKind::identity_control: return OperatorDef::identity_control(envelope->build(n));
    case OpKind::custom_composition: {
      std::vector<Stage> st;
      for (const auto& s : stages) {
        st.push_back(s.multiply ? Stage::multiply(*s.multiply) : Stage::apply(s.sigma));
      }
      auto def = OperatorDef::custom_composition(std::move(st), n);
      return envelope ? def.with_envelope(envelope->build(n)) : def;
    }
  }
  throw std::logic_error("unreachable operator kind");
}

std::optional<CompactEnvelope> OperatorConfig::compact_envelope(std::size_t n) const {
  if (envelope) return CompactEnvelope{envelope->build(n), 1.0};
  if (kind == OpKind::zero) return CompactEnvelope{std::vector<double>(n, 0.0), 1.0};
  return std::nullopt;
}

void ExperimentConfig::set_seed(std::uint64_t seed) {
  sample.seed = seed;
  kfun.seed = seed;
  canonical["sample"]["seed"] = seed;
  if (canonical.contains("kfun") && !canonical["kfun"].contains("a")) {
    canonical["kfun"]["seed"] = seed;
  }
}

void ExperimentConfig::set_tol(double t) {
  if (!(t > 0.0) || !std::isfinite(t)) throw ConfigError("tol", 0, "expected a number > 0");
  tol = t;
  canonical["tol"] = t;
}

std::string ExperimentConfig::digest() const {
  const std::string s = canonical.dump();
  return hex64(fnv1a(s.data(), s.size()));
}

ExperimentConfig parse_config(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    // Translate the byte offset into a line number.
    const auto byte = std::min<std::size_t>(e.byte, text.size());
    const int line = 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
    throw ConfigError("", line, std::string("malformed JSON: ") + e.what());
  }
  const Node root(doc, "", text);
  root.require_object({"coupleA", "coupleB", "operator", "interp", "eps_list", "sample", "tol",
                       "dims", "sweep", "lemma", "pointwise", "kfun", "output"});

  ExperimentConfig cfg;
  cfg.coupleA = parse_couple(root["coupleA"]);
  cfg.coupleB = parse_couple(root["coupleB"]);
  cfg.op = parse_operator(root["operator"]);

  if (root.has("interp")) {
    const Node ip = root["interp"];
    ip.require_object({"theta", "p", "M"});
    if (ip.has("theta")) cfg.interp.theta = ip["theta"].number();
    if (ip.has("p")) cfg.interp.p = ip["p"].exponent();
    if (ip.has("M")) cfg.interp.M = ip["M"].integer();
    try {
      cfg.interp.validate();
    } catch (const InvalidInput& e) {
      ip.fail(e.what());
    }
  }

  if (root.has("eps_list")) {
    const Node el = root["eps_list"];
    cfg.eps_list = el.numbers();
    for (double e : cfg.eps_list) {
      if (!(e > 0.0)) el.fail("eps values must be > 0");
    }
  }
  if (cfg.eps_list.empty()) throw ConfigError("eps_list", 0, "must not be empty");
  for (std::size_t i = 1; i < cfg.eps_list.size(); ++i) {
    if (!(cfg.eps_list[i] < cfg.eps_list[i - 1])) {
      root["eps_list"].fail("must be sorted in strictly descending order");
    }
  }

  if (root.has("sample")) {
    const Node s = root["sample"];
    s.require_object({"count", "count_per_dim", "bound", "seed"});
    if (s.has("count")) cfg.sample.count = s["count"].uint();
    if (s.has("count_per_dim")) cfg.sample.count_per_dim = s["count_per_dim"].uint();
    if (s.has("bound")) {
      cfg.sample.bound = s["bound"].number();
      if (!(cfg.sample.bound >= 0.0)) s["bound"].fail("expected a number >= 0");
    }
    if (s.has("seed")) cfg.sample.seed = s["seed"].uint();
  }
  if (root.has("tol")) cfg.tol = root["tol"].positive();

  const auto fixedA = cfg.coupleA.fixed_dim();
  const auto fixedB = cfg.coupleB.fixed_dim();
  if (fixedA && fixedB && *fixedA != *fixedB) {
    root["coupleB"].fail("dimension differs from coupleA");
  }
  if (root.has("dims")) {
    const Node d = root["dims"];
    if (!d.raw().is_array() || d.raw().empty()) d.fail("expected a nonempty array of dimensions");
    for (std::size_t i = 0; i < d.raw().size(); ++i) {
      const auto v = d.at(i).uint();
      if (v == 0) d.at(i).fail("dimension must be >= 1");
      if (fixedA && v != *fixedA) d.at(i).fail("differs from the dimension of the explicit weights");
      cfg.dims.push_back(static_cast<std::size_t>(v));
    }
  } else if (fixedA || fixedB) {
    cfg.dims = {fixedA ? *fixedA : *fixedB};
  }

  if (root.has("sweep")) {
    const Node s = root["sweep"];
    s.require_object({"theta", "p"});
    if (s.has("theta")) {
      cfg.sweep_theta = s["theta"].numbers();
      for (double t : cfg.sweep_theta) {
        if (!(t > 0.0 && t < 1.0)) s["theta"].fail("theta values must lie in (0, 1)");
      }
    }
    if (s.has("p")) {
      const Node p = s["p"];
      if (!p.raw().is_array()) p.fail("expected an array of exponents");
      for (std::size_t i = 0; i < p.raw().size(); ++i) cfg.sweep_p.push_back(p.at(i).exponent());
    }
  }
  if (cfg.sweep_theta.empty()) cfg.sweep_theta = {cfg.interp.theta};
  if (cfg.sweep_p.empty()) cfg.sweep_p = {cfg.interp.p};

  if (root.has("lemma")) {
    const Node l = root["lemma"];
    l.require_object({"grid_M"});
    if (l.has("grid_M")) cfg.lemma_grid_M = l["grid_M"].integer();
    if (cfg.lemma_grid_M < 1) l["grid_M"].fail("expected an integer >= 1");
  }
  if (root.has("pointwise")) {
    const Node pw = root["pointwise"];
    pw.require_object({"M"});
    if (pw.has("M")) cfg.pointwise_M = pw["M"].integer();
    if (cfg.pointwise_M < 0) pw["M"].fail("expected an integer >= 0");
  }

  if (root.has("kfun")) {
    const Node k = root["kfun"];
    k.require_object({"a", "seed", "dim", "M"});
    if (k.has("a")) {
      cfg.kfun.a = k["a"].numbers();
      if (cfg.kfun.a->empty()) k["a"].fail("must not be empty");
    }
    if (k.has("seed")) cfg.kfun.seed = k["seed"].uint();
    if (k.has("dim")) cfg.kfun.dim = static_cast<std::size_t>(k["dim"].uint());
    if (k.has("M")) cfg.kfun.M = k["M"].integer();
    if (cfg.kfun.M < 0) k["M"].fail("expected an integer >= 0");
  }

  if (root.has("output")) {
    const Node o = root["output"];
    o.require_object({"path", "format"});
    if (o.has("path")) cfg.output_path = o["path"].string();
    if (o.has("format")) {
      cfg.output_format = o["format"].string();
      if (cfg.output_format != "json" && cfg.output_format != "csv") {
        o["format"].fail("expected \"json\" or \"csv\"");
      }
    }
  }

  if (cfg.dims.empty()) {
    if (cfg.kfun.a) {
      cfg.dims = {cfg.kfun.a->size()};
    } else if (cfg.kfun.dim > 0) {
      cfg.dims = {cfg.kfun.dim};
    } else {
      throw ConfigError("dims", 0, "no dimension given (dims, explicit weights or kfun.a)");
    }
  }

  // Building every couple and operator once surfaces semantic errors (bad
  // weights, envelope lengths) while the field is still known.
  for (std::size_t n : cfg.dims) {
    try {
      (void)cfg.coupleA.build(n);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      root["coupleA"].fail(e.what());
    }
    try {
      (void)cfg.coupleB.build(n);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      root["coupleB"].fail(e.what());
    }
    try {
      (void)cfg.op.build(n);
    } catch (const ConfigError&) {
      throw;
    } catch (const InvalidInput& e) {
      root["operator"].fail(e.what());
    }
  }

  cfg.canonical = std::move(doc);
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("", 0, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace interp
