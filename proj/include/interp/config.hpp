#pragma once

// Experiment configuration: a JSON document describing two couples, an
// operator, interpolation parameters and sampling. Couples and envelopes may
// be given for a fixed dimension (explicit weights / values) or generically
// ("unit" weights, geometric envelopes) so one config can drive a sweep over
// several dimensions.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "interp/couple.hpp"
#include "interp/error.hpp"
#include "interp/operators.hpp"
#include "interp/persson.hpp"
#include "interp/real_method.hpp"
#include "json.hpp"

namespace interp {

/// A malformed or inconsistent config. `field` is a dotted path such as
/// "coupleA.space0.p"; `line` is 1-based, or 0 when unknown.
class ConfigError : public InvalidInput {
 public:
  ConfigError(std::string field, int line, const std::string& detail);

  const std::string& field() const noexcept { return field_; }
  int line() const noexcept { return line_; }

 private:
  std::string field_;
  int line_;
};

struct SpaceConfig {
  Exponent p = Exponent::finite(1.0);
  std::optional<std::vector<double>> weights;  // absent means unit weights

  SpaceSpec build(std::size_t n) const;
};

struct CoupleConfig {
  SpaceConfig space0;
  SpaceConfig space1;

  CoupleSpec build(std::size_t n) const;
  std::optional<std::size_t> fixed_dim() const;
};

struct EnvelopeConfig {
  std::optional<std::vector<double>> values;
  double ratio = 0.5;  // geometric: kappa_i = ratio^(i + start)
  int start = 1;

  std::vector<double> build(std::size_t n) const;
};

struct StageConfig {
  std::optional<std::vector<double>> multiply;
  Nonlinearity sigma;
};

struct OperatorConfig {
  OpKind kind = OpKind::zero;
  std::optional<EnvelopeConfig> envelope;
  Nonlinearity sigma;
  double lambda = 1.0;
  std::optional<double> C0;
  std::optional<double> C1;
  std::vector<StageConfig> stages;

  OperatorDef build(std::size_t n) const;
  /// The compact envelope used by the Persson-based checks: the configured
  /// one, or the zero envelope for the zero operator.
  std::optional<CompactEnvelope> compact_envelope(std::size_t n) const;
};

struct SampleConfig {
  std::size_t count = 50;
  std::size_t count_per_dim = 0;  // total = count + count_per_dim * n
  double bound = 1.0;
  std::uint64_t seed = 1;

  std::size_t total(std::size_t n) const { return count + count_per_dim * n; }
};

struct KfunConfig {
  std::optional<std::vector<double>> a;
  std::uint64_t seed = 1;
  std::size_t dim = 0;  // 0: first entry of dims
  int M = 10;
};

struct ExperimentConfig {
  CoupleConfig coupleA;
  CoupleConfig coupleB;
  OperatorConfig op;
  InterpParams interp;
  std::vector<double> eps_list{0.5, 0.1};
  SampleConfig sample;
  double tol = 1e-9;
  std::vector<std::size_t> dims;
  std::vector<double> sweep_theta;     // defaults to {interp.theta}
  std::vector<Exponent> sweep_p;       // defaults to {interp.p}
  int lemma_grid_M = 8;
  int pointwise_M = 10;                // pointwise grid t = 2^m, |m| <= pointwise_M
  KfunConfig kfun;
  std::string output_path;
  std::string output_format = "json";

  /// The document with overrides applied, keys sorted; the digest hashes it.
  nlohmann::json canonical;

  void set_seed(std::uint64_t seed);
  void set_tol(double tol);
  /// FNV-1a (64 bit) of canonical.dump(), as 16 hex digits.
  std::string digest() const;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);

/// FNV-1a over raw bytes.
std::uint64_t fnv1a(const void* data, std::size_t size,
                    std::uint64_t h = 0xcbf29ce484222325ULL);
std::string hex64(std::uint64_t v);

}  // namespace interp
