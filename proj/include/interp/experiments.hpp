#pragma once

// The batch experiments behind the command line tool. Each run returns a
// JSON report (always), a CSV rendering, and a verdict. Reports carry the
// tool version and the config digest; results never depend on the thread
// count.

#include <string>

#include "interp/config.hpp"
#include "json.hpp"

namespace interp {

inline constexpr const char* kToolName = "interp-lab";
inline constexpr const char* kToolVersion = "0.1.0";

enum class VerifyKind { theorem1, brahms, bach, lemma2, main };

std::string to_string(VerifyKind k);
VerifyKind parse_verify_kind(const std::string& s);

struct RunOptions {
  unsigned parallel = 1;
};

struct RunResult {
  nlohmann::ordered_json report;  // keys in insertion order
  std::string csv;
  bool pass = false;
  std::string first_failure;  // empty on success
};

/// K(2^m, a) on m = -M..M for the configured element of coupleA.
RunResult run_kfun(const ExperimentConfig& cfg, const RunOptions& opt);

RunResult run_verify(const ExperimentConfig& cfg, VerifyKind which, const RunOptions& opt);

/// Nets of T(M) over every (dimension, eps) cell; the CSV is the (n, eps, N)
/// plateau table.
RunResult run_net(const ExperimentConfig& cfg, const RunOptions& opt);

/// FNV-1a over the IEEE bit patterns of the centers, in order.
std::string centers_digest(const std::vector<CoupleElement>& centers);

}  // namespace interp
