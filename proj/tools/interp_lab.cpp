// interp-lab: batch front end for the interpolation toolkit.
//
//   interp-lab kfun   --config cfg.json [--out PATH] [--format json|csv]
//   interp-lab verify --config cfg.json --which theorem1|brahms|bach|lemma2|main
//   interp-lab net    --config cfg.json
//
// Exit status: 0 all checks pass, 1 a verification failed, 2 invalid config
// or arguments, 3 any other runtime error.

#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "interp/config.hpp"
#include "interp/experiments.hpp"

namespace {

constexpr int kExitPass = 0;
constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;
constexpr int kExitRuntime = 3;

struct Common {
  std::string config;
  std::string out;
  std::string format;
  std::optional<std::uint64_t> seed;
  std::optional<double> tol;
  unsigned parallel = 1;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "Experiment config (JSON)")->required();
  cmd->add_option("--out", c.out, "Output file (default: config output.path, else stdout)");
  cmd->add_option("--format", c.format, "Output format")
      ->check(CLI::IsMember({"json", "csv"}));
  cmd->add_option("--seed", c.seed, "Override the sampling seed");
  cmd->add_option("--tol", c.tol, "Override the solver tolerance")->check(CLI::PositiveNumber);
  cmd->add_option("--parallel", c.parallel, "Worker threads (results do not depend on it)")
      ->check(CLI::Range(1u, 1024u));
}

void write_output(const interp::RunResult& r, const interp::ExperimentConfig& cfg,
                  const Common& c) {
  const std::string format = c.format.empty() ? cfg.output_format : c.format;
  const std::string path = c.out.empty() ? cfg.output_path : c.out;
  const std::string body = format == "csv" ? r.csv : r.report.dump(2) + "\n";
  if (path.empty() || path == "-") {
    std::cout << body;
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  out << body;
  if (!out) throw std::runtime_error("write to '" + path + "' failed");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Lipschitz operators on real interpolation couples: K-functionals, "
               "interpolation estimates and constructive compactness nets"};
  app.set_version_flag("--version", std::string(interp::kToolName) + " " + interp::kToolVersion);
  app.require_subcommand(1);

  Common common;
  std::string which;
  auto* kfun = app.add_subcommand("kfun", "K-functional curve of one element");
  auto* verify = app.add_subcommand("verify", "Check one family of inequalities");
  auto* net = app.add_subcommand("net", "Nets of T(M) over dimensions and eps");
  for (auto* cmd : {kfun, verify, net}) add_common(cmd, common);
  verify->add_option("--which", which, "Which check")
      ->required()
      ->check(CLI::IsMember({"theorem1", "brahms", "bach", "lemma2", "main"}));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitPass : kExitConfig;
  }

  interp::ExperimentConfig cfg;
  try {
    cfg = interp::load_config(common.config);
    if (common.seed) cfg.set_seed(*common.seed);
    if (common.tol) cfg.set_tol(*common.tol);
  } catch (const interp::InvalidInput& e) {
    std::cerr << "interp-lab: " << e.what() << "\n";
    return kExitConfig;
  }

  try {
    const interp::RunOptions opt{common.parallel};
    interp::RunResult r;
    if (kfun->parsed()) {
      r = interp::run_kfun(cfg, opt);
    } else if (verify->parsed()) {
      r = interp::run_verify(cfg, interp::parse_verify_kind(which), opt);
    } else {
      r = interp::run_net(cfg, opt);
    }
    write_output(r, cfg, common);
    if (!r.pass) {
      std::cerr << "interp-lab: FAIL: " << r.first_failure << "\n";
      return kExitFail;
    }
    return kExitPass;
  } catch (const interp::HypothesisFailure& e) {
    std::cerr << "interp-lab: FAIL: " << e.what() << "\n";
    return kExitFail;
  } catch (const interp::InvalidInput& e) {
    std::cerr << "interp-lab: invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "interp-lab: error: " << e.what() << "\n";
    return kExitRuntime;
  }
}
