#include <fstream>
#include <iostream>
#include <optional>

#include <CLI11.hpp>
#include <json.hpp>

#include "qmcabc/harness.hpp"
#include "qmcabc/models.hpp"

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<unsigned> threads;
};

void add_common(CLI::App* cmd, CommonFlags& flags) {
  cmd->add_option("--config", flags.config, "JSON experiment config")->required()->check(CLI::ExistingFile);
  cmd->add_option("--seed", flags.seed, "override the master seed");
  cmd->add_option("--out", flags.out, "override the output directory");
  cmd->add_option("--threads", flags.threads, "worker threads (default: QMCABC_THREADS or 1)")
      ->check(CLI::PositiveNumber);
}

qmcabc::ExperimentConfig load(const CommonFlags& flags) {
  qmcabc::ExperimentConfig config = qmcabc::load_config(flags.config);
  if (flags.seed) {
    config.seed = *flags.seed;
    config.ais.seed = *flags.seed;
  }
  if (flags.out) config.output = *flags.out;
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Quasi-Monte Carlo approximate Bayesian computation"};
  app.require_subcommand(1);

  std::string kind_name;
  int dim = 1;
  std::size_t n = 0;
  std::optional<std::uint64_t> seq_seed;
  auto* sequence = app.add_subcommand("sequence", "print a point set as CSV");
  sequence->add_option("--kind", kind_name, "mc, qmc, rqmc-shift or rqmc-owen")->required();
  sequence->add_option("--dim", dim)->required()->check(CLI::PositiveNumber);
  sequence->add_option("--n", n)->required()->check(CLI::PositiveNumber);
  sequence->add_option("--seed", seq_seed, "required for mc and rqmc kinds");

  auto* models = app.add_subcommand("models", "model utilities");
  models->require_subcommand(1);
  auto* models_list = models->add_subcommand("list", "print model metadata");
  std::string fixture_out;
  auto* models_fixtures = models->add_subcommand("fixtures", "regenerate the frozen observed datasets");
  models_fixtures->add_option("--out", fixture_out)->required();

  CommonFlags is_flags, smc_flags, bench_flags;
  auto* run_is = app.add_subcommand("run-is", "static importance sampler");
  add_common(run_is, is_flags);
  auto* run_smc = app.add_subcommand("run-smc", "sequential adaptive sampler");
  add_common(run_smc, smc_flags);
  auto* bench = app.add_subcommand("bench", "compare several methods on one model");
  add_common(bench, bench_flags);

  CLI11_PARSE(app, argc, argv);

  try {
    if (sequence->parsed()) {
      qmcabc::cmd_sequence(qmcabc::parse_sequence_kind(kind_name), dim, n, seq_seed, std::cout);
      return 0;
    }
    if (models_list->parsed()) {
      qmcabc::cmd_models_list(std::cout);
      return 0;
    }
    if (models_fixtures->parsed()) {
      qmcabc::write_fixtures(fixture_out);
      return 0;
    }
    if (run_is->parsed()) {
      return qmcabc::cmd_run_is(load(is_flags), qmcabc::resolve_threads(is_flags.threads));
    }
    if (run_smc->parsed()) {
      return qmcabc::cmd_run_smc(load(smc_flags), qmcabc::resolve_threads(smc_flags.threads));
    }
    if (bench->parsed()) {
      std::ifstream in(bench_flags.config);
      nlohmann::json doc;
      try {
        in >> doc;
      } catch (const nlohmann::json::exception& e) {
        throw qmcabc::ConfigError("--config", std::string("invalid JSON: ") + e.what());
      }
      const std::string out = bench_flags.out.value_or("out");
      return qmcabc::cmd_bench(doc, out, qmcabc::resolve_threads(bench_flags.threads), bench_flags.seed);
    }
  } catch (const qmcabc::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
