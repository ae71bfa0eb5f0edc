#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "qmcabc/engine.hpp"

namespace qmcabc {

/// Invalid experiment configuration; `field` names the offending key path.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string field, const std::string& message)
      : std::invalid_argument(field + ": " + message), field_(std::move(field)) {}
  const std::string& field() const { return field_; }

 private:
  std::string field_;
};

struct ModelSpec {
  std::string name = "toy";
  int dim = 1;

  bool operator==(const ModelSpec&) const = default;
};

ModelPtr make_model(const ModelSpec& spec);

enum class Algorithm { IS, AIS };

struct ExperimentConfig {
  std::string name;
  ModelSpec model;
  Algorithm algorithm = Algorithm::IS;
  SequenceKind kind = SequenceKind::MC;
  std::size_t n = 1000;
  std::uint64_t seed = 0;
  std::size_t repetitions = 1;
  std::filesystem::path output = "out";

  // Static sampler.
  WeightScheme scheme = FixedM{1};
  double epsilon = 0.0;
  std::string proposal_family = "prior";
  std::optional<std::filesystem::path> proposal_path;

  // Sequential sampler.
  AisConfig ais;
};

/// Strict parse: unknown keys and inconsistent combinations raise ConfigError.
ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Thread count from the flag, else QMCABC_THREADS, else 1.
unsigned resolve_threads(std::optional<unsigned> flag);

struct IsRepetition {
  RunRecord record;
  double phi_mean = 0.0;
  double phi_var = 0.0;
};

struct AisRepetition {
  AisResult result;
  std::vector<double> phi_mean;
  std::vector<double> phi_var;
};

/// Repetition r uses seed + r; results are ordered by repetition regardless of scheduling.
std::vector<IsRepetition> run_is_repetitions(const ExperimentConfig& config, unsigned threads);
std::vector<AisRepetition> run_ais_repetitions(const ExperimentConfig& config, unsigned threads);

/// Each returns the process exit code: 0 iff no repetition was degenerate or aborted.
int cmd_run_is(const ExperimentConfig& config, unsigned threads);
int cmd_run_smc(const ExperimentConfig& config, unsigned threads);
int cmd_bench(const nlohmann::json& config_set, const std::filesystem::path& output, unsigned threads,
              std::optional<std::uint64_t> seed_override = std::nullopt);

void cmd_sequence(SequenceKind kind, int dim, std::size_t n, std::optional<std::uint64_t> seed, std::ostream& out);
void cmd_models_list(std::ostream& out);

/// Fixed-notation decimal with 17 significant digits.
std::string format_plain(double x);

}  // namespace qmcabc
