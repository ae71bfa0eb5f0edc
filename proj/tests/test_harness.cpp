#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "qmcabc/csv.hpp"
#include "qmcabc/harness.hpp"

using namespace qmcabc;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("qmcabc_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json is_config(const fs::path& out) {
  return {{"model", {{"name", "toy"}, {"dim", 1}}},
          {"algorithm", "is"},
          {"kind", "rqmc-owen"},
          {"n", 100},
          {"epsilon", 1.0},
          {"scheme", {{"type", "fixed_m"}, {"M", 4}}},
          {"seed", 0},
          {"output", out.string()}};
}

json smc_config(const fs::path& out) {
  return {{"model", {{"name", "toy"}, {"dim", 3}}},
          {"algorithm", "ais"},
          {"kind", "qmc"},
          {"n", 300},
          {"strategy", {{"type", "hybrid"}, {"T1", 3}, {"M_stage1", 5}, {"eps_star", 1.5}}},
          {"proposal", {{"family", "gaussian"}}},
          {"repetitions", 2},
          {"seed", 4},
          {"output", out.string()}};
}

std::string error_field(const json& j) {
  try {
    parse_config(j);
  } catch (const ConfigError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse_config(is_config("x"));
  CHECK(c.algorithm == Algorithm::IS);
  CHECK(c.kind == SequenceKind::RqmcOwen);
  CHECK(std::get<FixedM>(c.scheme).M == 4);
  CHECK(c.epsilon == 1.0);

  const ExperimentConfig s = parse_config(smc_config("y"));
  CHECK(s.ais.n == 300);
  CHECK(std::get<Hybrid>(s.ais.strategy).T1 == 3);
  CHECK(std::get<Hybrid>(s.ais.strategy).eps_star == 1.5);
}

TEST_CASE("config errors name the field") {
  json j = is_config("x");
  j["epsilon_typo"] = 1;
  CHECK(error_field(j) == "epsilon_typo");

  j = is_config("x");
  j["scheme"]["m"] = 3;
  CHECK(error_field(j) == "scheme.m");

  j = is_config("x");
  j.erase("epsilon");
  CHECK(error_field(j) == "epsilon");

  j = is_config("x");
  j["n"] = -5;
  CHECK(error_field(j) == "n");

  j = is_config("x");
  j["model"]["name"] = "unknown";
  CHECK(error_field(j) == "model.name");

  j = smc_config("y");
  j["strategy"].erase("eps_star");
  CHECK(error_field(j) == "strategy.eps_star");

  j = smc_config("y");
  j["kind"] = "QMC_SOBOL";
  j["proposal"]["family"] = "particle_mixture";
  CHECK(error_field(j) == "proposal.family");

  j = smc_config("y");
  j["epsilon"] = 2.0;
  CHECK(error_field(j) == "epsilon");
}

TEST_CASE("static runs are byte-identical across repeats and thread counts") {
  const fs::path a = scratch("is_a"), b = scratch("is_b");
  json ja = is_config(a), jb = is_config(b);
  ja["repetitions"] = jb["repetitions"] = 3;
  CHECK(cmd_run_is(parse_config(ja), 1) == 0);
  CHECK(cmd_run_is(parse_config(jb), 3) == 0);
  for (const char* f : {"particles.csv", "summary.csv", "repetitions.csv"}) CHECK(slurp(a / f) == slurp(b / f));
}

TEST_CASE("summary rows per repetition") {
  const fs::path out = scratch("is_50");
  json j = is_config(out);
  j["repetitions"] = 50;
  j["n"] = 20;
  REQUIRE(cmd_run_is(parse_config(j), 2) == 0);
  const csv::Table t = csv::read(out / "summary.csv");
  CHECK(t.rows.size() == 50);
  for (const auto& row : t.rows) CHECK(row[t.column("sims")] == "80");
  // Every value parses back to the number that was written.
  for (const auto& row : t.rows) CHECK(csv::format_double(csv::parse_double(row[t.column("z_hat")])) == row[t.column("z_hat")]);
}

TEST_CASE("variance columns are nan without replicates") {
  const fs::path out = scratch("is_m1");
  json j = is_config(out);
  j["scheme"]["M"] = 1;
  REQUIRE(cmd_run_is(parse_config(j), 1) == 0);
  const csv::Table t = csv::read(out / "summary.csv");
  CHECK(t.rows[0][t.column("var_hat_z")] == "nan");
}

TEST_CASE("static runs accept a stored proposal") {
  const fs::path out = scratch("is_stored");
  fs::create_directories(out);
  const GaussianProposal g{GaussianParams(Vector::Zero(1), Matrix::Identity(1, 1))};
  {
    std::ofstream f(out / "q.json");
    f << to_json(g).dump();
  }
  json j = is_config(out);
  j["proposal"] = {{"family", "gaussian"}, {"path", (out / "q.json").string()}};
  REQUIRE(cmd_run_is(parse_config(j), 1) == 0);
  j["proposal"]["family"] = "mixture";
  CHECK_THROWS_AS(cmd_run_is(parse_config(j), 1), ConfigError);
}

TEST_CASE("sequential trace") {
  const fs::path out = scratch("smc");
  REQUIRE(cmd_run_smc(parse_config(smc_config(out)), 2) == 0);
  const csv::Table t = csv::read(out / "trace.csv");
  const std::size_t rep = t.column("repetition"), it = t.column("t"), eps = t.column("epsilon"),
                    scheme = t.column("scheme"), iter_sims = t.column("iteration_sims"),
                    cum = t.column("cumulative_sims");
  double last_eps = 0, total = 0;
  std::string last_rep;
  for (const auto& row : t.rows) {
    const double e = csv::parse_double(row[eps]);
    if (row[rep] != last_rep) {
      total = 0;
      last_rep = row[rep];
    } else {
      CHECK(e < last_eps);
    }
    last_eps = e;
    total += csv::parse_double(row[iter_sims]);
    CHECK(csv::parse_double(row[cum]) == total);
    const bool nb = row[scheme].rfind("neg-binomial", 0) == 0;
    CHECK(nb == (std::stoi(row[it]) > 3));
  }
  const csv::Table s = csv::read(out / "summary.csv");
  CHECK(s.rows.size() == 2);
  for (const auto& row : s.rows) CHECK(csv::parse_double(row[s.column("eps_T")]) <= 1.5);
}

TEST_CASE("bench table") {
  const fs::path out = scratch("bench");
  json is = is_config("unused");
  is["model"]["dim"] = 3;
  is["name"] = "IS";
  is["repetitions"] = 3;
  is["epsilon"] = 3.0;
  json smc = smc_config("unused");
  smc["name"] = "AIS";
  smc["repetitions"] = 3;
  const json set = {{"methods", {is, smc}}};
  REQUIRE(cmd_bench(set, out, 2) == 0);
  const csv::Table t = csv::read(out / "bench.csv");
  CHECK(t.header == std::vector<std::string>{"method", "mse_mean", "mse_var", "sims", "eps_T"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "IS");
  CHECK(csv::parse_double(t.rows[0][3]) == 400.0);

  json mismatched = set;
  mismatched["methods"][1]["model"]["dim"] = 2;
  CHECK_THROWS_AS(cmd_bench(mismatched, out, 1), ConfigError);
}

TEST_CASE("sequence dump") {
  std::ostringstream out;
  cmd_sequence(SequenceKind::QmcSobol, 2, 2, std::nullopt, out);
  CHECK(out.str() == "0.50000000000000000,0.50000000000000000\n0.75000000000000000,0.25000000000000000\n");
  CHECK(format_plain(1.0 / 3.0) == "0.33333333333333331");
  CHECK(format_plain(12.5) == "12.500000000000000");
}

TEST_CASE("model listing") {
  std::ostringstream out;
  cmd_models_list(out);
  CHECK(out.str().find("lotka-volterra,3,") != std::string::npos);
  CHECK(out.str().find("tuberculosis,2,") != std::string::npos);
}

TEST_CASE("thread resolution") {
  CHECK(resolve_threads(4u) == 4);
  setenv("QMCABC_THREADS", "3", 1);
  CHECK(resolve_threads(std::nullopt) == 3);
  unsetenv("QMCABC_THREADS");
  CHECK(resolve_threads(std::nullopt) == 1);
}
