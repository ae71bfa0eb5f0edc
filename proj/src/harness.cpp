#include "qmcabc/harness.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <limits>
#include <set>
#include <sstream>

#include "qmcabc/csv.hpp"
#include "qmcabc/diagnostics.hpp"
#include "qmcabc/parallel.hpp"

namespace qmcabc {

namespace {

using nlohmann::json;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

// Strict view of one JSON object: every key must be consumed before finish().
class ObjectReader {
 public:
  ObjectReader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw ConfigError(path_.empty() ? "<root>" : path_, "expected a JSON object");
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

  const json& raw(const std::string& key) {
    used_.insert(key);
    if (!j_.contains(key)) throw ConfigError(field(key), "required key missing");
    return j_.at(key);
  }

  template <class T>
  T get(const std::string& key) {
    const json& v = raw(key);
    try {
      return v.get<T>();
    } catch (const json::exception&) {
      throw ConfigError(field(key), "has the wrong type");
    }
  }

  template <class T>
  T get_or(const std::string& key, T fallback) {
    used_.insert(key);
    if (!has(key)) return fallback;
    return get<T>(key);
  }

  std::size_t positive(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
    used_.insert(key);
    if (!has(key)) {
      if (fallback) return *fallback;
      throw ConfigError(field(key), "required key missing");
    }
    const json& v = j_.at(key);
    if (!v.is_number_integer() || v.get<long long>() < 1) throw ConfigError(field(key), "must be a positive integer");
    return v.get<std::size_t>();
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) throw ConfigError(field(item.key()), "unknown key");
    }
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> used_;
};

ModelSpec parse_model(const json& j, const std::string& path) {
  ObjectReader r(j, path);
  ModelSpec spec;
  spec.name = r.get<std::string>("name");
  if (spec.name == "lv") spec.name = "lotka-volterra";
  if (spec.name == "tb") spec.name = "tuberculosis";
  if (spec.name == "toy") {
    spec.dim = static_cast<int>(r.positive("dim", 1));
  } else if (spec.name == "lotka-volterra" || spec.name == "tuberculosis" || spec.name == "bimodal") {
    spec.dim = spec.name == "lotka-volterra" ? 3 : 2;
  } else {
    throw ConfigError(r.field("name"), "unknown model '" + spec.name + "'");
  }
  r.finish();
  return spec;
}

WeightScheme parse_scheme(const json& j, const std::string& path, std::size_t default_k_max) {
  ObjectReader r(j, path);
  const std::string type = r.get<std::string>("type");
  WeightScheme scheme;
  if (type == "fixed_m") {
    scheme = FixedM{r.positive("M")};
  } else if (type == "neg_binomial") {
    NegBinomial nb{r.positive("r", 2), r.positive("k_max", default_k_max)};
    if (nb.r < 2) throw ConfigError(r.field("r"), "must be at least 2");
    if (nb.k_max < nb.r) throw ConfigError(r.field("k_max"), "must be at least r");
    scheme = nb;
  } else {
    throw ConfigError(r.field("type"), "expected 'fixed_m' or 'neg_binomial'");
  }
  r.finish();
  return scheme;
}

double positive_real(ObjectReader& r, const std::string& key, std::optional<double> fallback = std::nullopt) {
  double v;
  if (!r.has(key) && fallback) {
    r.get_or<double>(key, 0.0);
    v = *fallback;
  } else {
    v = r.get<double>(key);
  }
  if (!(v > 0.0)) throw ConfigError(r.field(key), "must be positive");
  return v;
}

double unit_fraction(ObjectReader& r, const std::string& key, double fallback) {
  const double v = r.get_or<double>(key, fallback);
  if (!(v > 0.0 && v < 1.0)) throw ConfigError(r.field(key), "must lie in (0, 1)");
  return v;
}

void parse_strategy(const json& j, const std::string& path, AisConfig& ais) {
  ObjectReader r(j, path);
  const std::string type = r.get<std::string>("type");
  if (type == "hybrid") {
    Hybrid h;
    h.T1 = r.positive("T1", 10);
    h.M_stage1 = r.positive("M_stage1", 10);
    h.r = r.positive("r", 2);
    if (h.r < 2) throw ConfigError(r.field("r"), "must be at least 2");
    h.eps_star = positive_real(r, "eps_star");
    h.alpha = unit_fraction(r, "alpha", 0.5);
    ais.strategy = h;
  } else if (type == "ess") {
    EssTarget e;
    e.alpha = unit_fraction(r, "alpha", 0.5);
    e.M = r.positive("M", 10);
    ais.eps_target = positive_real(r, "eps_target");
    ais.strategy = e;
  } else if (type == "median") {
    MedianShrink m;
    m.M = r.positive("M", 10);
    ais.eps_target = positive_real(r, "eps_target");
    ais.strategy = m;
  } else {
    throw ConfigError(r.field("type"), "expected 'hybrid', 'ess' or 'median'");
  }
  r.finish();
}

std::string fmt(double x) { return csv::format_double(x); }

std::filesystem::path prepare_output(const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  return dir;
}

std::ofstream open_csv(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

// Parallelism lives at the repetition level only; each repetition runs on one thread.
std::pair<unsigned, unsigned> split_threads(unsigned threads, std::size_t) { return {std::max(1u, threads), 1u}; }

Proposal load_is_proposal(const ExperimentConfig& config) {
  if (config.proposal_family == "prior") return PriorProposal{};
  std::ifstream in(*config.proposal_path);
  if (!in) throw ConfigError("proposal.path", "cannot open " + config.proposal_path->string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("proposal.path", std::string("invalid JSON: ") + e.what());
  }
  Proposal q = proposal_from_json(doc);
  if (proposal_kind(q) != config.proposal_family) {
    throw ConfigError("proposal.family", "does not match the stored proposal type '" +
                                             std::string(proposal_kind(q)) + "'");
  }
  return q;
}

double safe_estimate(const RunRecord& rec, const Estimand& phi, bool variance) {
  if (!(normalizing_constant(rec) > 0.0)) return kNaN;
  return variance ? posterior_variance(rec, phi) : posterior_estimate(rec, phi);
}

}  // namespace

ModelPtr make_model(const ModelSpec& spec) {
  if (spec.name == "toy") return toy_model(spec.dim);
  if (spec.name == "lotka-volterra") return lotka_volterra();
  if (spec.name == "tuberculosis") return tuberculosis();
  if (spec.name == "bimodal") return bimodal_model();
  throw ConfigError("model.name", "unknown model '" + spec.name + "'");
}

ExperimentConfig parse_config(const json& document) {
  ObjectReader r(document, "");
  ExperimentConfig c;
  c.name = r.get_or<std::string>("name", "");
  c.model = parse_model(r.raw("model"), "model");

  const std::string algorithm = r.get<std::string>("algorithm");
  if (algorithm == "is") {
    c.algorithm = Algorithm::IS;
  } else if (algorithm == "ais") {
    c.algorithm = Algorithm::AIS;
  } else {
    throw ConfigError("algorithm", "expected 'is' or 'ais'");
  }

  try {
    c.kind = parse_sequence_kind(r.get<std::string>("kind"));
  } catch (const std::invalid_argument& e) {
    if (dynamic_cast<const ConfigError*>(&e)) throw;
    throw ConfigError("kind", e.what());
  }
  c.n = r.positive("n");
  c.seed = r.get_or<std::uint64_t>("seed", 0);
  c.repetitions = r.positive("repetitions", 1);
  c.output = r.get_or<std::string>("output", "out");
  const std::size_t k_max = r.positive("k_max", 100'000);

  std::string family = c.algorithm == Algorithm::IS ? "prior" : "gaussian";
  if (r.has("proposal")) {
    ObjectReader p(r.raw("proposal"), "proposal");
    family = p.get<std::string>("family");
    if (c.algorithm == Algorithm::AIS) {
      if (family == "prior") throw ConfigError("proposal.family", "adaptive runs fit gaussian, mixture or particle_mixture");
      try {
        c.ais.family = parse_proposal_family(family);
      } catch (const std::invalid_argument& e) {
        throw ConfigError("proposal.family", e.what());
      }
      c.ais.mixture_components = static_cast<int>(p.positive("J", 2));
      c.ais.inflation = p.get_or<double>("lambda", 1.2);
      if (!(c.ais.inflation >= 1.0)) throw ConfigError("proposal.lambda", "must be >= 1");
      c.ais.em_restarts = static_cast<int>(p.positive("restarts", 5));
    } else {
      if (family != "prior" && family != "gaussian" && family != "mixture" && family != "particle_mixture") {
        throw ConfigError("proposal.family", "unknown proposal family '" + family + "'");
      }
      if (family != "prior") c.proposal_path = p.get<std::string>("path");
    }
    p.finish();
  }
  if (family == "particle_mixture" && is_low_discrepancy(c.kind)) {
    throw ConfigError("proposal.family", "particle_mixture cannot be combined with QMC/RQMC point sets");
  }
  c.proposal_family = family;

  if (c.algorithm == Algorithm::IS) {
    c.epsilon = positive_real(r, "epsilon");
    c.scheme = r.has("scheme") ? parse_scheme(r.raw("scheme"), "scheme", k_max) : WeightScheme{FixedM{1}};
    if (r.has("strategy")) throw ConfigError("strategy", "only valid for algorithm 'ais'");
  } else {
    if (r.has("epsilon")) throw ConfigError("epsilon", "only valid for algorithm 'is'; use strategy thresholds");
    if (r.has("scheme")) throw ConfigError("scheme", "only valid for algorithm 'is'");
    parse_strategy(r.raw("strategy"), "strategy", c.ais);
    c.ais.n = c.n;
    c.ais.kind = c.kind;
    c.ais.seed = c.seed;
    c.ais.k_max = k_max;
    c.ais.max_iterations = r.positive("max_iterations", 100);
    if (r.has("sim_budget")) c.ais.sim_budget = r.positive("sim_budget");
    if (c.n < 10) throw ConfigError("n", "adaptive runs need at least 10 particles");
  }
  r.finish();
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("--config", "cannot open " + path.string());
  json doc;
  try {
    in >> doc;
  } catch (const json::exception& e) {
    throw ConfigError("--config", std::string("invalid JSON: ") + e.what());
  }
  return parse_config(doc);
}

unsigned resolve_threads(std::optional<unsigned> flag) {
  if (flag) return std::max(1u, *flag);
  if (const char* env = std::getenv("QMCABC_THREADS"); env && *env) {
    const long v = std::strtol(env, nullptr, 10);
    if (v >= 1) return static_cast<unsigned>(v);
  }
  return 1;
}

std::vector<IsRepetition> run_is_repetitions(const ExperimentConfig& config, unsigned threads) {
  const ModelPtr model = make_model(config.model);
  const Proposal proposal = load_is_proposal(config);
  const auto [outer, inner] = split_threads(threads, config.repetitions);
  std::vector<IsRepetition> reps(config.repetitions);
  parallel_for(config.repetitions, outer, [&](std::size_t r) {
    IsRepetition& rep = reps[r];
    rep.record = run_is(*model, proposal, config.scheme, config.epsilon, config.n, config.kind, config.seed + r,
                        RunOptions{inner});
    const Estimand phi = [&](const Vector& t) { return model->estimand(t); };
    rep.phi_mean = safe_estimate(rep.record, phi, false);
    rep.phi_var = safe_estimate(rep.record, phi, true);
  });
  return reps;
}

std::vector<AisRepetition> run_ais_repetitions(const ExperimentConfig& config, unsigned threads) {
  const ModelPtr model = make_model(config.model);
  const auto [outer, inner] = split_threads(threads, config.repetitions);
  std::vector<AisRepetition> reps(config.repetitions);
  parallel_for(config.repetitions, outer, [&](std::size_t r) {
    AisConfig ais = config.ais;
    ais.seed = config.seed + r;
    ais.threads = inner;
    AisRepetition& rep = reps[r];
    rep.result = run_ais(*model, ais);
    const Estimand phi = [&](const Vector& t) { return model->estimand(t); };
    for (const auto& rec : rep.result.records) {
      rep.phi_mean.push_back(safe_estimate(rec, phi, false));
      rep.phi_var.push_back(safe_estimate(rec, phi, true));
    }
  });
  return reps;
}

int cmd_run_is(const ExperimentConfig& config, unsigned threads) {
  if (config.algorithm != Algorithm::IS) throw ConfigError("algorithm", "run-is requires algorithm 'is'");
  const std::vector<IsRepetition> reps = run_is_repetitions(config, threads);
  const auto dir = prepare_output(config.output);
  const ModelPtr model = make_model(config.model);
  const Estimand phi = [&](const Vector& t) { return model->estimand(t); };
  const auto* fixed = std::get_if<FixedM>(&config.scheme);
  const bool with_variance = fixed && fixed->M >= 2;

  int exit_code = 0;
  {
    auto out = open_csv(dir / "particles.csv");
    out << "repetition,index";
    for (int j = 0; j < model->theta_dim(); ++j) out << ",theta_" << (j + 1);
    out << ",l_hat,weight,sims\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& ps = reps[r].record.particles;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        out << r << ',' << i;
        for (Eigen::Index j = 0; j < ps[i].theta.size(); ++j) out << ',' << fmt(ps[i].theta[j]);
        out << ',' << fmt(ps[i].l_hat) << ',' << fmt(ps[i].weight) << ',' << ps[i].sims_used << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "summary.csv");
    out << "repetition,seed,epsilon,z_hat,ess,sims,phi_mean,phi_var,var_hat_z,sigma2_mixed,var_hat_phi,"
           "truncated_fraction,degenerate\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const RunRecord& rec = reps[r].record;
      double vz = kNaN, s2 = kNaN, vphi = kNaN;
      if (with_variance) {
        vz = var_hat_z(rec);
        if (!rec.degenerate) {
          s2 = var_hat_phi(rec, phi);
          vphi = s2 / static_cast<double>(rec.particles.size());
        }
      }
      if (rec.degenerate) exit_code = 1;
      out << r << ',' << (config.seed + r) << ',' << fmt(rec.epsilon) << ',' << fmt(rec.z_hat) << ',' << fmt(rec.ess)
          << ',' << rec.cumulative_sims << ',' << fmt(reps[r].phi_mean) << ',' << fmt(reps[r].phi_var) << ','
          << fmt(vz) << ',' << fmt(s2) << ',' << fmt(vphi) << ',' << fmt(rec.truncated_fraction) << ','
          << (rec.degenerate ? 1 : 0) << '\n';
    }
  }
  if (reps.size() >= 2) {
    std::vector<double> z, mean, var, sims;
    for (const auto& rep : reps) {
      z.push_back(rep.record.z_hat);
      mean.push_back(rep.phi_mean);
      var.push_back(rep.phi_var);
      sims.push_back(static_cast<double>(rep.record.cumulative_sims));
    }
    const double factor = fixed ? static_cast<double>(fixed->M) : summarize(z, sims).mean_sims;
    std::optional<double> z_reference;
    if (config.model.name == "toy" && config.model.dim == 1 && config.proposal_family == "prior") {
      z_reference = toy_normalizing_constant(config.epsilon);
    }
    auto out = open_csv(dir / "repetitions.csv");
    out << "estimand,epsilon,estimate,variance,mse,sims,adjusted\n";
    auto row = [&](const char* label, const std::vector<double>& values, std::optional<double> reference) {
      const RepetitionSummary s = summarize(values, sims, reference, factor);
      out << label << ',' << fmt(config.epsilon) << ',' << fmt(s.mean) << ',' << fmt(s.empirical_variance) << ','
          << fmt(s.empirical_mse.value_or(kNaN)) << ',' << fmt(s.mean_sims) << ',' << fmt(s.adjusted) << '\n';
    };
    row("z_hat", z, z_reference);
    row("phi_mean", mean, model->estimand_posterior_mean());
    row("phi_var", var, std::nullopt);
  }
  return exit_code;
}

int cmd_run_smc(const ExperimentConfig& config, unsigned threads) {
  if (config.algorithm != Algorithm::AIS) throw ConfigError("algorithm", "run-smc requires algorithm 'ais'");
  const std::vector<AisRepetition> reps = run_ais_repetitions(config, threads);
  const auto dir = prepare_output(config.output);
  int exit_code = 0;
  {
    auto out = open_csv(dir / "trace.csv");
    out << "repetition,t,epsilon,scheme,z_hat,ess,iteration_sims,cumulative_sims,phi_mean,phi_var,"
           "truncated_fraction,ess_shortfall\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& records = reps[r].result.records;
      for (std::size_t t = 0; t < records.size(); ++t) {
        const RunRecord& rec = records[t];
        out << r << ',' << rec.iteration << ',' << fmt(rec.epsilon) << ',' << describe(rec.scheme) << ','
            << fmt(rec.z_hat) << ',' << fmt(rec.ess) << ',' << rec.iteration_sims << ',' << rec.cumulative_sims << ','
            << fmt(reps[r].phi_mean[t]) << ',' << fmt(reps[r].phi_var[t]) << ',' << fmt(rec.truncated_fraction)
            << ',' << (rec.ess_shortfall ? 1 : 0) << '\n';
      }
    }
  }
  {
    auto out = open_csv(dir / "summary.csv");
    out << "repetition,seed,iterations,eps_T,cumulative_sims,phi_mean,phi_var,stop\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const AisResult& res = reps[r].result;
      const RunRecord& last = res.records.back();
      if (res.stop == StopReason::Degenerate || res.stop == StopReason::Stalled) exit_code = 1;
      out << r << ',' << (config.seed + r) << ',' << last.iteration << ',' << fmt(last.epsilon) << ','
          << last.cumulative_sims << ',' << fmt(reps[r].phi_mean.back()) << ',' << fmt(reps[r].phi_var.back()) << ','
          << to_string(res.stop) << '\n';
    }
  }
  {
    auto out = open_csv(dir / "particles.csv");
    const int d = config.model.dim;
    out << "repetition,index";
    for (int j = 0; j < d; ++j) out << ",theta_" << (j + 1);
    out << ",weight\n";
    for (std::size_t r = 0; r < reps.size(); ++r) {
      const auto& ps = reps[r].result.records.back().particles;
      for (std::size_t i = 0; i < ps.size(); ++i) {
        out << r << ',' << i;
        for (Eigen::Index j = 0; j < ps[i].theta.size(); ++j) out << ',' << fmt(ps[i].theta[j]);
        out << ',' << fmt(ps[i].weight) << '\n';
      }
    }
  }
  return exit_code;
}

int cmd_bench(const json& config_set, const std::filesystem::path& output, unsigned threads,
              std::optional<std::uint64_t> seed_override) {
  ObjectReader r(config_set, "");
  std::optional<double> ref_mean, ref_var;
  if (r.has("reference")) {
    ObjectReader ref(r.raw("reference"), "reference");
    if (ref.has("mean")) ref_mean = ref.get<double>("mean");
    if (ref.has("var")) ref_var = ref.get<double>("var");
    ref.get_or<double>("mean", 0.0);
    ref.get_or<double>("var", 0.0);
    ref.finish();
  }
  const json& methods = r.raw("methods");
  r.finish();
  if (!methods.is_array() || methods.size() < 2) throw ConfigError("methods", "need at least two method configs");

  std::vector<ExperimentConfig> configs;
  for (std::size_t i = 0; i < methods.size(); ++i) {
    try {
      configs.push_back(parse_config(methods[i]));
    } catch (const ConfigError& e) {
      throw ConfigError("methods[" + std::to_string(i) + "]." + e.field(), e.what());
    }
    if (seed_override) {
      configs.back().seed = *seed_override;
      configs.back().ais.seed = *seed_override;
    }
    if (configs.back().name.empty()) configs.back().name = "method" + std::to_string(i);
    if (!(configs.back().model == configs.front().model)) {
      throw ConfigError("methods[" + std::to_string(i) + "].model", "all methods must share one model");
    }
  }
  const ModelPtr model = make_model(configs.front().model);
  if (!ref_mean) ref_mean = model->estimand_posterior_mean();

  struct Terminal {
    std::vector<double> mean, var, sims, eps;
  };
  std::vector<Terminal> terminals(configs.size());
  int exit_code = 0;
  for (std::size_t m = 0; m < configs.size(); ++m) {
    Terminal& t = terminals[m];
    if (configs[m].algorithm == Algorithm::IS) {
      for (const auto& rep : run_is_repetitions(configs[m], threads)) {
        t.mean.push_back(rep.phi_mean);
        t.var.push_back(rep.phi_var);
        t.sims.push_back(static_cast<double>(rep.record.cumulative_sims));
        t.eps.push_back(rep.record.epsilon);
        if (rep.record.degenerate) exit_code = 1;
      }
    } else {
      for (const auto& rep : run_ais_repetitions(configs[m], threads)) {
        t.mean.push_back(rep.phi_mean.back());
        t.var.push_back(rep.phi_var.back());
        t.sims.push_back(static_cast<double>(rep.result.records.back().cumulative_sims));
        t.eps.push_back(rep.result.records.back().epsilon);
        if (rep.result.stop == StopReason::Degenerate || rep.result.stop == StopReason::Stalled) exit_code = 1;
      }
    }
  }

  // Without a supplied or analytic reference, the pooled mean over all methods stands in.
  auto pooled = [&](auto member) {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto& t : terminals) {
      for (double v : t.*member) {
        if (std::isfinite(v)) {
          sum += v;
          ++count;
        }
      }
    }
    return count ? sum / static_cast<double>(count) : kNaN;
  };
  if (!ref_mean) ref_mean = pooled(&Terminal::mean);
  if (!ref_var) ref_var = pooled(&Terminal::var);

  auto mse = [](const std::vector<double>& v, double ref) {
    double s = 0.0;
    for (double x : v) s += (x - ref) * (x - ref);
    return s / static_cast<double>(v.size());
  };
  auto mean_of = [](const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x;
    return s / static_cast<double>(v.size());
  };

  prepare_output(output);
  {
    auto out = open_csv(output / "bench.csv");
    out << "method,mse_mean,mse_var,sims,eps_T\n";
    for (std::size_t m = 0; m < configs.size(); ++m) {
      const Terminal& t = terminals[m];
      out << configs[m].name << ',' << fmt(mse(t.mean, *ref_mean)) << ',' << fmt(mse(t.var, *ref_var)) << ','
          << fmt(mean_of(t.sims)) << ',' << fmt(mean_of(t.eps)) << '\n';
    }
  }
  {
    auto out = open_csv(output / "bench_repetitions.csv");
    out << "method,repetition,phi_mean,phi_var,sims,eps_T\n";
    for (std::size_t m = 0; m < configs.size(); ++m) {
      const Terminal& t = terminals[m];
      for (std::size_t i = 0; i < t.mean.size(); ++i) {
        out << configs[m].name << ',' << i << ',' << fmt(t.mean[i]) << ',' << fmt(t.var[i]) << ',' << fmt(t.sims[i])
            << ',' << fmt(t.eps[i]) << '\n';
      }
    }
  }
  return exit_code;
}

std::string format_plain(double x) {
  if (!std::isfinite(x)) return csv::format_double(x);
  if (x == 0.0) return "0";
  const int exponent = static_cast<int>(std::floor(std::log10(std::fabs(x))));
  const int decimals = std::max(0, 16 - exponent);
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.*f", decimals, x);
  return buffer;
}

void cmd_sequence(SequenceKind kind, int dim, std::size_t n, std::optional<std::uint64_t> seed, std::ostream& out) {
  const PointSet ps = generate(kind, dim, n, seed);
  for (std::size_t i = 0; i < ps.size(); ++i) {
    for (int j = 0; j < dim; ++j) {
      if (j) out << ',';
      out << format_plain(ps.points(static_cast<Eigen::Index>(i), j));
    }
    out << '\n';
  }
}

void cmd_models_list(std::ostream& out) {
  out << "name,theta_dim,description\n";
  const ModelPtr models[] = {toy_model(1), lotka_volterra(), tuberculosis(), bimodal_model()};
  for (const auto& m : models) {
    out << m->name() << ',' << (m->name() == "toy" ? std::string("d") : std::to_string(m->theta_dim())) << ",\""
        << m->description() << "\"\n";
  }
}

}  // namespace qmcabc
