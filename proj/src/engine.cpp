#include "qmcabc/engine.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>
#include <stdexcept>

#include "qmcabc/parallel.hpp"

namespace qmcabc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kPointsTag = 0x504f494eULL;
constexpr std::uint64_t kSimulationTag = 0x53494d55ULL;
constexpr std::uint64_t kFitTag = 0x46495454ULL;
constexpr double kInfinity = std::numeric_limits<double>::infinity();

std::uint64_t particle_stream_id(std::size_t iteration, std::size_t index) {
  return (static_cast<std::uint64_t>(iteration) << 32) | static_cast<std::uint64_t>(index);
}

Proposal fit_proposal(ProposalFamily family, const WeightedSample& sample, const AisConfig& config,
                      std::size_t iteration) {
  switch (family) {
    case ProposalFamily::Gaussian:
      return fit_gaussian(sample);
    case ProposalFamily::Mixture: {
      UniformStream stream(derive_seed(config.seed, kFitTag, iteration), 0);
      return fit_mixture_em(sample, config.mixture_components, config.inflation, config.em_restarts, stream);
    }
    case ProposalFamily::ParticleMixture:
      return fit_particle_mixture(sample);
  }
  throw std::logic_error("unknown proposal family");
}

}  // namespace

std::vector<double> RunRecord::weights() const {
  std::vector<double> w;
  w.reserve(particles.size());
  for (const auto& p : particles) w.push_back(p.weight);
  return w;
}

RunRecord run_iteration(const Model& model, const Proposal& proposal, const WeightScheme& scheme, double eps,
                        std::size_t n, SequenceKind kind, std::uint64_t seed, std::size_t iteration,
                        std::size_t cumulative_before, const RunOptions& options) {
  if (n < 1) throw std::invalid_argument("particle count must be at least 1");
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  validate(scheme);
  if (is_low_discrepancy(kind) && std::holds_alternative<ParticleMixtureProposal>(proposal)) {
    throw std::invalid_argument("particle-mixture proposals cannot be driven by QMC/RQMC point sets");
  }

  const PointSet points = generate(kind, model.theta_dim(), n, derive_seed(seed, kPointsTag, iteration));
  const Matrix thetas = sample_proposal(proposal, model, points);
  const std::uint64_t sim_seed = derive_seed(seed, kSimulationTag);

  RunRecord rec;
  rec.iteration = iteration;
  rec.epsilon = eps;
  rec.proposal = proposal;
  rec.scheme = scheme;
  rec.kind = kind;
  rec.particles.resize(n);
  parallel_for(n, options.threads, [&](std::size_t i) {
    Particle& p = rec.particles[i];
    p.theta = thetas.row(static_cast<Eigen::Index>(i)).transpose();
    const double prior = model.prior_density(p.theta);
    if (prior <= 0.0) return;
    const double q = proposal_density(proposal, model, p.theta);
    if (!(q > 0.0)) return;
    p.prior_ratio = prior / q;
    UniformStream stream(sim_seed, particle_stream_id(iteration, i));
    WeightResult w = estimate_acceptance(model, p.theta, eps, scheme, stream);
    p.l_hat = w.l_hat;
    p.sims_used = w.sims_used;
    p.distances = std::move(w.distances);
    p.truncated = w.truncated;
    p.weight = p.prior_ratio * p.l_hat;
  });

  std::size_t truncated = 0;
  for (const auto& p : rec.particles) {
    rec.iteration_sims += p.sims_used;
    if (p.truncated) ++truncated;
  }
  rec.cumulative_sims = cumulative_before + rec.iteration_sims;
  rec.truncated_fraction = static_cast<double>(truncated) / static_cast<double>(n);
  const std::vector<double> w = rec.weights();
  rec.z_hat = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(n);
  rec.ess = ess(w);
  rec.degenerate = !(rec.z_hat > 0.0);
  return rec;
}

RunRecord run_is(const Model& model, const Proposal& proposal, const WeightScheme& scheme, double eps, std::size_t n,
                 SequenceKind kind, std::uint64_t seed, const RunOptions& options) {
  return run_iteration(model, proposal, scheme, eps, n, kind, seed, 0, 0, options);
}

double posterior_estimate(const RunRecord& rec, const Estimand& phi) {
  // Accumulate offsets from the first weighted value, so constant estimands come back exactly.
  std::optional<double> origin;
  double num = 0.0, den = 0.0;
  for (const auto& p : rec.particles) {
    if (p.weight == 0.0) continue;
    const double v = phi(p.theta);
    if (!origin) origin = v;
    num += p.weight * (v - *origin);
    den += p.weight;
  }
  if (!(den > 0.0)) throw std::domain_error("posterior_estimate: record has no positive weight");
  return *origin + num / den;
}

double posterior_variance(const RunRecord& rec, const Estimand& phi) {
  const double mean = posterior_estimate(rec, phi);
  return posterior_estimate(rec, [&](const Vector& theta) {
    const double c = phi(theta) - mean;
    return c * c;
  });
}

double ess(std::span<const double> weights) {
  double sum = 0.0, sum_sq = 0.0;
  for (double w : weights) {
    sum += w;
    sum_sq += w * w;
  }
  return sum_sq > 0.0 ? sum * sum / sum_sq : 0.0;
}

double normalizing_constant(const RunRecord& rec) {
  if (rec.particles.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& p : rec.particles) sum += p.weight;
  return sum / static_cast<double>(rec.particles.size());
}

std::vector<double> rethreshold_weights(std::span<const Particle> particles, std::size_t M, double eps) {
  std::vector<double> w(particles.size(), 0.0);
  for (std::size_t i = 0; i < particles.size(); ++i) {
    const auto& d = particles[i].distances;
    const auto hits = std::count_if(d.begin(), d.end(), [eps](double x) { return x <= eps; });
    w[i] = particles[i].prior_ratio * static_cast<double>(hits) / static_cast<double>(M);
  }
  return w;
}

EssEpsilon adapt_epsilon_ess(std::span<const Particle> particles, std::size_t M, double target, double upper) {
  if (M < 1) throw std::invalid_argument("adapt_epsilon_ess: M must be at least 1");
  if (!(target > 0.0)) throw std::invalid_argument("adapt_epsilon_ess: target ESS must be positive");
  std::vector<double> candidates;
  for (const auto& p : particles) {
    if (p.prior_ratio <= 0.0) continue;  // outside the prior support, never simulated
    if (p.distances.size() != M) throw std::invalid_argument("adapt_epsilon_ess: particle lacks M stored distances");
    for (double d : p.distances) {
      if (std::isfinite(d) && d < upper) candidates.push_back(d);
    }
  }
  std::sort(candidates.begin(), candidates.end());
  candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
  if (candidates.empty()) return {std::isfinite(upper) ? upper : 0.0, 0.0, true};

  auto ess_at = [&](std::size_t k) { return ess(rethreshold_weights(particles, M, candidates[k])); };
  const double top = ess_at(candidates.size() - 1);
  if (top < target) return {candidates.back(), top, true};

  // Invariant: ESS(candidates[lo]) < target <= ESS(candidates[hi]); lo = -1 stands for eps below every distance.
  std::ptrdiff_t lo = -1;
  auto hi = static_cast<std::ptrdiff_t>(candidates.size()) - 1;
  double hi_ess = top;
  while (hi - lo > 1) {
    const std::ptrdiff_t mid = lo + (hi - lo) / 2;
    const double e = ess_at(static_cast<std::size_t>(mid));
    if (e >= target) {
      hi = mid;
      hi_ess = e;
    } else {
      lo = mid;
    }
  }
  return {candidates[static_cast<std::size_t>(hi)], hi_ess, false};
}

double adapt_epsilon_median(std::span<const double> accepted_distances) {
  if (accepted_distances.empty()) throw std::invalid_argument("adapt_epsilon_median: no distances");
  std::vector<double> d(accepted_distances.begin(), accepted_distances.end());
  const std::size_t k = (d.size() - 1) / 2;
  std::nth_element(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
  return d[k];
}

std::string_view to_string(ProposalFamily family) {
  switch (family) {
    case ProposalFamily::Gaussian: return "gaussian";
    case ProposalFamily::Mixture: return "mixture";
    case ProposalFamily::ParticleMixture: return "particle_mixture";
  }
  return "unknown";
}

ProposalFamily parse_proposal_family(std::string_view name) {
  if (name == "gaussian") return ProposalFamily::Gaussian;
  if (name == "mixture") return ProposalFamily::Mixture;
  if (name == "particle_mixture") return ProposalFamily::ParticleMixture;
  throw std::invalid_argument("unknown proposal family '" + std::string(name) + "'");
}

std::string_view to_string(StopReason reason) {
  switch (reason) {
    case StopReason::TargetReached: return "target_reached";
    case StopReason::Degenerate: return "degenerate";
    case StopReason::IterationCap: return "iteration_cap";
    case StopReason::BudgetExhausted: return "budget_exhausted";
    case StopReason::Stalled: return "stalled";
  }
  return "unknown";
}

void validate(const AisConfig& config) {
  if (config.n < 10) throw std::invalid_argument("run_ais: need at least 10 particles");
  if (is_low_discrepancy(config.kind) && config.family == ProposalFamily::ParticleMixture) {
    throw std::invalid_argument("run_ais: particle-mixture proposals require MC sampling");
  }
  if (config.max_iterations < 1) throw std::invalid_argument("run_ais: max_iterations must be positive");
  std::visit(overloaded{[](const EssTarget& s) {
                          if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw std::invalid_argument("ESS alpha must lie in (0,1)");
                          if (s.M < 1) throw std::invalid_argument("ESS strategy needs M >= 1");
                        },
                        [](const MedianShrink& s) {
                          if (s.M < 1) throw std::invalid_argument("median strategy needs M >= 1");
                        },
                        [&](const Hybrid& s) {
                          if (!(s.alpha > 0.0 && s.alpha < 1.0)) throw std::invalid_argument("ESS alpha must lie in (0,1)");
                          if (s.T1 < 1) throw std::invalid_argument("hybrid T1 must be at least 1");
                          if (s.M_stage1 < 1) throw std::invalid_argument("hybrid M_stage1 must be at least 1");
                          if (!(s.eps_star > 0.0)) throw std::invalid_argument("hybrid eps_star must be positive");
                          validate(NegBinomial{s.r, config.k_max});
                        }},
             config.strategy);
}

AisResult run_ais(const Model& model, const AisConfig& config) {
  validate(config);
  const RunOptions options{config.threads};

  struct Stage {
    WeightScheme scheme;
    bool ess_rule;
    double alpha;
  };
  auto stage_for = [&](std::size_t t) -> Stage {
    return std::visit(
        overloaded{[](const EssTarget& s) { return Stage{FixedM{s.M}, true, s.alpha}; },
                   [](const MedianShrink& s) { return Stage{FixedM{s.M}, false, 0.0}; },
                   [&](const Hybrid& s) {
                     if (t <= s.T1) return Stage{FixedM{s.M_stage1}, true, s.alpha};
                     return Stage{NegBinomial{s.r, config.k_max}, false, 0.0};
                   }},
        config.strategy);
  };
  const double eps_stop =
      std::holds_alternative<Hybrid>(config.strategy) ? std::get<Hybrid>(config.strategy).eps_star : config.eps_target;

  AisResult result;
  // Iteration 0: prior draws with unit weights; the simulations seed the first threshold.
  {
    RunRecord rec0 = run_iteration(model, PriorProposal{}, stage_for(0).scheme, kInfinity, config.n, config.kind,
                                   config.seed, 0, 0, options);
    for (auto& p : rec0.particles) {
      p.weight = 1.0;
      p.l_hat = 1.0;
    }
    rec0.z_hat = 1.0;
    rec0.ess = static_cast<double>(config.n);
    rec0.degenerate = false;
    result.records.push_back(std::move(rec0));
  }

  for (std::size_t t = 1; t <= config.max_iterations; ++t) {
    const RunRecord& prev = result.records.back();
    const Stage stage = stage_for(t);
    const auto* prev_fixed = std::get_if<FixedM>(&prev.scheme);

    // eps_t comes from the previous particles' stored distances, before the new draw.
    double eps = 0.0;
    bool shortfall = false;
    if (stage.ess_rule) {
      if (!prev_fixed) throw std::logic_error("ESS adaptation requires fixed-M distances from the previous iteration");
      const EssEpsilon e = adapt_epsilon_ess(prev.particles, prev_fixed->M,
                                             stage.alpha * static_cast<double>(config.n), prev.epsilon);
      eps = e.epsilon;
      shortfall = e.shortfall;
      if (!(eps > 0.0)) {
        result.stop = StopReason::Stalled;
        return result;
      }
    } else {
      std::vector<double> pooled;
      for (const auto& p : prev.particles) {
        for (double d : p.distances) {
          if (d <= prev.epsilon && std::isfinite(d)) pooled.push_back(d);
        }
      }
      if (pooled.empty()) {
        result.stop = StopReason::Stalled;
        return result;
      }
      eps = adapt_epsilon_median(pooled);
      if (eps >= prev.epsilon) {
        // Ties at the previous threshold: fall back to the largest distance strictly below it.
        double below = -kInfinity;
        for (double d : pooled) {
          if (d < prev.epsilon) below = std::max(below, d);
        }
        eps = below;
      }
      if (!(eps > 0.0)) {
        result.stop = StopReason::Stalled;
        return result;
      }
    }

    // Fit q_t to the previous particles, re-thresholded at eps_t when their distances allow it.
    std::vector<double> fit_weights = prev_fixed ? rethreshold_weights(prev.particles, prev_fixed->M, eps) : prev.weights();
    if (ess(fit_weights) < config.degenerate_ess) fit_weights = prev.weights();
    Matrix particles(static_cast<Eigen::Index>(config.n), model.theta_dim());
    for (std::size_t i = 0; i < config.n; ++i) particles.row(static_cast<Eigen::Index>(i)) = prev.particles[i].theta.transpose();
    const WeightedSample sample(std::move(particles), Eigen::Map<const Vector>(fit_weights.data(), static_cast<Eigen::Index>(fit_weights.size())));
    const Proposal proposal = fit_proposal(config.family, sample, config, t);

    RunRecord rec = run_iteration(model, proposal, stage.scheme, eps, config.n, config.kind, config.seed, t,
                                  prev.cumulative_sims, options);
    rec.ess_shortfall = shortfall;
    const bool degenerate = rec.ess < config.degenerate_ess;
    rec.degenerate = rec.degenerate || degenerate;
    result.records.push_back(std::move(rec));
    const RunRecord& last = result.records.back();

    if (degenerate) {
      result.stop = StopReason::Degenerate;
      return result;
    }
    if (last.epsilon <= eps_stop) {
      result.stop = StopReason::TargetReached;
      return result;
    }
    if (config.sim_budget && last.cumulative_sims >= *config.sim_budget) {
      result.stop = StopReason::BudgetExhausted;
      return result;
    }
  }
  result.stop = StopReason::IterationCap;
  return result;
}

}  // namespace qmcabc
