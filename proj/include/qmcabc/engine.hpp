#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "qmcabc/lds.hpp"
#include "qmcabc/models.hpp"
#include "qmcabc/proposals.hpp"
#include "qmcabc/weighting.hpp"

namespace qmcabc {

struct Particle {
  Vector theta;
  double l_hat = 0.0;
  /// p(theta) / q(theta); zero outside the prior support.
  double prior_ratio = 0.0;
  double weight = 0.0;
  std::size_t sims_used = 0;
  std::vector<double> distances;
  bool truncated = false;
};

struct RunRecord {
  std::size_t iteration = 0;
  double epsilon = 0.0;
  std::vector<Particle> particles;
  double z_hat = 0.0;
  double ess = 0.0;
  std::size_t iteration_sims = 0;
  std::size_t cumulative_sims = 0;
  Proposal proposal = PriorProposal{};
  WeightScheme scheme = FixedM{1};
  SequenceKind kind = SequenceKind::MC;
  bool degenerate = false;
  /// Set when the ESS-based threshold could not reach the target ESS.
  bool ess_shortfall = false;
  double truncated_fraction = 0.0;

  std::vector<double> weights() const;
};

struct RunOptions {
  unsigned threads = 1;
};

/// Importance sampler with pseudo-marginal weights: theta_n from the (R)QMC/MC point set pushed
/// through the proposal, simulator noise from per-particle counter streams.
RunRecord run_is(const Model& model, const Proposal& proposal, const WeightScheme& scheme, double eps, std::size_t n,
                 SequenceKind kind, std::uint64_t seed, const RunOptions& options = {});

/// One weighting pass; `iteration` keys both the point-set seed and the particle streams.
RunRecord run_iteration(const Model& model, const Proposal& proposal, const WeightScheme& scheme, double eps,
                        std::size_t n, SequenceKind kind, std::uint64_t seed, std::size_t iteration,
                        std::size_t cumulative_before, const RunOptions& options = {});

using Estimand = std::function<double(const Vector&)>;

/// Self-normalized estimate sum w phi / sum w.
double posterior_estimate(const RunRecord& rec, const Estimand& phi);
/// Posterior variance of phi under the weighted sample.
double posterior_variance(const RunRecord& rec, const Estimand& phi);

double ess(std::span<const double> weights);
double normalizing_constant(const RunRecord& rec);

struct EssEpsilon {
  double epsilon = 0.0;
  double ess = 0.0;
  bool shortfall = false;
};

/// Bisection over the stored distances for the threshold at which the re-thresholded ESS first
/// reaches `target`. Candidates are restricted to distances strictly below `upper`.
EssEpsilon adapt_epsilon_ess(std::span<const Particle> particles, std::size_t M, double target,
                             double upper = std::numeric_limits<double>::infinity());

/// Lower median.
double adapt_epsilon_median(std::span<const double> accepted_distances);

/// Weights recomputed at threshold eps from stored fixed-M distances.
std::vector<double> rethreshold_weights(std::span<const Particle> particles, std::size_t M, double eps);

struct EssTarget {
  double alpha = 0.5;
  std::size_t M = 10;
};

struct MedianShrink {
  std::size_t M = 10;
};

/// Fixed-M weights with ESS thresholds up to iteration T1, then negative-binomial weights with the
/// median rule, stopping once eps <= eps_star.
struct Hybrid {
  std::size_t T1 = 10;
  std::size_t M_stage1 = 10;
  std::size_t r = 2;
  double eps_star = 1.0;
  double alpha = 0.5;
};

using EpsilonStrategy = std::variant<EssTarget, MedianShrink, Hybrid>;

enum class ProposalFamily { Gaussian, Mixture, ParticleMixture };
std::string_view to_string(ProposalFamily family);
ProposalFamily parse_proposal_family(std::string_view name);

struct AisConfig {
  std::size_t n = 1000;
  SequenceKind kind = SequenceKind::RqmcOwen;
  std::uint64_t seed = 0;
  EpsilonStrategy strategy = Hybrid{};
  ProposalFamily family = ProposalFamily::Gaussian;
  int mixture_components = 2;
  double inflation = 1.2;
  int em_restarts = 5;
  /// Stopping threshold for the EssTarget and MedianShrink strategies.
  double eps_target = 0.0;
  std::size_t k_max = 100'000;
  std::size_t max_iterations = 100;
  std::optional<std::size_t> sim_budget;
  double degenerate_ess = 2.0;
  unsigned threads = 1;
};

enum class StopReason { TargetReached, Degenerate, IterationCap, BudgetExhausted, Stalled };
std::string_view to_string(StopReason reason);

struct AisResult {
  std::vector<RunRecord> records;
  StopReason stop = StopReason::IterationCap;
};

void validate(const AisConfig& config);
AisResult run_ais(const Model& model, const AisConfig& config);

}  // namespace qmcabc
