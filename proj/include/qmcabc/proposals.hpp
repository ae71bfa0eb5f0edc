#pragma once

#include <cstddef>
#include <span>
#include <variant>
#include <vector>

#include <json.hpp>

#include "qmcabc/lds.hpp"
#include "qmcabc/models.hpp"
#include "qmcabc/transform.hpp"

namespace qmcabc {

/// Particles (one per row) with nonnegative weights.
struct WeightedSample {
  Matrix particles;
  Vector weights;

  WeightedSample(Matrix particles_, Vector weights_);
  std::size_t size() const { return static_cast<std::size_t>(particles.rows()); }
  int dim() const { return static_cast<int>(particles.cols()); }
};

struct PriorProposal {};

struct GaussianProposal {
  GaussianParams params;
};

/// sum_j weights[j] N(means_j, inflation * Sigma_j); `components` hold the inflated covariances.
struct MixtureProposal {
  std::vector<double> weights;
  std::vector<GaussianParams> components;
  std::vector<Matrix> covariances;
  double inflation = 1.0;
};

/// sum_n weights[n] N(particles_n, 2 Sigma-hat); `kernel` is N(0, 2 Sigma-hat).
struct ParticleMixtureProposal {
  Matrix particles;
  std::vector<double> weights;
  GaussianParams kernel;
};

using Proposal = std::variant<PriorProposal, GaussianProposal, MixtureProposal, ParticleMixtureProposal>;

std::string_view proposal_kind(const Proposal& q);

/// Weighted mean and weighted (normalized-weight, MLE) covariance.
std::pair<Vector, Matrix> weighted_moments(const WeightedSample& s);

GaussianProposal fit_gaussian(const WeightedSample& s);

struct EmOptions {
  double relative_tolerance = 1e-8;
  int max_iterations = 500;
};

/// Weighted-data Gaussian mixture fit before inflation.
struct GmmFit {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  double log_likelihood = 0.0;
  /// Weighted log-likelihood after each E-step of the winning restart.
  std::vector<double> log_likelihood_trace;
};

/// Best of `restarts` EM runs (weighted k-means++ seeding). A component whose weight falls below
/// 1/(10N) is dropped and the fit is redone with one component fewer.
GmmFit fit_gmm_em(const WeightedSample& s, int components, int restarts, UniformStream& stream,
                  const EmOptions& options = {});
MixtureProposal mixture_from_fit(const GmmFit& fit, double inflation);
MixtureProposal fit_mixture_em(const WeightedSample& s, int components, double inflation, int restarts,
                               UniformStream& stream, const EmOptions& options = {});

ParticleMixtureProposal fit_particle_mixture(const WeightedSample& s);

/// floor(weights_j * n) plus largest-remainder top-up so the counts sum to n (ties go to the lower index).
std::vector<std::size_t> allocate_counts(std::span<const double> weights, std::size_t n);

/// One sample per point-set row. Mixture components take contiguous sub-blocks of the point set.
/// ParticleMixture only accepts MC point sets.
Matrix sample_proposal(const Proposal& q, const Model& model, const PointSet& points);

double proposal_density(const Proposal& q, const Model& model, const Vector& theta);

nlohmann::json to_json(const Proposal& q);
Proposal proposal_from_json(const nlohmann::json& j);

}  // namespace qmcabc
