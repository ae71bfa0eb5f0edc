#include "qmcabc/proposals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace qmcabc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::uint64_t kAncestorTag = 0x414e4345ULL;

double log_sum_exp(std::span<const double> x) {
  const double m = *std::max_element(x.begin(), x.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : x) s += std::exp(v - m);
  return m + std::log(s);
}

/// Keeps rows with strictly positive weight and normalizes the weights.
WeightedSample positive_part(const WeightedSample& s) {
  std::vector<Eigen::Index> keep;
  for (Eigen::Index i = 0; i < s.weights.size(); ++i) {
    if (s.weights[i] > 0.0) keep.push_back(i);
  }
  if (keep.empty()) throw std::invalid_argument("weighted sample has no positive weight");
  Matrix particles(static_cast<Eigen::Index>(keep.size()), s.particles.cols());
  Vector weights(static_cast<Eigen::Index>(keep.size()));
  for (std::size_t k = 0; k < keep.size(); ++k) {
    particles.row(static_cast<Eigen::Index>(k)) = s.particles.row(keep[k]);
    weights[static_cast<Eigen::Index>(k)] = s.weights[keep[k]];
  }
  weights /= weights.sum();
  return WeightedSample(std::move(particles), std::move(weights));
}

struct EmRun {
  std::vector<double> weights;
  std::vector<Vector> means;
  std::vector<Matrix> covariances;
  std::vector<double> trace;
  bool collapsed = false;
};

std::size_t pick_weighted(const std::vector<double>& mass, UniformStream& stream) {
  const double total = std::accumulate(mass.begin(), mass.end(), 0.0);
  double target = stream.uniform() * total;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    target -= mass[i];
    if (target < 0.0) return i;
  }
  for (std::size_t i = mass.size(); i-- > 0;) {
    if (mass[i] > 0.0) return i;
  }
  return 0;
}

EmRun run_em(const WeightedSample& s, int J, UniformStream& stream, const EmOptions& options) {
  const Eigen::Index n = s.particles.rows();
  const auto [global_mean, global_cov] = weighted_moments(s);

  EmRun run;
  // Weighted k-means++ seeding of the means.
  std::vector<double> mass(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) mass[static_cast<std::size_t>(i)] = s.weights[i];
  run.means.push_back(s.particles.row(static_cast<Eigen::Index>(pick_weighted(mass, stream))).transpose());
  while (static_cast<int>(run.means.size()) < J) {
    for (Eigen::Index i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const Vector& c : run.means) best = std::min(best, (s.particles.row(i).transpose() - c).squaredNorm());
      mass[static_cast<std::size_t>(i)] = s.weights[i] * best;
    }
    if (std::accumulate(mass.begin(), mass.end(), 0.0) <= 0.0) {
      for (Eigen::Index i = 0; i < n; ++i) mass[static_cast<std::size_t>(i)] = s.weights[i];
    }
    run.means.push_back(s.particles.row(static_cast<Eigen::Index>(pick_weighted(mass, stream))).transpose());
  }
  run.weights.assign(static_cast<std::size_t>(J), 1.0 / J);
  run.covariances.assign(static_cast<std::size_t>(J), global_cov);

  Matrix log_resp(n, J);
  std::vector<double> row(static_cast<std::size_t>(J));
  double previous = -std::numeric_limits<double>::infinity();
  const double collapse_threshold = 1.0 / (10.0 * static_cast<double>(n));
  for (int iteration = 0; iteration < options.max_iterations; ++iteration) {
    // E-step.
    std::vector<GaussianParams> comps;
    comps.reserve(static_cast<std::size_t>(J));
    for (int j = 0; j < J; ++j) comps.push_back(GaussianParams::from_covariance(run.means[j], run.covariances[j]));
    double ll = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const Vector x = s.particles.row(i).transpose();
      for (int j = 0; j < J; ++j) row[j] = std::log(run.weights[j]) + comps[j].log_density(x);
      const double lse = log_sum_exp(row);
      for (int j = 0; j < J; ++j) log_resp(i, j) = row[j] - lse;
      ll += s.weights[i] * lse;
    }
    run.trace.push_back(ll);
    if (iteration > 0 && ll - previous <= options.relative_tolerance * std::fabs(previous)) break;
    previous = ll;

    // M-step.
    for (int j = 0; j < J; ++j) {
      Vector r(n);
      for (Eigen::Index i = 0; i < n; ++i) r[i] = s.weights[i] * std::exp(log_resp(i, j));
      const double nj = r.sum();
      if (nj < collapse_threshold) {
        run.collapsed = true;
        return run;
      }
      const Vector mean = (s.particles.transpose() * r) / nj;
      const Matrix centered = s.particles.rowwise() - mean.transpose();
      run.weights[j] = nj;
      run.means[j] = mean;
      run.covariances[j] = (centered.transpose() * r.asDiagonal() * centered) / nj;
    }
    const double total = std::accumulate(run.weights.begin(), run.weights.end(), 0.0);
    for (double& w : run.weights) w /= total;
  }
  return run;
}

}  // namespace

WeightedSample::WeightedSample(Matrix particles_, Vector weights_)
    : particles(std::move(particles_)), weights(std::move(weights_)) {
  if (particles.rows() != weights.size()) throw std::invalid_argument("WeightedSample: row/weight count mismatch");
  if (particles.rows() == 0 || particles.cols() == 0) throw std::invalid_argument("WeightedSample: empty sample");
  if ((weights.array() < 0.0).any() || !weights.allFinite()) {
    throw std::invalid_argument("WeightedSample: weights must be finite and nonnegative");
  }
}

std::string_view proposal_kind(const Proposal& q) {
  return std::visit(overloaded{[](const PriorProposal&) { return std::string_view("prior"); },
                               [](const GaussianProposal&) { return std::string_view("gaussian"); },
                               [](const MixtureProposal&) { return std::string_view("mixture"); },
                               [](const ParticleMixtureProposal&) { return std::string_view("particle_mixture"); }},
                    q);
}

std::pair<Vector, Matrix> weighted_moments(const WeightedSample& s) {
  const double total = s.weights.sum();
  if (!(total > 0.0)) throw std::invalid_argument("weighted_moments: all weights are zero");
  const Vector w = s.weights / total;
  const Vector mean = s.particles.transpose() * w;
  const Matrix centered = s.particles.rowwise() - mean.transpose();
  Matrix cov = centered.transpose() * w.asDiagonal() * centered;
  cov = 0.5 * (cov + cov.transpose());
  return {mean, cov};
}

GaussianProposal fit_gaussian(const WeightedSample& s) {
  auto [mean, cov] = weighted_moments(s);
  return {GaussianParams::from_covariance(std::move(mean), cov)};
}

GmmFit fit_gmm_em(const WeightedSample& s, int components, int restarts, UniformStream& stream,
                  const EmOptions& options) {
  if (components < 1) throw std::invalid_argument("fit_gmm_em: component count must be at least 1");
  if (restarts < 1) throw std::invalid_argument("fit_gmm_em: restarts must be at least 1");
  const WeightedSample data = positive_part(s);
  if (data.size() < 5 * static_cast<std::size_t>(components)) {
    throw std::invalid_argument("fit_gmm_em: need at least 5 positively weighted particles per component");
  }

  for (int J = components; J >= 1; --J) {
    std::optional<EmRun> best;
    bool collapsed = false;
    for (int attempt = 0; attempt < restarts; ++attempt) {
      EmRun run = run_em(data, J, stream, options);
      if (run.collapsed) {
        collapsed = true;
        break;
      }
      if (!best || run.trace.back() > best->trace.back()) best = std::move(run);
    }
    if (collapsed) continue;
    GmmFit fit;
    fit.weights = std::move(best->weights);
    fit.means = std::move(best->means);
    fit.covariances = std::move(best->covariances);
    fit.log_likelihood = best->trace.back();
    fit.log_likelihood_trace = std::move(best->trace);
    return fit;
  }
  throw std::runtime_error("fit_gmm_em: every component count collapsed");
}

MixtureProposal mixture_from_fit(const GmmFit& fit, double inflation) {
  if (!(inflation >= 1.0)) throw std::invalid_argument("mixture inflation must be >= 1");
  MixtureProposal q;
  q.inflation = inflation;
  const double total = std::accumulate(fit.weights.begin(), fit.weights.end(), 0.0);
  for (std::size_t j = 0; j < fit.weights.size(); ++j) {
    q.weights.push_back(fit.weights[j] / total);
    q.covariances.push_back(inflation * fit.covariances[j]);
    q.components.push_back(GaussianParams::from_covariance(fit.means[j], q.covariances.back()));
  }
  return q;
}

MixtureProposal fit_mixture_em(const WeightedSample& s, int components, double inflation, int restarts,
                               UniformStream& stream, const EmOptions& options) {
  return mixture_from_fit(fit_gmm_em(s, components, restarts, stream, options), inflation);
}

ParticleMixtureProposal fit_particle_mixture(const WeightedSample& s) {
  if (s.size() < 2) throw std::invalid_argument("fit_particle_mixture: need at least 2 particles");
  const auto [mean, cov] = weighted_moments(s);
  ParticleMixtureProposal q;
  q.particles = s.particles;
  const double total = s.weights.sum();
  q.weights.resize(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) q.weights[i] = s.weights[static_cast<Eigen::Index>(i)] / total;
  q.kernel = GaussianParams::from_covariance(Vector::Zero(s.dim()), 2.0 * cov);
  return q;
}

std::vector<std::size_t> allocate_counts(std::span<const double> weights, std::size_t n) {
  if (weights.empty()) throw std::invalid_argument("allocate_counts: no weights");
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("allocate_counts: weights must have positive sum");
  std::vector<std::size_t> counts(weights.size());
  std::vector<double> remainder(weights.size());
  std::size_t assigned = 0;
  for (std::size_t j = 0; j < weights.size(); ++j) {
    const double exact = weights[j] / total * static_cast<double>(n);
    counts[j] = static_cast<std::size_t>(std::floor(exact));
    remainder[j] = exact - static_cast<double>(counts[j]);
    assigned += counts[j];
  }
  std::vector<std::size_t> order(weights.size());
  std::iota(order.begin(), order.end(), 0);
  // Remainders within rounding noise count as ties.
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return remainder[a] > remainder[b] + 1e-9; });
  for (std::size_t k = 0; assigned < n; ++k, ++assigned) ++counts[order[k % order.size()]];
  while (assigned > n) {
    // Only reachable through floating-point overshoot in floor(); trim from the smallest remainders.
    for (auto it = order.rbegin(); it != order.rend() && assigned > n; ++it) {
      if (counts[*it] > 0) {
        --counts[*it];
        --assigned;
      }
    }
  }
  return counts;
}

Matrix sample_proposal(const Proposal& q, const Model& model, const PointSet& points) {
  const int d = model.theta_dim();
  if (points.dim != d) throw std::invalid_argument("sample_proposal: point-set dimension differs from theta dimension");
  const std::size_t n = points.size();
  Matrix out(static_cast<Eigen::Index>(n), d);
  std::visit(
      overloaded{
          [&](const PriorProposal&) {
            for (std::size_t i = 0; i < n; ++i) out.row(static_cast<Eigen::Index>(i)) = model.prior_map(points.row(i));
          },
          [&](const GaussianProposal& g) {
            for (std::size_t i = 0; i < n; ++i) {
              out.row(static_cast<Eigen::Index>(i)) = gaussian_map(points.row(i), g.params);
            }
          },
          [&](const MixtureProposal& m) {
            const std::vector<std::size_t> counts = allocate_counts(m.weights, n);
            std::size_t next = 0;
            for (std::size_t j = 0; j < counts.size(); ++j) {
              for (std::size_t k = 0; k < counts[j]; ++k, ++next) {
                out.row(static_cast<Eigen::Index>(next)) = gaussian_map(points.row(next), m.components[j]);
              }
            }
          },
          [&](const ParticleMixtureProposal& pm) {
            if (points.kind != SequenceKind::MC) {
              throw std::invalid_argument(
                  "sample_proposal: particle mixtures require MC points; resampling would destroy the low-discrepancy "
                  "structure");
            }
            std::vector<double> cumulative(pm.weights.size());
            std::partial_sum(pm.weights.begin(), pm.weights.end(), cumulative.begin());
            UniformStream ancestors(derive_seed(points.seed.value_or(0), kAncestorTag, points.start_index), 0);
            for (std::size_t i = 0; i < n; ++i) {
              const double u = ancestors.uniform() * cumulative.back();
              auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
              const auto a = static_cast<Eigen::Index>(
                  std::min<std::size_t>(static_cast<std::size_t>(it - cumulative.begin()), pm.weights.size() - 1));
              out.row(static_cast<Eigen::Index>(i)) =
                  pm.particles.row(a).transpose() + gaussian_map(points.row(i), pm.kernel);
            }
          }},
      q);
  return out;
}

double proposal_density(const Proposal& q, const Model& model, const Vector& theta) {
  return std::visit(overloaded{[&](const PriorProposal&) { return model.prior_density(theta); },
                               [&](const GaussianProposal& g) { return g.params.density(theta); },
                               [&](const MixtureProposal& m) {
                                 double sum = 0.0;
                                 for (std::size_t j = 0; j < m.weights.size(); ++j) {
                                   sum += m.weights[j] * m.components[j].density(theta);
                                 }
                                 return sum;
                               },
                               [&](const ParticleMixtureProposal& pm) {
                                 double sum = 0.0;
                                 for (std::size_t i = 0; i < pm.weights.size(); ++i) {
                                   if (pm.weights[i] == 0.0) continue;
                                   const Vector centered =
                                       theta - pm.particles.row(static_cast<Eigen::Index>(i)).transpose();
                                   sum += pm.weights[i] * pm.kernel.density(centered);
                                 }
                                 return sum;
                               }},
                    q);
}

namespace {

nlohmann::json vector_json(const Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

nlohmann::json matrix_json(const Matrix& m) {
  nlohmann::json rows = nlohmann::json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    std::vector<double> r(static_cast<std::size_t>(m.cols()));
    for (Eigen::Index j = 0; j < m.cols(); ++j) r[static_cast<std::size_t>(j)] = m(i, j);
    rows.push_back(r);
  }
  return rows;
}

Vector vector_from(const nlohmann::json& j) {
  const auto v = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Matrix matrix_from(const nlohmann::json& j) {
  const auto rows = j.get<std::vector<std::vector<double>>>();
  if (rows.empty()) return {};
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != rows.front().size()) throw std::invalid_argument("ragged matrix in proposal JSON");
    for (std::size_t k = 0; k < rows[i].size(); ++k) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = rows[i][k];
  }
  return m;
}

}  // namespace

nlohmann::json to_json(const Proposal& q) {
  nlohmann::json j;
  j["type"] = std::string(proposal_kind(q));
  std::visit(overloaded{[&](const PriorProposal&) {},
                        [&](const GaussianProposal& g) {
                          j["mean"] = vector_json(g.params.mean);
                          j["chol"] = matrix_json(g.params.chol);
                        },
                        [&](const MixtureProposal& m) {
                          j["inflation"] = m.inflation;
                          j["weights"] = m.weights;
                          j["means"] = nlohmann::json::array();
                          j["chols"] = nlohmann::json::array();
                          for (const auto& c : m.components) {
                            j["means"].push_back(vector_json(c.mean));
                            j["chols"].push_back(matrix_json(c.chol));
                          }
                          j["covariances"] = nlohmann::json::array();
                          for (const auto& c : m.covariances) j["covariances"].push_back(matrix_json(c));
                        },
                        [&](const ParticleMixtureProposal& pm) {
                          j["particles"] = matrix_json(pm.particles);
                          j["weights"] = pm.weights;
                          j["chol"] = matrix_json(pm.kernel.chol);
                        }},
             q);
  return j;
}

Proposal proposal_from_json(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "prior") return PriorProposal{};
  if (type == "gaussian") return GaussianProposal{GaussianParams(vector_from(j.at("mean")), matrix_from(j.at("chol")))};
  if (type == "mixture") {
    MixtureProposal m;
    m.inflation = j.at("inflation").get<double>();
    m.weights = j.at("weights").get<std::vector<double>>();
    const auto& means = j.at("means");
    const auto& chols = j.at("chols");
    const auto& covs = j.at("covariances");
    if (means.size() != m.weights.size() || chols.size() != m.weights.size() || covs.size() != m.weights.size()) {
      throw std::invalid_argument("mixture JSON: component arrays disagree in length");
    }
    for (std::size_t k = 0; k < m.weights.size(); ++k) {
      m.components.emplace_back(vector_from(means[k]), matrix_from(chols[k]));
      m.covariances.push_back(matrix_from(covs[k]));
    }
    return m;
  }
  if (type == "particle_mixture") {
    ParticleMixtureProposal pm;
    pm.particles = matrix_from(j.at("particles"));
    pm.weights = j.at("weights").get<std::vector<double>>();
    const Matrix chol = matrix_from(j.at("chol"));
    pm.kernel = GaussianParams(Vector::Zero(chol.rows()), chol);
    return pm;
  }
  throw std::invalid_argument("unknown proposal type '" + type + "'");
}

}  // namespace qmcabc
