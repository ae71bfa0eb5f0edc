#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <variant>

#include <Eigen/Dense>

#include "qmcabc/random.hpp"
#include "qmcabc/transform.hpp"

namespace qmcabc {

inline constexpr int kLotkaVolterraPoints = 16;
inline constexpr int kTuberculosisSampleSize = 473;

struct TimeSeriesPair {
  std::array<std::int64_t, kLotkaVolterraPoints> prey{};
  std::array<std::int64_t, kLotkaVolterraPoints> predator{};
  bool exploded = false;
};

/// Cluster size -> number of clusters of that size.
struct ClusterCounts {
  std::map<int, int> counts;
  bool failed = false;

  int clusters() const;
  int individuals() const;
  std::int64_t sum_of_squares() const;
};

struct SampleCloud {
  Eigen::MatrixX2d points;
};

using Dataset = std::variant<Vector, TimeSeriesPair, ClusterCounts, SampleCloud>;

/// One simulator call; `runs` counts internal restarts as additional simulations.
struct Simulation {
  Dataset data;
  std::size_t runs = 1;
};

class Model {
 public:
  virtual ~Model() = default;

  virtual std::string name() const = 0;
  virtual std::string description() const = 0;
  virtual int theta_dim() const = 0;

  /// Prior transform: unit point -> parameter, such that uniform input gives the prior.
  virtual Vector prior_map(std::span<const double> u) const = 0;
  virtual double prior_density(const Vector& theta) const = 0;

  virtual Simulation simulate(const Vector& theta, UniformStream& stream) const = 0;
  virtual double distance(const Dataset& a, const Dataset& b) const = 0;

  /// Scalar estimand whose posterior moments the experiments report.
  virtual double estimand(const Vector& theta) const = 0;
  /// Posterior mean of `estimand` when known in closed form.
  virtual std::optional<double> estimand_posterior_mean() const { return std::nullopt; }

  const Dataset& observed() const { return observed_; }
  double distance_to_observed(const Dataset& y) const { return distance(y, observed_); }

 protected:
  explicit Model(Dataset observed) : observed_(std::move(observed)) {}

 private:
  Dataset observed_;
};

using ModelPtr = std::shared_ptr<const Model>;

/// theta ~ U[-10,10]^d, y | theta ~ 1/2 N(theta, 0.1 I) + 1/2 N(theta, 0.001 I), y* = 0.
ModelPtr toy_model(int dim);

inline constexpr double kToyVarianceWide = 0.1;
inline constexpr double kToyVarianceNarrow = 0.001;

/// P_theta(|y| <= eps) for the one-dimensional toy model.
double toy_acceptance_probability(double theta, double eps);
/// Z_eps = int p(theta) P_theta(|y| <= eps) dtheta for d = 1, by adaptive Gauss-Kronrod quadrature.
double toy_normalizing_constant(double eps);
/// Brute-force P_theta(||y|| <= eps) in any dimension from `draws` simulations.
double toy_acceptance_probability_mc(const Vector& theta, double eps, std::size_t draws, UniformStream& stream);

/// Lotka-Volterra reference parameters behind the shipped observed series.
Vector lotka_volterra_reference_theta();
inline constexpr std::size_t kLotkaVolterraEventCap = 1'000'000;

/// Exact Gillespie simulation of prey growth, predation and predator death from (50, 100),
/// recorded at t = 0, 2, ..., 30. Trajectories beyond the event cap are flagged exploded.
TimeSeriesPair simulate_lotka_volterra(const Vector& theta, UniformStream& stream,
                                       std::size_t event_cap = kLotkaVolterraEventCap);

ModelPtr lotka_volterra(TimeSeriesPair observed);
/// Loads the observed series from the fixture directory.
ModelPtr lotka_volterra();
TimeSeriesPair generate_lotka_volterra_fixture();

/// Tuberculosis genotype data (cluster size -> number of clusters).
ClusterCounts tuberculosis_observed_counts();
/// (g / 473, 1 - sum n_i^2 / 473^2).
std::array<double, 2> tuberculosis_summary(const ClusterCounts& counts);

struct TuberculosisLimits {
  int population_target = 10'000;
  int max_restarts = 100;
  std::uint64_t step_cap = 20'000'000;
};

/// Discrete pick-and-apply chain for theta = (alpha, gamma), beta = 1 - alpha - gamma.
Simulation simulate_tuberculosis(const Vector& theta, UniformStream& stream, const TuberculosisLimits& limits = {});
ModelPtr tuberculosis(TuberculosisLimits limits = {});

inline constexpr int kBimodalObservations = 100;
Vector bimodal_reference_theta();
SampleCloud simulate_bimodal(const Vector& theta, UniformStream& stream);
ModelPtr bimodal_model(SampleCloud observed);
ModelPtr bimodal_model();
SampleCloud generate_bimodal_fixture();

/// Directory holding observed-data fixtures (QMCABC_DATA_DIR overrides the build-time default).
std::filesystem::path fixture_directory();
void write_fixtures(const std::filesystem::path& directory);

}  // namespace qmcabc
