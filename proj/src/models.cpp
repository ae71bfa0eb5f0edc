#include "qmcabc/models.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qmcabc/csv.hpp"
#include "qmcabc/emd.hpp"

#ifndef QMCABC_DATA_DIR
#define QMCABC_DATA_DIR "data"
#endif

namespace qmcabc {

namespace {

constexpr double kToyPriorHalfWidth = 10.0;
constexpr double kInfinity = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kFixtureSeed = 0;

template <class T>
const T& expect(const Dataset& d, const char* model) {
  const T* p = std::get_if<T>(&d);
  if (!p) throw std::invalid_argument(std::string(model) + ": dataset variant does not match the model");
  return *p;
}

bool in_cube(const Vector& theta, double half_width) {
  return (theta.array().abs() <= half_width).all();
}

class ToyModel final : public Model {
 public:
  explicit ToyModel(int dim) : Model(Vector(Vector::Zero(dim))), dim_(dim), prior_(BoxBounds::cube(dim, -10.0, 10.0)) {
    if (dim < 1) throw std::invalid_argument("toy_model: dimension must be at least 1");
  }

  std::string name() const override { return "toy"; }
  std::string description() const override {
    return "Gaussian scale mixture, y|theta ~ 1/2 N(theta, 0.1 I) + 1/2 N(theta, 0.001 I), prior U[-10,10]^d, y* = 0";
  }
  int theta_dim() const override { return dim_; }
  Vector prior_map(std::span<const double> u) const override { return box_map(u, prior_); }
  double prior_density(const Vector& theta) const override {
    return in_cube(theta, kToyPriorHalfWidth) ? 1.0 / prior_.volume() : 0.0;
  }

  Simulation simulate(const Vector& theta, UniformStream& stream) const override {
    const double sd = stream.uniform() < 0.5 ? std::sqrt(kToyVarianceWide) : std::sqrt(kToyVarianceNarrow);
    Vector y(dim_);
    for (int j = 0; j < dim_; ++j) y[j] = theta[j] + sd * standard_normal(stream);
    return {Dataset(std::move(y)), 1};
  }

  double distance(const Dataset& a, const Dataset& b) const override {
    return (expect<Vector>(a, "toy") - expect<Vector>(b, "toy")).norm();
  }

  double estimand(const Vector& theta) const override { return theta.mean(); }
  std::optional<double> estimand_posterior_mean() const override { return 0.0; }

 private:
  int dim_;
  BoxBounds prior_;
};

class LotkaVolterraModel final : public Model {
 public:
  explicit LotkaVolterraModel(TimeSeriesPair observed)
      : Model(std::move(observed)), log_prior_(BoxBounds::cube(3, -6.0, 2.0)) {}

  std::string name() const override { return "lotka-volterra"; }
  std::string description() const override {
    return "stochastic Lotka-Volterra (Gillespie), theta = exp(u), u ~ U[-6,2]^3, series at t = 0,2,...,30";
  }
  int theta_dim() const override { return 3; }
  Vector prior_map(std::span<const double> u) const override { return box_map(u, log_prior_).array().exp(); }
  double prior_density(const Vector& theta) const override {
    if (theta.size() != 3 || (theta.array() <= 0.0).any()) return 0.0;
    const Vector log_theta = theta.array().log();
    if (!log_prior_.contains(log_theta)) return 0.0;
    // Change of variables from the uniform log-parameter box.
    return 1.0 / (log_prior_.volume() * theta.prod());
  }
  Simulation simulate(const Vector& theta, UniformStream& stream) const override {
    return {Dataset(simulate_lotka_volterra(theta, stream)), 1};
  }
  double distance(const Dataset& a, const Dataset& b) const override {
    const auto& x = expect<TimeSeriesPair>(a, "lotka-volterra");
    const auto& y = expect<TimeSeriesPair>(b, "lotka-volterra");
    if (x.exploded || y.exploded) return kInfinity;
    double sum = 0.0;
    for (int i = 0; i < kLotkaVolterraPoints; ++i) {
      const double dp = static_cast<double>(x.prey[i] - y.prey[i]);
      const double dq = static_cast<double>(x.predator[i] - y.predator[i]);
      sum += dp * dp + dq * dq;
    }
    return std::sqrt(sum);
  }
  double estimand(const Vector& theta) const override { return theta.mean(); }

 private:
  BoxBounds log_prior_;
};

class TuberculosisModel final : public Model {
 public:
  explicit TuberculosisModel(TuberculosisLimits limits)
      : Model(tuberculosis_observed_counts()), limits_(limits) {}

  std::string name() const override { return "tuberculosis"; }
  std::string description() const override {
    return "tuberculosis genotype clusters, theta = (alpha, gamma), beta = 1 - alpha - gamma, uniform on alpha > gamma";
  }
  int theta_dim() const override { return 2; }
  Vector prior_map(std::span<const double> u) const override { return triangle_map(u); }
  double prior_density(const Vector& theta) const override {
    if (theta.size() != 2) return 0.0;
    return in_triangle_region(theta[0], theta[1]) ? 4.0 : 0.0;
  }
  Simulation simulate(const Vector& theta, UniformStream& stream) const override {
    return simulate_tuberculosis(theta, stream, limits_);
  }
  double distance(const Dataset& a, const Dataset& b) const override {
    const auto& x = expect<ClusterCounts>(a, "tuberculosis");
    const auto& y = expect<ClusterCounts>(b, "tuberculosis");
    if (x.failed || y.failed) return kInfinity;
    const auto sx = tuberculosis_summary(x);
    const auto sy = tuberculosis_summary(y);
    return std::hypot(sx[0] - sy[0], sx[1] - sy[1]);
  }
  double estimand(const Vector& theta) const override { return 0.5 * (theta[0] + theta[1]); }

 private:
  TuberculosisLimits limits_;
};

class BimodalModel final : public Model {
 public:
  explicit BimodalModel(SampleCloud observed)
      : Model(std::move(observed)), prior_(BoxBounds::cube(2, -10.0, 10.0)) {}

  std::string name() const override { return "bimodal"; }
  std::string description() const override {
    return "y_i ~ 1/2 N(theta, I) + 1/2 N(-theta, I), i = 1..100, d = 2, earth mover's distance, prior U[-10,10]^2";
  }
  int theta_dim() const override { return 2; }
  Vector prior_map(std::span<const double> u) const override { return box_map(u, prior_); }
  double prior_density(const Vector& theta) const override {
    return in_cube(theta, kToyPriorHalfWidth) ? 1.0 / prior_.volume() : 0.0;
  }
  Simulation simulate(const Vector& theta, UniformStream& stream) const override {
    return {Dataset(simulate_bimodal(theta, stream)), 1};
  }
  double distance(const Dataset& a, const Dataset& b) const override {
    return emd(expect<SampleCloud>(a, "bimodal").points, expect<SampleCloud>(b, "bimodal").points);
  }
  double estimand(const Vector& theta) const override { return theta.mean(); }

 private:
  BoxBounds prior_;
};

}  // namespace

int ClusterCounts::clusters() const {
  int g = 0;
  for (const auto& [size, count] : counts) g += count;
  return g;
}

int ClusterCounts::individuals() const {
  int n = 0;
  for (const auto& [size, count] : counts) n += size * count;
  return n;
}

std::int64_t ClusterCounts::sum_of_squares() const {
  std::int64_t s = 0;
  for (const auto& [size, count] : counts) s += static_cast<std::int64_t>(size) * size * count;
  return s;
}

ModelPtr toy_model(int dim) { return std::make_shared<ToyModel>(dim); }

double toy_acceptance_probability(double theta, double eps) {
  if (!(eps >= 0.0)) throw std::invalid_argument("toy_acceptance_probability: eps must be nonnegative");
  if (std::isinf(eps)) return 1.0;
  auto component = [&](double variance) {
    const double sd = std::sqrt(variance);
    return normal_cdf((eps - theta) / sd) - normal_cdf((-eps - theta) / sd);
  };
  return 0.5 * component(kToyVarianceWide) + 0.5 * component(kToyVarianceNarrow);
}

double toy_normalizing_constant(double eps) {
  using boost::math::quadrature::gauss_kronrod;
  std::vector<double> breaks = {-kToyPriorHalfWidth, -eps - 1.0, -eps, 0.0, eps, eps + 1.0, kToyPriorHalfWidth};
  for (double& b : breaks) b = std::clamp(b, -kToyPriorHalfWidth, kToyPriorHalfWidth);
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  auto f = [eps](double theta) { return toy_acceptance_probability(theta, eps); };
  double integral = 0.0;
  for (std::size_t i = 0; i + 1 < breaks.size(); ++i) {
    integral += gauss_kronrod<double, 61>::integrate(f, breaks[i], breaks[i + 1], 15, 1e-14);
  }
  return integral / (2.0 * kToyPriorHalfWidth);
}

double toy_acceptance_probability_mc(const Vector& theta, double eps, std::size_t draws, UniformStream& stream) {
  const ToyModel model(static_cast<int>(theta.size()));
  std::size_t hits = 0;
  for (std::size_t m = 0; m < draws; ++m) {
    if (model.distance_to_observed(model.simulate(theta, stream).data) <= eps) ++hits;
  }
  return static_cast<double>(hits) / static_cast<double>(draws);
}

Vector lotka_volterra_reference_theta() {
  Vector theta(3);
  theta << std::exp(-0.7), std::exp(-5.0), std::exp(-1.0);
  return theta;
}

TimeSeriesPair simulate_lotka_volterra(const Vector& theta, UniformStream& stream, std::size_t event_cap) {
  if (theta.size() != 3) throw std::invalid_argument("lotka-volterra: theta must have 3 components");
  const double alpha = theta[0], beta = theta[1], gamma = theta[2];
  TimeSeriesPair out;
  std::int64_t prey = 50, predator = 100;
  double t = 0.0;
  int recorded = 0;
  std::size_t events = 0;
  while (recorded < kLotkaVolterraPoints) {
    const double h_birth = alpha * static_cast<double>(prey);
    const double h_predation = beta * static_cast<double>(prey) * static_cast<double>(predator);
    const double h_death = gamma * static_cast<double>(predator);
    const double total = h_birth + h_predation + h_death;
    t = total > 0.0 ? t + stream.exponential() / total : kInfinity;
    while (recorded < kLotkaVolterraPoints && 2.0 * recorded < t) {
      out.prey[recorded] = prey;
      out.predator[recorded] = predator;
      ++recorded;
    }
    if (recorded == kLotkaVolterraPoints) break;
    if (++events > event_cap) {
      out.exploded = true;
      break;
    }
    const double pick = stream.uniform() * total;
    if (pick < h_birth) {
      ++prey;
    } else if (pick < h_birth + h_predation) {
      --prey;
      ++predator;
    } else {
      --predator;
    }
  }
  return out;
}

ModelPtr lotka_volterra(TimeSeriesPair observed) { return std::make_shared<LotkaVolterraModel>(observed); }

ClusterCounts tuberculosis_observed_counts() {
  ClusterCounts c;
  c.counts = {{1, 282}, {2, 20}, {3, 13}, {4, 4}, {5, 2}, {8, 1}, {10, 1}, {15, 1}, {23, 1}, {30, 1}};
  return c;
}

std::array<double, 2> tuberculosis_summary(const ClusterCounts& counts) {
  const double n = static_cast<double>(kTuberculosisSampleSize);
  return {static_cast<double>(counts.clusters()) / n,
          1.0 - static_cast<double>(counts.sum_of_squares()) / (n * n)};
}

Simulation simulate_tuberculosis(const Vector& theta, UniformStream& stream, const TuberculosisLimits& limits) {
  if (theta.size() != 2) throw std::invalid_argument("tuberculosis: theta must be (alpha, gamma)");
  const double alpha = theta[0], gamma = theta[1];
  const double beta = 1.0 - alpha - gamma;
  if (alpha < 0.0 || gamma < 0.0 || beta < -1e-12) {
    throw std::invalid_argument("tuberculosis: (alpha, gamma) outside the probability simplex");
  }

  Simulation sim;
  sim.runs = 0;
  std::vector<int> genotype;
  genotype.reserve(static_cast<std::size_t>(limits.population_target));
  std::uint64_t steps = 0;
  bool reached = false;
  for (int attempt = 0; attempt <= limits.max_restarts && !reached; ++attempt) {
    ++sim.runs;
    genotype.assign(1, 0);
    int next_label = 1;
    while (!genotype.empty() && static_cast<int>(genotype.size()) < limits.population_target) {
      if (++steps > limits.step_cap) break;
      const auto i = static_cast<std::size_t>(stream.below(genotype.size()));
      const double u = stream.uniform();
      if (u < alpha) {
        genotype.push_back(genotype[i]);
      } else if (u < alpha + beta) {
        genotype[i] = next_label++;
      } else {
        genotype[i] = genotype.back();
        genotype.pop_back();
      }
    }
    reached = static_cast<int>(genotype.size()) >= limits.population_target;
    if (steps > limits.step_cap) break;
  }

  ClusterCounts counts;
  if (!reached) {
    counts.failed = true;
    sim.data = counts;
    return sim;
  }
  // Partial Fisher-Yates draw of the subsample.
  std::unordered_map<int, int> per_genotype;
  for (int k = 0; k < kTuberculosisSampleSize; ++k) {
    const auto j = static_cast<std::size_t>(k) + static_cast<std::size_t>(stream.below(genotype.size() - k));
    std::swap(genotype[static_cast<std::size_t>(k)], genotype[j]);
    ++per_genotype[genotype[static_cast<std::size_t>(k)]];
  }
  for (const auto& [label, size] : per_genotype) ++counts.counts[size];
  sim.data = counts;
  return sim;
}

ModelPtr tuberculosis(TuberculosisLimits limits) { return std::make_shared<TuberculosisModel>(limits); }

Vector bimodal_reference_theta() { return Vector::Constant(2, 2.0); }

SampleCloud simulate_bimodal(const Vector& theta, UniformStream& stream) {
  if (theta.size() != 2) throw std::invalid_argument("bimodal: theta must have 2 components");
  SampleCloud cloud;
  cloud.points.resize(kBimodalObservations, 2);
  for (int i = 0; i < kBimodalObservations; ++i) {
    const double sign = stream.uniform() < 0.5 ? 1.0 : -1.0;
    for (int j = 0; j < 2; ++j) cloud.points(i, j) = sign * theta[j] + standard_normal(stream);
  }
  return cloud;
}

ModelPtr bimodal_model(SampleCloud observed) {
  if (observed.points.rows() != kBimodalObservations) {
    throw std::invalid_argument("bimodal: observed cloud must have 100 points");
  }
  return std::make_shared<BimodalModel>(std::move(observed));
}

std::filesystem::path fixture_directory() {
  if (const char* env = std::getenv("QMCABC_DATA_DIR"); env && *env) return env;
  return QMCABC_DATA_DIR;
}

TimeSeriesPair generate_lotka_volterra_fixture() {
  UniformStream stream(kFixtureSeed, 0);
  return simulate_lotka_volterra(lotka_volterra_reference_theta(), stream);
}

SampleCloud generate_bimodal_fixture() {
  UniformStream stream(kFixtureSeed, 0);
  return simulate_bimodal(bimodal_reference_theta(), stream);
}

ModelPtr lotka_volterra() {
  const csv::Table table = csv::read(fixture_directory() / "lotka_volterra_observed.csv");
  if (table.rows.size() != kLotkaVolterraPoints) {
    throw std::runtime_error("lotka_volterra_observed.csv: expected 16 rows");
  }
  const std::size_t prey_col = table.column("prey"), predator_col = table.column("predator");
  TimeSeriesPair observed;
  for (int i = 0; i < kLotkaVolterraPoints; ++i) {
    observed.prey[i] = std::stoll(table.rows[i].at(prey_col));
    observed.predator[i] = std::stoll(table.rows[i].at(predator_col));
  }
  return lotka_volterra(observed);
}

ModelPtr bimodal_model() {
  const csv::Table table = csv::read(fixture_directory() / "bimodal_observed.csv");
  SampleCloud cloud;
  cloud.points.resize(static_cast<Eigen::Index>(table.rows.size()), 2);
  const std::size_t c1 = table.column("y1"), c2 = table.column("y2");
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    cloud.points(static_cast<Eigen::Index>(i), 0) = csv::parse_double(table.rows[i].at(c1));
    cloud.points(static_cast<Eigen::Index>(i), 1) = csv::parse_double(table.rows[i].at(c2));
  }
  return bimodal_model(std::move(cloud));
}

void write_fixtures(const std::filesystem::path& directory) {
  std::filesystem::create_directories(directory);
  {
    std::ofstream out(directory / "lotka_volterra_observed.csv");
    const TimeSeriesPair lv = generate_lotka_volterra_fixture();
    out << "prey,predator\n";
    for (int i = 0; i < kLotkaVolterraPoints; ++i) out << lv.prey[i] << ',' << lv.predator[i] << '\n';
  }
  {
    std::ofstream out(directory / "bimodal_observed.csv");
    const SampleCloud cloud = generate_bimodal_fixture();
    out << "y1,y2\n";
    for (Eigen::Index i = 0; i < cloud.points.rows(); ++i) {
      out << csv::format_double(cloud.points(i, 0)) << ',' << csv::format_double(cloud.points(i, 1)) << '\n';
    }
  }
}

}  // namespace qmcabc
