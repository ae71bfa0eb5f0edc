#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "qmcabc/models.hpp"

namespace qmcabc {

/// L-hat = (1/M) sum_m 1{d(y_m, y*) <= eps}.
struct FixedM {
  std::size_t M = 1;
};

/// Simulate until r hits; L-hat = (r - 1)/(k - 1). Capped at k_max draws.
struct NegBinomial {
  std::size_t r = 2;
  std::size_t k_max = 100'000;
};

using WeightScheme = std::variant<FixedM, NegBinomial>;

void validate(const WeightScheme& scheme);
std::string describe(const WeightScheme& scheme);

struct WeightResult {
  double l_hat = 0.0;
  std::size_t sims_used = 0;
  std::vector<double> distances;
  bool truncated = false;
};

/// A simulator failure, tagged with the parameter that triggered it.
class SimulationError : public std::runtime_error {
 public:
  SimulationError(const std::string& what, Vector theta)
      : std::runtime_error(what), theta_(std::move(theta)) {}
  const Vector& theta() const { return theta_; }

 private:
  Vector theta_;
};

WeightResult fixed_m_weight(const Model& model, const Vector& theta, double eps, std::size_t M, UniformStream& stream);
WeightResult neg_binomial_weight(const Model& model, const Vector& theta, double eps, std::size_t r,
                                 std::size_t k_max, UniformStream& stream);
WeightResult estimate_acceptance(const Model& model, const Vector& theta, double eps, const WeightScheme& scheme,
                                 UniformStream& stream);

}  // namespace qmcabc
