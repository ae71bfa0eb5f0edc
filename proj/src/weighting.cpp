#include "qmcabc/weighting.hpp"

#include <algorithm>

namespace qmcabc {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

Simulation run_simulator(const Model& model, const Vector& theta, UniformStream& stream) {
  try {
    return model.simulate(theta, stream);
  } catch (const SimulationError&) {
    throw;
  } catch (const std::exception& e) {
    throw SimulationError(model.name() + " simulator failed: " + e.what(), theta);
  }
}

}  // namespace

void validate(const WeightScheme& scheme) {
  std::visit(overloaded{[](const FixedM& s) {
                          if (s.M < 1) throw std::invalid_argument("FixedM: M must be at least 1");
                        },
                        [](const NegBinomial& s) {
                          if (s.r < 2) throw std::invalid_argument("NegBinomial: r must be at least 2");
                          if (s.k_max < s.r) throw std::invalid_argument("NegBinomial: k_max must be >= r");
                        }},
             scheme);
}

std::string describe(const WeightScheme& scheme) {
  return std::visit(overloaded{[](const FixedM& s) { return "fixed-m(" + std::to_string(s.M) + ")"; },
                               [](const NegBinomial& s) { return "neg-binomial(" + std::to_string(s.r) + ")"; }},
                    scheme);
}

WeightResult fixed_m_weight(const Model& model, const Vector& theta, double eps, std::size_t M, UniformStream& stream) {
  if (M < 1) throw std::invalid_argument("fixed_m_weight: M must be at least 1");
  if (!(eps >= 0.0)) throw std::invalid_argument("fixed_m_weight: eps must be nonnegative");
  WeightResult result;
  result.distances.reserve(M);
  std::size_t hits = 0;
  for (std::size_t m = 0; m < M; ++m) {
    const Simulation sim = run_simulator(model, theta, stream);
    result.sims_used += sim.runs;
    const double d = model.distance_to_observed(sim.data);
    result.distances.push_back(d);
    if (d <= eps) ++hits;
  }
  result.l_hat = static_cast<double>(hits) / static_cast<double>(M);
  return result;
}

WeightResult neg_binomial_weight(const Model& model, const Vector& theta, double eps, std::size_t r,
                                 std::size_t k_max, UniformStream& stream) {
  validate(NegBinomial{r, k_max});
  WeightResult result;
  std::size_t hits = 0, k = 0;
  while (hits < r && k < k_max) {
    const Simulation sim = run_simulator(model, theta, stream);
    result.sims_used += sim.runs;
    ++k;
    const double d = model.distance_to_observed(sim.data);
    result.distances.push_back(d);
    if (d <= eps) ++hits;
  }
  if (hits == r) {
    result.l_hat = static_cast<double>(r - 1) / static_cast<double>(k - 1);
  } else {
    result.truncated = true;
    result.l_hat = static_cast<double>(hits > 0 ? hits - 1 : 0) / static_cast<double>(k_max - 1);
  }
  return result;
}

WeightResult estimate_acceptance(const Model& model, const Vector& theta, double eps, const WeightScheme& scheme,
                                 UniformStream& stream) {
  return std::visit(
      overloaded{[&](const FixedM& s) { return fixed_m_weight(model, theta, eps, s.M, stream); },
                 [&](const NegBinomial& s) { return neg_binomial_weight(model, theta, eps, s.r, s.k_max, stream); }},
      scheme);
}

}  // namespace qmcabc
