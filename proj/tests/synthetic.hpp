#pragma once

#include "qmcabc/models.hpp"

namespace qmcabc::testing {

// A simulator that hits (distance 0) with probability p and misses (distance 1) otherwise.
class BernoulliModel : public Model {
 public:
  explicit BernoulliModel(double p) : Model(Vector::Zero(1)), p_(p) {}
  std::string name() const override { return "bernoulli"; }
  std::string description() const override { return "synthetic hit/miss simulator"; }
  int theta_dim() const override { return 1; }
  Vector prior_map(std::span<const double> u) const override { return Vector::Constant(1, u[0]); }
  double prior_density(const Vector& t) const override { return t[0] > 0 && t[0] < 1 ? 1.0 : 0.0; }
  Simulation simulate(const Vector&, UniformStream& stream) const override {
    return {Vector::Constant(1, stream.uniform() < p_ ? 0.0 : 1.0), 1};
  }
  double distance(const Dataset& a, const Dataset& b) const override {
    return std::fabs(std::get<Vector>(a)[0] - std::get<Vector>(b)[0]);
  }
  double estimand(const Vector& t) const override { return t[0]; }

 private:
  double p_;
};

}  // namespace qmcabc::testing
