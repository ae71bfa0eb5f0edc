#include <doctest.h>

#include <cmath>

#include "qmcabc/weighting.hpp"
#include "synthetic.hpp"

using namespace qmcabc;

namespace {

struct Moments {
  double mean, se;
};

template <class F>
Moments replicate(int n, F draw) {
  double s = 0, ss = 0;
  for (int i = 0; i < n; ++i) {
    const double x = draw(i);
    s += x;
    ss += x * x;
  }
  const double mean = s / n;
  return {mean, std::sqrt((ss / n - mean * mean) / n)};
}

}  // namespace

TEST_CASE("fixed-M extremes") {
  const ModelPtr toy = toy_model(1);
  UniformStream s(1, 0);
  const Vector theta = Vector::Zero(1);
  const WeightResult all = fixed_m_weight(*toy, theta, 1e6, 5, s);
  CHECK(all.l_hat == 1.0);
  CHECK(all.sims_used == 5);
  CHECK(all.distances.size() == 5);
  const WeightResult none = fixed_m_weight(*toy, theta, 0.0, 10, s);
  CHECK(none.l_hat == 0.0);
}

TEST_CASE("fixed-M matches the toy acceptance probability") {
  const ModelPtr toy = toy_model(1);
  const Vector theta = Vector::Zero(1);
  const double p = 0.5 * (std::erf(0.1 / std::sqrt(2 * 0.1)) + std::erf(0.1 / std::sqrt(2 * 0.001)));
  CHECK(p == doctest::Approx(0.62330).epsilon(1e-4));
  UniformStream s(2, 0);
  const Moments m = replicate(100'000, [&](int) { return fixed_m_weight(*toy, theta, 0.1, 1, s).l_hat; });
  CHECK(std::fabs(m.mean - p) < 3 * m.se);
}

TEST_CASE("negative binomial immediate hits") {
  testing::BernoulliModel always(1.0);
  UniformStream s(1, 0);
  const WeightResult w = neg_binomial_weight(always, Vector::Zero(1), 0.5, 2, 100, s);
  CHECK(w.sims_used == 2);
  CHECK(w.l_hat == 1.0);
  CHECK_FALSE(w.truncated);
}

TEST_CASE("negative binomial truncation floor") {
  testing::BernoulliModel never(0.0);
  UniformStream s(1, 0);
  const WeightResult w = neg_binomial_weight(never, Vector::Zero(1), 0.5, 2, 50, s);
  CHECK(w.truncated);
  CHECK(w.l_hat == 0.0);
  CHECK(w.sims_used == 50);
}

TEST_CASE("both schemes are unbiased for a Bernoulli simulator") {
  for (double p : {0.05, 0.3, 0.7}) {
    testing::BernoulliModel model(p);
    UniformStream s(static_cast<std::uint64_t>(p * 1000), 9);
    const Moments nb =
        replicate(100'000, [&](int) { return neg_binomial_weight(model, Vector::Zero(1), 0.5, 3, 1'000'000, s).l_hat; });
    CHECK(std::fabs(nb.mean - p) < 3 * nb.se);
    const Moments fm = replicate(100'000, [&](int) { return fixed_m_weight(model, Vector::Zero(1), 0.5, 4, s).l_hat; });
    CHECK(std::fabs(fm.mean - p) < 3 * fm.se);
  }
}

TEST_CASE("negative binomial cost is r/p") {
  testing::BernoulliModel model(0.2);
  UniformStream s(5, 5);
  const Moments k = replicate(50'000, [&](int) {
    return static_cast<double>(neg_binomial_weight(model, Vector::Zero(1), 0.5, 3, 1'000'000, s).sims_used);
  });
  CHECK(std::fabs(k.mean - 15.0) < 3 * k.se);
}

TEST_CASE("scheme validation") {
  CHECK_THROWS(validate(FixedM{0}));
  CHECK_THROWS(validate(NegBinomial{1, 10}));
  CHECK_THROWS(validate(NegBinomial{3, 2}));
  CHECK(describe(FixedM{10}) == "fixed-m(10)");
}

TEST_CASE("simulator exceptions carry the parameter") {
  struct Failing : testing::BernoulliModel {
    Failing() : BernoulliModel(0.5) {}
    Simulation simulate(const Vector&, UniformStream&) const override { throw std::runtime_error("boom"); }
  } model;
  UniformStream s(1, 0);
  Vector theta = Vector::Constant(1, 0.25);
  try {
    fixed_m_weight(model, theta, 0.5, 1, s);
    FAIL("expected SimulationError");
  } catch (const SimulationError& e) {
    CHECK(e.theta()[0] == 0.25);
  }
}
