#include <doctest.h>

#include <cmath>

#include "qmcabc/engine.hpp"

using namespace qmcabc;

namespace {

Particle stored(std::vector<double> distances, double prior_ratio = 1.0) {
  Particle p;
  p.theta = Vector::Zero(1);
  p.prior_ratio = prior_ratio;
  p.distances = std::move(distances);
  return p;
}

double phi_identity(const Vector& t) { return t[0]; }

}  // namespace

TEST_CASE("effective sample size") {
  const std::vector<double> equal(7, 0.3);
  CHECK(ess(equal) == doctest::Approx(7.0).epsilon(1e-15));
  const std::vector<double> one = {0, 0, 4, 0};
  CHECK(ess(one) == 1.0);
  const std::vector<double> w = {2, 1, 1};
  CHECK(ess(w) == doctest::Approx(16.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("ESS threshold on hand-built particles") {
  const std::vector<Particle> three = {stored({1}), stored({2}), stored({3})};
  const EssEpsilon e = adapt_epsilon_ess(three, 1, 2.0);
  CHECK(e.epsilon >= 2.0);
  CHECK(e.epsilon < 3.0);
  CHECK_FALSE(e.shortfall);

  const std::vector<Particle> single = {stored({0.7})};
  CHECK(adapt_epsilon_ess(single, 1, 1.0).epsilon == 0.7);

  // Asking for more ESS than the particles can give flags a shortfall.
  CHECK(adapt_epsilon_ess(three, 1, 3.5).shortfall);

  // The upper bound excludes candidates at or above it.
  CHECK(adapt_epsilon_ess(three, 1, 1.0, 2.0).epsilon == 1.0);
}

TEST_CASE("ESS bisection brackets the target on random particle sets") {
  UniformStream s(1, 0);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t M = 1 + s.below(10);
    const std::size_t n = 20 + s.below(200);
    std::vector<Particle> ps;
    for (std::size_t i = 0; i < n; ++i) {
      std::vector<double> d(M);
      for (double& x : d) x = s.exponential();
      ps.push_back(stored(d, 0.5 + s.uniform()));
    }
    const double target = 0.5 * static_cast<double>(n);
    const EssEpsilon e = adapt_epsilon_ess(ps, M, target);
    REQUIRE_FALSE(e.shortfall);
    CHECK(ess(rethreshold_weights(ps, M, e.epsilon)) >= target);
    CHECK(e.ess == ess(rethreshold_weights(ps, M, e.epsilon)));
    // The next smaller stored distance falls short.
    double below = 0.0;
    for (const auto& p : ps) {
      for (double x : p.distances) {
        if (x < e.epsilon) below = std::max(below, x);
      }
    }
    CHECK(ess(rethreshold_weights(ps, M, below)) < target);
  }
}

TEST_CASE("particles outside the prior support do not block the ESS rule") {
  std::vector<Particle> ps = {stored({1}), stored({2}), stored({}, 0.0), stored({3})};
  CHECK(adapt_epsilon_ess(ps, 1, 2.0).epsilon == 2.0);
}

TEST_CASE("median rule") {
  const std::vector<double> odd = {3, 1, 2};
  CHECK(adapt_epsilon_median(odd) == 2.0);
  const std::vector<double> even = {4, 1, 3, 2};
  CHECK(adapt_epsilon_median(even) == 2.0);
  const std::vector<double> one = {0.7};
  CHECK(adapt_epsilon_median(one) == 0.7);
}

TEST_CASE("certain acceptance gives unit weights") {
  const ModelPtr toy = toy_model(2);
  const RunRecord rec = run_is(*toy, PriorProposal{}, FixedM{1}, 1e9, 50, SequenceKind::MC, 1);
  for (const auto& p : rec.particles) CHECK(p.weight == 1.0);
  CHECK(rec.z_hat == 1.0);
  CHECK(normalizing_constant(rec) == 1.0);
  CHECK(rec.cumulative_sims == 50);
}

TEST_CASE("normalizing constant estimate matches quadrature") {
  const ModelPtr toy = toy_model(1);
  const RunRecord rec = run_is(*toy, PriorProposal{}, FixedM{1}, 0.1, 1'000'000, SequenceKind::MC, 2);
  double ss = 0.0;
  for (const auto& p : rec.particles) ss += (p.weight - rec.z_hat) * (p.weight - rec.z_hat);
  const double se = std::sqrt(ss / static_cast<double>(rec.particles.size() - 1) / static_cast<double>(rec.particles.size()));
  CHECK(std::fabs(rec.z_hat - toy_normalizing_constant(0.1)) < 3 * se);
}

TEST_CASE("runs are reproducible") {
  const ModelPtr toy = toy_model(2);
  const RunRecord a = run_is(*toy, PriorProposal{}, FixedM{3}, 2.0, 500, SequenceKind::RqmcOwen, 9);
  const RunRecord b = run_is(*toy, PriorProposal{}, FixedM{3}, 2.0, 500, SequenceKind::RqmcOwen, 9, RunOptions{3});
  REQUIRE(a.particles.size() == b.particles.size());
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    CHECK(a.particles[i].theta == b.particles[i].theta);
    CHECK(a.particles[i].distances == b.particles[i].distances);
    CHECK(a.particles[i].weight == b.particles[i].weight);
  }
  CHECK(a.z_hat == b.z_hat);
}

TEST_CASE("posterior estimates") {
  RunRecord rec;
  for (double x : {1.0, 2.0, 6.0}) {
    Particle p;
    p.theta = Vector::Constant(1, x);
    p.weight = 0.2;
    rec.particles.push_back(p);
  }
  CHECK(posterior_estimate(rec, phi_identity) == doctest::Approx(3.0).epsilon(1e-15));
  CHECK(posterior_estimate(rec, [](const Vector&) { return 1.25; }) == 1.25);
  rec.particles[0].weight = 0.0;
  rec.particles[1].weight = 1.0;
  rec.particles[2].weight = 1.0;
  CHECK(posterior_estimate(rec, phi_identity) == 4.0);
  CHECK(posterior_variance(rec, phi_identity) == 4.0);
  CHECK(normalizing_constant(rec) == doctest::Approx(2.0 / 3.0));
}

TEST_CASE("posterior mean is symmetric for the toy model") {
  const ModelPtr toy = toy_model(1);
  std::vector<double> est;
  for (std::uint64_t seed = 0; seed < 30; ++seed) {
    const RunRecord rec = run_is(*toy, PriorProposal{}, FixedM{1}, 0.1, 20'000, SequenceKind::MC, seed);
    est.push_back(posterior_estimate(rec, phi_identity));
  }
  double mean = 0, ss = 0;
  for (double e : est) mean += e / est.size();
  for (double e : est) ss += (e - mean) * (e - mean);
  const double se = std::sqrt(ss / (est.size() - 1) / est.size());
  CHECK(std::fabs(mean) < 3 * se);
}

TEST_CASE("particles outside the prior support are never simulated") {
  const ModelPtr toy = toy_model(1);
  const GaussianProposal wide{GaussianParams(Vector::Zero(1), Matrix::Constant(1, 1, 30.0))};
  const RunRecord rec = run_is(*toy, wide, FixedM{2}, 1.0, 400, SequenceKind::RqmcOwen, 4);
  std::size_t outside = 0, sims = 0;
  for (const auto& p : rec.particles) {
    sims += p.sims_used;
    if (std::fabs(p.theta[0]) > 10.0) {
      ++outside;
      CHECK(p.weight == 0.0);
      CHECK(p.sims_used == 0);
    }
  }
  CHECK(outside > 0);
  CHECK(rec.iteration_sims == sims);
}

TEST_CASE("hybrid schedule on the toy model") {
  const ModelPtr toy = toy_model(3);
  AisConfig config;
  config.n = 1000;
  config.kind = SequenceKind::RqmcOwen;
  config.seed = 5;
  config.strategy = Hybrid{3, 10, 2, 1.0, 0.5};
  const AisResult res = run_ais(*toy, config);
  CHECK(res.stop == StopReason::TargetReached);
  REQUIRE(res.records.size() > 5);
  CHECK(res.records.back().epsilon <= 1.0);
  std::size_t total = 0;
  for (std::size_t t = 0; t < res.records.size(); ++t) {
    const RunRecord& rec = res.records[t];
    total += rec.iteration_sims;
    CHECK(rec.cumulative_sims == total);
    CHECK(rec.iteration == t);
    if (t > 0) {
      CHECK(rec.epsilon < res.records[t - 1].epsilon);
      CHECK(rec.cumulative_sims > res.records[t - 1].cumulative_sims);
    }
    CHECK(std::holds_alternative<NegBinomial>(rec.scheme) == (t > 3));
  }
  // Once the threshold is small, the adaptive scheme spends more per iteration than the fixed stage.
  CHECK(res.records.back().iteration_sims > res.records[3].iteration_sims);
}

TEST_CASE("a loose target stops after one adaptive step") {
  const ModelPtr toy = toy_model(2);
  AisConfig config;
  config.n = 200;
  config.seed = 1;
  config.strategy = Hybrid{10, 5, 2, 100.0, 0.5};
  const AisResult res = run_ais(*toy, config);
  CHECK(res.stop == StopReason::TargetReached);
  CHECK(res.records.size() == 2);
}

TEST_CASE("ESS and median strategies reach their targets") {
  const ModelPtr toy = toy_model(2);
  for (const EpsilonStrategy& strategy : {EpsilonStrategy{EssTarget{0.5, 5}}, EpsilonStrategy{MedianShrink{5}}}) {
    AisConfig config;
    config.n = 300;
    config.seed = 2;
    config.strategy = strategy;
    config.eps_target = 2.0;
    config.family = ProposalFamily::Mixture;
    const AisResult res = run_ais(*toy, config);
    CHECK(res.stop == StopReason::TargetReached);
    CHECK(res.records.back().epsilon <= 2.0);
  }
}

TEST_CASE("particle mixture runs under MC and is rejected otherwise") {
  const ModelPtr toy = toy_model(1);
  AisConfig config;
  config.n = 200;
  config.seed = 3;
  config.kind = SequenceKind::MC;
  config.family = ProposalFamily::ParticleMixture;
  config.strategy = Hybrid{10, 5, 2, 1.0, 0.5};
  CHECK(run_ais(*toy, config).records.back().epsilon <= 1.0);
  config.kind = SequenceKind::QmcSobol;
  CHECK_THROWS(run_ais(*toy, config));
}

TEST_CASE("simulation budget stops the run") {
  const ModelPtr toy = toy_model(2);
  AisConfig config;
  config.n = 100;
  config.strategy = Hybrid{10, 10, 2, 1e-6, 0.5};
  config.sim_budget = 3000;
  const AisResult res = run_ais(*toy, config);
  CHECK(res.stop == StopReason::BudgetExhausted);
  CHECK(res.records.back().cumulative_sims >= 3000);
}
