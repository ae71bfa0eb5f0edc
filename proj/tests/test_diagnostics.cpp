#include <doctest.h>

#include <algorithm>

#include "qmcabc/diagnostics.hpp"

using namespace qmcabc;

namespace {

RunRecord record(std::vector<double> l_hat, std::size_t M) {
  RunRecord rec;
  rec.scheme = FixedM{M};
  for (std::size_t i = 0; i < l_hat.size(); ++i) {
    Particle p;
    p.theta = Vector::Constant(1, static_cast<double>(i));
    p.l_hat = l_hat[i];
    p.prior_ratio = 1.0;
    p.weight = l_hat[i];
    rec.particles.push_back(p);
  }
  double z = 0;
  for (double l : l_hat) z += l;
  rec.z_hat = z / static_cast<double>(l_hat.size());
  return rec;
}

PointSet points_1d(std::vector<double> x) {
  PointSet ps;
  ps.dim = 1;
  ps.points = RowMatrix(static_cast<Eigen::Index>(x.size()), 1);
  for (std::size_t i = 0; i < x.size(); ++i) ps.points(static_cast<Eigen::Index>(i), 0) = x[i];
  return ps;
}

}  // namespace

TEST_CASE("normalizing-constant variance estimator") {
  CHECK(var_hat_z(record({0.5}, 2)) == 0.25);
  CHECK(var_hat_z(record({0, 1, 1, 0}, 10)) == 0.0);
  CHECK_THROWS(var_hat_z(record({0.5}, 1)));
}

TEST_CASE("posterior-mean variance estimator") {
  const auto constant = [](const Vector&) { return 3.0; };
  CHECK(var_hat_phi(record({0.2, 0.5, 0.9}, 10), constant) == 0.0);
  const auto identity = [](const Vector& t) { return t[0]; };
  CHECK(var_hat_phi(record({0, 1, 1}, 10), identity) == 0.0);
  CHECK(var_hat_phi(record({0.2, 0.5, 0.9}, 10), identity) > 0.0);
}

TEST_CASE("repetition summaries") {
  const std::vector<double> same = {1, 1, 1}, sims = {10, 10, 10};
  CHECK(summarize(same, sims).empirical_variance == 0.0);
  const std::vector<double> two = {0, 2}, two_sims = {4, 6};
  const RepetitionSummary s = summarize(two, two_sims, 1.0);
  CHECK(s.empirical_variance == 2.0);
  CHECK(s.empirical_mse.value() == 1.0);
  CHECK(s.mean_sims == 5.0);
  CHECK(s.adjusted == 5.0);
  const RepetitionSummary v = summarize(two, two_sims, std::nullopt, 10.0);
  CHECK(v.adjusted == 20.0);
}

TEST_CASE("star discrepancy by hand") {
  CHECK(star_discrepancy_small(points_1d({0.5})) == 0.5);
  CHECK(star_discrepancy_small(points_1d({0.25, 0.75})) == 0.25);
}

TEST_CASE("Sobol points beat typical MC discrepancy") {
  const double sobol = star_discrepancy_small(generate(SequenceKind::QmcSobol, 2, 256));
  std::vector<double> mc;
  for (std::uint64_t seed = 0; seed < 100; ++seed) mc.push_back(star_discrepancy_small(generate(SequenceKind::MC, 2, 256, seed)));
  std::nth_element(mc.begin(), mc.begin() + 50, mc.end());
  CHECK(sobol < mc[50]);
}
