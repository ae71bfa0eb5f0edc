#include <doctest.h>

#include <boost/math/distributions/normal.hpp>
#include <cmath>
#include <set>

#include "qmcabc/lds.hpp"
#include "qmcabc/transform.hpp"

using namespace qmcabc;

namespace {

// Independent quantile: Newton iterations on the erfc-based CDF in long double.
double quantile_oracle(double p) {
  long double x = 0.0L;
  for (int i = 0; i < 100; ++i) {
    const long double cdf = 0.5L * std::erfc(-x / std::sqrt(2.0L));
    const long double pdf = std::exp(-0.5L * x * x) / std::sqrt(2.0L * 3.14159265358979323846264338327950288L);
    const long double step = (cdf - p) / pdf;
    x -= step;
    if (std::fabs(step) < 1e-19L) break;
  }
  return static_cast<double>(x);
}

}  // namespace

TEST_CASE("inverse normal CDF") {
  CHECK(inverse_normal_cdf(0.5) == 0.0);
  CHECK(inverse_normal_cdf(0.975) == doctest::Approx(1.959963984540054).epsilon(1e-14));
  CHECK(std::fabs(inverse_normal_cdf(0.975) - quantile_oracle(0.975)) < 1e-14);
  boost::math::normal_distribution<double> normal;
  for (double p : {1e-4, 0.01, 0.2, 0.25, 0.4999}) {
    CHECK(std::fabs(inverse_normal_cdf(p) + inverse_normal_cdf(1 - p)) < 1e-12 * (1 + std::fabs(inverse_normal_cdf(p))));
  }
  for (double p : {1e-300, 1e-12, 1e-4, 0.01, 0.2, 0.4999, 0.73, 0.95, 0.999999, 1 - 1e-15}) {
    const double ref = boost::math::quantile(normal, p);
    CHECK(std::fabs(inverse_normal_cdf(p) - ref) < 1e-13 * (1 + std::fabs(ref)));
  }
  for (double p : {1e-6, 0.3, 0.9}) CHECK(std::fabs(inverse_normal_cdf(p) - quantile_oracle(p)) < 1e-13);
  CHECK_THROWS_AS(inverse_normal_cdf(0.0), std::domain_error);
  CHECK_THROWS_AS(inverse_normal_cdf(1.0), std::domain_error);
}

TEST_CASE("box map") {
  const BoxBounds box = BoxBounds::cube(2, -10, 10);
  const double mid[] = {0.5, 0.5};
  CHECK(box_map(mid, box).isZero());
  const double zero[] = {0.0, 0.0};
  CHECK(box_map(zero, box) == box.lo);
  const double q[] = {0.25};
  CHECK(box_map(q, BoxBounds::cube(1, -6, 2))[0] == -4.0);
  CHECK(box.volume() == 400.0);
}

TEST_CASE("gaussian map") {
  Vector mean(2);
  mean << 1.0, -2.0;
  Matrix cov(2, 2);
  cov << 2.0, 0.6, 0.6, 1.0;
  const GaussianParams g = GaussianParams::from_covariance(mean, cov);
  const double half[] = {0.5, 0.5};
  CHECK((gaussian_map(half, g) - mean).norm() < 1e-15);

  const GaussianParams standard(Vector::Zero(1), Matrix::Identity(1, 1));
  const double tail[] = {0.975};
  CHECK(gaussian_map(tail, standard)[0] == doctest::Approx(quantile_oracle(0.975)).epsilon(1e-14));

  const PointSet ps = generate(SequenceKind::RqmcOwen, 2, 100'000, 5);
  Matrix x(ps.size(), 2);
  for (std::size_t i = 0; i < ps.size(); ++i) x.row(static_cast<Eigen::Index>(i)) = gaussian_map(ps.row(i), g);
  const Vector m = x.colwise().mean();
  const Matrix c = x.rowwise() - m.transpose();
  const Matrix sample_cov = c.transpose() * c / static_cast<double>(ps.size());
  CHECK((sample_cov - cov).norm() / cov.norm() < 0.02);
}

TEST_CASE("gaussian density") {
  const GaussianParams g(Vector::Zero(2), Matrix::Identity(2, 2));
  CHECK(g.density(Vector::Zero(2)) == doctest::Approx(1.0 / (2 * M_PI)).epsilon(1e-14));
}

TEST_CASE("cholesky with jitter accepts singular matrices") {
  const Matrix zero = Matrix::Zero(2, 2);
  const Matrix c = cholesky_with_jitter(zero);
  CHECK(c.allFinite());
  CHECK(c(0, 0) > 0.0);
  Matrix rank_one(2, 2);
  rank_one << 1, 1, 1, 1;
  const Matrix r = cholesky_with_jitter(rank_one);
  CHECK(((r * r.transpose()) - rank_one).norm() < 1e-6);
}

TEST_CASE("triangle map covers the tuberculosis prior region") {
  const PointSet ps = generate(SequenceKind::MC, 2, 1'000'000, 2);
  double sum = 0, sum_sq = 0;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    const Vector t = triangle_map(ps.row(i));
    REQUIRE(t[1] < t[0]);
    REQUIRE(t[0] + t[1] < 1.0);
    REQUIRE(in_triangle_region(t[0], t[1]));
    sum += t[0];
    sum_sq += t[0] * t[0];
  }
  const double n = static_cast<double>(ps.size());
  const double mean = sum / n;
  const double se = std::sqrt((sum_sq / n - mean * mean) / n);
  // E[alpha] = 4 * integral of alpha over the triangle (0,0), (1,0), (1/2,1/2) = 1/2.
  CHECK(std::fabs(mean - 0.5) < 3 * se);
}

TEST_CASE("triangle map is injective on a grid") {
  std::set<std::pair<double, double>> seen;
  for (int i = 0; i < 100; ++i) {
    for (int j = 0; j < 100; ++j) {
      const double u[] = {(i + 0.5) / 100.0, (j + 0.5) / 100.0};
      const Vector t = triangle_map(u);
      seen.insert({t[0], t[1]});
    }
  }
  CHECK(seen.size() == 10'000);
}
