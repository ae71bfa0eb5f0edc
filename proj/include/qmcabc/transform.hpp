#pragma once

#include <span>

#include <Eigen/Dense>

#include "qmcabc/random.hpp"

namespace qmcabc {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Standard normal quantile (Wichura's AS 241, PPND16; about 1e-16 relative accuracy).
double inverse_normal_cdf(double p);
double normal_cdf(double x);
/// One standard normal draw by inversion of an open-interval uniform.
double standard_normal(UniformStream& stream);

struct BoxBounds {
  Vector lo;
  Vector hi;

  BoxBounds(Vector lo_, Vector hi_);
  static BoxBounds cube(int dim, double lo, double hi);

  int dim() const { return static_cast<int>(lo.size()); }
  double volume() const;
  bool contains(const Vector& x) const;
};

Vector box_map(std::span<const double> u, const BoxBounds& box);

/// Lower Cholesky factor of `covariance`; on failure retries with diagonal jitter starting at
/// 1e-10 * trace / d (1e-10 when the trace vanishes), growing tenfold per attempt.
Matrix cholesky_with_jitter(const Matrix& covariance);

/// N(mean, C C^T) with a lower-triangular C.
struct GaussianParams {
  Vector mean;
  Matrix chol;

  GaussianParams() = default;
  GaussianParams(Vector mean_, Matrix chol_);
  static GaussianParams from_covariance(Vector mean, const Matrix& covariance);

  int dim() const { return static_cast<int>(mean.size()); }
  Matrix covariance() const { return chol * chol.transpose(); }
  double log_density(const Vector& x) const;
  double density(const Vector& x) const;

 private:
  double log_norm_ = 0.0;
};

Vector gaussian_map(std::span<const double> u, const GaussianParams& g);

/// Square-root map of [0,1)^2 onto {0 < gamma < alpha, alpha + gamma < 1}, returned as (alpha, gamma).
/// Uniform input gives the constant density 4 on the region.
Vector triangle_map(std::span<const double> u);
bool in_triangle_region(double alpha, double gamma);

}  // namespace qmcabc
