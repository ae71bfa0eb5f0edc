#include "qmcabc/transform.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace qmcabc {

double inverse_normal_cdf(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw std::domain_error("inverse_normal_cdf: p = " + std::to_string(p) + " outside (0, 1)");
  }
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((r * 2509.0809287301226727 + 33430.575583588128105) * r + 67265.770927008700853) * r +
                45921.953931549871457) * r + 13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((r * 5226.495278852545925 + 28729.085735721942674) * r + 39307.89580009271061) * r +
                21213.794301586595867) * r + 5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double value;
  if (r <= 5.0) {
    r -= 1.6;
    value = (((((((r * 7.7454501427834140764e-4 + 0.0227238449892691845833) * r + 0.24178072517745061177) * r +
                 1.27045825245236838258) * r + 3.64784832476320460504) * r + 5.7694972214606914055) * r +
              4.6303378461565452959) * r + 1.42343711074968357734) /
            (((((((r * 1.05075007164441684324e-9 + 5.475938084995344946e-4) * r + 0.0151986665636164571966) * r +
                 0.14810397642748007459) * r + 0.68976733498510000455) * r + 1.6763848301838038494) * r +
              2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    value = (((((((r * 2.01033439929228813265e-7 + 2.71155556874348757815e-5) * r + 0.0012426609473880784386) * r +
                 0.026532189526576123093) * r + 0.29656057182850489123) * r + 1.7848265399172913358) * r +
              5.4637849111641143699) * r + 6.6579046435011037772) /
            (((((((r * 2.04426310338993978564e-15 + 1.4215117583164458887e-7) * r + 1.8463183175100546818e-5) * r +
                 7.868691311456132591e-4) * r + 0.0148753612908506148525) * r + 0.13692988092273580531) * r +
              0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -value : value;
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double standard_normal(UniformStream& stream) { return inverse_normal_cdf(stream.uniform_open()); }

BoxBounds::BoxBounds(Vector lo_, Vector hi_) : lo(std::move(lo_)), hi(std::move(hi_)) {
  if (lo.size() != hi.size() || lo.size() == 0) throw std::invalid_argument("BoxBounds: mismatched bounds");
  for (Eigen::Index j = 0; j < lo.size(); ++j) {
    if (!(lo[j] < hi[j])) throw std::invalid_argument("BoxBounds: lo must be < hi in every coordinate");
  }
}

BoxBounds BoxBounds::cube(int dim, double lo, double hi) {
  return BoxBounds(Vector::Constant(dim, lo), Vector::Constant(dim, hi));
}

double BoxBounds::volume() const { return (hi - lo).prod(); }

bool BoxBounds::contains(const Vector& x) const {
  if (x.size() != lo.size()) return false;
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    if (x[j] < lo[j] || x[j] > hi[j]) return false;
  }
  return true;
}

Vector box_map(std::span<const double> u, const BoxBounds& box) {
  if (static_cast<int>(u.size()) != box.dim()) throw std::invalid_argument("box_map: dimension mismatch");
  Vector x(box.dim());
  for (int j = 0; j < box.dim(); ++j) x[j] = box.lo[j] + u[j] * (box.hi[j] - box.lo[j]);
  return x;
}

Matrix cholesky_with_jitter(const Matrix& covariance) {
  const Eigen::Index d = covariance.rows();
  if (d == 0 || covariance.cols() != d) throw std::invalid_argument("cholesky_with_jitter: matrix must be square");
  if (!covariance.allFinite()) throw std::domain_error("cholesky_with_jitter: non-finite covariance");

  auto try_factor = [](const Matrix& m, Matrix& out) {
    Eigen::LLT<Matrix> llt(m);
    if (llt.info() != Eigen::Success) return false;
    out = llt.matrixL();
    for (Eigen::Index i = 0; i < out.rows(); ++i) {
      if (!(out(i, i) > 0.0) || !std::isfinite(out(i, i))) return false;
    }
    return true;
  };

  Matrix chol;
  if (try_factor(covariance, chol)) return chol;
  const double trace = covariance.trace();
  double jitter = trace > 0.0 ? 1e-10 * trace / static_cast<double>(d) : 1e-10;
  for (int attempt = 0; attempt < 30; ++attempt, jitter *= 10.0) {
    Matrix adjusted = covariance;
    adjusted.diagonal().array() += jitter;
    if (try_factor(adjusted, chol)) return chol;
  }
  throw std::domain_error("cholesky_with_jitter: covariance could not be factorized");
}

GaussianParams::GaussianParams(Vector mean_, Matrix chol_) : mean(std::move(mean_)), chol(std::move(chol_)) {
  if (chol.rows() != mean.size() || chol.cols() != mean.size()) {
    throw std::invalid_argument("GaussianParams: factor dimension does not match mean");
  }
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < chol.rows(); ++i) {
    if (!(chol(i, i) > 0.0)) throw std::invalid_argument("GaussianParams: factor diagonal must be positive");
    log_det += std::log(chol(i, i));
  }
  chol.triangularView<Eigen::StrictlyUpper>().setZero();
  log_norm_ = -log_det - 0.5 * static_cast<double>(mean.size()) * std::log(2.0 * std::numbers::pi);
}

GaussianParams GaussianParams::from_covariance(Vector mean, const Matrix& covariance) {
  return GaussianParams(std::move(mean), cholesky_with_jitter(covariance));
}

double GaussianParams::log_density(const Vector& x) const {
  const Vector z = chol.triangularView<Eigen::Lower>().solve(x - mean);
  return log_norm_ - 0.5 * z.squaredNorm();
}

double GaussianParams::density(const Vector& x) const { return std::exp(log_density(x)); }

Vector gaussian_map(std::span<const double> u, const GaussianParams& g) {
  if (static_cast<int>(u.size()) != g.dim()) throw std::invalid_argument("gaussian_map: dimension mismatch");
  Vector z(g.dim());
  for (int j = 0; j < g.dim(); ++j) z[j] = inverse_normal_cdf(u[j]);
  return g.mean + g.chol.triangularView<Eigen::Lower>() * z;
}

Vector triangle_map(std::span<const double> u) {
  if (u.size() != 2) throw std::invalid_argument("triangle_map: expects a 2-vector");
  // Vertices (0,0), (1,0), (1/2,1/2): p = sqrt(u1) * ((1 - u2) B + u2 C).
  const double s = std::sqrt(u[0]);
  Vector out(2);
  out[0] = s * (1.0 - 0.5 * u[1]);
  out[1] = 0.5 * s * u[1];
  return out;
}

bool in_triangle_region(double alpha, double gamma) {
  return gamma >= 0.0 && alpha > gamma && alpha + gamma <= 1.0;
}

}  // namespace qmcabc
