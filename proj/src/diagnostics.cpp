#include "qmcabc/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace qmcabc {

namespace {

std::size_t fixed_m_of(const RunRecord& rec) {
  const auto* fixed = std::get_if<FixedM>(&rec.scheme);
  if (!fixed) throw std::invalid_argument("variance estimators require fixed-M weights");
  if (fixed->M < 2) throw std::invalid_argument("variance estimators require M >= 2");
  return fixed->M;
}

}  // namespace

double var_hat_z(const RunRecord& rec) {
  const std::size_t M = fixed_m_of(rec);
  const auto N = static_cast<double>(rec.particles.size());
  double sum = 0.0;
  for (const auto& p : rec.particles) sum += p.prior_ratio * p.prior_ratio * p.l_hat * (1.0 - p.l_hat);
  return sum / (N * N * static_cast<double>(M - 1));
}

double var_hat_phi(const RunRecord& rec, const Estimand& phi) {
  const std::size_t M = fixed_m_of(rec);
  const double z = normalizing_constant(rec);
  if (!(z > 0.0)) throw std::domain_error("var_hat_phi: degenerate record");
  const double phi_hat = posterior_estimate(rec, phi);
  const auto N = static_cast<double>(rec.particles.size());
  double sum = 0.0;
  for (const auto& p : rec.particles) {
    if (p.l_hat <= 0.0 || p.l_hat >= 1.0) continue;
    const double c = phi(p.theta) - phi_hat;
    sum += p.prior_ratio * p.prior_ratio * c * c * p.l_hat * (1.0 - p.l_hat);
  }
  return sum / (z * z * N * static_cast<double>(M - 1));
}

RepetitionSummary summarize(std::span<const double> estimates, std::span<const double> sims,
                            std::optional<double> reference, std::optional<double> cost_factor) {
  const std::size_t R = estimates.size();
  if (R < 2) throw std::invalid_argument("summarize: need at least 2 repetitions");
  if (!sims.empty() && sims.size() != R) throw std::invalid_argument("summarize: sims length differs from estimates");
  RepetitionSummary s;
  s.estimates.assign(estimates.begin(), estimates.end());
  s.sims.assign(sims.begin(), sims.end());
  s.mean = std::accumulate(estimates.begin(), estimates.end(), 0.0) / static_cast<double>(R);
  double ss = 0.0;
  for (double e : estimates) ss += (e - s.mean) * (e - s.mean);
  s.empirical_variance = ss / static_cast<double>(R - 1);
  if (reference) {
    double se = 0.0;
    for (double e : estimates) se += (e - *reference) * (e - *reference);
    s.empirical_mse = se / static_cast<double>(R);
  }
  s.mean_sims = sims.empty() ? 0.0 : std::accumulate(sims.begin(), sims.end(), 0.0) / static_cast<double>(R);
  s.cost_factor = cost_factor ? *cost_factor : s.mean_sims;
  s.adjusted = (s.empirical_mse ? *s.empirical_mse : s.empirical_variance) * s.cost_factor;
  return s;
}

double star_discrepancy_small(const PointSet& points) {
  const std::size_t n = points.size();
  if (points.dim > 2) throw std::invalid_argument("star_discrepancy_small: only d <= 2 is supported");
  if (n == 0 || n > 512) throw std::invalid_argument("star_discrepancy_small: need 1 <= N <= 512");
  const double N = static_cast<double>(n);

  auto grid = [&](int j) {
    std::vector<double> g;
    for (std::size_t i = 0; i < n; ++i) g.push_back(points.points(static_cast<Eigen::Index>(i), j));
    g.push_back(1.0);
    std::sort(g.begin(), g.end());
    g.erase(std::unique(g.begin(), g.end()), g.end());
    return g;
  };

  double worst = 0.0;
  if (points.dim == 1) {
    for (double b : grid(0)) {
      std::size_t open = 0, closed = 0;
      for (std::size_t i = 0; i < n; ++i) {
        const double x = points.points(static_cast<Eigen::Index>(i), 0);
        open += x < b;
        closed += x <= b;
      }
      worst = std::max({worst, b - static_cast<double>(open) / N, static_cast<double>(closed) / N - b});
    }
    return worst;
  }

  const std::vector<double> gx = grid(0), gy = grid(1);
  std::vector<double> ys_open, ys_closed;
  for (double bx : gx) {
    ys_open.clear();
    ys_closed.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double x = points.points(static_cast<Eigen::Index>(i), 0);
      const double y = points.points(static_cast<Eigen::Index>(i), 1);
      if (x < bx) ys_open.push_back(y);
      if (x <= bx) ys_closed.push_back(y);
    }
    std::sort(ys_open.begin(), ys_open.end());
    std::sort(ys_closed.begin(), ys_closed.end());
    for (double by : gy) {
      const auto open = std::lower_bound(ys_open.begin(), ys_open.end(), by) - ys_open.begin();
      const auto closed = std::upper_bound(ys_closed.begin(), ys_closed.end(), by) - ys_closed.begin();
      const double volume = bx * by;
      worst = std::max({worst, volume - static_cast<double>(open) / N, static_cast<double>(closed) / N - volume});
    }
  }
  return worst;
}

}  // namespace qmcabc
