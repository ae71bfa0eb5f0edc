#pragma once

#include <optional>
#include <span>
#include <vector>

#include "qmcabc/engine.hpp"
#include "qmcabc/lds.hpp"

namespace qmcabc {

/// Plug-in estimate of E[Var(Z-hat | theta_1:N)] for fixed-M weights:
/// 1/(N^2 (M-1)) sum (p/q)^2 L(1-L).
double var_hat_z(const RunRecord& rec);

/// Plug-in asymptotic variance of the self-normalized estimate (before dividing by N):
/// 1/(Z^2 N (M-1)) sum (p/q)^2 (phi - phi_hat)^2 L(1-L).
double var_hat_phi(const RunRecord& rec, const Estimand& phi);

struct RepetitionSummary {
  std::vector<double> estimates;
  std::vector<double> sims;
  double mean = 0.0;
  double empirical_variance = 0.0;
  std::optional<double> empirical_mse;
  double mean_sims = 0.0;
  double cost_factor = 1.0;
  /// Variance (or MSE when a reference is given) times the cost factor.
  double adjusted = 0.0;
};

/// Repetition statistics; the cost factor defaults to mean cumulative simulations.
RepetitionSummary summarize(std::span<const double> estimates, std::span<const double> sims,
                            std::optional<double> reference = std::nullopt,
                            std::optional<double> cost_factor = std::nullopt);

/// Exact star discrepancy for d <= 2 and N <= 512 by enumerating anchored boxes whose upper
/// corners are built from point coordinates and 1, counting open and closed boxes.
double star_discrepancy_small(const PointSet& points);

}  // namespace qmcabc
