#pragma once

#include <vector>

#include <Eigen/Dense>

namespace qmcabc {

/// Minimum-cost perfect matching on a square cost matrix (shortest augmenting path with
/// potentials, O(n^3)). Returns the column assigned to each row.
std::vector<int> solve_assignment(const Eigen::MatrixXd& cost);

/// Earth mover's distance between two equal-size, equal-weight clouds with Euclidean ground cost:
/// (1/n) min over permutations of sum_i ||a_i - b_pi(i)||.
double emd(const Eigen::MatrixX2d& a, const Eigen::MatrixX2d& b);

}  // namespace qmcabc
