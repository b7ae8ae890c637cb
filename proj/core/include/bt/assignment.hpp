#pragma once

#include <Eigen/Dense>
#include <vector>

namespace bt {

// Exact minimal-cost assignment on a square cost matrix (shortest augmenting
// paths with potentials, O(n^3)).  Returns row -> column.
std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost, double* total_cost = nullptr);

// Cost of the cheapest assignment that differs from `best` on the first
// n_rows rows: each of their matched edges is forbidden in turn and the
// problem re-solved.  Rows beyond n_rows act as free absorbers.
double second_best_assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& best,
                                   int n_rows = -1);

}  // namespace bt
