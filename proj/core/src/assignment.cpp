#include "bt/assignment.hpp"

#include <limits>
#include <stdexcept>

namespace bt {

std::vector<int> min_cost_assignment(const Eigen::MatrixXd& cost, double* total_cost) {
    const int n = static_cast<int>(cost.rows());
    if (cost.cols() != n) throw std::invalid_argument("min_cost_assignment: square matrix required");
    const double inf = std::numeric_limits<double>::infinity();

    // 1-based potentials; p[j] = row currently matched to column j.
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<int> p(n + 1, 0), way(n + 1, 0);
    for (int i = 1; i <= n; ++i) {
        p[0] = i;
        int j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const int i0 = p[j0];
            int j1 = -1;
            double delta = inf;
            for (int j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (int j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[p[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (p[j0] != 0);
        do {
            const int j1 = way[j0];
            p[j0] = p[j1];
            j0 = j1;
        } while (j0);
    }

    std::vector<int> row_to_col(n, -1);
    double sum = 0.0;
    for (int j = 1; j <= n; ++j) {
        if (p[j] > 0) {
            row_to_col[p[j] - 1] = j - 1;
            sum += cost(p[j] - 1, j - 1);
        }
    }
    if (total_cost) *total_cost = sum;
    return row_to_col;
}

double second_best_assignment_cost(const Eigen::MatrixXd& cost, const std::vector<int>& best,
                                   int n_rows) {
    const int n = static_cast<int>(cost.rows());
    if (n_rows < 0 || n_rows > n) n_rows = n;
    const double inf = std::numeric_limits<double>::infinity();
    double second = inf;
    // Any assignment differing from the optimum avoids at least one of its
    // edges; forbidding each in turn scans all candidates.
    const double big = 1e120;
    for (int i = 0; i < n_rows; ++i) {
        Eigen::MatrixXd c = cost;
        c(i, best[i]) = big;
        double total = 0.0;
        min_cost_assignment(c, &total);
        if (total < big / 2) second = std::min(second, total);
    }
    return second;
}

}  // namespace bt
