#pragma once

#include <cmath>
#include <utility>
#include <vector>

namespace bt {

struct QuadratureRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};

// Gauss-Legendre rule with n nodes on [a, b].
QuadratureRule gauss_legendre(int n, double a, double b);

template <class F>
double integrate(const QuadratureRule& q, F&& f) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.nodes.size(); ++i) s += q.weights[i] * f(q.nodes[i]);
    return s;
}

// Integrates f on [a, b] with Gauss-Legendre, doubling the node count from n0
// until the value changes by less than rel_tol.  Returns {value, final node count}.
template <class F>
std::pair<double, int> integrate_adaptive(F&& f, double a, double b,
                                          double rel_tol = 1e-12, int n0 = 16,
                                          int max_nodes = 1 << 14) {
    int n = n0;
    double prev = integrate(gauss_legendre(n, a, b), f);
    while (n < max_nodes) {
        n *= 2;
        double cur = integrate(gauss_legendre(n, a, b), f);
        double scale = std::max({std::abs(cur), std::abs(prev), 1e-300});
        if (std::abs(cur - prev) <= rel_tol * scale) return {cur, n};
        prev = cur;
    }
    return {prev, n};
}

}  // namespace bt
