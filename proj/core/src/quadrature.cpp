#include "bt/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace bt {

QuadratureRule gauss_legendre(int n, double a, double b) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: n must be >= 1");
    QuadratureRule q;
    q.nodes.resize(n);
    q.weights.resize(n);
    const int m = (n + 1) / 2;
    const double xm = 0.5 * (b + a);
    const double xl = 0.5 * (b - a);
    for (int i = 0; i < m; ++i) {
        // Newton iteration on P_n, seeded by the Chebyshev approximation of
        // the i-th root.
        double z = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double z1, pp;
        do {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 0; j < n; ++j) {
                double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j + 1.0) * z * p2 - j * p3) / (j + 1.0);
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            z1 = z;
            z = z1 - p1 / pp;
        } while (std::abs(z - z1) > 1e-15);
        q.nodes[i] = xm - xl * z;
        q.nodes[n - 1 - i] = xm + xl * z;
        q.weights[i] = 2.0 * xl / ((1.0 - z * z) * pp * pp);
        q.weights[n - 1 - i] = q.weights[i];
    }
    return q;
}

}  // namespace bt
