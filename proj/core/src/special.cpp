#include "bt/special.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <vector>

#include "bt/errors.hpp"

namespace bt {

double bessel_j(int m, double x) { return std::cyl_bessel_j(static_cast<double>(m), x); }

double bessel_j_prime(int m, double x) {
    if (m == 0) return -std::cyl_bessel_j(1.0, x);
    return 0.5 * (std::cyl_bessel_j(m - 1.0, x) - std::cyl_bessel_j(m + 1.0, x));
}

namespace {

// J''_m from the Bessel ODE, valid for x != 0.
double bessel_j_second(int m, double x) {
    return (static_cast<double>(m) * m / (x * x) - 1.0) * bessel_j(m, x) -
           bessel_j_prime(m, x) / x;
}

double polish_root(int m, double lo, double hi) {
    double flo = bessel_j_prime(m, lo);
    for (int it = 0; it < 80; ++it) {
        double mid = 0.5 * (lo + hi);
        double fm = bessel_j_prime(m, mid);
        if ((flo <= 0.0) == (fm <= 0.0)) {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-13 * hi) break;
    }
    double x = 0.5 * (lo + hi);
    for (int it = 0; it < 4; ++it) {
        double f = bessel_j_prime(m, x);
        double fp = bessel_j_second(m, x);
        if (fp == 0.0) break;
        double step = f / fp;
        if (std::abs(step) > 0.5) break;
        x -= step;
    }
    return x;
}

// Positive zeros of J'_m, enumerated by forward scanning; McMahon spacing
// (~pi between consecutive zeros) bounds the scan step.
std::vector<double>& positive_zero_list(int m) {
    static std::map<int, std::vector<double>> cache;
    static std::mutex mu;
    std::lock_guard<std::mutex> lock(mu);
    return cache[m];
}

void extend_positive_zeros(int m, int count) {
    auto& zeros = positive_zero_list(m);
    if (static_cast<int>(zeros.size()) >= count) return;
    // J'_m has constant sign on (0, j'_{m,1}); start scanning just above the
    // origin (m = 0) or just above the transition point at x ~ m.
    double x = zeros.empty() ? (m == 0 ? 0.05 : std::max(0.5, 0.8 * m)) : zeros.back() + 0.05;
    const double step = 0.05;
    double f = bessel_j_prime(m, x);
    int guard = 0;
    while (static_cast<int>(zeros.size()) < count) {
        double x2 = x + step;
        double f2 = bessel_j_prime(m, x2);
        if ((f <= 0.0) != (f2 <= 0.0)) zeros.push_back(polish_root(m, x, x2));
        x = x2;
        f = f2;
        if (++guard > 2000000)
            throw BasisConstructionError("bessel_j_prime_zero: zero scan did not terminate");
    }
}

}  // namespace

double bessel_j_prime_zero(int m, int k) {
    if (m < 0 || k < 1) throw BasisConstructionError("bessel_j_prime_zero: bad (m, k)");
    if (m == 0) {
        if (k == 1) return 0.0;
        extend_positive_zeros(0, k - 1);
        return positive_zero_list(0)[k - 2];
    }
    extend_positive_zeros(m, k);
    return positive_zero_list(m)[k - 1];
}

double bessel_j_real_order(double nu, double x) {
    if (nu >= 0.0) return std::cyl_bessel_j(nu, x);
    double p = -nu;
    return std::cyl_bessel_j(p, x) * std::cos(p * M_PI) -
           std::cyl_neumann(p, x) * std::sin(p * M_PI);
}

double bessel_j_first_zero(double nu) {
    double x = 0.05, f = bessel_j_real_order(nu, x);
    const double step = 0.05;
    for (int i = 0; i < 10000; ++i) {
        double x2 = x + step;
        double f2 = bessel_j_real_order(nu, x2);
        if ((f <= 0.0) != (f2 <= 0.0)) {
            double lo = x, hi = x2, flo = f;
            for (int it = 0; it < 100; ++it) {
                double mid = 0.5 * (lo + hi);
                double fm = bessel_j_real_order(nu, mid);
                if ((flo <= 0.0) == (fm <= 0.0)) {
                    lo = mid;
                    flo = fm;
                } else {
                    hi = mid;
                }
            }
            return 0.5 * (lo + hi);
        }
        x = x2;
        f = f2;
    }
    throw BasisConstructionError("bessel_j_first_zero: no zero found in scan range");
}

}  // namespace bt
