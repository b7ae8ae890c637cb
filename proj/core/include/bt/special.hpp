#pragma once

namespace bt {

// Bessel function of the first kind, integer order m >= 0.
double bessel_j(int m, double x);

// d/dx J_m(x), integer order m >= 0.
double bessel_j_prime(int m, double x);

// k-th zero of J'_m (k >= 1), found by bracketing plus bisection-then-Newton.
// For m = 0 the zero at x = 0 is counted as k = 1, so that the constant
// Neumann mode of the disk carries index (0, 1).
double bessel_j_prime_zero(int m, int k);

// J_nu for real order; negative orders go through the reflection
// J_{-nu} = J_nu cos(nu pi) - Y_nu sin(nu pi).
double bessel_j_real_order(double nu, double x);

// First positive zero of J_nu, real order.
double bessel_j_first_zero(double nu);

}  // namespace bt
