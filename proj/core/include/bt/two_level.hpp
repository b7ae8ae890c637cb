#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

namespace bt {

using Complex = std::complex<double>;

// Two-level matrix [[lambda0 + a, b], [c, lambda0 - a]].  The discriminant
// d = b c + a^2 controls the eigenvalue splitting lambda0 +/- sqrt(d).
struct TwoByTwo {
    Complex lambda0{0.0, 0.0};
    Complex a{0.0, 0.0};
    Complex b{0.0, 0.0};
    Complex c{0.0, 0.0};

    Complex discriminant() const { return b * c + a * a; }
    Eigen::Matrix2cd matrix() const;
};

struct Eig2 {
    Complex lambda_plus;
    Complex lambda_minus;
    Eigen::Vector2cd x_plus;
    Eigen::Vector2cd x_minus;
    Complex d;
};

// Eigenpairs lambda0 +/- sqrt(d) with eigenvectors (b, +/- sqrt(d) - a),
// principal branch.  Throws when d = 0 (defective case; use jordan2).
Eig2 eig2(const TwoByTwo& m);

struct Jordan2 {
    Eigen::Vector2cd x0;  // eigenvector (b, -a)
    Eigen::Vector2cd y0;  // generalized eigenvector (0, 1): A y0 = lambda0 y0 + x0
};

// Jordan pair of the defective case d = 0, b != 0.
Jordan2 jordan2(const TwoByTwo& m);

enum class SheetModel { Sqrt, Quartic };

// Explicit multivalued sheet families, principal branch (argument in
// (-pi, pi], cut on the negative real semi-axis):
//   Sqrt    -> { +sqrt(g), -sqrt(g) }
//   Quartic -> { +/- sqrt(+/- sqrt(g) + 1) }, ordered (++, +-, -+, --)
std::vector<Complex> sheets(SheetModel model, Complex g);

}  // namespace bt
