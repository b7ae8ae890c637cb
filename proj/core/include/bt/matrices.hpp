#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bt/geometry.hpp"

namespace bt {

// Internal per-mode data needed to evaluate disk basis functions in space.
struct DiskModeShape {
    int m = 0;           // angular index
    int k = 0;           // radial index (k = 1 is the lowest radial profile)
    bool sine = false;   // sin(m theta) family; false = cos / constant family
    double alpha = 0.0;  // k-th zero of J'_m
    double radial_norm = 0.0;
};

// Truncated representation of the operator: diagonal Laplacian spectrum and
// the coordinate matrix of the gradient direction.  The operator at complex g
// is lambda0.asDiagonal() - i g B.
struct OperatorMatrices {
    Geometry geometry;
    int size = 0;             // truncation N
    Eigen::VectorXd lambda0;  // sorted non-decreasing, units 1/L^2
    Eigen::MatrixXd B;        // real symmetric, units L
    std::vector<LaplaceMode> modes;
    std::vector<DiskModeShape> disk_shapes;  // disk only
    int quadrature_nodes = 0;                // final node count (0 = closed forms)
};

// Neumann cosine basis of the centered interval x in (-L/2, L/2).  lambda0[n]
// = pi^2 (n-1)^2 / L^2; B from the closed-form coordinate matrix elements.
OperatorMatrices build_interval(double length, int n);

// Neumann Laplacian basis of the disk of diameter L: Bessel radial profiles
// times {1, cos(m theta), sin(m theta)}.  B entries from radial
// Gauss-Legendre quadrature after the |dm| = 1 angular selection rule.
OperatorMatrices build_disk(double diameter, int n);

// Reads matrices in the plain-text exchange format and validates the
// invariants (B symmetric, lambda0 sorted).  Parity metadata is set to None.
OperatorMatrices load_imported(const std::string& path);

// Writes the same format with 17 significant digits (lossless round trip).
void export_matrices(const OperatorMatrices& m, const std::string& path);

// Value of the j-th Laplacian basis function (1-based) at a point.  The
// interval uses only x; the disk uses (x, y) around the center.  Throws
// UnsupportedGeometryError for imported matrices.
double basis_value(const OperatorMatrices& m, int j, double x, double y = 0.0);

}  // namespace bt
