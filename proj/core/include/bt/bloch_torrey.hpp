#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bt/matrices.hpp"

namespace bt {

using Complex = std::complex<double>;

struct EigensolveOptions {
    // Below this bilinear self-product (relative to the unit Hermitian norm)
    // a mode is flagged near-defective and left unnormalized.
    double defect_tol = 1e-6;
    // Residual bound, relative to the Frobenius norm of the assembled matrix.
    double residual_factor = 1e-10;
    bool normalize = true;
};

// Full dense spectrum of lambda0.asDiagonal() - i g B at one g.
struct SpectralSolve {
    Complex g;
    int truncation = 0;
    Eigen::VectorXcd eigenvalues;    // sorted by (Re, Im) ascending
    Eigen::MatrixXcd coefficients;   // row n = coefficients of v_n over the basis
    Eigen::VectorXd residuals;       // ||A v - lambda v||_2 per Hermitian-unit pair
    std::vector<bool> near_defect_flags;
    bool normalized = false;
    double matrix_scale = 0.0;       // Frobenius norm of the assembled matrix
};

Eigen::MatrixXcd assemble(const OperatorMatrices& mats, Complex g);

SpectralSolve eigensolve(const OperatorMatrices& mats, Complex g,
                         const EigensolveOptions& options = {});

// Conjugation-free pairing sum_j f_j h_j; the natural inner product of the
// complex-symmetric operator over a real orthonormal basis.
Complex bilinear_form(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h);

struct Point {
    double x = 0.0;
    double y = 0.0;
};

// v_n(r) = sum_j V_{n,j} u_j(r) with the geometry's basis functions (n 1-based).
std::vector<Complex> evaluate_mode(const OperatorMatrices& mats, const SpectralSolve& solve,
                                   int n, const std::vector<Point>& points);

// Coefficient vector over the Laplacian basis at a diffusion time (units L^2;
// physical time is time / D).
struct Magnetization {
    Eigen::VectorXcd coefficients;
    double time = 0.0;
};

// Transports m0 through the eigenbasis with weights exp(-lambda_n t); equals
// the matrix exponential exp(-t (Lambda - i g B)) applied to m0.  Throws
// DefectiveSpectrumError when the solve at g carries near-defect flags.
Magnetization evolve(const OperatorMatrices& mats, Complex g, const Magnetization& m0, double t);

// Number of leading sheets stable between a truncation and its doubling:
// |lambda_n(N) - lambda_n(2N)| <= tol * max(1, |lambda_n|) for all n below
// the returned count.
int trusted_sheet_count(const OperatorMatrices& mats, const OperatorMatrices& mats_doubled,
                        Complex g, double tol = 1e-9);

}  // namespace bt
