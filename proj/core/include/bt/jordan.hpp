#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "bt/bloch_torrey.hpp"
#include "bt/scanner.hpp"

namespace bt {

struct GaugeRecord {
    std::string v0_gauge = "hermitian-unit; largest coefficient has positive real part";
    std::string y0_gauge = "hermitian-orthogonal to v0; scale fixed by the Jordan relation";
    std::string branch = "principal (argument in (-pi, pi])";
    std::vector<double> eta0_probe_offsets;  // |g - g0| values used for the sqrt-law fit
};

// Local data at a second-order branch point: the collapsed eigenmode v0, the
// generalized mode y0 with B0 y0 = lambda0 y0 + eta0 v0, and the collapse
// constant C = (2 (v0|y0))^{-1/2}.
struct JordanData {
    Complex g0;
    Complex lambda0;
    Complex eta0;
    Complex C;
    Eigen::VectorXcd v0;
    Eigen::VectorXcd y0;
    double jordan_residual = 0.0;  // ||B0 y0 - lambda0 y0 - eta0 v0||
    GaugeRecord gauge;
};

JordanData extract_jordan(const OperatorMatrices& mats, const BranchPoint& bp);

struct DiagnosticsRow {
    double delta;
    std::string quantity;
    double value;
};

// Collapse evidence at offsets g0 + delta: bilinear self-products of the two
// coalescing modes, their Hermitian overlap, and the amplitude of the
// bilinear-normalized modes (the (g - g0)^{-1/4} divergence).
std::vector<DiagnosticsRow> collapse_diagnostics(const OperatorMatrices& mats,
                                                 const BranchPoint& bp,
                                                 const std::vector<double>& offsets);

// Magnetization transport over the basis (v0, y0, v3, v4, ...): the Jordan
// pair contributes exp(-lambda0 t) [[1, -eta0 t], [0, 1]], the remaining
// modes decay with their own eigenvalues.
Magnetization evolve_at_branch_point(const JordanData& jd, const OperatorMatrices& mats,
                                     const Magnetization& m0, double t);

// Projection of f onto the coalescing pair: f12 = (f|v1) v1 + (f|v2) v2 near
// g0, against its finite limit built from (v0, y0).  The deviation decays as
// sqrt(|g - g0|).
std::vector<DiagnosticsRow> decomposition_regularity(const OperatorMatrices& mats,
                                                     const BranchPoint& bp,
                                                     const Eigen::VectorXcd& f,
                                                     const std::vector<double>& offsets);

// Limit of the pair projection at the branch point (gauge-invariant under
// y0 -> alpha y0 + beta v0).
Eigen::VectorXcd pair_projection_limit(const JordanData& jd, const Eigen::VectorXcd& f);

}  // namespace bt
