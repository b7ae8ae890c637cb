#include "bt/jordan.hpp"

#include <algorithm>
#include <cmath>

#include "bt/errors.hpp"

namespace bt {

namespace {

// Indices of the two eigenvalues nearest the reference value.
std::pair<int, int> pair_near(const Eigen::VectorXcd& vals, Complex ref) {
    int a = -1, b = -1;
    double da = std::numeric_limits<double>::infinity();
    double db = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vals.size(); ++i) {
        const double d = std::abs(vals[i] - ref);
        if (d < da) {
            db = da;
            b = a;
            da = d;
            a = i;
        } else if (d < db) {
            db = d;
            b = i;
        }
    }
    return {a, b};
}

void apply_sign_gauge(Eigen::VectorXcd& v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i)
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            imax = i;
        }
    const Complex z = v[imax];
    if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) v = -v;
}

// The two coalescing eigenvalues at the located point, by contour-start
// sheet labels with a closest-pair fallback.
Complex coalescing_mean(const Eigen::VectorXcd& vals, const BranchPoint& bp) {
    const int i = bp.sheet_pair.first - 1;
    const int j = bp.sheet_pair.second - 1;
    if (i >= 0 && j >= 0 && i < vals.size() && j < vals.size() && i != j)
        return 0.5 * (vals[i] + vals[j]);
    const auto [a, b] = pair_near(vals, vals[std::max(0, std::min<int>(i, vals.size() - 1))]);
    return 0.5 * (vals[a] + vals[b]);
}

}  // namespace

JordanData extract_jordan(const OperatorMatrices& mats, const BranchPoint& bp) {
    JordanData jd;
    jd.g0 = bp.g0;

    EigensolveOptions raw;
    raw.normalize = false;
    const SpectralSolve at0 = eigensolve(mats, bp.g0, raw);
    jd.lambda0 = coalescing_mean(at0.eigenvalues, bp);

    const Eigen::MatrixXcd a0 = assemble(mats, bp.g0);
    Eigen::MatrixXcd shifted = a0;
    shifted.diagonal().array() -= jd.lambda0;

    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(shifted, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const auto& sigma = svd.singularValues();
    const int n = mats.size;
    if (sigma[n - 2] < 1e-6 * sigma[0])
        throw NotSimpleBranchPointError(
            "two singular values vanish: degeneracy beyond a second-order branch point");

    Eigen::VectorXcd v0 = svd.matrixV().col(n - 1);
    apply_sign_gauge(v0);
    jd.v0 = v0;

    // sqrt-law fit of the splitting at shrinking probe offsets along the
    // positive real direction: lambda_pm = lambda0 +/- eta0 sqrt(g - g0).
    const double g0_scale = std::max(std::abs(bp.g0), 1.0);
    Complex num{0.0, 0.0};
    double den = 0.0;
    Complex first_slope{0.0, 0.0};
    for (int k = 0; k < 4; ++k) {
        const double delta = g0_scale * std::pow(10.0, -3.0 - k);
        jd.gauge.eta0_probe_offsets.push_back(delta);
        const SpectralSolve probe = eigensolve(mats, bp.g0 + delta, raw);
        const auto [i, j] = pair_near(probe.eigenvalues, jd.lambda0);
        Complex half_gap = 0.5 * (probe.eigenvalues[i] - probe.eigenvalues[j]);
        const double root = std::sqrt(delta);
        Complex slope = half_gap / root;
        if (k == 0) {
            first_slope = slope;
        } else if ((std::conj(first_slope) * slope).real() < 0.0) {
            half_gap = -half_gap;
            slope = -slope;
        }
        num += root * half_gap;
        den += delta;
    }
    jd.eta0 = num / den;

    // Least-squares generalized mode through the same SVD, excluding the null
    // direction; the V columns are Hermitian-orthonormal, so y0 is
    // automatically Hermitian-orthogonal to v0.
    const Eigen::VectorXcd rhs = jd.eta0 * v0;
    Eigen::VectorXcd y0 = Eigen::VectorXcd::Zero(n);
    const Eigen::VectorXcd proj = svd.matrixU().adjoint() * rhs;
    for (int i = 0; i < n - 1; ++i) y0 += (proj[i] / sigma[i]) * svd.matrixV().col(i);
    y0 -= v0.dot(y0) * v0;  // Eigen's dot conjugates the first factor
    jd.y0 = y0;

    jd.jordan_residual = (a0 * y0 - jd.lambda0 * y0 - jd.eta0 * v0).norm();
    jd.C = 1.0 / std::sqrt(2.0 * bilinear_form(v0, y0));
    return jd;
}

std::vector<DiagnosticsRow> collapse_diagnostics(const OperatorMatrices& mats,
                                                 const BranchPoint& bp,
                                                 const std::vector<double>& offsets) {
    EigensolveOptions raw;
    raw.normalize = false;
    const SpectralSolve at0 = eigensolve(mats, bp.g0, raw);
    const Complex lambda0 = coalescing_mean(at0.eigenvalues, bp);

    std::vector<DiagnosticsRow> rows;
    for (double delta : offsets) {
        const SpectralSolve solve = eigensolve(mats, bp.g0 + delta, raw);
        const auto [i, j] = pair_near(solve.eigenvalues, lambda0);
        const Eigen::VectorXcd v1 = solve.coefficients.row(i).transpose();
        const Eigen::VectorXcd v2 = solve.coefficients.row(j).transpose();
        const double self1 = std::abs(bilinear_form(v1, v1));
        const double self2 = std::abs(bilinear_form(v2, v2));
        const double overlap = std::abs(v1.dot(v2));  // Hermitian, both unit norm
        rows.push_back({delta, "self_bilinear_1", self1});
        rows.push_back({delta, "self_bilinear_2", self2});
        rows.push_back({delta, "hermitian_overlap", overlap});
        rows.push_back({delta, "amplitude_1", self1 > 0.0 ? 1.0 / std::sqrt(self1) : 0.0});
        rows.push_back({delta, "amplitude_2", self2 > 0.0 ? 1.0 / std::sqrt(self2) : 0.0});
    }
    return rows;
}

Eigen::VectorXcd pair_projection_limit(const JordanData& jd, const Eigen::VectorXcd& f) {
    const Complex s = bilinear_form(jd.v0, jd.y0);
    const Complex tau = bilinear_form(jd.y0, jd.y0);
    const Complex fb = bilinear_form(f, jd.v0);
    const Complex fy = bilinear_form(f, jd.y0);
    const Complex b = fb / s;
    const Complex a = fy / s - tau * fb / (s * s);
    return a * jd.v0 + b * jd.y0;
}

Magnetization evolve_at_branch_point(const JordanData& jd, const OperatorMatrices& mats,
                                     const Magnetization& m0, double t) {
    if (m0.coefficients.size() != mats.size)
        throw DimensionError("evolve_at_branch_point: coefficient length must equal truncation");
    if (t < 0.0) throw ValidationError("evolve_at_branch_point: time must be non-negative");
    const SpectralSolve solve = eigensolve(mats, jd.g0);
    const auto [p1, p2] = pair_near(solve.eigenvalues, jd.lambda0);

    const Complex s = bilinear_form(jd.v0, jd.y0);
    const Complex tau = bilinear_form(jd.y0, jd.y0);
    const Complex fb = bilinear_form(m0.coefficients, jd.v0);
    const Complex fy = bilinear_form(m0.coefficients, jd.y0);
    const Complex b = fb / s;
    const Complex a = fy / s - tau * fb / (s * s);

    // Jordan 2-block: exp(-t [[l, eta], [0, l]]) = exp(-l t) [[1, -eta t], [0, 1]].
    const Complex decay = std::exp(-jd.lambda0 * t);
    Eigen::VectorXcd result = decay * ((a - jd.eta0 * t * b) * jd.v0 + b * jd.y0);

    for (int r = 0; r < mats.size; ++r) {
        if (r == p1 || r == p2) continue;
        if (solve.near_defect_flags[r])
            throw DefectiveSpectrumError(
                "a mode outside the Jordan pair is near-defective at this g");
        const Eigen::VectorXcd v = solve.coefficients.row(r).transpose();
        result += bilinear_form(v, m0.coefficients) * std::exp(-solve.eigenvalues[r] * t) * v;
    }
    return {result, m0.time + t};
}

std::vector<DiagnosticsRow> decomposition_regularity(const OperatorMatrices& mats,
                                                     const BranchPoint& bp,
                                                     const Eigen::VectorXcd& f,
                                                     const std::vector<double>& offsets) {
    const JordanData jd = extract_jordan(mats, bp);
    const Eigen::VectorXcd limit = pair_projection_limit(jd, f);

    std::vector<DiagnosticsRow> rows;
    for (double delta : offsets) {
        const SpectralSolve solve = eigensolve(mats, bp.g0 + delta);
        const auto [i, j] = pair_near(solve.eigenvalues, jd.lambda0);
        if (solve.near_defect_flags[i] || solve.near_defect_flags[j])
            throw DefectiveSpectrumError("offset too close to the branch point to normalize");
        const Eigen::VectorXcd v1 = solve.coefficients.row(i).transpose();
        const Eigen::VectorXcd v2 = solve.coefficients.row(j).transpose();
        const Eigen::VectorXcd f12 = bilinear_form(f, v1) * v1 + bilinear_form(f, v2) * v2;
        rows.push_back({delta, "deviation", (f12 - limit).norm()});
        rows.push_back({delta, "pair_projection_norm", f12.norm()});
    }
    return rows;
}

}  // namespace bt
