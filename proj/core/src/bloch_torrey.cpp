#include "bt/bloch_torrey.hpp"

#include <algorithm>
#include <numeric>

#include "bt/errors.hpp"

namespace bt {

Eigen::MatrixXcd assemble(const OperatorMatrices& mats, Complex g) {
    if (!std::isfinite(g.real()) || !std::isfinite(g.imag()))
        throw ValidationError("assemble: g must be finite");
    Eigen::MatrixXcd a = (-Complex(0.0, 1.0) * g) * mats.B.cast<Complex>();
    a.diagonal() += mats.lambda0.cast<Complex>();
    return a;
}

Complex bilinear_form(const Eigen::VectorXcd& f, const Eigen::VectorXcd& h) {
    if (f.size() != h.size()) throw DimensionError("bilinear_form: length mismatch");
    return (f.array() * h.array()).sum();
}

namespace {

// Sign gauge: the coefficient of largest modulus gets a positive real part
// (positive imaginary part breaking the tie).
void apply_sign_gauge(Eigen::VectorXcd& v) {
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < v.size(); ++i) {
        double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    const Complex z = v[imax];
    if (z.real() < 0.0 || (z.real() == 0.0 && z.imag() < 0.0)) v = -v;
}

}  // namespace

SpectralSolve eigensolve(const OperatorMatrices& mats, Complex g,
                         const EigensolveOptions& options) {
    if (mats.size < 2) throw InvalidTruncationError("eigensolve: truncation must be >= 2");
    const Eigen::MatrixXcd a = assemble(mats, g);
    const int n = mats.size;

    Eigen::ComplexEigenSolver<Eigen::MatrixXcd> solver(a, /*computeEigenvectors=*/true);
    if (solver.info() != Eigen::Success)
        throw SolverError("eigensolve: dense QR iteration did not converge");

    SpectralSolve out;
    out.g = g;
    out.truncation = n;
    out.matrix_scale = a.norm();

    Eigen::VectorXcd vals = solver.eigenvalues();
    Eigen::MatrixXcd vecs = solver.eigenvectors();  // Hermitian-unit columns

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) {
        if (vals[i].real() != vals[j].real()) return vals[i].real() < vals[j].real();
        return vals[i].imag() < vals[j].imag();
    });

    out.eigenvalues.resize(n);
    out.coefficients.resize(n, n);
    out.residuals.resize(n);
    out.near_defect_flags.assign(n, false);

    const double res_bound = options.residual_factor * out.matrix_scale;
    for (int r = 0; r < n; ++r) {
        Complex lambda = vals[order[r]];
        Eigen::VectorXcd v = vecs.col(order[r]);
        double res = (a * v - lambda * v).norm();
        if (res > res_bound) {
            // One round of inverse iteration with a Rayleigh-quotient update.
            Eigen::MatrixXcd shifted = a;
            shifted.diagonal().array() -= lambda;
            Eigen::VectorXcd w = shifted.partialPivLu().solve(v);
            double wn = w.norm();
            if (wn > 0.0 && std::isfinite(wn)) {
                w /= wn;
                Complex mu = w.adjoint().dot(a * w) / w.adjoint().dot(w);
                // Eigen's dot conjugates the first argument; mu is the
                // Hermitian Rayleigh quotient.
                double res2 = (a * w - mu * w).norm();
                if (res2 < res) {
                    v = w;
                    lambda = mu;
                    res = res2;
                }
            }
        }
        out.eigenvalues[r] = lambda;
        out.residuals[r] = res;
        out.coefficients.row(r) = v.transpose();
    }

    if (options.normalize) {
        for (int r = 0; r < n; ++r) {
            Eigen::VectorXcd v = out.coefficients.row(r).transpose();
            const Complex self = bilinear_form(v, v);
            if (std::abs(self) < options.defect_tol) {
                out.near_defect_flags[r] = true;
                continue;
            }
            v /= std::sqrt(self);
            apply_sign_gauge(v);
            out.coefficients.row(r) = v.transpose();
        }
        out.normalized = true;
    }
    return out;
}

std::vector<Complex> evaluate_mode(const OperatorMatrices& mats, const SpectralSolve& solve,
                                   int n, const std::vector<Point>& points) {
    if (n < 1 || n > solve.truncation) throw DimensionError("evaluate_mode: sheet out of range");
    std::vector<Complex> out(points.size(), Complex{0.0, 0.0});
    for (std::size_t p = 0; p < points.size(); ++p) {
        Complex s{0.0, 0.0};
        for (int j = 1; j <= solve.truncation; ++j)
            s += solve.coefficients(n - 1, j - 1) * basis_value(mats, j, points[p].x, points[p].y);
        out[p] = s;
    }
    return out;
}

Magnetization evolve(const OperatorMatrices& mats, Complex g, const Magnetization& m0, double t) {
    if (m0.coefficients.size() != mats.size)
        throw DimensionError("evolve: coefficient length must equal truncation");
    if (t < 0.0) throw ValidationError("evolve: time must be non-negative");
    const SpectralSolve solve = eigensolve(mats, g);
    for (bool flagged : solve.near_defect_flags)
        if (flagged)
            throw DefectiveSpectrumError(
                "spectrum near-defective at this g; use the branch-point propagator");

    // With bilinear-orthonormal modes, exp(-tA) = V^T diag(exp(-lambda t)) V
    // acting on coefficients (V rows are the modes).
    Eigen::VectorXcd result = Eigen::VectorXcd::Zero(mats.size);
    for (int r = 0; r < mats.size; ++r) {
        const Eigen::VectorXcd v = solve.coefficients.row(r).transpose();
        const Complex weight = bilinear_form(v, m0.coefficients) * std::exp(-solve.eigenvalues[r] * t);
        result += weight * v;
    }
    return {result, m0.time + t};
}

int trusted_sheet_count(const OperatorMatrices& mats, const OperatorMatrices& mats_doubled,
                        Complex g, double tol) {
    if (mats_doubled.size < mats.size)
        throw InvalidTruncationError("trusted_sheet_count: reference truncation too small");
    EigensolveOptions opt;
    opt.normalize = false;
    const SpectralSolve a = eigensolve(mats, g, opt);
    const SpectralSolve b = eigensolve(mats_doubled, g, opt);
    int count = 0;
    for (int i = 0; i < mats.size; ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < b.eigenvalues.size(); ++j)
            best = std::min(best, std::abs(a.eigenvalues[i] - b.eigenvalues[j]));
        if (best <= tol * std::max(1.0, std::abs(a.eigenvalues[i]))) ++count;
        else break;
    }
    return count;
}

}  // namespace bt
