#include <doctest.h>

#include <random>

#include "bt/bloch_torrey.hpp"
#include "bt/errors.hpp"
#include "bt/matrices.hpp"
#include "support/oracles.hpp"

using namespace bt;
using doctest::Approx;

namespace {

// Two-level family with an exact branch point at g = 1: lambda0 = (0, 1),
// B off-diagonal 1/2, so the splitting vanishes when g^2 B^2 = 1/4.
OperatorMatrices defective_fixture() {
    OperatorMatrices m;
    m.geometry = {GeometryKind::Imported, 1.0, {}};
    m.size = 2;
    m.lambda0.resize(2);
    m.lambda0 << 0.0, 1.0;
    m.B = Eigen::MatrixXd::Zero(2, 2);
    m.B(0, 1) = m.B(1, 0) = 0.5;
    m.modes.resize(2);
    return m;
}

bool multiset_close(Eigen::VectorXcd a, Eigen::VectorXcd b, double tol) {
    if (a.size() != b.size()) return false;
    std::vector<char> used(b.size(), 0);
    for (int i = 0; i < a.size(); ++i) {
        int arg = -1;
        double best = std::numeric_limits<double>::infinity();
        for (int j = 0; j < b.size(); ++j) {
            if (used[j]) continue;
            const double d = std::abs(a[i] - b[j]);
            if (d < best) {
                best = d;
                arg = j;
            }
        }
        if (best > tol) return false;
        used[arg] = 1;
    }
    return true;
}

}  // namespace

TEST_CASE("assemble reduces to the Laplacian at g = 0 and is complex symmetric") {
    const OperatorMatrices m = build_interval(1.0, 2);
    const Eigen::MatrixXcd a0 = assemble(m, 0.0);
    CHECK(std::abs(a0(0, 0)) == 0.0);
    CHECK(a0(1, 1).real() == Approx(M_PI * M_PI));
    CHECK(std::abs(a0(0, 1)) == 0.0);

    const OperatorMatrices big = build_interval(1.0, 12);
    const Eigen::MatrixXcd a = assemble(big, Complex(3.0, -1.5));
    CHECK((a - a.transpose()).norm() == 0.0);

    // g = i makes the operator real symmetric: Lambda + B.
    const Eigen::MatrixXcd ai = assemble(big, Complex(0.0, 1.0));
    CHECK(ai.imag().norm() == 0.0);
    CHECK((ai.real() - ai.real().transpose()).norm() == 0.0);
    CHECK(ai(0, 1).real() == Approx(big.B(0, 1)));
}

TEST_CASE("eigensolve at g = 0 returns the Laplacian spectrum exactly") {
    const OperatorMatrices m = build_interval(1.0, 8);
    const SpectralSolve s = eigensolve(m, 0.0);
    for (int i = 0; i < 8; ++i) {
        CHECK(s.eigenvalues[i].real() == Approx(m.lambda0[i]).epsilon(1e-14));
        CHECK(std::abs(s.eigenvalues[i].imag()) <= 1e-14 * std::max(1.0, m.lambda0[i]));
    }
    CHECK(s.normalized);
}

TEST_CASE("real pair below the transition, conjugate pair above") {
    const OperatorMatrices m = build_interval(1.0, 30);
    const SpectralSolve below = eigensolve(m, 10.0);
    CHECK(std::abs(below.eigenvalues[0].imag()) <= 1e-8);
    CHECK(std::abs(below.eigenvalues[1].imag()) <= 1e-8);
    CHECK(below.eigenvalues[1].real() - below.eigenvalues[0].real() > 1.0);

    const SpectralSolve above = eigensolve(m, 25.0);
    CHECK(std::abs(above.eigenvalues[0] - std::conj(above.eigenvalues[1])) <=
          1e-8 * std::abs(above.eigenvalues[0]));
    CHECK(std::abs(above.eigenvalues[0].imag()) > 0.1);
}

TEST_CASE("residual bound holds across the sweep") {
    const OperatorMatrices m = build_interval(1.0, 30);
    for (double g : {0.0, 5.0, 18.0, 60.0, 100.0}) {
        const SpectralSolve s = eigensolve(m, Complex(g, 0.3 * g));
        CHECK(s.residuals.maxCoeff() <= 1e-10 * s.matrix_scale);
    }
}

TEST_CASE("bilinear form basics") {
    Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(4);
    e1[0] = 1.0;
    CHECK(bilinear_form(e1, e1) == Complex(1.0, 0.0));
    Eigen::VectorXcd ie1 = Complex(0.0, 1.0) * e1;
    CHECK(bilinear_form(ie1, ie1) == Complex(-1.0, 0.0));
    Eigen::VectorXcd short_vec = Eigen::VectorXcd::Zero(3);
    CHECK_THROWS_AS(bilinear_form(e1, short_vec), DimensionError);
}

TEST_CASE("eigenmodes are bilinear orthonormal away from branch points") {
    const OperatorMatrices m = build_interval(1.0, 30);
    for (Complex g : {Complex(5.0, 0.0), Complex(10.0, 2.0), Complex(18.0, 0.0)}) {
        const SpectralSolve s = eigensolve(m, g);
        for (int i = 0; i < m.size; ++i) {
            if (s.near_defect_flags[i]) continue;
            const Eigen::VectorXcd vi = s.coefficients.row(i).transpose();
            CHECK(std::abs(bilinear_form(vi, vi) - Complex(1.0, 0.0)) <= 1e-10);
        }
        // Pairwise bilinear orthogonality; the g = 18 pair sits near the
        // branch point, where the spec bound is 1e-6.
        const double tol = (g == Complex(18.0, 0.0)) ? 1e-6 : 1e-8;
        for (int i = 0; i < 8; ++i)
            for (int j = i + 1; j < 8; ++j) {
                if (s.near_defect_flags[i] || s.near_defect_flags[j]) continue;
                const Eigen::VectorXcd vi = s.coefficients.row(i).transpose();
                const Eigen::VectorXcd vj = s.coefficients.row(j).transpose();
                CHECK(std::abs(bilinear_form(vi, vj)) <= tol);
            }
    }
}

TEST_CASE("conjugation symmetry: spectrum at -conj(g) is the conjugate spectrum") {
    const OperatorMatrices m = build_interval(1.0, 20);
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> u(-30.0, 30.0);
    for (int t = 0; t < 6; ++t) {
        const Complex g(u(rng), u(rng));
        const SpectralSolve a = eigensolve(m, g);
        const SpectralSolve b = eigensolve(m, -std::conj(g));
        CHECK(multiset_close(a.eigenvalues.conjugate(), b.eigenvalues, 1e-10 * a.matrix_scale));
    }
}

TEST_CASE("parity symmetry: spectrum at conj(g) is the conjugate spectrum") {
    for (const OperatorMatrices& m : {build_interval(1.0, 16), build_disk(1.0, 16)}) {
        const Complex g(7.0, 3.0);
        const SpectralSolve a = eigensolve(m, g);
        const SpectralSolve b = eigensolve(m, std::conj(g));
        CHECK(multiset_close(a.eigenvalues.conjugate(), b.eigenvalues, 1e-10 * a.matrix_scale));
    }
}

TEST_CASE("trace identity: eigenvalue sum is linear in g") {
    const OperatorMatrices m = build_interval(1.0, 24);
    const double sum0 = m.lambda0.sum();
    const double trace_b = m.B.trace();
    std::mt19937 rng(123);
    std::uniform_real_distribution<double> u(-40.0, 40.0);
    for (int t = 0; t < 10; ++t) {
        const Complex g(u(rng), u(rng));
        const SpectralSolve s = eigensolve(m, g);
        const Complex total = s.eigenvalues.sum();
        const Complex expected = sum0 - Complex(0.0, 1.0) * g * trace_b;
        CHECK(std::abs(total - expected) <= 1e-10 * s.eigenvalues.cwiseAbs().sum());
    }
}

TEST_CASE("trusted sheet count grows with truncation headroom") {
    const OperatorMatrices m30 = build_interval(1.0, 30);
    const OperatorMatrices m60 = build_interval(1.0, 60);
    const int trusted = trusted_sheet_count(m30, m60, Complex(50.0, 0.0), 1e-6);
    CHECK(trusted >= 6);
    CHECK(trusted <= 30);
    CHECK_THROWS_AS(trusted_sheet_count(m60, m30, 1.0, 1e-8), InvalidTruncationError);
}

TEST_CASE("evaluate_mode reproduces the Laplacian eigenfunctions at g = 0") {
    const OperatorMatrices m = build_interval(1.0, 16);
    const SpectralSolve s = eigensolve(m, 0.0);
    std::vector<Point> pts;
    for (int i = 0; i <= 10; ++i) pts.push_back({-0.5 + 0.1 * i, 0.0});
    const auto v1 = evaluate_mode(m, s, 1, pts);
    for (const auto& v : v1) CHECK(std::abs(v - Complex(1.0, 0.0)) <= 1e-12);
    const auto v2 = evaluate_mode(m, s, 2, pts);
    for (std::size_t p = 0; p < pts.size(); ++p) {
        CHECK(std::abs(v2[p].real() - std::sqrt(2.0) * std::sin(M_PI * pts[p].x)) <= 1e-10);
        CHECK(std::abs(v2[p].imag()) <= 1e-10);
    }
}

TEST_CASE("large gradients localize the first mode toward the right endpoint") {
    const OperatorMatrices m = build_interval(1.0, 40);
    const SpectralSolve s = eigensolve(m, 100.0);
    std::vector<Point> pts;
    for (int i = 0; i <= 200; ++i) pts.push_back({-0.5 + i / 200.0, 0.0});
    const auto v1 = evaluate_mode(m, s, 1, pts);
    double best = -1.0;
    double best_x = 0.0;
    for (std::size_t p = 0; p < pts.size(); ++p)
        if (std::abs(v1[p]) > best) {
            best = std::abs(v1[p]);
            best_x = pts[p].x;
        }
    CHECK(best_x > 0.0);
}

TEST_CASE("evolve: identity at t = 0 and exact decay at g = 0") {
    const OperatorMatrices m = build_interval(1.0, 12);
    Magnetization m0;
    m0.coefficients = Eigen::VectorXcd::Constant(12, Complex(0.3, -0.2));
    const Magnetization same = evolve(m, Complex(4.0, 1.0), m0, 0.0);
    CHECK((same.coefficients - m0.coefficients).norm() <= 1e-12);

    const double t = 0.07;
    const Magnetization decayed = evolve(m, 0.0, m0, t);
    for (int j = 0; j < 12; ++j)
        CHECK(std::abs(decayed.coefficients[j] - m0.coefficients[j] * std::exp(-m.lambda0[j] * t)) <=
              1e-12);
}

TEST_CASE("evolve matches the scaling-and-squaring exponential oracle") {
    const OperatorMatrices m = build_interval(1.0, 30);
    Magnetization m0;
    m0.coefficients = Eigen::VectorXcd::Zero(30);
    m0.coefficients[0] = 1.0;  // uniform initial magnetization
    const double t = 0.1;
    const Complex g(10.0, 0.0);
    const Magnetization via_modes = evolve(m, g, m0, t);
    const Eigen::VectorXcd direct = oracle::expm(-t * assemble(m, g)) * m0.coefficients;
    CHECK((via_modes.coefficients - direct).norm() <= 1e-9 * direct.norm());
}

TEST_CASE("defective spectra are flagged and refuse plain transport") {
    const OperatorMatrices m = defective_fixture();
    const SpectralSolve s = eigensolve(m, Complex(1.0, 0.0));
    CHECK((s.near_defect_flags[0] || s.near_defect_flags[1]));
    Magnetization m0;
    m0.coefficients = Eigen::VectorXcd::Ones(2);
    CHECK_THROWS_AS(evolve(m, Complex(1.0, 0.0), m0, 0.1), DefectiveSpectrumError);
    // Away from the branch point the same family transports normally.
    const Magnetization ok = evolve(m, Complex(0.5, 0.0), m0, 0.1);
    CHECK(std::isfinite(ok.coefficients.norm()));
}
