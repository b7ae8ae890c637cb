#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <random>

#include "bt/errors.hpp"
#include "bt/io.hpp"
#include "bt/matrices.hpp"
#include "bt/quadrature.hpp"
#include "bt/special.hpp"

using namespace bt;
using doctest::Approx;

namespace {

std::string temp_path(const std::string& name) {
    return (std::filesystem::temp_directory_path() / name).string();
}

// Direct quadrature of the coordinate matrix element between two interval
// basis functions.
double interval_entry_quadrature(const OperatorMatrices& m, int i, int j) {
    const double L = m.geometry.extent;
    const QuadratureRule q = gauss_legendre(400, -0.5 * L, 0.5 * L);
    double s = 0.0;
    for (std::size_t t = 0; t < q.nodes.size(); ++t)
        s += q.weights[t] * basis_value(m, i, q.nodes[t]) * q.nodes[t] * basis_value(m, j, q.nodes[t]);
    return s;
}

// Polar-grid samples of every disk basis function: radial Gauss-Legendre
// times a uniform angular grid (exact for the trigonometric content).
struct DiskGrid {
    Eigen::MatrixXd values;   // mode x node
    std::vector<double> weight_x;  // quadrature weight times x at each node
    std::vector<double> weight;    // plain quadrature weight
};

DiskGrid disk_grid(const OperatorMatrices& m, int n_radial, int n_angular) {
    const double R = 0.5 * m.geometry.extent;
    const QuadratureRule qr = gauss_legendre(n_radial, 0.0, R);
    DiskGrid grid;
    const int nodes = n_radial * n_angular;
    grid.values.resize(m.size, nodes);
    grid.weight_x.resize(nodes);
    grid.weight.resize(nodes);
    int t = 0;
    for (int ir = 0; ir < n_radial; ++ir) {
        const double r = qr.nodes[ir];
        for (int ia = 0; ia < n_angular; ++ia, ++t) {
            const double theta = 2.0 * M_PI * ia / n_angular;
            const double x = r * std::cos(theta), y = r * std::sin(theta);
            const double w = qr.weights[ir] * r * (2.0 * M_PI / n_angular);
            grid.weight[t] = w;
            grid.weight_x[t] = w * x;
            for (int j = 1; j <= m.size; ++j) grid.values(j - 1, t) = basis_value(m, j, x, y);
        }
    }
    return grid;
}

}  // namespace

TEST_CASE("interval eigenvalues are pi^2 (n-1)^2 / L^2") {
    const OperatorMatrices m = build_interval(1.0, 4);
    CHECK(m.lambda0[0] == 0.0);
    CHECK(m.lambda0[1] == Approx(M_PI * M_PI).epsilon(1e-15));
    CHECK(m.lambda0[2] == Approx(4 * M_PI * M_PI).epsilon(1e-15));
    CHECK(m.lambda0[3] == Approx(9 * M_PI * M_PI).epsilon(1e-15));
    CHECK(m.size == 4);
    CHECK(m.modes[0].parity_x == Parity::Symmetric);
    CHECK(m.modes[1].parity_x == Parity::Antisymmetric);
    CHECK(m.modes[2].parity_x == Parity::Symmetric);
    CHECK(m.modes[1].parity_y == Parity::None);
}

TEST_CASE("interval truncation below 2 is rejected") {
    CHECK_THROWS_AS(build_interval(1.0, 1), InvalidTruncationError);
    CHECK_THROWS_AS(build_interval(-1.0, 4), ValidationError);
}

TEST_CASE("centered interval coordinate matrix: diagonal and anchor entries") {
    const OperatorMatrices m = build_interval(1.0, 12);
    CHECK(m.B.diagonal().cwiseAbs().maxCoeff() == 0.0);
    CHECK(m.B(0, 1) == Approx(2.0 * std::sqrt(2.0) / (M_PI * M_PI)).epsilon(1e-15));
    // Equal-parity entries vanish identically.
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j)
            if ((i + j) % 2 == 0) CHECK(m.B(i, j) == 0.0);
}

TEST_CASE("interval coordinate matrix equals direct quadrature") {
    const OperatorMatrices m = build_interval(1.0, 10);
    for (int i = 1; i <= 10; ++i)
        for (int j = 1; j <= 10; ++j) {
            const double q = interval_entry_quadrature(m, i, j);
            CHECK(std::abs(m.B(i - 1, j - 1) - q) <= 1e-10);
        }
}

TEST_CASE("interval basis is orthonormal under quadrature") {
    const OperatorMatrices m = build_interval(2.0, 10);
    const QuadratureRule q = gauss_legendre(300, -1.0, 1.0);
    for (int i = 1; i <= 10; ++i)
        for (int j = i; j <= 10; ++j) {
            double s = 0.0;
            for (std::size_t t = 0; t < q.nodes.size(); ++t)
                s += q.weights[t] * basis_value(m, i, q.nodes[t]) * basis_value(m, j, q.nodes[t]);
            CHECK(std::abs(s - (i == j ? 1.0 : 0.0)) <= 1e-8);
        }
}

TEST_CASE("interval scaling: lambda0 ~ 1/L^2 and B ~ L") {
    const OperatorMatrices unit = build_interval(1.0, 8);
    const OperatorMatrices scaled = build_interval(2.5, 8);
    for (int i = 0; i < 8; ++i)
        CHECK(scaled.lambda0[i] == Approx(unit.lambda0[i] / (2.5 * 2.5)).epsilon(1e-12));
    for (int i = 0; i < 8; ++i)
        for (int j = 0; j < 8; ++j)
            CHECK(scaled.B(i, j) == Approx(2.5 * unit.B(i, j)).epsilon(1e-12));
}

TEST_CASE("disk eigenvalues match the Neumann Bessel spectrum") {
    const OperatorMatrices m = build_disk(1.0, 8);
    auto lam = [&](int mm, int k) {
        const double a = bessel_j_prime_zero(mm, k);
        return 4.0 * a * a;
    };
    CHECK(m.lambda0[0] == 0.0);
    CHECK(m.lambda0[1] == Approx(lam(1, 1)).epsilon(1e-12));
    CHECK(m.lambda0[2] == Approx(lam(1, 1)).epsilon(1e-12));
    CHECK(m.lambda0[3] == Approx(lam(2, 1)).epsilon(1e-12));
    CHECK(m.lambda0[4] == Approx(lam(2, 1)).epsilon(1e-12));
    CHECK(m.lambda0[5] == Approx(lam(0, 2)).epsilon(1e-12));
    CHECK(m.lambda0[1] == Approx(13.5598).epsilon(1e-5));
    CHECK(m.lambda0[3] == Approx(37.3134).epsilon(1e-5));
    CHECK(m.lambda0[5] == Approx(58.7277).epsilon(1e-5));
    // Degenerate pairs: cos before sin.
    CHECK(m.disk_shapes[1].sine == false);
    CHECK(m.disk_shapes[2].sine == true);
    CHECK(m.modes[1].angular_index.value() == 1);
    // Mode symmetries: the constant is (+,+), the first cos mode is (-,+).
    CHECK(m.modes[0].parity_x == Parity::Symmetric);
    CHECK(m.modes[0].parity_y == Parity::Symmetric);
    CHECK(m.modes[1].parity_x == Parity::Antisymmetric);
    CHECK(m.modes[1].parity_y == Parity::Symmetric);
    CHECK(m.modes[2].parity_x == Parity::Symmetric);
    CHECK(m.modes[2].parity_y == Parity::Antisymmetric);
}

TEST_CASE("disk selection rules are exact") {
    const OperatorMatrices m = build_disk(1.0, 20);
    for (int i = 0; i < m.size; ++i)
        for (int j = 0; j < m.size; ++j) {
            const auto& a = m.disk_shapes[i];
            const auto& b = m.disk_shapes[j];
            if (std::abs(a.m - b.m) != 1 || a.sine != b.sine) CHECK(m.B(i, j) == 0.0);
        }
    CHECK((m.B - m.B.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("disk basis orthonormality and coordinate matrix under grid quadrature") {
    const OperatorMatrices m = build_disk(1.0, 16);
    const DiskGrid grid = disk_grid(m, 200, 64);
    for (int i = 0; i < m.size; ++i)
        for (int j = i; j < m.size; ++j) {
            double gram = 0.0, bx = 0.0;
            for (std::size_t t = 0; t < grid.weight.size(); ++t) {
                const double p = grid.values(i, t) * grid.values(j, t);
                gram += grid.weight[t] * p;
                bx += grid.weight_x[t] * p;
            }
            CHECK(std::abs(gram - (i == j ? 1.0 : 0.0)) <= 1e-8);
            CHECK(std::abs(bx - m.B(i, j)) <= 1e-8);
        }
}

TEST_CASE("disk radial entries agree with a node-doubled quadrature oracle") {
    const OperatorMatrices m = build_disk(1.0, 8);
    // Entry between the constant mode and the first (m=1, cos) mode.
    const auto& s0 = m.disk_shapes[0];
    const auto& s1 = m.disk_shapes[1];
    REQUIRE(s0.m == 0);
    REQUIRE(s1.m == 1);
    const double R = 0.5;
    auto radial = [&](double r) {
        return (s0.radial_norm / R) * bessel_j(0, s0.alpha * r / R) * (s1.radial_norm / R) *
               bessel_j(1, s1.alpha * r / R) * r * r;
    };
    const auto [integral, nodes] = integrate_adaptive(radial, 0.0, R, 1e-14, 32);
    const double expected = integral / std::sqrt(2.0);  // angular factor of the m=0 pairing
    CHECK(m.B(0, 1) != 0.0);
    CHECK(std::abs(m.B(0, 1) - expected) <= 1e-10 * std::abs(expected));
}

TEST_CASE("disk scaling: lambda0 ~ 1/L^2 and B ~ L") {
    const OperatorMatrices unit = build_disk(1.0, 10);
    const OperatorMatrices scaled = build_disk(3.0, 10);
    for (int i = 0; i < 10; ++i)
        CHECK(scaled.lambda0[i] == Approx(unit.lambda0[i] / 9.0).epsilon(1e-12));
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            if (unit.B(i, j) != 0.0)
                CHECK(scaled.B(i, j) == Approx(3.0 * unit.B(i, j)).epsilon(1e-12));
}

TEST_CASE("export and reload round-trips bitwise") {
    const OperatorMatrices m = build_interval(1.0, 10);
    const std::string path = temp_path("bt_roundtrip.txt");
    export_matrices(m, path);
    const OperatorMatrices r = load_imported(path);
    CHECK(r.size == m.size);
    CHECK((r.lambda0 - m.lambda0).cwiseAbs().maxCoeff() == 0.0);
    CHECK((r.B - m.B).cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.geometry.kind == GeometryKind::Imported);
    for (const auto& mode : r.modes) {
        CHECK(mode.parity_x == Parity::None);
        CHECK(mode.parity_y == Parity::None);
    }
    std::filesystem::remove(path);
}

TEST_CASE("imported matrices with an asymmetric B are rejected") {
    const std::string path = temp_path("bt_asym.txt");
    io::write_file(path,
                   "N=2\n"
                   "lambda0: 0.0 1.0\n"
                   "0.0 0.5\n"
                   "0.500001 0.0\n");
    CHECK_THROWS_AS(load_imported(path), ValidationError);
    std::filesystem::remove(path);
}

TEST_CASE("imported matrices with unsorted lambda0 name the offending index") {
    const std::string path = temp_path("bt_unsorted.txt");
    io::write_file(path,
                   "N=3\n"
                   "lambda0: 0.0 2.0 1.0\n"
                   "0 1 0\n"
                   "1 0 1\n"
                   "0 1 0\n");
    try {
        load_imported(path);
        CHECK(false);
    } catch (const ValidationError& e) {
        CHECK(std::string(e.what()).find("3") != std::string::npos);
    }
    std::filesystem::remove(path);
}

TEST_CASE("malformed import reports the line number") {
    const std::string path = temp_path("bt_malformed.txt");
    io::write_file(path,
                   "# comment\n"
                   "N=2\n"
                   "lambda0: 0.0 1.0\n"
                   "0.0 0.5\n"
                   "0.5\n");
    try {
        load_imported(path);
        CHECK(false);
    } catch (const ParseError& e) {
        CHECK(e.line == 5);
    }
    std::filesystem::remove(path);
}

TEST_CASE("basis evaluation is unavailable for imported matrices") {
    const std::string path = temp_path("bt_imported_eval.txt");
    export_matrices(build_interval(1.0, 4), path);
    const OperatorMatrices r = load_imported(path);
    CHECK_THROWS_AS(basis_value(r, 1, 0.0), UnsupportedGeometryError);
    std::filesystem::remove(path);
}

TEST_CASE("bessel derivative zeros match reference values") {
    CHECK(bessel_j_prime_zero(0, 1) == 0.0);
    CHECK(bessel_j_prime_zero(1, 1) == Approx(1.8411837813406593).epsilon(1e-12));
    CHECK(bessel_j_prime_zero(2, 1) == Approx(3.0542369282271403).epsilon(1e-12));
    CHECK(bessel_j_prime_zero(0, 2) == Approx(3.8317059702075123).epsilon(1e-12));
    CHECK(bessel_j_prime_zero(1, 2) == Approx(5.3314427735250325).epsilon(1e-12));
    // Zeros of J'_m are extrema of J_m.
    for (int mm : {1, 3, 7}) {
        const double z = bessel_j_prime_zero(mm, 2);
        CHECK(std::abs(bessel_j_prime(mm, z)) <= 1e-12);
    }
}
