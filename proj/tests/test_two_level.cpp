#include <doctest.h>

#include <complex>
#include <random>

#include "bt/errors.hpp"
#include "bt/field.hpp"
#include "bt/scanner.hpp"
#include "bt/tracking.hpp"
#include "bt/two_level.hpp"
#include "support/oracles.hpp"

using namespace bt;
using doctest::Approx;

TEST_CASE("eig2 of a diagonal matrix") {
    TwoByTwo m{0.0, 1.0, 0.0, 0.0};
    const Eig2 e = eig2(m);
    CHECK(e.lambda_plus == Complex(1.0, 0.0));
    CHECK(e.lambda_minus == Complex(-1.0, 0.0));
    // Axis-aligned eigenvectors.
    CHECK(std::abs(e.x_plus[1]) <= 1e-15 * std::abs(e.x_plus[0]));
    CHECK(std::abs(e.x_minus[0]) <= 1e-15 * std::abs(e.x_minus[1]));
}

TEST_CASE("eig2 eigenpair residuals and trace/determinant identities") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 50; ++trial) {
        TwoByTwo m{{u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}, {u(rng), u(rng)}};
        if (std::abs(m.discriminant()) < 1e-12) continue;
        const Eig2 e = eig2(m);
        const Eigen::Matrix2cd a = m.matrix();
        CHECK((a * e.x_plus - e.lambda_plus * e.x_plus).norm() <= 1e-12 * a.norm() * e.x_plus.norm());
        CHECK((a * e.x_minus - e.lambda_minus * e.x_minus).norm() <=
              1e-12 * a.norm() * e.x_minus.norm());
        CHECK(std::abs(e.lambda_plus + e.lambda_minus - 2.0 * m.lambda0) <=
              1e-14 * std::abs(m.lambda0) + 1e-14);
        CHECK(std::abs(e.lambda_plus * e.lambda_minus - (m.lambda0 * m.lambda0 - e.d)) <= 1e-12);
    }
}

TEST_CASE("hermitian family has a real non-negative discriminant") {
    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const Complex b{u(rng), u(rng)};
        TwoByTwo m{{u(rng), 0.0}, {u(rng), 0.0}, b, std::conj(b)};
        const Eig2 e = eig2(m);
        CHECK(std::abs(e.d.imag()) <= 1e-13);
        CHECK(e.d.real() >= -1e-15);
        CHECK(std::abs(e.lambda_plus.imag()) <= 1e-13);
        CHECK(std::abs(e.lambda_minus.imag()) <= 1e-13);
    }
}

TEST_CASE("splitting phase jumps by pi/2 across the critical point") {
    // d(g) = g - g0 real; below: splitting purely imaginary, above: real.
    const double g0 = 1.5;
    auto family = [&](double g) { return TwoByTwo{0.0, 0.0, 1.0, Complex(g - g0, 0.0)}; };
    const Eig2 below = eig2(family(g0 - 0.3));
    const Eig2 above = eig2(family(g0 + 0.3));
    CHECK(std::arg(below.lambda_plus) == Approx(M_PI / 2).epsilon(1e-12));
    CHECK(std::abs(std::arg(above.lambda_plus)) <= 1e-12);
}

TEST_CASE("eig2 rejects the defective case") {
    CHECK_THROWS_AS(eig2(TwoByTwo{0.0, 0.0, 1.0, 0.0}), Error);
}

TEST_CASE("jordan2 pair and its defining identities") {
    TwoByTwo m{1.0, 0.0, 1.0, 0.0};
    const Jordan2 j = jordan2(m);
    CHECK(j.x0[0] == Complex(1.0, 0.0));
    CHECK(j.x0[1] == Complex(0.0, 0.0));
    CHECK(j.y0[0] == Complex(0.0, 0.0));
    CHECK(j.y0[1] == Complex(1.0, 0.0));
    const Eigen::Matrix2cd a = m.matrix();
    CHECK((a * j.x0 - m.lambda0 * j.x0).norm() == 0.0);
    CHECK((a * j.y0 - m.lambda0 * j.y0 - j.x0).norm() == 0.0);
}

TEST_CASE("symmetric defective matrix has a self-orthogonal eigenvector") {
    // b = c and d = 0 forces a^2 = -b^2.
    TwoByTwo m{0.5, Complex(0.0, 1.0), 1.0, 1.0};
    REQUIRE(std::abs(m.discriminant()) <= 1e-15);
    const Jordan2 j = jordan2(m);
    const Complex self = j.x0[0] * j.x0[0] + j.x0[1] * j.x0[1];
    CHECK(std::abs(self) <= 1e-15);
    const Eigen::Matrix2cd a = m.matrix();
    CHECK((a * j.y0 - m.lambda0 * j.y0 - j.x0).norm() <= 1e-15);
}

TEST_CASE("jordan2 rejects the unsupported orientation") {
    CHECK_THROWS_AS(jordan2(TwoByTwo{0.0, 0.0, 0.0, 1.0}), Error);
}

TEST_CASE("sheet families at anchor points") {
    const auto s1 = sheets(SheetModel::Sqrt, 1.0);
    CHECK(s1[0] == Complex(1.0, 0.0));
    CHECK(s1[1] == Complex(-1.0, 0.0));

    const auto q0 = sheets(SheetModel::Quartic, 0.0);
    int plus_one = 0, minus_one = 0;
    for (const auto& v : q0) {
        if (std::abs(v - Complex(1.0, 0.0)) < 1e-15) ++plus_one;
        if (std::abs(v + Complex(1.0, 0.0)) < 1e-15) ++minus_one;
    }
    CHECK(plus_one == 2);
    CHECK(minus_one == 2);

    const auto q1 = sheets(SheetModel::Quartic, 1.0);
    int zeros = 0;
    for (const auto& v : q1)
        if (std::abs(v) < 1e-15) ++zeros;
    CHECK(zeros == 2);
}

TEST_CASE("principal branch cut of the sqrt family") {
    // Just above the negative real axis the root is ~ +i; just below, ~ -i.
    const auto above = sheets(SheetModel::Sqrt, Complex(-1.0, 1e-12));
    const auto below = sheets(SheetModel::Sqrt, Complex(-1.0, -1e-12));
    CHECK(above[0].imag() == Approx(1.0).epsilon(1e-9));
    CHECK(below[0].imag() == Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("sqrt surface monodromy: one turn swaps, two turns restore") {
    SheetField field(SheetModel::Sqrt);
    const GPath once = GPath::circle(0.0, 1.0, 64);
    const TrackedPath t1 = track(field, once, 2);
    REQUIRE(t1.permutation.size() == 2);
    CHECK(t1.permutation[0] == 1);
    CHECK(t1.permutation[1] == 0);

    GPath twice = once;
    twice.samples.pop_back();
    for (const auto& g : once.samples) twice.samples.push_back(g);
    const TrackedPath t2 = track(field, twice, 2);
    CHECK(t2.permutation[0] == 0);
    CHECK(t2.permutation[1] == 1);
}

TEST_CASE("quartic surface monodromy cycles through all four sheets") {
    // One turn around all three branch points composes the two-pair swap at
    // the origin with the swap at g = 1: a single 4-cycle.  It takes four
    // turns to come back; each shorter loop count leaves sheets displaced.
    SheetField field(SheetModel::Quartic);
    const GPath once = GPath::circle(Complex(0.5, 0.0), 3.0, 128);
    auto loop_n = [&](int loops) {
        GPath p;
        p.closed = true;
        for (int l = 0; l < loops; ++l)
            for (std::size_t i = 0; i + 1 < once.samples.size(); ++i)
                p.samples.push_back(once.samples[i]);
        p.samples.push_back(p.samples.front());
        return track(field, p, 4).permutation;
    };
    const auto p1 = loop_n(1);
    const std::vector<int> id{0, 1, 2, 3};
    CHECK(p1 != id);
    // Single 4-cycle: the orbit of sheet 0 visits every sheet.
    std::vector<char> visited(4, 0);
    int cursor = 0;
    for (int step = 0; step < 4; ++step) {
        visited[cursor] = 1;
        cursor = p1[cursor];
    }
    CHECK(cursor == 0);
    CHECK((visited[0] && visited[1] && visited[2] && visited[3]));
    CHECK(loop_n(2) != id);
    CHECK(loop_n(3) != id);
    CHECK(loop_n(4) == id);
}

TEST_CASE("scanner finds the planted branch point of the two-level family") {
    const Complex planted(2.0, 0.0);
    FunctionField field(
        [&](Complex g) {
            const Eig2 e = eig2(TwoByTwo{0.0, 0.0, 1.0, g - planted});
            Eigen::VectorXcd v(2);
            v << e.lambda_plus, e.lambda_minus;
            return v;
        },
        2);
    ScanConfig cfg;
    cfg.region_lo = {0.0, -2.0};
    cfg.region_hi = {4.0, 2.0};
    cfg.epsilon = 0.05;
    cfg.n_sheets = 2;
    const ScanResult res = scan(field, cfg);
    REQUIRE(res.points.size() == 1);
    CHECK(std::abs(res.points[0].g0 - planted) <= cfg.epsilon);
    CHECK(res.points[0].monodromy_confirmed);
    CHECK(res.unresolved.empty());
}
