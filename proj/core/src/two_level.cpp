#include "bt/two_level.hpp"

#include "bt/errors.hpp"

namespace bt {

Eigen::Matrix2cd TwoByTwo::matrix() const {
    Eigen::Matrix2cd m;
    m << lambda0 + a, b, c, lambda0 - a;
    return m;
}

Eig2 eig2(const TwoByTwo& m) {
    Eig2 out;
    out.d = m.discriminant();
    if (out.d == Complex{0.0, 0.0})
        throw Error("eig2: discriminant vanishes (defective case, use jordan2)");
    const Complex root = std::sqrt(out.d);
    out.lambda_plus = m.lambda0 + root;
    out.lambda_minus = m.lambda0 - root;
    out.x_plus << m.b, root - m.a;
    out.x_minus << m.b, -root - m.a;
    return out;
}

Jordan2 jordan2(const TwoByTwo& m) {
    if (m.discriminant() != Complex{0.0, 0.0})
        throw Error("jordan2: discriminant must vanish");
    if (m.b == Complex{0.0, 0.0})
        throw Error("jordan2: b = 0 orientation unsupported; swap the roles of b and c "
                    "by conjugating with [[0,1],[1,0]]");
    Jordan2 out;
    out.x0 << m.b, -m.a;
    out.y0 << Complex{0.0, 0.0}, Complex{1.0, 0.0};
    // A y0 = (b, lambda0 - a) = lambda0 y0 + x0 holds identically.
    return out;
}

std::vector<Complex> sheets(SheetModel model, Complex g) {
    const Complex root = std::sqrt(g);
    if (model == SheetModel::Sqrt) return {root, -root};
    const Complex p = std::sqrt(root + 1.0);
    const Complex q = std::sqrt(-root + 1.0);
    return {p, q, -p, -q};
}

}  // namespace bt
