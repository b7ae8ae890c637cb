#include "bt/matrices.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "bt/errors.hpp"
#include "bt/io.hpp"
#include "bt/quadrature.hpp"
#include "bt/special.hpp"

namespace bt {

const char* to_string(GeometryKind kind) {
    switch (kind) {
        case GeometryKind::Interval: return "interval";
        case GeometryKind::Disk: return "disk";
        case GeometryKind::Imported: return "imported";
    }
    return "?";
}

const char* to_string(Parity parity) {
    switch (parity) {
        case Parity::Symmetric: return "symmetric";
        case Parity::Antisymmetric: return "antisymmetric";
        case Parity::None: return "none";
    }
    return "?";
}

namespace {

// sin(k pi / 2) for integer k, exactly.
int sin_half_pi(int k) {
    int r = ((k % 4) + 4) % 4;
    if (r == 1) return 1;
    if (r == 3) return -1;
    return 0;
}

void check_basic(double extent, int n) {
    if (!(extent > 0.0)) throw ValidationError("geometry extent must be positive");
    if (n < 2) throw InvalidTruncationError("truncation must be >= 2");
}

}  // namespace

OperatorMatrices build_interval(double length, int n) {
    check_basic(length, n);
    OperatorMatrices out;
    out.geometry = {GeometryKind::Interval, length, {}};
    out.size = n;
    out.lambda0.resize(n);
    out.B = Eigen::MatrixXd::Zero(n, n);
    out.modes.resize(n);

    const double L = length;
    for (int i = 0; i < n; ++i) {
        const int m = i;  // wavenumber of mode index i+1
        out.lambda0[i] = M_PI * M_PI * m * m / (L * L);
        auto& mode = out.modes[i];
        mode.index = i + 1;
        mode.eigenvalue = out.lambda0[i];
        mode.parity_x = (m % 2 == 0) ? Parity::Symmetric : Parity::Antisymmetric;
        mode.parity_y = Parity::None;
    }

    // Coordinate matrix in the centered parity basis {1/sqrt(L),
    // sqrt(2/L) sin(m pi x / L) (m odd), sqrt(2/L) cos(m pi x / L) (m even)}.
    // Entries vanish unless the wavenumber parities differ; the closed forms
    // below come from the elementary integrals of x sin(k pi x / L).
    const double c = 2.0 * L / (M_PI * M_PI);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const int mi = i, mj = j;
            if ((mi + mj) % 2 == 0) continue;
            double v;
            if (mi == 0) {
                v = std::sqrt(2.0) * c * sin_half_pi(mj) / (static_cast<double>(mj) * mj);
            } else {
                const int me = (mi % 2 == 0) ? mi : mj;  // even wavenumber (cos mode)
                const int mo = (mi % 2 == 0) ? mj : mi;  // odd wavenumber (sin mode)
                const int kp = me + mo, km = me - mo;
                v = c * (sin_half_pi(kp) / (static_cast<double>(kp) * kp) -
                         sin_half_pi(km) / (static_cast<double>(km) * km));
            }
            out.B(i, j) = v;
            out.B(j, i) = v;
        }
    }
    return out;
}

namespace {

struct DiskCandidate {
    double alpha;
    int m;
    int k;
};

// All (m, k) with the n smallest eigenvalues, counting the cos/sin degeneracy
// for m >= 1.  Enumeration is widened until the cutoff provably covers n.
std::vector<DiskCandidate> disk_candidates(int n) {
    int max_m = 8, max_k = 8;
    for (;;) {
        std::vector<DiskCandidate> all;
        for (int m = 0; m <= max_m; ++m)
            for (int k = 1; k <= max_k; ++k)
                all.push_back({bessel_j_prime_zero(m, k), m, k});
        std::sort(all.begin(), all.end(), [](const DiskCandidate& a, const DiskCandidate& b) {
            return a.alpha < b.alpha;
        });
        int count = 0;
        double cutoff = -1.0;
        std::vector<DiskCandidate> chosen;
        for (const auto& cand : all) {
            chosen.push_back(cand);
            count += (cand.m == 0) ? 1 : 2;
            if (count >= n) {
                cutoff = cand.alpha;
                break;
            }
        }
        if (cutoff < 0.0) {
            max_m *= 2;
            max_k *= 2;
            continue;
        }
        const double frontier =
            std::min(bessel_j_prime_zero(max_m + 1, 1), bessel_j_prime_zero(0, max_k + 1));
        if (frontier <= cutoff) {
            max_m *= 2;
            max_k *= 2;
            continue;
        }
        return chosen;
    }
}

}  // namespace

OperatorMatrices build_disk(double diameter, int n) {
    check_basic(diameter, n);
    OperatorMatrices out;
    out.geometry = {GeometryKind::Disk, diameter, {}};
    out.size = n;
    out.lambda0.resize(n);
    out.B = Eigen::MatrixXd::Zero(n, n);
    out.modes.resize(n);
    out.disk_shapes.resize(n);

    const double R = 0.5 * diameter;

    // Expand candidates into modes (cos before sin within a degenerate pair),
    // then keep the n lowest.
    std::vector<DiskModeShape> shapes;
    for (const auto& cand : disk_candidates(n)) {
        double norm;
        if (cand.alpha == 0.0) {
            norm = std::sqrt(2.0);  // constant radial profile
        } else {
            const double jm = bessel_j(cand.m, cand.alpha);
            const double fac = 1.0 - static_cast<double>(cand.m) * cand.m / (cand.alpha * cand.alpha);
            if (!(fac > 0.0) || jm == 0.0)
                throw BasisConstructionError("disk radial normalization failed");
            norm = std::sqrt(2.0) / (std::sqrt(fac) * jm);
        }
        shapes.push_back({cand.m, cand.k, false, cand.alpha, norm});
        if (cand.m >= 1) shapes.push_back({cand.m, cand.k, true, cand.alpha, norm});
    }
    std::stable_sort(shapes.begin(), shapes.end(), [](const DiskModeShape& a, const DiskModeShape& b) {
        if (a.alpha != b.alpha) return a.alpha < b.alpha;
        if (a.m != b.m) return a.m < b.m;
        return a.sine < b.sine;
    });
    shapes.resize(n);
    out.disk_shapes = shapes;

    for (int i = 0; i < n; ++i) {
        const auto& s = shapes[i];
        out.lambda0[i] = s.alpha * s.alpha / (R * R);
        auto& mode = out.modes[i];
        mode.index = i + 1;
        mode.eigenvalue = out.lambda0[i];
        mode.angular_index = s.m;
        if (s.sine) {
            mode.parity_x = (s.m % 2 == 1) ? Parity::Symmetric : Parity::Antisymmetric;
            mode.parity_y = Parity::Antisymmetric;
        } else {
            mode.parity_x = (s.m % 2 == 0) ? Parity::Symmetric : Parity::Antisymmetric;
            mode.parity_y = Parity::Symmetric;
        }
    }

    // B entries: x = r cos(theta) couples |dm| = 1 within the cos family
    // (including the m = 0 radial modes) and within the sin family.  The
    // angular integral is exact; the radial one uses Gauss-Legendre on the
    // unit radius with node doubling, so B scales exactly linearly with R.
    struct Entry {
        int i, j;
        double angular;
    };
    std::vector<Entry> entries;
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            const auto& a = shapes[i];
            const auto& b = shapes[j];
            if (std::abs(a.m - b.m) != 1 || a.sine != b.sine) continue;
            const double ang = (a.m == 0 || b.m == 0) ? 1.0 / std::sqrt(2.0) : 0.5;
            entries.push_back({i, j, ang});
        }
    }

    auto radial_all = [&](int nodes, std::vector<double>& vals) {
        QuadratureRule q = gauss_legendre(nodes, 0.0, 1.0);
        // Radial profiles evaluated once per mode on the shared nodes.
        Eigen::MatrixXd prof(n, nodes);
        for (int i = 0; i < n; ++i)
            for (int t = 0; t < nodes; ++t)
                prof(i, t) = shapes[i].radial_norm * bessel_j(shapes[i].m, shapes[i].alpha * q.nodes[t]);
        vals.resize(entries.size());
        for (std::size_t e = 0; e < entries.size(); ++e) {
            double s = 0.0;
            for (int t = 0; t < nodes; ++t)
                s += q.weights[t] * prof(entries[e].i, t) * prof(entries[e].j, t) * q.nodes[t] *
                     q.nodes[t];
            vals[e] = s;
        }
    };

    int nodes = 64;
    std::vector<double> cur, next;
    radial_all(nodes, cur);
    for (;;) {
        radial_all(2 * nodes, next);
        double worst = 0.0;
        for (std::size_t e = 0; e < entries.size(); ++e) {
            double scale = std::max({std::abs(cur[e]), std::abs(next[e]), 1e-300});
            worst = std::max(worst, std::abs(cur[e] - next[e]) / scale);
        }
        nodes *= 2;
        cur = next;
        if (worst <= 1e-12 || nodes >= (1 << 13)) break;
    }
    out.quadrature_nodes = nodes;

    for (std::size_t e = 0; e < entries.size(); ++e) {
        const double v = entries[e].angular * R * cur[e];
        out.B(entries[e].i, entries[e].j) = v;
        out.B(entries[e].j, entries[e].i) = v;
    }
    return out;
}

namespace {

bool significant(const std::string& line) {
    for (char c : line) {
        if (c == '#') return false;
        if (!std::isspace(static_cast<unsigned char>(c))) return true;
    }
    return false;
}

}  // namespace

OperatorMatrices load_imported(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open: " + path);

    std::vector<std::pair<int, std::string>> lines;  // (line number, content)
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        if (significant(raw)) lines.emplace_back(lineno, raw);
    }
    std::size_t pos = 0;
    auto next_line = [&]() -> const std::pair<int, std::string>& {
        if (pos >= lines.size()) throw ParseError("unexpected end of file", lineno);
        return lines[pos++];
    };

    const auto& header = next_line();
    int n = 0;
    if (std::sscanf(header.second.c_str(), " N=%d", &n) != 1 || n < 1)
        throw ParseError("expected 'N=<int>' header", header.first);

    const auto& lam_line = next_line();
    std::istringstream lam_ss(lam_line.second);
    std::string tag;
    lam_ss >> tag;
    if (tag != "lambda0:") throw ParseError("expected 'lambda0:' line", lam_line.first);
    Eigen::VectorXd lambda0(n);
    for (int i = 0; i < n; ++i)
        if (!(lam_ss >> lambda0[i]))
            throw ParseError("lambda0: expected " + std::to_string(n) + " values", lam_line.first);

    Eigen::MatrixXd B(n, n);
    for (int r = 0; r < n; ++r) {
        const auto& row_line = next_line();
        std::istringstream row_ss(row_line.second);
        for (int cidx = 0; cidx < n; ++cidx)
            if (!(row_ss >> B(r, cidx)))
                throw ParseError("matrix row " + std::to_string(r + 1) + ": expected " +
                                     std::to_string(n) + " values",
                                 row_line.first);
    }

    for (int i = 0; i + 1 < n; ++i)
        if (lambda0[i + 1] < lambda0[i])
            throw ValidationError("lambda0 not sorted: index " + std::to_string(i + 2) +
                                  " decreases");
    const double bscale = std::max(1.0, B.cwiseAbs().maxCoeff());
    const double asym = (B - B.transpose()).cwiseAbs().maxCoeff();
    if (asym > 1e-12 * bscale)
        throw ValidationError("matrix asymmetric: max |B - B^T| = " + std::to_string(asym));

    OperatorMatrices out;
    out.geometry = {GeometryKind::Imported, 1.0, path};
    out.size = n;
    out.lambda0 = lambda0;
    out.B = B;
    out.modes.resize(n);
    for (int i = 0; i < n; ++i) {
        out.modes[i].index = i + 1;
        out.modes[i].eigenvalue = lambda0[i];
        out.modes[i].parity_x = Parity::None;
        out.modes[i].parity_y = Parity::None;
    }
    return out;
}

void export_matrices(const OperatorMatrices& m, const std::string& path) {
    std::string text;
    text += "N=" + std::to_string(m.size) + "\n";
    text += "lambda0:";
    for (int i = 0; i < m.size; ++i) text += " " + io::fmt17(m.lambda0[i]);
    text += "\n";
    for (int r = 0; r < m.size; ++r) {
        for (int c = 0; c < m.size; ++c) {
            if (c) text += " ";
            text += io::fmt17(m.B(r, c));
        }
        text += "\n";
    }
    io::write_file(path, text);
}

double basis_value(const OperatorMatrices& m, int j, double x, double y) {
    if (j < 1 || j > m.size) throw DimensionError("basis_value: index out of range");
    switch (m.geometry.kind) {
        case GeometryKind::Interval: {
            const double L = m.geometry.extent;
            const int wav = j - 1;
            if (wav == 0) return 1.0 / std::sqrt(L);
            const double arg = wav * M_PI * x / L;
            return std::sqrt(2.0 / L) * ((wav % 2 == 1) ? std::sin(arg) : std::cos(arg));
        }
        case GeometryKind::Disk: {
            const auto& s = m.disk_shapes[j - 1];
            const double R = 0.5 * m.geometry.extent;
            const double r = std::hypot(x, y);
            const double radial = (s.radial_norm / R) * bessel_j(s.m, s.alpha * r / R);
            if (s.m == 0) return radial / std::sqrt(2.0 * M_PI);
            const double theta = std::atan2(y, x);
            const double ang = s.sine ? std::sin(s.m * theta) : std::cos(s.m * theta);
            return radial * ang / std::sqrt(M_PI);
        }
        case GeometryKind::Imported:
            throw UnsupportedGeometryError("imported matrices carry no basis functions");
    }
    throw Error("basis_value: unreachable");
}

}  // namespace bt
