#include "bt/scanner.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <optional>

#include "bt/errors.hpp"

namespace bt {

namespace {

struct Cell {
    Complex lo;
    Complex hi;
    int depth = 0;

    Complex center() const { return 0.5 * (lo + hi); }
    double diameter() const { return std::abs(hi - lo); }
    double perimeter() const {
        return 2.0 * ((hi.real() - lo.real()) + (hi.imag() - lo.imag()));
    }
};

struct CellEval {
    bool tracking_failed = false;
    bool monodromy = false;
    double max_integral = 0.0;
    double chi = 0.0;
    bool triggered = false;
    std::vector<int> permutation;
    // Pairs whose coalescence is certified by an odd winding of the squared
    // sheet gap (1-based labels); monodromy without certification means the
    // contour grazed a degeneracy and the cell cannot be decided at this
    // scale.
    std::vector<std::pair<int, int>> confirmed_pairs;
    bool degenerate_contact = false;
};

// Winding number of (lambda_i - lambda_j)^2 along the tracked contour.  The
// squared gap is invariant under relabeling of the pair, so this witness is
// immune to label churn across near-degenerate stretches.  Returns false when
// the gap collapses somewhere on the contour (undecidable at this scale).
bool pair_winding(const TrackedPath& tracked, int i, int j, int* winding) {
    const int rows = static_cast<int>(tracked.sheets.rows());
    double min_gap = std::numeric_limits<double>::infinity();
    double max_gap = 0.0;
    for (int k = 0; k < rows; ++k) {
        const double gap = std::abs(tracked.sheets(k, i) - tracked.sheets(k, j));
        min_gap = std::min(min_gap, gap);
        max_gap = std::max(max_gap, gap);
    }
    if (!(min_gap > 1e-6 * max_gap) || max_gap == 0.0) return false;
    double total = 0.0;
    Complex prev = tracked.sheets(0, i) - tracked.sheets(0, j);
    prev *= prev;
    for (int k = 1; k < rows; ++k) {
        Complex cur = tracked.sheets(k, i) - tracked.sheets(k, j);
        cur *= cur;
        total += std::arg(cur / prev);
        prev = cur;
    }
    const double turns = total / (2.0 * M_PI);
    const long nearest = std::lround(turns);
    if (std::abs(turns - nearest) > 0.25) return false;
    *winding = static_cast<int>(nearest);
    return true;
}

double median_abs(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    return v[v.size() / 2];
}

GPath cell_contour(const Cell& cell, const ScanConfig& cfg) {
    const int per_side = std::max(4, cfg.samples_per_contour / 4);
    if (cfg.contour_shape == ContourShape::Circle)
        return GPath::circle(cell.center(), 0.5 * cell.diameter(), 4 * per_side);
    return GPath::rectangle(cell.lo, cell.hi, per_side);
}

// Rotates the contour so tracking starts where the window is best separated;
// exact crossings on the boundary then sit mid-path where the history term
// can thread labels through them.
GPath rotate_to_generic_start(const EigenvalueField& field, const GPath& path, int window) {
    const std::size_t n = path.samples.size() - 1;
    double best = -1.0;
    std::size_t arg = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::VectorXcd v = field.values(path.samples[k], window);
        double gap = std::numeric_limits<double>::infinity();
        for (int i = 0; i < v.size(); ++i)
            for (int j = i + 1; j < v.size(); ++j)
                gap = std::min(gap, std::abs(v[i] - v[j]));
        if (gap > best) {
            best = gap;
            arg = k;
        }
    }
    return path.rotated(arg);
}

CellEval evaluate_cell(const EigenvalueField& field, const Cell& cell, const ScanConfig& cfg) {
    CellEval out;
    const int window = std::min(cfg.n_sheets + cfg.tracking.guard_sheets, field.max_count());
    GPath contour = cell_contour(cell, cfg);
    try {
        contour = rotate_to_generic_start(field, contour, window);
        const TrackedPath tracked = track(field, contour, cfg.n_sheets, cfg.tracking);
        const ContourIntegralResult ci = contour_integral(tracked);
        out.permutation = ci.permutation;
        out.monodromy = !is_identity_on_requested(ci.permutation, cfg.n_sheets);
        for (const Complex& v : ci.integrals) out.max_integral = std::max(out.max_integral, std::abs(v));
        out.chi = scan_threshold(cfg, tracked, ci);
        out.triggered = out.monodromy || out.max_integral > out.chi;
    } catch (const TrackingAmbiguityError&) {
        // Continuation failed on the boundary: almost certainly a branch
        // point extremely close to (or on) the contour.
        out.tracking_failed = true;
        out.triggered = true;
    }
    return out;
}

// Splits a permutation restricted to the requested sheets into the pairs it
// moves, walking each cycle.
std::vector<std::pair<int, int>> moved_pairs(const std::vector<int>& perm, int n_requested) {
    std::vector<std::pair<int, int>> pairs;
    std::vector<char> seen(perm.size(), 0);
    for (int i = 0; i < static_cast<int>(perm.size()); ++i) {
        if (seen[i] || perm[i] == i) continue;
        if (i >= n_requested) break;
        int j = i;
        std::vector<int> cycle;
        while (!seen[j]) {
            seen[j] = 1;
            cycle.push_back(j);
            j = perm[j];
        }
        for (std::size_t k = 0; k + 1 < cycle.size(); ++k)
            pairs.emplace_back(cycle[k] + 1, cycle[k + 1] + 1);  // 1-based labels
    }
    return pairs;
}

template <class F>
void parallel_for(int count, int threads, F&& body) {
    threads = std::max(1, threads);
    if (threads == 1 || count <= 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::vector<std::future<void>> workers;
    const int n_workers = std::min(threads, count);
    for (int w = 0; w < n_workers; ++w)
        workers.push_back(std::async(std::launch::async, [&]() {
            for (;;) {
                const int i = next.fetch_add(1);
                if (i >= count) return;
                body(i);
            }
        }));
    for (auto& f : workers) f.get();
}

}  // namespace

double scan_threshold(const ScanConfig& config, const TrackedPath& tracked,
                      const ContourIntegralResult& ci) {
    std::vector<double> mags;
    mags.reserve(tracked.sheets.rows() * tracked.n_requested);
    for (int r = 0; r < tracked.sheets.rows(); ++r)
        for (int s = 0; s < tracked.n_requested; ++s) mags.push_back(std::abs(tracked.sheets(r, s)));
    double perimeter = 0.0;
    for (std::size_t k = 0; k + 1 < tracked.path.samples.size(); ++k)
        perimeter += std::abs(tracked.path.samples[k + 1] - tracked.path.samples[k]);
    return std::max(config.chi_error_factor * ci.estimated_error,
                    config.chi_floor_factor * perimeter * median_abs(std::move(mags)));
}

ScanResult scan(const EigenvalueField& field, const ScanConfig& config) {
    if (!(config.epsilon > 0.0)) throw ValidationError("scan: epsilon must be positive");
    if (config.region_hi.real() <= config.region_lo.real() ||
        config.region_hi.imag() <= config.region_lo.imag())
        throw ValidationError("scan: degenerate region");
    if (config.samples_per_contour < 16)
        throw ValidationError("scan: samples_per_contour must be >= 16");

    // Tiny grid offset so that branch points sitting exactly on subdivision
    // lines (the real axis of a symmetric region, a planted toy point) do not
    // coincide with contour samples.
    const double span = std::max(config.region_hi.real() - config.region_lo.real(),
                                 config.region_hi.imag() - config.region_lo.imag());
    const Complex jitter = span * Complex(7.3e-7, 4.1e-7);

    ScanResult result;
    std::vector<Cell> level{{config.region_lo + jitter, config.region_hi + jitter, 0}};
    std::mutex merge_mu;

    while (!level.empty()) {
        std::vector<CellEval> evals(level.size());
        std::atomic<std::size_t> contours{0};
        parallel_for(static_cast<int>(level.size()), config.threads, [&](int i) {
            evals[i] = evaluate_cell(field, level[i], config);
            contours.fetch_add(1);
        });
        result.contours_evaluated += contours.load();

        std::vector<Cell> next;
        for (std::size_t i = 0; i < level.size(); ++i) {
            const Cell& cell = level[i];
            const CellEval& ev = evals[i];
            if (!ev.triggered) continue;
            const bool at_resolution = cell.diameter() <= config.epsilon;
            const bool at_depth = cell.depth >= config.max_depth;
            if (at_resolution || at_depth) {
                std::lock_guard<std::mutex> lock(merge_mu);
                if (at_resolution && ev.monodromy) {
                    for (const auto& pair : moved_pairs(ev.permutation, config.n_sheets)) {
                        BranchPoint bp;
                        bp.g0 = cell.center();
                        bp.resolution = cell.diameter();
                        bp.sheet_pair = pair;
                        bp.max_integral = ev.max_integral;
                        bp.monodromy_confirmed = true;
                        result.points.push_back(bp);
                    }
                } else {
                    UnresolvedRegion u;
                    u.center = cell.center();
                    u.diameter = cell.diameter();
                    u.max_integral = ev.max_integral;
                    u.monodromy = ev.monodromy;
                    u.reason = at_depth          ? "max-depth"
                               : ev.tracking_failed ? "tracking-ambiguity"
                                                    : "integral-only";
                    result.unresolved.push_back(u);
                }
                continue;
            }
            const Complex c = cell.center();
            next.push_back({cell.lo, c, cell.depth + 1});
            next.push_back({Complex(c.real(), cell.lo.imag()), Complex(cell.hi.real(), c.imag()),
                            cell.depth + 1});
            next.push_back({Complex(cell.lo.real(), c.imag()), Complex(c.real(), cell.hi.imag()),
                            cell.depth + 1});
            next.push_back({c, cell.hi, cell.depth + 1});
        }
        level = std::move(next);
    }

    // Merge duplicates within 2 epsilon (shared-edge detections), keeping the
    // strongest witness.
    std::sort(result.points.begin(), result.points.end(), [](const BranchPoint& a, const BranchPoint& b) {
        if (a.g0.real() != b.g0.real()) return a.g0.real() < b.g0.real();
        return a.g0.imag() < b.g0.imag();
    });
    std::vector<BranchPoint> merged;
    for (const auto& bp : result.points) {
        bool absorbed = false;
        for (auto& kept : merged) {
            if (std::abs(kept.g0 - bp.g0) <= 2.0 * config.epsilon &&
                kept.sheet_pair == bp.sheet_pair) {
                if (bp.max_integral > kept.max_integral) kept = bp;
                absorbed = true;
                break;
            }
        }
        if (!absorbed) merged.push_back(bp);
    }
    result.points = std::move(merged);
    std::sort(result.unresolved.begin(), result.unresolved.end(),
              [](const UnresolvedRegion& a, const UnresolvedRegion& b) {
                  if (a.center.real() != b.center.real()) return a.center.real() < b.center.real();
                  return a.center.imag() < b.center.imag();
              });
    return result;
}

ScanResult scan(const OperatorMatrices& mats, const ScanConfig& config) {
    MatrixFamilyField field(mats);
    return scan(field, config);
}

BranchPoint refine(const EigenvalueField& field, const BranchPoint& bp, double target_eps,
                   const ScanConfig& config) {
    if (!(target_eps > 0.0)) throw ValidationError("refine: target_eps must be positive");
    if (target_eps >= bp.resolution) return bp;

    Complex center = bp.g0;
    double side = std::max(bp.resolution, 4.0 * target_eps);
    BranchPoint cur = bp;

    int stall = 0;
    while (cur.resolution > target_eps) {
        ScanConfig local = config;
        local.region_lo = center - 0.5 * Complex(side, side);
        local.region_hi = center + 0.5 * Complex(side, side);
        local.epsilon = std::max(target_eps, 0.18 * side * std::sqrt(2.0));
        local.max_depth = 6;
        ScanResult r = scan(field, local);
        if (r.points.empty()) {
            // Enclosure may sit on a subdivision line; retry once with a
            // shifted box before giving up.
            if (++stall > 2)
                throw RefinementError("refine: enclosure lost (all child contours quiet)");
            center += side * Complex(0.13, 0.077);
            continue;
        }
        stall = 0;
        const BranchPoint* nearest = &r.points.front();
        for (const auto& cand : r.points)
            if (std::abs(cand.g0 - center) < std::abs(nearest->g0 - center)) nearest = &cand;
        cur = *nearest;
        center = cur.g0;
        side = std::max(1.5 * cur.resolution, 3.0 * target_eps);
    }
    return cur;
}

BranchPoint refine(const OperatorMatrices& mats, const BranchPoint& bp, double target_eps,
                   const ScanConfig& config) {
    MatrixFamilyField field(mats);
    return refine(field, bp, target_eps, config);
}

SymmetryReport check_symmetry(const std::vector<BranchPoint>& points, bool parity_symmetric,
                              double tol) {
    SymmetryReport report;
    auto run_map = [&](const std::string& name, auto&& map) {
        double worst = 0.0;
        for (const auto& p : points) {
            const Complex image = map(p.g0);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : points) best = std::min(best, std::abs(image - q.g0));
            worst = std::max(worst, best);
        }
        if (points.empty()) worst = 0.0;
        SymmetryReport::Entry e{name, worst, worst <= tol};
        report.all_pass = report.all_pass && e.pass;
        report.entries.push_back(std::move(e));
    };
    run_map("g -> -conj(g)", [](Complex g) { return -std::conj(g); });
    if (parity_symmetric) run_map("g -> conj(g)", [](Complex g) { return std::conj(g); });
    return report;
}

namespace {

// Two eigenvalues nearest a reference, returned as (index gap).
std::pair<int, int> closest_pair_to(const Eigen::VectorXcd& vals, Complex ref) {
    int a = -1, b = -1;
    double best_a = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vals.size(); ++i) {
        const double d = std::abs(vals[i] - ref);
        if (d < best_a) {
            best_a = d;
            a = i;
        }
    }
    double best_b = std::numeric_limits<double>::infinity();
    for (int i = 0; i < vals.size(); ++i) {
        if (i == a) continue;
        const double d = std::abs(vals[i] - ref);
        if (d < best_b) {
            best_b = d;
            b = i;
        }
    }
    return {a, b};
}

}  // namespace

ExponentFit fit_sqrt_exponent(const EigenvalueField& field, const BranchPoint& bp,
                              const ExponentFitOptions& options) {
    const int window = std::min(std::max(bp.sheet_pair.second + 4, 6), field.max_count());
    const Complex dir = options.direction / std::abs(options.direction);

    // Reference eigenvalue at the branch point: midpoint of the two
    // near-coalescing values.
    const Eigen::VectorXcd at0 = field.values(bp.g0, window);
    double gap0 = std::numeric_limits<double>::infinity();
    Complex lambda0;
    for (int i = 0; i < at0.size(); ++i)
        for (int j = i + 1; j < at0.size(); ++j)
            if (std::abs(at0[i] - at0[j]) < gap0) {
                gap0 = std::abs(at0[i] - at0[j]);
                lambda0 = 0.5 * (at0[i] + at0[j]);
            }

    ExponentFit fit;
    fit.n_points = options.n_points;
    std::vector<double> xs, ys;
    const double lo = options.annulus_lo * bp.resolution;
    const double hi = options.annulus_hi * bp.resolution;
    for (int k = 0; k < options.n_points; ++k) {
        const double t = static_cast<double>(k) / (options.n_points - 1);
        const double delta = lo * std::pow(hi / lo, t);
        const Eigen::VectorXcd vals = field.values(bp.g0 + delta * dir, window);
        const auto [i, j] = closest_pair_to(vals, lambda0);
        const double gap = std::abs(vals[i] - vals[j]);
        if (gap <= 0.0) continue;
        xs.push_back(std::log(delta));
        ys.push_back(std::log(gap));
    }
    const int n = static_cast<int>(xs.size());
    if (n < 3) throw Error("fit_sqrt_exponent: not enough usable samples");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    fit.slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - fit.slope * sx) / n;
    double ss = 0.0;
    for (int i = 0; i < n; ++i) {
        const double r = ys[i] - (intercept + fit.slope * xs[i]);
        ss += r * r;
    }
    const double se = std::sqrt(ss / std::max(1, n - 2) / (sxx - sx * sx / n));
    // Two-sided 95% t quantiles for small samples.
    static const double tq[] = {12.71, 4.30, 3.18, 2.78, 2.57, 2.45, 2.36, 2.31,
                                2.26,  2.23, 2.20, 2.18, 2.16, 2.14, 2.13};
    const int dof = n - 2;
    const double t = dof <= 15 ? tq[dof - 1] : 1.96;
    fit.ci_low = fit.slope - t * se;
    fit.ci_high = fit.slope + t * se;

    // Contamination witness: the annulus boundary circles must carry the same
    // monodromy; a second branch point inside the annulus breaks that.
    try {
        const TrackedPath inner =
            track(field, GPath::circle(bp.g0, lo, options.contour_samples), window);
        const TrackedPath outer =
            track(field, GPath::circle(bp.g0, hi, options.contour_samples), window);
        fit.contaminated = inner.permutation != outer.permutation;
    } catch (const TrackingAmbiguityError&) {
        fit.contaminated = true;
    }
    return fit;
}

ExponentFit fit_sqrt_exponent(const OperatorMatrices& mats, const BranchPoint& bp,
                              const ExponentFitOptions& options) {
    MatrixFamilyField field(mats);
    return fit_sqrt_exponent(field, bp, options);
}

}  // namespace bt
