#include "bt/tracking.hpp"

#include <algorithm>
#include <cmath>

#include "bt/assignment.hpp"
#include "bt/errors.hpp"

namespace bt {

GPath GPath::segment(Complex a, Complex b, int n_samples) {
    GPath p;
    p.closed = false;
    n_samples = std::max(2, n_samples);
    p.samples.reserve(n_samples);
    for (int i = 0; i < n_samples; ++i) {
        const double t = static_cast<double>(i) / (n_samples - 1);
        p.samples.push_back(a + t * (b - a));
    }
    return p;
}

GPath GPath::circle(Complex center, double radius, int n_samples) {
    GPath p;
    p.closed = true;
    n_samples = std::max(8, n_samples);
    p.samples.reserve(n_samples + 1);
    for (int i = 0; i < n_samples; ++i) {
        const double th = 2.0 * M_PI * i / n_samples;
        p.samples.push_back(center + radius * Complex(std::cos(th), std::sin(th)));
    }
    p.samples.push_back(p.samples.front());
    return p;
}

GPath GPath::rectangle(Complex lo, Complex hi, int n_per_side) {
    GPath p;
    p.closed = true;
    n_per_side = std::max(2, n_per_side);
    const Complex c00 = lo;
    const Complex c10 = Complex(hi.real(), lo.imag());
    const Complex c11 = hi;
    const Complex c01 = Complex(lo.real(), hi.imag());
    const Complex corners[5] = {c00, c10, c11, c01, c00};
    for (int side = 0; side < 4; ++side)
        for (int i = 0; i < n_per_side; ++i) {
            const double t = static_cast<double>(i) / n_per_side;
            p.samples.push_back(corners[side] + t * (corners[side + 1] - corners[side]));
        }
    p.samples.push_back(c00);
    return p;
}

GPath GPath::rotated(std::size_t start) const {
    if (!closed || start == 0 || samples.size() < 3) return *this;
    GPath p;
    p.closed = true;
    const std::size_t n = samples.size() - 1;  // distinct samples
    start %= n;
    p.samples.reserve(n + 1);
    for (std::size_t i = 0; i < n; ++i) p.samples.push_back(samples[(start + i) % n]);
    p.samples.push_back(p.samples.front());
    return p;
}

namespace {

struct StepContext {
    const EigenvalueField& field;
    int window;
    const TrackingOptions& opts;
    std::vector<Complex>& out_samples;
    std::vector<Eigen::VectorXcd>& out_rows;
    Eigen::VectorXcd hist;  // last clearly-separated value per tracked label
    int evals = 0;
    int max_depth_seen = 0;
};

double max_abs(const Eigen::VectorXcd& v) {
    double m = 0.0;
    for (int i = 0; i < v.size(); ++i) m = std::max(m, std::abs(v[i]));
    return m;
}

void update_history(StepContext& ctx, const Eigen::VectorXcd& cur, double tie_abs) {
    for (int i = 0; i < cur.size(); ++i) {
        bool tied = false;
        for (int j = 0; j < cur.size(); ++j)
            if (j != i && std::abs(cur[i] - cur[j]) <= tie_abs) tied = true;
        if (!tied) ctx.hist[i] = cur[i];
    }
}

// Advances the labeling from `cur` at ga to the sample at gb, bisecting while
// the assignment stays ambiguous.  Appends every accepted sample.
void advance(StepContext& ctx, Eigen::VectorXcd& cur, Complex ga, Complex gb, int depth) {
    ctx.max_depth_seen = std::max(ctx.max_depth_seen, depth);
    if (++ctx.evals > ctx.opts.max_step_evals)
        throw TrackingAmbiguityError("tracking: bisection budget exhausted", gb);
    const int w = ctx.window;
    // Matching against a wider candidate slice lets a tracked sheet follow
    // its continuation even when its Re-rank slips below the window edge.
    const int cand = std::min(w + ctx.opts.guard_sheets, ctx.field.max_count());
    const Eigen::VectorXcd nxt = ctx.field.values(gb, cand);

    const double scale = std::max(max_abs(cur), max_abs(nxt));
    const double tie_abs = ctx.opts.tie_tol * std::max(scale, 1e-300);

    // Rows beyond the tracked window are free absorbers for the extra
    // candidates.
    Eigen::MatrixXd cost = Eigen::MatrixXd::Zero(cand, cand);
    const double mu = 1e-6;  // history term; decides only exact ties
    for (int i = 0; i < w; ++i)
        for (int j = 0; j < cand; ++j) {
            const double d = std::abs(cur[i] - nxt[j]);
            const double h = std::abs(ctx.hist[i] - nxt[j]);
            cost(i, j) = d * d + mu * h * h;
        }
    double best_cost = 0.0;
    std::vector<int> best = min_cost_assignment(cost, &best_cost);

    // Two sheets can only be confused when their relative motion is
    // comparable to their separation; the common drift of the whole window
    // cancels out.  Pairs that coincide at an endpoint are threaded by the
    // history term instead.
    bool ambiguous = false;
    double max_disp = 0.0;
    for (int i = 0; i < w; ++i) max_disp = std::max(max_disp, std::abs(cur[i] - nxt[best[i]]));
    double coherent_sep = 0.0;  // widest separation inside a coherently moving pair
    for (int i = 0; i < w && !ambiguous; ++i) {
        for (int j = i + 1; j < w; ++j) {
            const double sep_a = std::abs(cur[i] - cur[j]);
            const double sep_b = std::abs(nxt[best[i]] - nxt[best[j]]);
            if (sep_a <= tie_abs || sep_b <= tie_abs) continue;
            const double sep = std::min(sep_a, sep_b);
            const double rel = std::abs((nxt[best[i]] - cur[i]) - (nxt[best[j]] - cur[j]));
            if (rel > 0.5 * sep) {
                ambiguous = true;
                break;
            }
            if (sep < 0.25 * max_disp) coherent_sep = std::max(coherent_sep, sep);
        }
    }
    if (!ambiguous) {
        // Global reshuffles that the pairwise test cannot see; swaps within
        // coherent pairs cost ~sep^2 and are label-fungible, so they do not
        // count as a competing assignment.
        const double exempt =
            std::max(4.0 * tie_abs * tie_abs, 8.0 * coherent_sep * coherent_sep) + 1e-300;
        const double second = second_best_assignment_cost(cost, best, w);
        if (second - best_cost > exempt && second < ctx.opts.ambiguity_ratio * best_cost)
            ambiguous = true;
    }

    if (ambiguous) {
        if (depth >= ctx.opts.max_bisection_depth)
            throw TrackingAmbiguityError("tracking: ambiguous at maximum bisection depth",
                                         0.5 * (ga + gb));
        const Complex mid = 0.5 * (ga + gb);
        advance(ctx, cur, ga, mid, depth + 1);
        advance(ctx, cur, mid, gb, depth + 1);
        return;
    }

    Eigen::VectorXcd relabeled(w);
    for (int i = 0; i < w; ++i) relabeled[i] = nxt[best[i]];
    cur = relabeled;
    update_history(ctx, cur, tie_abs);
    ctx.out_samples.push_back(gb);
    ctx.out_rows.push_back(cur);
}

}  // namespace

TrackedPath track(const EigenvalueField& field, const GPath& path, int n_sheets,
                  const TrackingOptions& options) {
    if (path.samples.size() < 2) throw ValidationError("track: at least two samples required");
    if (path.closed && path.samples.front() != path.samples.back())
        throw ValidationError("track: closed path must end at its starting sample");
    if (n_sheets < 1 || n_sheets > field.max_count())
        throw DimensionError("track: sheet count out of range for this family");
    const int window = std::min(n_sheets + options.guard_sheets, field.max_count());

    std::vector<Complex> samples;
    std::vector<Eigen::VectorXcd> rows;
    StepContext ctx{field, window, options, samples, rows, {}, 0, 0};

    Eigen::VectorXcd cur = field.values(path.samples[0], window);
    ctx.hist = cur;
    {
        const double tie_abs = options.tie_tol * std::max(max_abs(cur), 1e-300);
        update_history(ctx, cur, tie_abs);
    }
    samples.push_back(path.samples[0]);
    rows.push_back(cur);

    for (std::size_t k = 0; k + 1 < path.samples.size(); ++k) {
        ctx.evals = 0;
        advance(ctx, cur, path.samples[k], path.samples[k + 1], 0);
    }

    TrackedPath out;
    out.path.samples = samples;
    out.path.closed = path.closed;
    out.n_requested = n_sheets;
    out.refinement_depth = ctx.max_depth_seen;
    out.sheets.resize(static_cast<int>(rows.size()), window);
    for (std::size_t r = 0; r < rows.size(); ++r) out.sheets.row(static_cast<int>(r)) = rows[r];

    out.permutation.resize(window);
    for (int i = 0; i < window; ++i) out.permutation[i] = i;
    if (path.closed) {
        // First and last samples sit at the same g; the final labels are a
        // permutation of the initial values.  Within numerical ties the
        // identity is preferred, so coincident pairs never report spurious
        // monodromy.
        const Eigen::VectorXcd start = rows.front();
        const Eigen::VectorXcd finish = rows.back();
        const double tie_abs = options.tie_tol * std::max(max_abs(start), 1e-300);
        std::vector<char> taken(window, 0);
        for (int i = 0; i < window; ++i) {
            int arg = -1;
            double best = std::numeric_limits<double>::infinity();
            for (int j = 0; j < window; ++j) {
                if (taken[j]) continue;
                const double d = std::abs(finish[i] - start[j]);
                if (d < best) {
                    best = d;
                    arg = j;
                }
            }
            if (arg != i && i < window && !taken[i] &&
                std::abs(finish[i] - start[i]) <= best + tie_abs)
                arg = i;
            taken[arg] = 1;
            out.permutation[i] = arg;
        }
    }
    return out;
}

ContourIntegralResult contour_integral(const TrackedPath& tracked) {
    if (!tracked.path.closed) throw ValidationError("contour_integral: path must be closed");
    const int n = tracked.n_requested;
    const int rows = static_cast<int>(tracked.sheets.rows());

    auto integrate = [&](int stride) {
        std::vector<Complex> acc(n, Complex{0.0, 0.0});
        int prev = 0;
        for (int k = stride; k < rows; k += stride) {
            const int curi = std::min(k, rows - 1);
            const Complex dg = tracked.path.samples[curi] - tracked.path.samples[prev];
            for (int s = 0; s < n; ++s)
                acc[s] += 0.5 * (tracked.sheets(prev, s) + tracked.sheets(curi, s)) * dg;
            prev = curi;
        }
        if (prev != rows - 1) {
            const Complex dg = tracked.path.samples[rows - 1] - tracked.path.samples[prev];
            for (int s = 0; s < n; ++s)
                acc[s] += 0.5 * (tracked.sheets(prev, s) + tracked.sheets(rows - 1, s)) * dg;
        }
        return acc;
    };

    ContourIntegralResult out;
    out.integrals = integrate(1);
    const auto half = integrate(2);
    for (int s = 0; s < n; ++s)
        out.estimated_error = std::max(out.estimated_error, std::abs(out.integrals[s] - half[s]));
    out.permutation = tracked.permutation;
    return out;
}

bool is_identity_on_requested(const std::vector<int>& permutation, int n_requested) {
    for (int i = 0; i < n_requested && i < static_cast<int>(permutation.size()); ++i)
        if (permutation[i] != i) return false;
    return true;
}

bool closure_check(const TrackedPath& tracked) {
    if (!tracked.path.closed) throw ValidationError("closure_check: path must be closed");
    return !is_identity_on_requested(tracked.permutation, tracked.n_requested);
}

}  // namespace bt
