#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "bt/field.hpp"

namespace bt {

struct GPath {
    std::vector<Complex> samples;
    bool closed = false;

    static GPath segment(Complex a, Complex b, int n_samples);
    static GPath circle(Complex center, double radius, int n_samples);
    // Axis-aligned rectangle through the four corners, closed, sampled with
    // n_per_side points per side (corners included once each).
    static GPath rectangle(Complex lo, Complex hi, int n_per_side);
    // Rotates a closed path so that it starts at sample index `start`.
    GPath rotated(std::size_t start) const;
};

struct TrackingOptions {
    int guard_sheets = 4;          // extra sheets tracked beyond the requested ones
    int max_bisection_depth = 40;  // per-step recursion cap
    int max_step_evals = 4096;     // per-step eigensolve budget during bisection
    double ambiguity_ratio = 3.0;  // second-best cost must exceed ratio * best
    // Pairs closer than tie_tol * max|lambda| are numerically coincident:
    // excluded from the gap criterion and disambiguated by history.
    double tie_tol = 1e-10;
};

struct TrackedPath {
    GPath path;                // all samples actually used (bisection included)
    Eigen::MatrixXcd sheets;   // samples x tracked window, consistently labeled
    int n_requested = 0;       // sheets asked for; the rest is the guard band
    std::vector<int> permutation;  // end-to-start labels (window size); identity if open
    int refinement_depth = 0;
};

// Continuous labeling along a path: consecutive samples matched by exact
// minimal-cost assignment over the lowest-Re window (n_sheets + guard) with
// cost |dlambda|^2, bisecting wherever the assignment is ambiguous.
TrackedPath track(const EigenvalueField& field, const GPath& path, int n_sheets,
                  const TrackingOptions& options = {});

struct ContourIntegralResult {
    std::vector<Complex> integrals;  // per requested sheet
    double estimated_error = 0.0;    // Richardson estimate (full vs half sampling)
    std::vector<int> permutation;    // copied from tracking (window labels)
};

// Per-sheet trapezoidal integral of lambda_n dg along a closed tracked path.
ContourIntegralResult contour_integral(const TrackedPath& tracked);

// True iff the monodromy moves any requested sheet (integer-valued witness of
// an enclosed branch point).
bool closure_check(const TrackedPath& tracked);

bool is_identity_on_requested(const std::vector<int>& permutation, int n_requested);

}  // namespace bt
