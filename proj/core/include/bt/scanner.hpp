#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <utility>
#include <vector>

#include "bt/tracking.hpp"

namespace bt {

enum class ContourShape { Square, Circle };

struct ScanConfig {
    Complex region_lo{0.0, 0.0};  // lower-left corner of the search rectangle
    Complex region_hi{1.0, 1.0};  // upper-right corner
    ContourShape contour_shape = ContourShape::Square;
    double epsilon = 0.5;        // stop subdividing when cell diameter <= epsilon
    int n_sheets = 6;
    int samples_per_contour = 64;
    int max_depth = 26;
    int threads = 1;
    // chi = max(error_factor * Richardson estimate,
    //           floor_factor * perimeter * median |lambda| on the contour)
    double chi_error_factor = 3.0;
    double chi_floor_factor = 1e-6;
    TrackingOptions tracking;
};

struct BranchPoint {
    Complex g0;
    double resolution = 0.0;           // diameter of the final enclosing cell
    std::pair<int, int> sheet_pair{0, 0};  // 1-based labels at the contour start
    double max_integral = 0.0;
    bool monodromy_confirmed = false;
};

struct UnresolvedRegion {
    Complex center;
    double diameter = 0.0;
    double max_integral = 0.0;
    bool monodromy = false;
    std::string reason;  // "max-depth", "integral-only", "tracking-ambiguity"
};

struct ScanResult {
    std::vector<BranchPoint> points;          // sorted by (Re g0, Im g0)
    std::vector<UnresolvedRegion> unresolved;
    std::size_t contours_evaluated = 0;
};

// Recursive contour subdivision: cells whose boundary integrals exceed chi or
// whose monodromy is non-trivial are split in four until the target
// resolution; surviving cells become branch points (monodromy confirmed) or
// unresolved reports.
ScanResult scan(const EigenvalueField& field, const ScanConfig& config);
ScanResult scan(const OperatorMatrices& mats, const ScanConfig& config);

// Continues the subdivision around one located point until its resolution
// reaches target_eps; the monodromy is re-confirmed at the final contour.
BranchPoint refine(const EigenvalueField& field, const BranchPoint& bp, double target_eps,
                   const ScanConfig& config);
BranchPoint refine(const OperatorMatrices& mats, const BranchPoint& bp, double target_eps,
                   const ScanConfig& config);

struct SymmetryReport {
    struct Entry {
        std::string map;       // "g -> -conj(g)" or "g -> conj(g)"
        double max_unmatched;  // Hausdorff distance between the set and its image
        bool pass;
    };
    std::vector<Entry> entries;
    bool all_pass = true;
};

// Distance between the located point set and its image under the applicable
// symmetry maps; pass iff within tol.
SymmetryReport check_symmetry(const std::vector<BranchPoint>& points, bool parity_symmetric,
                              double tol);

struct ExponentFit {
    double slope = 0.0;
    double ci_low = 0.0;   // 95% confidence interval
    double ci_high = 0.0;
    bool contaminated = false;  // another branch point inside the sampling annulus
    int n_points = 0;
};

struct ExponentFitOptions {
    Complex direction{1.0, 0.0};
    int n_points = 12;
    double annulus_lo = 10.0;    // in units of bp.resolution
    double annulus_hi = 1000.0;
    int contour_samples = 64;
};

// Log-log slope of the gap |lambda_n - lambda_n'| against |g - g0| in an
// annulus around the point; 1/2 for a simple branch point.
ExponentFit fit_sqrt_exponent(const EigenvalueField& field, const BranchPoint& bp,
                              const ExponentFitOptions& options = {});
ExponentFit fit_sqrt_exponent(const OperatorMatrices& mats, const BranchPoint& bp,
                              const ExponentFitOptions& options = {});

// Threshold actually used for a given tracked contour (exposed for tests and
// detector diagnostics).
double scan_threshold(const ScanConfig& config, const TrackedPath& tracked,
                      const ContourIntegralResult& ci);

}  // namespace bt
