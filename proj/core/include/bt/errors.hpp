#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace bt {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Truncation size below the minimum required for an operation.
struct InvalidTruncationError : Error {
    using Error::Error;
};

// Mismatched vector/matrix dimensions.
struct DimensionError : Error {
    using Error::Error;
};

// Input data violates a documented invariant (asymmetric matrix, unsorted
// spectrum, ...).
struct ValidationError : Error {
    using Error::Error;
};

// Malformed input file; `line` is 1-based.
struct ParseError : Error {
    ParseError(const std::string& what, int line_number)
        : Error(what), line(line_number) {}
    int line;
};

// Dense eigensolver failed to converge.
struct SolverError : Error {
    using Error::Error;
};

// Basis construction failed (root finding, quadrature, ...).
struct BasisConstructionError : Error {
    using Error::Error;
};

// Operation requires basis functions that an imported geometry cannot provide.
struct UnsupportedGeometryError : Error {
    using Error::Error;
};

// Spectrum carries near-defective modes; the Jordan-block propagator must be
// used instead of the plain eigenmode transport.
struct DefectiveSpectrumError : Error {
    using Error::Error;
};

// Sheet matching stayed ambiguous at the maximum bisection depth.  `g` is the
// parameter value where continuation failed, typically extremely close to a
// branch point.
struct TrackingAmbiguityError : Error {
    TrackingAmbiguityError(const std::string& what, std::complex<double> where)
        : Error(what), g(where) {}
    std::complex<double> g;
};

// Refinement lost the enclosure (all child contours quiet).
struct RefinementError : Error {
    using Error::Error;
};

// More than two singular values vanished at the candidate point: higher-order
// degeneracy, outside the supported second-order analysis.
struct NotSimpleBranchPointError : Error {
    using Error::Error;
};

}  // namespace bt
