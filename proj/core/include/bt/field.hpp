#pragma once

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <unordered_map>

#include "bt/bloch_torrey.hpp"
#include "bt/two_level.hpp"

namespace bt {

// Sorted eigenvalue slices of an analytic matrix family over the complex
// g-plane.  Tracking, contour integration and the branch-point search all
// consume this interface, so the same machinery runs on the truncated
// operator, on two-level toy families, and on explicit sheet functions.
class EigenvalueField {
  public:
    virtual ~EigenvalueField() = default;
    // Lowest `count` eigenvalues at g, sorted by (Re, Im) ascending.
    virtual Eigen::VectorXcd values(Complex g, int count) const = 0;
    virtual int max_count() const = 0;
};

// Field backed by a truncated operator; eigensolves at repeated g values are
// cached (contours of adjacent cells share corners and edges).
class MatrixFamilyField : public EigenvalueField {
  public:
    explicit MatrixFamilyField(OperatorMatrices mats);
    Eigen::VectorXcd values(Complex g, int count) const override;
    int max_count() const override { return mats_.size; }
    const OperatorMatrices& matrices() const { return mats_; }
    std::size_t eigensolve_count() const;

  private:
    OperatorMatrices mats_;
    mutable std::mutex mu_;
    mutable std::unordered_map<std::uint64_t, Eigen::VectorXcd> cache_;
    mutable std::size_t solves_ = 0;
};

// Field defined by an arbitrary callable g -> sorted eigenvalues.
class FunctionField : public EigenvalueField {
  public:
    using Fn = std::function<Eigen::VectorXcd(Complex)>;
    FunctionField(Fn fn, int count) : fn_(std::move(fn)), count_(count) {}
    Eigen::VectorXcd values(Complex g, int count) const override;
    int max_count() const override { return count_; }

  private:
    Fn fn_;
    int count_;
};

// Explicit multivalued sheet families (sorted slices of the sqrt / quartic
// surfaces).
class SheetField : public EigenvalueField {
  public:
    explicit SheetField(SheetModel model) : model_(model) {}
    Eigen::VectorXcd values(Complex g, int count) const override;
    int max_count() const override { return model_ == SheetModel::Sqrt ? 2 : 4; }

  private:
    SheetModel model_;
};

// Sorts a spectrum by (Re, Im) ascending.
Eigen::VectorXcd sort_spectrum(Eigen::VectorXcd v);

}  // namespace bt
