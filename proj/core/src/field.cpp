#include "bt/field.hpp"

#include <algorithm>
#include <bit>
#include <cstring>

#include "bt/errors.hpp"

namespace bt {

Eigen::VectorXcd sort_spectrum(Eigen::VectorXcd v) {
    std::sort(v.begin(), v.end(), [](Complex a, Complex b) {
        if (a.real() != b.real()) return a.real() < b.real();
        return a.imag() < b.imag();
    });
    return v;
}

namespace {

std::uint64_t key_of(Complex g) {
    std::uint64_t re, im;
    double gr = g.real(), gi = g.imag();
    std::memcpy(&re, &gr, 8);
    std::memcpy(&im, &gi, 8);
    // splitmix-style combine of the two bit patterns
    std::uint64_t h = re + 0x9e3779b97f4a7c15ULL;
    h = (h ^ (h >> 30)) * 0xbf58476d1ce4e5b9ULL;
    h = (h ^ (h >> 27)) * 0x94d049bb133111ebULL;
    return (h ^ (h >> 31)) ^ (im * 0xff51afd7ed558ccdULL);
}

}  // namespace

MatrixFamilyField::MatrixFamilyField(OperatorMatrices mats) : mats_(std::move(mats)) {}

Eigen::VectorXcd MatrixFamilyField::values(Complex g, int count) const {
    if (count < 1 || count > mats_.size)
        throw DimensionError("MatrixFamilyField: requested sheet count out of range");
    const std::uint64_t key = key_of(g);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second.head(count);
    }
    // Tracking needs eigenvalues only; the Schur form without the unitary
    // factor is several times cheaper than the full eigensolve.
    const Eigen::MatrixXcd a = assemble(mats_, g);
    Eigen::ComplexSchur<Eigen::MatrixXcd> schur(a, /*computeU=*/false);
    if (schur.info() != Eigen::Success)
        throw SolverError("MatrixFamilyField: Schur iteration did not converge");
    Eigen::VectorXcd vals = sort_spectrum(schur.matrixT().diagonal());
    {
        std::lock_guard<std::mutex> lock(mu_);
        ++solves_;
        auto [it, inserted] = cache_.emplace(key, std::move(vals));
        return it->second.head(count);
    }
}

std::size_t MatrixFamilyField::eigensolve_count() const {
    std::lock_guard<std::mutex> lock(mu_);
    return solves_;
}

Eigen::VectorXcd FunctionField::values(Complex g, int count) const {
    Eigen::VectorXcd v = sort_spectrum(fn_(g));
    if (count > v.size()) throw DimensionError("FunctionField: requested sheet count out of range");
    return v.head(count);
}

Eigen::VectorXcd SheetField::values(Complex g, int count) const {
    const auto vals = sheets(model_, g);
    Eigen::VectorXcd v(static_cast<int>(vals.size()));
    for (std::size_t i = 0; i < vals.size(); ++i) v[static_cast<int>(i)] = vals[i];
    v = sort_spectrum(std::move(v));
    if (count > v.size()) throw DimensionError("SheetField: requested sheet count out of range");
    return v.head(count);
}

}  // namespace bt
