#pragma once

#include <Eigen/Dense>

#include <string>

#include "rlct_nmf/error.hpp"

namespace rlct_nmf {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense nonnegative real matrix. Nonnegativity is a documented invariant
/// checked at the boundaries (file loading, truth construction), not on every
/// arithmetic expression.
using NonnegMatrix = Matrix<double>;

template <typename Derived>
bool all_nonnegative(const Eigen::MatrixBase<Derived>& m) {
    return (m.array() >= 0).all();
}

template <typename Derived>
bool all_positive(const Eigen::MatrixBase<Derived>& m) {
    return (m.array() > 0).all();
}

template <typename DerivedA, typename DerivedB>
void require_same_shape(const Eigen::MatrixBase<DerivedA>& a,
                        const Eigen::MatrixBase<DerivedB>& b,
                        const std::string& context) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw ValidationError(
            context + ": shape mismatch " + std::to_string(a.rows()) + "x" +
            std::to_string(a.cols()) + " vs " + std::to_string(b.rows()) +
            "x" + std::to_string(b.cols()));
}

} // namespace rlct_nmf
