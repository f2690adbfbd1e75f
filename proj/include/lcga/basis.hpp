#pragma once

// Polynomial-in-time design shared by every group's mean trajectory.
//
// Times are mapped affinely onto [0, 1] (first visit -> 0, last -> 1) before
// powers are taken. Estimation happens in a column-orthonormal basis Q of the
// same column space; R = change_of_basis satisfies raw_design = Q * R, so a
// coefficient vector g in the orthonormal basis corresponds to raw
// coefficients R^{-1} g.

#include <string>

#include <Eigen/Dense>

#include "lcga/error.hpp"

namespace lcga {

template <typename Scalar>
class PolynomialBasis {
public:
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    int degree() const { return degree_; }
    Eigen::Index n_coefficients() const { return degree_ + 1; }
    Eigen::Index n_times() const { return times_.size(); }

    const Vector& times() const { return times_; }
    const Vector& normalized_times() const { return normalized_; }
    Scalar t_min() const { return t_min_; }
    Scalar t_max() const { return t_max_; }

    const Matrix& raw_design() const { return raw_; }
    const Matrix& ortho_design() const { return ortho_; }
    const Matrix& change_of_basis() const { return change_; }

    // Orthonormal-basis coefficients -> raw normalized-time coefficients.
    template <typename Derived>
    Vector to_raw(const Eigen::MatrixBase<Derived>& ortho_coef) const {
        return change_.template triangularView<Eigen::Upper>().solve(ortho_coef);
    }

    template <typename Derived>
    Vector to_ortho(const Eigen::MatrixBase<Derived>& raw_coef) const {
        return change_ * raw_coef;
    }

    // Maps a calendar time onto the normalized scale.
    Scalar normalize(Scalar t) const { return (t - t_min_) / (t_max_ - t_min_); }

    // Raw powers 1, u, ..., u^p evaluated at arbitrary calendar times.
    template <typename Derived>
    Matrix raw_design_at(const Eigen::MatrixBase<Derived>& calendar_times) const {
        Matrix x(calendar_times.size(), n_coefficients());
        for (Eigen::Index r = 0; r < calendar_times.size(); ++r) {
            const Scalar u = normalize(static_cast<Scalar>(calendar_times[r]));
            Scalar power = Scalar(1);
            for (Eigen::Index j = 0; j < n_coefficients(); ++j) {
                x(r, j) = power;
                power *= u;
            }
        }
        return x;
    }

    template <typename Derived>
    static PolynomialBasis build(const Eigen::MatrixBase<Derived>& times, int degree) {
        const Eigen::Index T = times.size();
        if (degree < 0) throw std::invalid_argument("polynomial degree must be non-negative");
        if (T < 2) throw std::invalid_argument("basis needs at least two time points");
        if (degree + 1 > T)
            throw DegreeTooHigh("degree " + std::to_string(degree) + " needs at least " + std::to_string(degree + 1) +
                                " time points, have " + std::to_string(T));
        for (Eigen::Index t = 1; t < T; ++t)
            if (!(times[t] > times[t - 1])) throw std::invalid_argument("basis times must be strictly increasing");

        PolynomialBasis b;
        b.degree_ = degree;
        b.times_ = times.template cast<Scalar>();
        b.t_min_ = b.times_[0];
        b.t_max_ = b.times_[T - 1];
        b.normalized_ = (b.times_.array() - b.t_min_) / (b.t_max_ - b.t_min_);
        b.raw_ = b.raw_design_at(b.times_);

        Eigen::HouseholderQR<Matrix> qr(b.raw_);
        const Eigen::Index p1 = b.n_coefficients();
        b.ortho_ = qr.householderQ() * Matrix::Identity(T, p1);
        b.change_ = qr.matrixQR().topRows(p1).template triangularView<Eigen::Upper>();
        // Fix signs so diag(R) > 0; makes the factorization unique.
        for (Eigen::Index j = 0; j < p1; ++j) {
            if (b.change_(j, j) < Scalar(0)) {
                b.change_.row(j) *= Scalar(-1);
                b.ortho_.col(j) *= Scalar(-1);
            }
        }
        return b;
    }

private:
    PolynomialBasis() = default;

    int degree_ = 0;
    Vector times_;
    Vector normalized_;
    Scalar t_min_{};
    Scalar t_max_{};
    Matrix raw_;
    Matrix ortho_;
    Matrix change_;
};

using Basis = PolynomialBasis<double>;

}  // namespace lcga
