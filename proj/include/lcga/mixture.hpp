#pragma once

// K-group LCGA mixture: group k has mean trajectory Q * beta_k (orthonormal
// design Q) and spherical covariance sigma2_k * I_T. All arithmetic is done in
// log space; posteriors come from a max-shifted softmax of
// log(pi_k) + log f_k(y_i).
//
// Group indices are 0-based here; reports present them 1-based.

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "lcga/basis.hpp"

namespace lcga {

template <typename Scalar>
struct MixtureParams {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

    Vector pi;      // K mixing proportions
    Matrix beta;    // K x (p+1), orthonormal-basis coefficients
    Vector sigma2;  // K residual variances

    Eigen::Index n_groups() const { return pi.size(); }
};

template <typename Scalar>
struct PosteriorMatrix {
    Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> pp;  // N x K
    Eigen::VectorXi assignment;                                 // N, 0-based

    Eigen::Index n_groups() const { return pp.cols(); }
};

// Throws std::invalid_argument if any MixtureParams invariant is violated.
template <typename Scalar>
void validate(const MixtureParams<Scalar>& params, const PolynomialBasis<Scalar>& basis) {
    const Eigen::Index K = params.pi.size();
    if (K < 1) throw std::invalid_argument("mixture needs at least one group");
    if (params.beta.rows() != K || params.beta.cols() != basis.n_coefficients())
        throw std::invalid_argument("beta must be K x (degree + 1)");
    if (params.sigma2.size() != K) throw std::invalid_argument("sigma2 must have K entries");
    if (!((params.pi.array() > Scalar(0)).all())) throw std::invalid_argument("mixing proportions must be positive");
    if (std::abs(params.pi.sum() - Scalar(1)) > Scalar(1e-12))
        throw std::invalid_argument("mixing proportions must sum to 1");
    if (!((params.sigma2.array() > Scalar(0)).all()) || !params.sigma2.allFinite())
        throw std::invalid_argument("residual variances must be positive and finite");
    if (!params.beta.allFinite()) throw std::invalid_argument("coefficients must be finite");
}

// K x T matrix; row k is group k's mean trajectory on the basis grid.
template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> group_means(const MixtureParams<Scalar>& params,
                                                                  const PolynomialBasis<Scalar>& basis) {
    return params.beta * basis.ortho_design().transpose();
}

template <typename Scalar, typename Derived>
Scalar group_logdensity(const MixtureParams<Scalar>& params, const PolynomialBasis<Scalar>& basis,
                        const Eigen::MatrixBase<Derived>& y, Eigen::Index k) {
    if (k < 0 || k >= params.n_groups()) throw std::out_of_range("group index out of range");
    const auto T = static_cast<Scalar>(y.size());
    const Scalar s2 = params.sigma2[k];
    // Accepts row or column vectors.
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> yk = y.derived().template cast<Scalar>().reshaped();
    const Scalar rss = (yk - basis.ortho_design() * params.beta.row(k).transpose()).squaredNorm();
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    return -Scalar(0.5) * T * std::log(two_pi * s2) - rss / (Scalar(2) * s2);
}

// N x K matrix of log(pi_k) + log f_k(y_i).
template <typename Scalar, typename Derived>
Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic> log_joint(const MixtureParams<Scalar>& params,
                                                                const PolynomialBasis<Scalar>& basis,
                                                                const Eigen::MatrixBase<Derived>& outcomes) {
    using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
    const Eigen::Index N = outcomes.rows();
    const Eigen::Index K = params.n_groups();
    const auto T = static_cast<Scalar>(outcomes.cols());
    constexpr Scalar two_pi = Scalar(2) * std::numbers::pi_v<Scalar>;
    const Matrix means = group_means(params, basis);
    Matrix out(N, K);
    for (Eigen::Index k = 0; k < K; ++k) {
        const Scalar s2 = params.sigma2[k];
        const Scalar constant = std::log(params.pi[k]) - Scalar(0.5) * T * std::log(two_pi * s2);
        const auto rss = (outcomes.template cast<Scalar>().rowwise() - means.row(k)).rowwise().squaredNorm();
        out.col(k) = (-rss.array() / (Scalar(2) * s2) + constant).matrix();
    }
    return out;
}

// Row-wise log-sum-exp with max shift.
template <typename Derived>
Eigen::Matrix<typename Derived::Scalar, Eigen::Dynamic, 1> rowwise_logsumexp(const Eigen::MatrixBase<Derived>& m) {
    using Scalar = typename Derived::Scalar;
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> top = m.rowwise().maxCoeff();
    return top + ((m.colwise() - top).array().exp().rowwise().sum().log()).matrix();
}

// Softmax of each row; assignment is the lowest index among row maxima.
template <typename Derived>
PosteriorMatrix<typename Derived::Scalar> posterior_from_log_joint(const Eigen::MatrixBase<Derived>& lj) {
    using Scalar = typename Derived::Scalar;
    PosteriorMatrix<Scalar> post;
    const Eigen::Index N = lj.rows();
    const Eigen::Index K = lj.cols();
    post.pp.resize(N, K);
    post.assignment.resize(N);
    for (Eigen::Index i = 0; i < N; ++i) {
        Eigen::Index best = 0;
        for (Eigen::Index k = 1; k < K; ++k)
            if (lj(i, k) > lj(i, best)) best = k;
        const Scalar top = lj(i, best);
        Scalar total = Scalar(0);
        for (Eigen::Index k = 0; k < K; ++k) {
            post.pp(i, k) = std::exp(lj(i, k) - top);
            total += post.pp(i, k);
        }
        post.pp.row(i) /= total;
        // Re-derive from the normalized row so exact ties stay ties.
        best = 0;
        for (Eigen::Index k = 1; k < K; ++k)
            if (post.pp(i, k) > post.pp(i, best)) best = k;
        post.assignment[i] = static_cast<int>(best);
    }
    return post;
}

template <typename Scalar, typename Derived>
PosteriorMatrix<Scalar> posterior(const MixtureParams<Scalar>& params, const PolynomialBasis<Scalar>& basis,
                                  const Eigen::MatrixBase<Derived>& outcomes) {
    return posterior_from_log_joint(log_joint(params, basis, outcomes));
}

template <typename Scalar, typename Derived>
Scalar loglikelihood(const MixtureParams<Scalar>& params, const PolynomialBasis<Scalar>& basis,
                     const Eigen::MatrixBase<Derived>& outcomes) {
    return rowwise_logsumexp(log_joint(params, basis, outcomes)).sum();
}

}  // namespace lcga
