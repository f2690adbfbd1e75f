#pragma once
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcga/basis.hpp"
#include "lcga/data.hpp"
#include "lcga/mixture.hpp"
#include "lcga/rng.hpp"
#include "oracles.hpp"

namespace testing {

struct Instance {
    std::vector<double> times;
    Eigen::MatrixXd y;
    oracle::Mixture truth;  // raw normalized-time coefficients
};

inline double uniform(lcga::Rng& rng, double lo, double hi) { return lo + (hi - lo) * lcga::uniform01(rng); }

// Random mixture with N subjects, K groups, T visits and polynomial degree p,
// plus data drawn from it.
inline Instance random_instance(lcga::Rng& rng, int N, int K, int T, int p) {
    Instance in;
    double t = uniform(rng, -2, 2);
    for (int j = 0; j < T; ++j) {
        in.times.push_back(t);
        t += uniform(rng, 0.2, 2.0);
    }
    std::vector<double> w(K);
    double total = 0;
    for (double& v : w) total += (v = uniform(rng, 0.2, 1.0));
    for (int k = 0; k < K; ++k) {
        in.truth.pi.push_back(w[k] / total);
        oracle::Row c;
        for (int j = 0; j <= p; ++j) c.push_back(uniform(rng, -3, 3));
        in.truth.raw_coef.push_back(c);
        in.truth.sigma2.push_back(uniform(rng, 0.3, 3.0));
    }
    const oracle::Row u = oracle::normalize(oracle::Row(in.times.begin(), in.times.end()));
    in.y.resize(N, T);
    for (int i = 0; i < N; ++i) {
        const int k = static_cast<int>(lcga::uniform_index(rng, static_cast<std::uint64_t>(K)));
        for (int j = 0; j < T; ++j)
            in.y(i, j) = static_cast<double>(oracle::mean_at(in.truth.raw_coef[k], u[j])) +
                         std::sqrt(in.truth.sigma2[k]) * lcga::standard_normal(rng);
    }
    return in;
}

inline Eigen::VectorXd times_vector(const Instance& in) {
    return Eigen::Map<const Eigen::VectorXd>(in.times.data(), static_cast<Eigen::Index>(in.times.size()));
}

inline lcga::MixtureParams<double> to_params(const oracle::Mixture& m, const lcga::Basis& basis) {
    const auto K = static_cast<Eigen::Index>(m.pi.size());
    lcga::MixtureParams<double> p;
    p.pi.resize(K);
    p.sigma2.resize(K);
    p.beta.resize(K, basis.n_coefficients());
    for (Eigen::Index k = 0; k < K; ++k) {
        p.pi[k] = static_cast<double>(m.pi[k]);
        p.sigma2[k] = static_cast<double>(m.sigma2[k]);
        Eigen::VectorXd raw(basis.n_coefficients());
        for (Eigen::Index j = 0; j < raw.size(); ++j) raw[j] = static_cast<double>(m.raw_coef[k][j]);
        p.beta.row(k) = basis.to_ortho(raw).transpose();
    }
    return p;
}

inline oracle::Table to_table(const Eigen::MatrixXd& y) {
    oracle::Table out(static_cast<std::size_t>(y.rows()));
    for (Eigen::Index i = 0; i < y.rows(); ++i)
        for (Eigen::Index j = 0; j < y.cols(); ++j) out[i].push_back(y(i, j));
    return out;
}

inline lcga::TrajectoryDataset dataset(const Eigen::VectorXd& times, const Eigen::MatrixXd& y) {
    std::vector<std::string> ids;
    for (Eigen::Index i = 0; i < y.rows(); ++i) ids.push_back(std::to_string(i + 1));
    return lcga::TrajectoryDataset(ids, times, y);
}

// Two well-separated flat groups at 0 and 10 with unit noise.
inline lcga::TrajectoryDataset two_groups(std::uint64_t seed, int N = 200, int T = 5) {
    auto rng = lcga::make_stream(seed, {77});
    Eigen::MatrixXd y(N, T);
    for (int i = 0; i < N; ++i) {
        const double mu = i < N / 2 ? 0.0 : 10.0;
        for (int t = 0; t < T; ++t) y(i, t) = mu + lcga::standard_normal(rng);
    }
    return dataset(Eigen::VectorXd::LinSpaced(T, 0, T - 1), y);
}

}  // namespace testing
