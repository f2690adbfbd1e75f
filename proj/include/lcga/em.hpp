#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "lcga/basis.hpp"
#include "lcga/data.hpp"
#include "lcga/mixture.hpp"

namespace lcga {

enum class VarianceModel {
    per_group,  // sigma2_k for each group
    pooled,     // one sigma2 shared by all groups
};

struct EmConfig {
    int max_iter = 500;
    double rel_tol = 1e-8;
    int n_restarts = 10;
    // A run is abandoned once any mixing proportion drops below this.
    double min_mixing = 0.05;
    // Unset: 1e-10 times the pooled outcome variance.
    std::optional<double> min_sigma2;
    std::uint64_t seed = 0;
    VarianceModel variance = VarianceModel::per_group;
    // Threads used across restarts. Does not affect results.
    int jobs = 1;

    void validate() const;
};

// Thresholds with defaults resolved for a particular dataset.
struct EmLimits {
    double min_mixing;
    double min_sigma2;
};

EmLimits resolve_limits(const EmConfig& config, const TrajectoryDataset& ds);

// (K - 1) + K (p + 1) + number of variance parameters.
int n_free_parameters(int n_groups, int degree, VarianceModel variance);

struct MixtureFit {
    MixtureParams<double> params;
    PosteriorMatrix<double> posterior;
    double loglik = 0.0;
    int n_params = 0;
    bool converged = false;
    int n_iter = 0;
    // Restarts that finished without collapsing.
    int n_restarts_used = 0;
    int degree = 0;
    VarianceModel variance = VarianceModel::per_group;

    Eigen::Index n_groups() const { return params.n_groups(); }
};

enum class RunStatus { converged, max_iter, degenerate };

// One EM run from a random-responsibility start.
struct EmRun {
    MixtureParams<double> params;
    PosteriorMatrix<double> posterior;
    double loglik = 0.0;
    // Log-likelihood after every E-step, in order.
    std::vector<double> history;
    RunStatus status = RunStatus::max_iter;
    int n_iter = 0;
};

// Runs restart `restart` of the K-group fit. Its random stream depends only on
// (config.seed, K, restart).
EmRun run_em(const TrajectoryDataset& ds, const Basis& basis, int n_groups, const EmConfig& config, int restart);

// M-step: mixing proportions, weighted least-squares coefficients and
// residual variances from a responsibility matrix.
MixtureParams<double> maximize(const Eigen::MatrixXd& outcomes, const Basis& basis, const Eigen::MatrixXd& pp,
                               VarianceModel variance);

// Best of config.n_restarts runs. Throws AllRestartsDegenerate when every
// restart collapses, std::invalid_argument for K < 1 or N < K.
MixtureFit fit(const TrajectoryDataset& ds, const Basis& basis, int n_groups, const EmConfig& config);

}  // namespace lcga
