#include "lcga/em.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

#include "lcga/error.hpp"
#include "lcga/parallel.hpp"
#include "lcga/rng.hpp"

namespace lcga {

void EmConfig::validate() const {
    if (max_iter < 1) throw std::invalid_argument("max_iter must be at least 1");
    if (!(rel_tol > 0.0)) throw std::invalid_argument("rel_tol must be positive");
    if (n_restarts < 1) throw std::invalid_argument("n_restarts must be at least 1");
    if (!(min_mixing >= 0.0 && min_mixing < 1.0))
        throw std::invalid_argument("min_mixing must lie in [0, 1)");
    if (min_sigma2 && !(*min_sigma2 >= 0.0)) throw std::invalid_argument("min_sigma2 must be non-negative");
}

EmLimits resolve_limits(const EmConfig& config, const TrajectoryDataset& ds) {
    return {
        config.min_mixing,
        config.min_sigma2.value_or(1e-10 * ds.outcome_variance()),
    };
}

int n_free_parameters(int n_groups, int degree, VarianceModel variance) {
    const int variances = variance == VarianceModel::per_group ? n_groups : 1;
    return (n_groups - 1) + n_groups * (degree + 1) + variances;
}

namespace {

struct MStep {
    MixtureParams<double> params;
    Eigen::MatrixXd rss;  // N x K squared residual norms under the new means
    bool degenerate = false;
};

MStep m_step(const Eigen::MatrixXd& y, const Basis& basis, const Eigen::MatrixXd& pp, VarianceModel variance,
             const EmLimits* limits) {
    const Eigen::Index N = y.rows();
    const Eigen::Index T = y.cols();
    const Eigen::Index K = pp.cols();
    const Eigen::MatrixXd& Q = basis.ortho_design();

    MStep out;
    const Eigen::VectorXd mass = pp.colwise().sum().transpose();
    out.params.pi = mass / static_cast<double>(N);
    if (limits) {
        for (Eigen::Index k = 0; k < K; ++k)
            if (!(out.params.pi[k] >= limits->min_mixing) || !(mass[k] > 0.0)) out.degenerate = true;
    } else if (!((mass.array() > 0.0).all())) {
        throw std::invalid_argument("every group needs positive responsibility mass");
    }
    if (out.degenerate) return out;

    // Weighted mean trajectories, then projection onto the orthonormal design.
    const Eigen::MatrixXd ybar = (pp.transpose() * y).array().colwise() / mass.array();
    out.params.beta = ybar * Q;
    const Eigen::MatrixXd means = out.params.beta * Q.transpose();

    out.rss.resize(N, K);
    for (Eigen::Index k = 0; k < K; ++k) out.rss.col(k) = (y.rowwise() - means.row(k)).rowwise().squaredNorm();
    const Eigen::VectorXd weighted_rss = (out.rss.array() * pp.array()).colwise().sum().transpose();

    if (variance == VarianceModel::per_group) {
        out.params.sigma2 = weighted_rss.array() / (static_cast<double>(T) * mass.array());
    } else {
        out.params.sigma2 = Eigen::VectorXd::Constant(K, weighted_rss.sum() / static_cast<double>(N * T));
    }
    for (Eigen::Index k = 0; k < K; ++k) {
        const double s2 = out.params.sigma2[k];
        const bool bad = !(s2 > 0.0) || !std::isfinite(s2) || (limits && s2 < limits->min_sigma2);
        if (bad) {
            if (!limits) throw std::invalid_argument("residual variance collapsed to zero");
            out.degenerate = true;
        }
    }
    return out;
}

}  // namespace

MixtureParams<double> maximize(const Eigen::MatrixXd& outcomes, const Basis& basis, const Eigen::MatrixXd& pp,
                               VarianceModel variance) {
    if (pp.rows() != outcomes.rows() || pp.cols() < 1)
        throw std::invalid_argument("responsibility matrix must be N x K");
    return m_step(outcomes, basis, pp, variance, nullptr).params;
}

EmRun run_em(const TrajectoryDataset& ds, const Basis& basis, int n_groups, const EmConfig& config, int restart) {
    config.validate();
    const Eigen::MatrixXd& y = ds.outcomes();
    const Eigen::Index N = y.rows();
    const Eigen::Index K = n_groups;
    const auto T = static_cast<double>(y.cols());
    if (K < 1) throw std::invalid_argument("number of groups must be at least 1");
    if (N < K) throw std::invalid_argument("need at least as many subjects as groups");
    if (basis.n_times() != y.cols()) throw std::invalid_argument("basis grid does not match dataset");
    const EmLimits limits = resolve_limits(config, ds);

    // Random-responsibility start: each row ~ Dirichlet(1, ..., 1).
    auto rng = make_stream(config.seed, {tag(StreamTag::em_restart), static_cast<std::uint64_t>(K),
                                         static_cast<std::uint64_t>(restart)});
    Eigen::MatrixXd pp(N, K);
    for (Eigen::Index i = 0; i < N; ++i) {
        for (Eigen::Index k = 0; k < K; ++k) pp(i, k) = -std::log(1.0 - uniform01(rng));
        pp.row(i) /= pp.row(i).sum();
    }

    constexpr double two_pi = 2.0 * std::numbers::pi;
    EmRun run;
    double previous = -std::numeric_limits<double>::infinity();
    for (int iter = 1; iter <= config.max_iter; ++iter) {
        MStep m = m_step(y, basis, pp, config.variance, &limits);
        if (m.degenerate) {
            run.status = RunStatus::degenerate;
            run.n_iter = iter;
            return run;
        }

        Eigen::MatrixXd lj(N, K);
        for (Eigen::Index k = 0; k < K; ++k) {
            const double s2 = m.params.sigma2[k];
            const double constant = std::log(m.params.pi[k]) - 0.5 * T * std::log(two_pi * s2);
            lj.col(k) = (constant - m.rss.col(k).array() / (2.0 * s2)).matrix();
        }
        const double ll = rowwise_logsumexp(lj).sum();
        auto post = posterior_from_log_joint(lj);

        run.params = std::move(m.params);
        run.posterior = std::move(post);
        run.loglik = ll;
        run.history.push_back(ll);
        run.n_iter = iter;
        pp = run.posterior.pp;

        if (K == 1 || (iter > 1 && ll - previous < config.rel_tol * std::abs(previous))) {
            run.status = RunStatus::converged;
            return run;
        }
        previous = ll;
    }
    run.status = RunStatus::max_iter;
    return run;
}

MixtureFit fit(const TrajectoryDataset& ds, const Basis& basis, int n_groups, const EmConfig& config) {
    config.validate();
    if (n_groups < 1) throw std::invalid_argument("number of groups must be at least 1");
    if (ds.n_subjects() < n_groups) throw std::invalid_argument("need at least as many subjects as groups");

    std::vector<EmRun> runs(static_cast<std::size_t>(config.n_restarts));
    parallel_for(runs.size(), config.jobs,
                 [&](std::size_t r) { runs[r] = run_em(ds, basis, n_groups, config, static_cast<int>(r)); });

    // Prefer converged runs; among equals the highest log-likelihood, then the
    // lowest restart index.
    const EmRun* best = nullptr;
    int usable = 0;
    for (const auto& run : runs) {
        if (run.status == RunStatus::degenerate) continue;
        ++usable;
        if (!best) {
            best = &run;
            continue;
        }
        const bool run_conv = run.status == RunStatus::converged;
        const bool best_conv = best->status == RunStatus::converged;
        if ((run_conv && !best_conv) || (run_conv == best_conv && run.loglik > best->loglik)) best = &run;
    }
    if (!best)
        throw AllRestartsDegenerate(n_groups, "all " + std::to_string(config.n_restarts) + " restarts for K=" +
                                                  std::to_string(n_groups) + " collapsed to a degenerate component");

    MixtureFit out;
    out.params = best->params;
    out.posterior = best->posterior;
    out.loglik = best->loglik;
    out.n_params = n_free_parameters(n_groups, basis.degree(), config.variance);
    out.converged = best->status == RunStatus::converged;
    out.n_iter = best->n_iter;
    out.n_restarts_used = usable;
    out.degree = basis.degree();
    out.variance = config.variance;
    return out;
}

}  // namespace lcga
