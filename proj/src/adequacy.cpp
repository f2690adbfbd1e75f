#include "lcga/adequacy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "lcga/error.hpp"

namespace lcga {

Eigen::VectorXd app(const PosteriorMatrix<double>& posterior) {
    const Eigen::Index K = posterior.n_groups();
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(K);
    Eigen::VectorXi count = Eigen::VectorXi::Zero(K);
    for (Eigen::Index i = 0; i < posterior.pp.rows(); ++i) {
        const int k = posterior.assignment[i];
        sum[k] += posterior.pp(i, k);
        ++count[k];
    }
    Eigen::VectorXd out(K);
    for (Eigen::Index k = 0; k < K; ++k)
        out[k] = count[k] > 0 ? sum[k] / count[k] : std::numeric_limits<double>::quiet_NaN();
    return out;
}

double occ(double app_k, double pi_hat_k) {
    if (!(pi_hat_k > 0.0 && pi_hat_k < 1.0))
        throw DegenerateMixing("OCC needs a mixing proportion strictly between 0 and 1");
    if (std::isnan(app_k)) return std::numeric_limits<double>::quiet_NaN();
    if (app_k >= 1.0) return std::numeric_limits<double>::infinity();
    return (app_k / (1.0 - app_k)) / (pi_hat_k / (1.0 - pi_hat_k));
}

double relative_entropy(const PosteriorMatrix<double>& posterior) {
    const Eigen::Index K = posterior.n_groups();
    if (K < 1) throw std::invalid_argument("posterior has no groups");
    if (K == 1) return 1.0;
    // Terms of each row are summed in sorted order so relabelling the groups
    // cannot change the result.
    double entropy = 0.0;
    std::vector<double> terms(static_cast<std::size_t>(K));
    for (Eigen::Index i = 0; i < posterior.pp.rows(); ++i) {
        for (Eigen::Index k = 0; k < K; ++k) {
            const double p = posterior.pp(i, k);
            terms[static_cast<std::size_t>(k)] = p > 0.0 ? -p * std::log(p) : 0.0;
        }
        std::sort(terms.begin(), terms.end());
        for (double t : terms) entropy += t;
    }
    const double value =
        1.0 - entropy / (static_cast<double>(posterior.pp.rows()) * std::log(static_cast<double>(K)));
    return std::clamp(value, 0.0, 1.0);
}

AdequacyReport assess(const PosteriorMatrix<double>& posterior, const Eigen::VectorXd& pi_hat,
                      const AdequacyThresholds& thresholds) {
    const Eigen::Index K = posterior.n_groups();
    AdequacyReport r;
    r.app = app(posterior);
    r.occ.resize(K);
    r.group_sizes = Eigen::VectorXi::Zero(K);
    for (Eigen::Index i = 0; i < posterior.assignment.size(); ++i) ++r.group_sizes[posterior.assignment[i]];

    r.app_pass = true;
    r.occ_pass = true;
    for (Eigen::Index k = 0; k < K; ++k) {
        // A single-group model classifies perfectly by construction.
        r.occ[k] = K == 1 ? std::numeric_limits<double>::infinity() : occ(r.app[k], pi_hat[k]);
        if (!(r.app[k] >= thresholds.app)) r.app_pass = false;
        if (!(r.occ[k] >= thresholds.occ)) r.occ_pass = false;
    }
    r.relative_entropy = relative_entropy(posterior);
    r.entropy_pass = r.relative_entropy >= thresholds.relative_entropy;
    return r;
}

}  // namespace lcga
