#include "lcga/selection.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>

#include "lcga/error.hpp"
#include "lcga/parallel.hpp"

namespace lcga {

double bic(double loglik, int n_params, double n_subjects) {
    return -2.0 * loglik + static_cast<double>(n_params) * std::log(n_subjects);
}

double bic(const MixtureFit& fit, Eigen::Index n_subjects) {
    return bic(fit.loglik, fit.n_params, static_cast<double>(n_subjects));
}

int argmin_bic(const std::map<int, double>& bics) {
    if (bics.empty()) throw std::invalid_argument("no BIC values");
    auto best = bics.begin();
    for (auto it = bics.begin(); it != bics.end(); ++it)
        if (it->second < best->second) best = it;
    return best->first;
}

std::map<int, double> bic_weights(const std::map<int, double>& bics) {
    if (bics.empty()) throw std::invalid_argument("bic_weights needs at least one model");
    for (const auto& [k, b] : bics)
        if (!std::isfinite(b)) throw std::invalid_argument("BIC for K=" + std::to_string(k) + " is not finite");
    const double lowest = bics.at(argmin_bic(bics));
    std::map<int, double> w;
    double total = 0.0;
    for (const auto& [k, b] : bics) {
        w[k] = std::exp(-(b - lowest) / 2.0);
        total += w[k];
    }
    for (auto& [k, v] : w) v /= total;
    return w;
}

ModelScan scan(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config) {
    if (k_max < 1) throw std::invalid_argument("k_max must be at least 1");
    config.validate();
    const int candidates = static_cast<int>(std::min<Eigen::Index>(k_max, ds.n_subjects()));

    EmConfig inner = config;
    inner.jobs = 1;
    std::vector<std::optional<MixtureFit>> fits(static_cast<std::size_t>(candidates));
    parallel_for(fits.size(), config.jobs, [&](std::size_t idx) {
        try {
            fits[idx] = fit(ds, basis, static_cast<int>(idx) + 1, inner);
        } catch (const AllRestartsDegenerate&) {
        }
    });

    ModelScan out;
    out.k_max = k_max;
    double best_loglik = -INFINITY;
    for (int k = 1; k <= candidates; ++k) {
        auto& f = fits[static_cast<std::size_t>(k - 1)];
        if (!f) continue;
        if (f->loglik < best_loglik) out.loglik_order_warnings.push_back(k);
        best_loglik = std::max(best_loglik, f->loglik);
        out.bic[k] = bic(*f, ds.n_subjects());
        out.fits.emplace(k, std::move(*f));
    }
    if (out.bic.empty()) throw NoModelAvailable("no candidate K in 1.." + std::to_string(k_max) + " could be fitted");
    out.weights = bic_weights(out.bic);
    out.selected_k = argmin_bic(out.bic);
    return out;
}

}  // namespace lcga
