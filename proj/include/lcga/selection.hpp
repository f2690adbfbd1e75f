#pragma once

#include <map>
#include <string>
#include <vector>

#include "lcga/em.hpp"

namespace lcga {

// -2 loglik + q log N, with N the number of subjects. Lower is better.
double bic(const MixtureFit& fit, Eigen::Index n_subjects);
double bic(double loglik, int n_params, double n_subjects);

// Schwarz weights exp(-(BIC_j - BIC_min)/2), normalized over the given models.
std::map<int, double> bic_weights(const std::map<int, double>& bics);

// Smallest key among the minimum values.
int argmin_bic(const std::map<int, double>& bics);

struct ModelScan {
    std::map<int, MixtureFit> fits;  // absent where every restart collapsed
    std::map<int, double> bic;
    std::map<int, double> weights;
    int selected_k = 0;
    int k_max = 0;
    // K values whose best log-likelihood fell below that of a smaller K.
    std::vector<int> loglik_order_warnings;

    const MixtureFit& selected() const { return fits.at(selected_k); }
};

// Fits K = 1..k_max. Throws NoModelAvailable when no K could be fitted.
ModelScan scan(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config);

}  // namespace lcga
