#pragma once

// Classification adequacy of a fitted mixture: average posterior probability
// (APP), odds of correct classification (OCC) and relative entropy.

#include <Eigen/Dense>

#include "lcga/mixture.hpp"

namespace lcga {

struct AdequacyThresholds {
    double app = 0.70;
    double occ = 5.0;
    double relative_entropy = 0.80;
};

struct AdequacyReport {
    Eigen::VectorXd app;  // NaN for empty groups
    Eigen::VectorXd occ;  // +Inf when APP_k = 1, NaN when undefined
    double relative_entropy = 1.0;
    bool app_pass = false;
    bool occ_pass = false;
    bool entropy_pass = false;
    Eigen::VectorXi group_sizes;
};

// Mean posterior probability of group k over subjects assigned to k.
Eigen::VectorXd app(const PosteriorMatrix<double>& posterior);

// (app/(1-app)) / (pi/(1-pi)); +Inf when app == 1. Throws DegenerateMixing
// unless 0 < pi < 1.
double occ(double app_k, double pi_hat_k);

// 1 - sum_i sum_k -pp ln pp / (N ln K); 1 when K == 1.
double relative_entropy(const PosteriorMatrix<double>& posterior);

AdequacyReport assess(const PosteriorMatrix<double>& posterior, const Eigen::VectorXd& pi_hat,
                      const AdequacyThresholds& thresholds = {});

}  // namespace lcga
