#pragma once

// Subject-level nonparametric bootstrap of the selected number of groups:
// resample whole trajectories with replacement, rerun the full BIC scan on
// each resample, and tabulate which K wins.

#include <cstdint>
#include <map>
#include <optional>
#include <vector>

#include "lcga/selection.hpp"

namespace lcga {

struct BootstrapOptions {
    int n_samples = 100;  // B
    std::uint64_t seed = 0;
    // Resample size; unset means N.
    std::optional<Eigen::Index> resample_size;
    // Test hook: every sample is the identity resample.
    bool identity_resample = false;
    int jobs = 1;
};

struct BootstrapReport {
    int n_samples = 0;
    std::map<int, int> counts;  // selected K -> samples
    int failures = 0;           // samples where no K could be fitted
    int original_k = 0;         // 0 when the original data had no usable model
    double agreement = 0.0;     // counts[original_k] / B
    // Selected K per sample in sample order, 0 for failures.
    std::vector<int> selected;

    double binomial_se() const;
    // Fraction of samples that selected k.
    double share(int k) const;
};

// Indices drawn for sample b (1-based) from the stream (seed, b).
std::vector<Eigen::Index> bootstrap_indices(Eigen::Index n_subjects, Eigen::Index size, std::uint64_t seed, int b);

// Runs the scan on the original data first, then on every resample.
BootstrapReport run_bootstrap(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config,
                              const BootstrapOptions& options);

// Same, with the original selection already known (0 if none).
BootstrapReport run_bootstrap(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config,
                              const BootstrapOptions& options, int original_k);

}  // namespace lcga
