#include "lcga/bootstrap.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "lcga/error.hpp"
#include "lcga/parallel.hpp"
#include "lcga/rng.hpp"

namespace lcga {

double BootstrapReport::binomial_se() const {
    if (n_samples == 0) return 0.0;
    return std::sqrt(agreement * (1.0 - agreement) / n_samples);
}

double BootstrapReport::share(int k) const {
    if (n_samples == 0) return 0.0;
    auto it = counts.find(k);
    return it == counts.end() ? 0.0 : static_cast<double>(it->second) / n_samples;
}

std::vector<Eigen::Index> bootstrap_indices(Eigen::Index n_subjects, Eigen::Index size, std::uint64_t seed, int b) {
    if (n_subjects < 1 || size < 1) throw std::invalid_argument("bootstrap needs a non-empty dataset and sample");
    auto rng = make_stream(seed, {tag(StreamTag::bootstrap_resample), static_cast<std::uint64_t>(b)});
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(size));
    for (auto& i : idx) i = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::uint64_t>(n_subjects)));
    return idx;
}

BootstrapReport run_bootstrap(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config,
                              const BootstrapOptions& options, int original_k) {
    if (options.n_samples < 1) throw std::invalid_argument("bootstrap needs at least one sample");
    const Eigen::Index n = ds.n_subjects();
    const Eigen::Index size = options.resample_size.value_or(n);

    EmConfig inner = config;
    inner.jobs = 1;
    std::vector<int> selected(static_cast<std::size_t>(options.n_samples), 0);
    parallel_for(selected.size(), options.jobs, [&](std::size_t slot) {
        const int b = static_cast<int>(slot) + 1;
        std::vector<Eigen::Index> idx;
        if (options.identity_resample) {
            idx.resize(static_cast<std::size_t>(n));
            std::iota(idx.begin(), idx.end(), Eigen::Index{0});
        } else {
            idx = bootstrap_indices(n, size, options.seed, b);
        }
        const TrajectoryDataset sample = resample(ds, idx);
        try {
            selected[slot] = scan(sample, basis, k_max, inner).selected_k;
        } catch (const NoModelAvailable&) {
            selected[slot] = 0;
        }
    });

    BootstrapReport report;
    report.n_samples = options.n_samples;
    report.original_k = original_k;
    for (int k : selected) {
        if (k == 0)
            ++report.failures;
        else
            ++report.counts[k];
    }
    report.agreement = report.share(original_k);
    report.selected = std::move(selected);
    return report;
}

BootstrapReport run_bootstrap(const TrajectoryDataset& ds, const Basis& basis, int k_max, const EmConfig& config,
                              const BootstrapOptions& options) {
    int original_k = 0;
    try {
        EmConfig outer = config;
        outer.jobs = options.jobs;
        original_k = scan(ds, basis, k_max, outer).selected_k;
    } catch (const NoModelAvailable&) {
    }
    return run_bootstrap(ds, basis, k_max, config, options, original_k);
}

}  // namespace lcga
