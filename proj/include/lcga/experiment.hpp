#pragma once

// Monte Carlo replication study: for each replication, simulate a dataset,
// select K by BIC, record BIC weights and the adequacy of the selected model,
// then bootstrap the selection. Aggregates match the layout of a
// "replication vs Bayesian weight vs bootstrap" comparison table and an
// adequacy-criteria table.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "lcga/adequacy.hpp"
#include "lcga/em.hpp"
#include "lcga/simulate.hpp"

namespace lcga {

struct ExperimentConfig {
    ScenarioSpec scenario;
    int replications = 100;  // R
    int bootstraps = 100;    // B per replication; 0 skips the bootstrap stage
    int k_max = 5;
    int degree = 3;
    EmConfig em;
    std::uint64_t master_seed = 0;
    AdequacyThresholds thresholds;

    void validate() const;
};

struct ReplicationRecord {
    int replication = 0;  // 1-based
    int selected_k = 0;   // 0 when no K could be fitted
    std::map<int, double> bic;
    std::map<int, double> weights;
    double weight_true = 0.0;  // BIC weight of the true K (0 if unavailable)
    std::optional<AdequacyReport> adequacy;
    std::map<int, int> bootstrap_counts;
    int bootstrap_failures = 0;
    std::vector<int> loglik_order_warnings;
};

struct CriterionSummary {
    int n_above = 0;  // replications where every group passes
    int n_total = 0;
    double min = 0.0;
    double max = 0.0;

    double percent() const { return n_total == 0 ? 0.0 : 100.0 * n_above / n_total; }
};

struct AdequacySummary {
    CriterionSummary app;
    CriterionSummary occ;
    CriterionSummary relative_entropy;
};

struct ExperimentReport {
    int k_true = 0;
    int replications = 0;
    int bootstraps = 0;
    int scan_failures = 0;
    std::map<int, int> selected_counts;

    double pct_correct_bic = 0.0;
    double mean_bayes_correct = 0.0;  // percent
    double pct_correct_bootstrap_pooled = 0.0;
    double pct_correct_bootstrap_mean = 0.0;
    std::vector<double> pct_correct_bootstrap_per_rep;
    int bootstrap_failures = 0;

    AdequacySummary adequacy;

    // Monte Carlo standard errors, in percentage points.
    double mc_se_bic = 0.0;
    double mc_se_bayes = 0.0;
    double mc_se_bootstrap = 0.0;
};

// Minimum and maximum run over every group-level value of every replication;
// infinite values are kept, undefined (NaN) values are skipped
// for min/max and count as failing.
AdequacySummary summarize_adequacy(const std::vector<AdequacyReport>& reports, const AdequacyThresholds& thresholds);

ReplicationRecord run_replication(const ExperimentConfig& config, int replication);

ExperimentReport aggregate(const ExperimentConfig& config, const std::vector<ReplicationRecord>& records);

struct ExperimentOptions {
    int jobs = 1;
    // Append-only JSON-lines file; existing records are reused on restart.
    std::optional<std::filesystem::path> checkpoint;
    std::function<void(int done, int total)> progress;
};

struct ExperimentResult {
    ExperimentReport report;
    std::vector<ReplicationRecord> records;
};

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options = {});

}  // namespace lcga
