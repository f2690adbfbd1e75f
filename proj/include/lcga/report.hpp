#pragma once

// JSON and CSV renderings of fits, scans, bootstrap and experiment results.
// Infinities are written as the string "Inf" ("-Inf"), undefined values as
// null in JSON and "NaN" in CSV.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "lcga/adequacy.hpp"
#include "lcga/bootstrap.hpp"
#include "lcga/experiment.hpp"
#include "lcga/selection.hpp"

namespace lcga {

nlohmann::json json_number(double value);
double number_from_json(const nlohmann::json& j);
std::string csv_number(double value);

std::string to_string(VarianceModel v);
VarianceModel variance_model_from_string(const std::string& s);

nlohmann::json to_json(const EmConfig& config);
EmConfig em_config_from_json(const nlohmann::json& j);

// Coefficients are reported on the raw normalized-time basis.
nlohmann::json to_json(const MixtureFit& fit, const Basis& basis, Eigen::Index n_subjects);
nlohmann::json to_json(const AdequacyReport& report);
AdequacyReport adequacy_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ModelScan& scan, const Basis& basis, Eigen::Index n_subjects);
nlohmann::json to_json(const BootstrapReport& report);

nlohmann::json to_json(const ExperimentConfig& config);
ExperimentConfig experiment_config_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ReplicationRecord& record);
ReplicationRecord replication_from_json(const nlohmann::json& j);
nlohmann::json to_json(const ExperimentReport& report);

// time,group,mean rows for every group's fitted mean curve.
void write_means_csv(std::ostream& out, const MixtureFit& fit, const Basis& basis);
// K,count histogram rows for k = 1..k_max.
void write_bootstrap_csv(std::ostream& out, const BootstrapReport& report, int k_max);
// One row per comparison metric, and one row per adequacy criterion.
void write_selection_table_csv(std::ostream& out, const ExperimentReport& report);
void write_adequacy_table_csv(std::ostream& out, const ExperimentReport& report, const AdequacyThresholds& thresholds);

}  // namespace lcga
