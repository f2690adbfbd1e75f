#pragma once

// Data-generating process for synthetic trajectory studies:
//
//   y_it = sum_j beta_jk t^j + b_i + e_it,   b_i ~ N(0, s2_intercept_k),
//                                            e_it ~ N(0, s2_noise_k)
//
// with the group k of subject i drawn from group_probs. The random intercept
// b_i is part of the generator only; the fitted LCGA model has no random
// effects. That mismatch is intentional.
//
// Each subject i draws from its own stream (seed, i) in a fixed order: one
// uniform for the group, one normal for the intercept, then T normals for the
// residuals.

#include <cstdint>
#include <map>
#include <string>

#include <Eigen/Dense>
#include <json.hpp>

#include "lcga/data.hpp"

namespace lcga {

struct ScenarioSpec {
    std::string name;
    std::string description;
    Eigen::VectorXd group_probs;       // K
    Eigen::MatrixXd coeffs;            // K x (J+1), raw calendar-time powers
    Eigen::VectorXd sigma2_noise;      // K
    Eigen::VectorXd sigma2_intercept;  // K (a shared value is stored K times)
    Eigen::VectorXd times;             // T
    int n_subjects = 500;

    int k_true() const { return static_cast<int>(group_probs.size()); }
    // Mean of group k at calendar time t.
    double mean(int k, double t) const;
    // Throws std::invalid_argument on violated invariants.
    void validate() const;
};

struct SimulatedData {
    TrajectoryDataset data;
    Eigen::VectorXi labels;  // 0-based true group per subject
};

SimulatedData generate(const ScenarioSpec& spec, std::uint64_t seed);

// scenario1..scenario4: three or four groups on five visits (t = 0..4).
std::map<std::string, ScenarioSpec> builtin_scenarios();
ScenarioSpec builtin_scenario(const std::string& name);

nlohmann::json to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

}  // namespace lcga
