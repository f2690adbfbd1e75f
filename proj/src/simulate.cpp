#include "lcga/simulate.hpp"

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "builtin_scenarios.hpp"
#include "lcga/rng.hpp"

namespace lcga {

double ScenarioSpec::mean(int k, double t) const {
    double value = 0.0;
    double power = 1.0;
    for (Eigen::Index j = 0; j < coeffs.cols(); ++j) {
        value += coeffs(k, j) * power;
        power *= t;
    }
    return value;
}

void ScenarioSpec::validate() const {
    const Eigen::Index K = group_probs.size();
    if (K < 1) throw std::invalid_argument("scenario needs at least one group");
    if (coeffs.rows() != K || coeffs.cols() < 1) throw std::invalid_argument("coeffs must have one row per group");
    if (sigma2_noise.size() != K || sigma2_intercept.size() != K)
        throw std::invalid_argument("variance vectors must have one entry per group");
    if ((group_probs.array() < 0.0).any() || std::abs(group_probs.sum() - 1.0) > 1e-12)
        throw std::invalid_argument("group_probs must be non-negative and sum to 1");
    if ((sigma2_noise.array() < 0.0).any() || (sigma2_intercept.array() < 0.0).any())
        throw std::invalid_argument("variances must be non-negative");
    if (!coeffs.allFinite() || !sigma2_noise.allFinite() || !sigma2_intercept.allFinite())
        throw std::invalid_argument("scenario parameters must be finite");
    if (times.size() < 2) throw std::invalid_argument("scenario needs at least two times");
    for (Eigen::Index t = 1; t < times.size(); ++t)
        if (!(times[t] > times[t - 1])) throw std::invalid_argument("scenario times must be strictly increasing");
    if (n_subjects < 1) throw std::invalid_argument("scenario needs at least one subject");
}

SimulatedData generate(const ScenarioSpec& spec, std::uint64_t seed) {
    spec.validate();
    const Eigen::Index N = spec.n_subjects;
    const Eigen::Index T = spec.times.size();
    const Eigen::Index K = spec.k_true();

    Eigen::MatrixXd means(K, T);
    for (Eigen::Index k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < T; ++t) means(k, t) = spec.mean(static_cast<int>(k), spec.times[t]);

    Eigen::MatrixXd y(N, T);
    Eigen::VectorXi labels(N);
    std::vector<std::string> ids;
    ids.reserve(static_cast<std::size_t>(N));
    for (Eigen::Index i = 0; i < N; ++i) {
        auto rng = make_stream(seed, {tag(StreamTag::simulate_subject), static_cast<std::uint64_t>(i)});
        const double u = uniform01(rng);
        Eigen::Index k = 0;
        double cumulative = spec.group_probs[0];
        while (k + 1 < K && u >= cumulative) cumulative += spec.group_probs[++k];
        const double intercept = std::sqrt(spec.sigma2_intercept[k]) * standard_normal(rng);
        const double noise_sd = std::sqrt(spec.sigma2_noise[k]);
        for (Eigen::Index t = 0; t < T; ++t) y(i, t) = means(k, t) + intercept + noise_sd * standard_normal(rng);
        labels[i] = static_cast<int>(k);
        ids.push_back(std::to_string(i + 1));
    }
    return {TrajectoryDataset(std::move(ids), spec.times, std::move(y)), std::move(labels)};
}

std::map<std::string, ScenarioSpec> builtin_scenarios() {
    std::map<std::string, ScenarioSpec> out;
    const auto doc = nlohmann::json::parse(detail::builtin_scenarios_json);
    for (const auto& j : doc.at("scenarios")) {
        ScenarioSpec s = scenario_from_json(j);
        out.emplace(s.name, std::move(s));
    }
    return out;
}

ScenarioSpec builtin_scenario(const std::string& name) {
    auto all = builtin_scenarios();
    auto it = all.find(name);
    if (it == all.end()) throw std::invalid_argument("unknown scenario '" + name + "'");
    return it->second;
}

namespace {

std::vector<double> to_vec(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

Eigen::VectorXd from_vec(const std::vector<double>& v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// A scalar is broadcast to all K groups.
Eigen::VectorXd per_group(const nlohmann::json& j, Eigen::Index K) {
    if (j.is_number()) return Eigen::VectorXd::Constant(K, j.get<double>());
    return from_vec(j.get<std::vector<double>>());
}

}  // namespace

nlohmann::json to_json(const ScenarioSpec& spec) {
    nlohmann::json coeffs = nlohmann::json::array();
    for (Eigen::Index k = 0; k < spec.coeffs.rows(); ++k) coeffs.push_back(to_vec(spec.coeffs.row(k).transpose()));
    return {
        {"name", spec.name},
        {"description", spec.description},
        {"group_probs", to_vec(spec.group_probs)},
        {"coeffs", coeffs},
        {"sigma2_noise", to_vec(spec.sigma2_noise)},
        {"sigma2_intercept", to_vec(spec.sigma2_intercept)},
        {"times", to_vec(spec.times)},
        {"n_subjects", spec.n_subjects},
    };
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
    ScenarioSpec s;
    s.name = j.value("name", std::string{});
    s.description = j.value("description", std::string{});
    s.group_probs = from_vec(j.at("group_probs").get<std::vector<double>>());
    const Eigen::Index K = s.group_probs.size();
    const auto rows = j.at("coeffs").get<std::vector<std::vector<double>>>();
    if (static_cast<Eigen::Index>(rows.size()) != K || rows.empty())
        throw std::invalid_argument("coeffs must have one row per group");
    s.coeffs.resize(K, static_cast<Eigen::Index>(rows.front().size()));
    for (Eigen::Index k = 0; k < K; ++k) {
        if (rows[static_cast<std::size_t>(k)].size() != rows.front().size())
            throw std::invalid_argument("coeff rows must have equal length");
        s.coeffs.row(k) = from_vec(rows[static_cast<std::size_t>(k)]).transpose();
    }
    s.sigma2_noise = per_group(j.at("sigma2_noise"), K);
    s.sigma2_intercept = per_group(j.at("sigma2_intercept"), K);
    if (j.contains("times")) {
        s.times = from_vec(j.at("times").get<std::vector<double>>());
    } else {
        const int T = j.value("T", 5);
        s.times = Eigen::VectorXd::LinSpaced(T, 0.0, T - 1.0);
    }
    s.n_subjects = j.value("n_subjects", 500);
    s.validate();
    return s;
}

}  // namespace lcga
