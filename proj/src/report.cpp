#include "lcga/report.hpp"

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "lcga/data.hpp"

namespace lcga {

using nlohmann::json;

json json_number(double value) {
    if (std::isnan(value)) return nullptr;
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    return value;
}

double number_from_json(const json& j) {
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) {
        const auto s = j.get<std::string>();
        if (s == "Inf") return std::numeric_limits<double>::infinity();
        if (s == "-Inf") return -std::numeric_limits<double>::infinity();
        throw std::invalid_argument("unexpected numeric string '" + s + "'");
    }
    return j.get<double>();
}

std::string csv_number(double value) {
    if (std::isnan(value)) return "NaN";
    if (std::isinf(value)) return value > 0 ? "Inf" : "-Inf";
    return format_double(value);
}

namespace {

json vector_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(json_number(v[i]));
    return out;
}

Eigen::VectorXd vector_from_json(const json& j) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Eigen::Index>(i)] = number_from_json(j[i]);
    return v;
}

template <typename V>
json keyed(const std::map<int, V>& m) {
    json out = json::object();
    for (const auto& [k, v] : m) {
        if constexpr (std::is_floating_point_v<V>)
            out[std::to_string(k)] = json_number(v);
        else
            out[std::to_string(k)] = v;
    }
    return out;
}

std::map<int, double> keyed_doubles(const json& j) {
    std::map<int, double> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = number_from_json(it.value());
    return out;
}

std::map<int, int> keyed_ints(const json& j) {
    std::map<int, int> out;
    for (auto it = j.begin(); it != j.end(); ++it) out[std::stoi(it.key())] = it.value().get<int>();
    return out;
}

}  // namespace

std::string to_string(VarianceModel v) { return v == VarianceModel::pooled ? "pooled" : "per_group"; }

VarianceModel variance_model_from_string(const std::string& s) {
    if (s == "per_group") return VarianceModel::per_group;
    if (s == "pooled") return VarianceModel::pooled;
    throw std::invalid_argument("variance model must be 'per_group' or 'pooled', got '" + s + "'");
}

json to_json(const EmConfig& c) {
    return {
        {"max_iter", c.max_iter},
        {"rel_tol", c.rel_tol},
        {"n_restarts", c.n_restarts},
        {"min_mixing", c.min_mixing},
        {"min_sigma2", c.min_sigma2 ? json(*c.min_sigma2) : json("1e-10*var(y)")},
        {"seed", c.seed},
        {"variance", to_string(c.variance)},
    };
}

EmConfig em_config_from_json(const json& j) {
    EmConfig c;
    c.max_iter = j.value("max_iter", c.max_iter);
    c.rel_tol = j.value("rel_tol", c.rel_tol);
    c.n_restarts = j.value("n_restarts", c.n_restarts);
    c.min_mixing = j.value("min_mixing", c.min_mixing);
    if (j.contains("min_sigma2") && j["min_sigma2"].is_number()) c.min_sigma2 = j["min_sigma2"].get<double>();
    c.seed = j.value("seed", c.seed);
    if (j.contains("variance")) c.variance = variance_model_from_string(j["variance"].get<std::string>());
    c.validate();
    return c;
}

json to_json(const MixtureFit& fit, const Basis& basis, Eigen::Index n_subjects) {
    json groups = json::array();
    const Eigen::MatrixXd means = group_means(fit.params, basis);
    for (Eigen::Index k = 0; k < fit.n_groups(); ++k) {
        const Eigen::VectorXd raw = basis.to_raw(fit.params.beta.row(k).transpose());
        groups.push_back({
            {"group", k + 1},
            {"pi", fit.params.pi[k]},
            {"coefficients", vector_json(raw)},
            {"sigma2", fit.params.sigma2[k]},
            {"fitted_means", vector_json(means.row(k).transpose())},
            {"assigned", (fit.posterior.assignment.array() == static_cast<int>(k)).count()},
        });
    }
    return {
        {"K", fit.n_groups()},
        {"loglik", fit.loglik},
        {"n_params", fit.n_params},
        {"bic", bic(fit, n_subjects)},
        {"bic_sample_size", n_subjects},
        {"converged", fit.converged},
        {"n_iter", fit.n_iter},
        {"n_restarts_used", fit.n_restarts_used},
        {"variance_model", to_string(fit.variance)},
        {"basis",
         {{"degree", basis.degree()},
          {"time_scale", "normalized"},
          {"t_min", basis.t_min()},
          {"t_max", basis.t_max()},
          {"note", "coefficients multiply u^j with u = (t - t_min) / (t_max - t_min)"}}},
        {"groups", groups},
    };
}

json to_json(const AdequacyReport& r) {
    std::vector<int> sizes(r.group_sizes.data(), r.group_sizes.data() + r.group_sizes.size());
    return {
        {"app", vector_json(r.app)},
        {"occ", vector_json(r.occ)},
        {"relative_entropy", json_number(r.relative_entropy)},
        {"app_pass", r.app_pass},
        {"occ_pass", r.occ_pass},
        {"entropy_pass", r.entropy_pass},
        {"group_sizes", sizes},
    };
}

AdequacyReport adequacy_from_json(const json& j) {
    AdequacyReport r;
    r.app = vector_from_json(j.at("app"));
    r.occ = vector_from_json(j.at("occ"));
    r.relative_entropy = number_from_json(j.at("relative_entropy"));
    r.app_pass = j.at("app_pass").get<bool>();
    r.occ_pass = j.at("occ_pass").get<bool>();
    r.entropy_pass = j.at("entropy_pass").get<bool>();
    const auto sizes = j.at("group_sizes").get<std::vector<int>>();
    r.group_sizes = Eigen::Map<const Eigen::VectorXi>(sizes.data(), static_cast<Eigen::Index>(sizes.size()));
    return r;
}

json to_json(const ModelScan& s, const Basis& basis, Eigen::Index n_subjects) {
    json models = json::array();
    for (int k = 1; k <= s.k_max; ++k) {
        auto it = s.fits.find(k);
        if (it == s.fits.end()) {
            models.push_back({{"K", k}, {"available", false}});
            continue;
        }
        json m = to_json(it->second, basis, n_subjects);
        m["available"] = true;
        m["weight"] = s.weights.at(k);
        m["adequacy"] = to_json(assess(it->second.posterior, it->second.params.pi));
        models.push_back(std::move(m));
    }
    return {
        {"k_max", s.k_max},
        {"selected_K", s.selected_k},
        {"bic", keyed(s.bic)},
        {"weights", keyed(s.weights)},
        {"loglik_order_warnings", s.loglik_order_warnings},
        {"models", models},
    };
}

json to_json(const BootstrapReport& r) {
    return {
        {"B", r.n_samples},
        {"counts", keyed(r.counts)},
        {"failures", r.failures},
        {"original_K", r.original_k},
        {"agreement", r.agreement},
        {"binomial_se", r.binomial_se()},
        {"selected", r.selected},
    };
}

json to_json(const ExperimentConfig& c) {
    return {
        {"scenario", to_json(c.scenario)},
        {"replications", c.replications},
        {"bootstraps", c.bootstraps},
        {"k_max", c.k_max},
        {"degree", c.degree},
        {"em", to_json(c.em)},
        {"master_seed", c.master_seed},
        {"thresholds",
         {{"app", c.thresholds.app}, {"occ", c.thresholds.occ}, {"relative_entropy", c.thresholds.relative_entropy}}},
    };
}

ExperimentConfig experiment_config_from_json(const json& j) {
    ExperimentConfig c;
    const json& s = j.at("scenario");
    if (s.is_string()) {
        c.scenario = builtin_scenario(s.get<std::string>());
    } else {
        c.scenario = scenario_from_json(s);
    }
    if (j.contains("n_subjects")) c.scenario.n_subjects = j["n_subjects"].get<int>();
    c.replications = j.value("replications", c.replications);
    c.bootstraps = j.value("bootstraps", c.bootstraps);
    c.k_max = j.value("k_max", c.k_max);
    c.degree = j.value("degree", c.degree);
    if (j.contains("em")) c.em = em_config_from_json(j["em"]);
    c.master_seed = j.value("master_seed", c.master_seed);
    if (j.contains("thresholds")) {
        const json& t = j["thresholds"];
        c.thresholds.app = t.value("app", c.thresholds.app);
        c.thresholds.occ = t.value("occ", c.thresholds.occ);
        c.thresholds.relative_entropy = t.value("relative_entropy", c.thresholds.relative_entropy);
    }
    c.validate();
    return c;
}

json to_json(const ReplicationRecord& r) {
    return {
        {"type", "replication"},
        {"replication", r.replication},
        {"selected_K", r.selected_k},
        {"bic", keyed(r.bic)},
        {"weights", keyed(r.weights)},
        {"weight_true", r.weight_true},
        {"adequacy", r.adequacy ? to_json(*r.adequacy) : json(nullptr)},
        {"bootstrap_counts", keyed(r.bootstrap_counts)},
        {"bootstrap_failures", r.bootstrap_failures},
        {"loglik_order_warnings", r.loglik_order_warnings},
    };
}

ReplicationRecord replication_from_json(const json& j) {
    ReplicationRecord r;
    r.replication = j.at("replication").get<int>();
    r.selected_k = j.at("selected_K").get<int>();
    r.bic = keyed_doubles(j.at("bic"));
    r.weights = keyed_doubles(j.at("weights"));
    r.weight_true = j.at("weight_true").get<double>();
    if (!j.at("adequacy").is_null()) r.adequacy = adequacy_from_json(j["adequacy"]);
    r.bootstrap_counts = keyed_ints(j.at("bootstrap_counts"));
    r.bootstrap_failures = j.at("bootstrap_failures").get<int>();
    r.loglik_order_warnings = j.at("loglik_order_warnings").get<std::vector<int>>();
    return r;
}

namespace {

json to_json(const CriterionSummary& s) {
    return {{"n_above", s.n_above}, {"n_total", s.n_total}, {"percent", s.percent()},
            {"min", json_number(s.min)}, {"max", json_number(s.max)}};
}

}  // namespace

json to_json(const ExperimentReport& r) {
    return {
        {"K_true", r.k_true},
        {"replications", r.replications},
        {"bootstraps", r.bootstraps},
        {"scan_failures", r.scan_failures},
        {"selected_counts", keyed(r.selected_counts)},
        {"pct_correct_bic", r.pct_correct_bic},
        {"mean_bayes_correct", r.mean_bayes_correct},
        {"pct_correct_bootstrap_pooled", r.pct_correct_bootstrap_pooled},
        {"pct_correct_bootstrap_mean", r.pct_correct_bootstrap_mean},
        {"pct_correct_bootstrap_per_rep", r.pct_correct_bootstrap_per_rep},
        {"bootstrap_failures", r.bootstrap_failures},
        {"mc_se", {{"bic", r.mc_se_bic}, {"bayes", r.mc_se_bayes}, {"bootstrap", r.mc_se_bootstrap}}},
        {"adequacy",
         {{"app", to_json(r.adequacy.app)},
          {"occ", to_json(r.adequacy.occ)},
          {"relative_entropy", to_json(r.adequacy.relative_entropy)},
          {"range_note", "min/max over every group-level value of each replication's selected model"}}},
        {"bic_sample_size", "subjects"},
    };
}

void write_means_csv(std::ostream& out, const MixtureFit& fit, const Basis& basis) {
    const Eigen::MatrixXd means = group_means(fit.params, basis);
    out << "time,group,mean\n";
    for (Eigen::Index k = 0; k < means.rows(); ++k)
        for (Eigen::Index t = 0; t < means.cols(); ++t)
            out << format_double(basis.times()[t]) << ',' << k + 1 << ',' << csv_number(means(k, t)) << '\n';
}

void write_bootstrap_csv(std::ostream& out, const BootstrapReport& report, int k_max) {
    out << "K,count\n";
    for (int k = 1; k <= k_max; ++k) {
        auto it = report.counts.find(k);
        out << k << ',' << (it == report.counts.end() ? 0 : it->second) << '\n';
    }
}

void write_selection_table_csv(std::ostream& out, const ExperimentReport& r) {
    out << "metric,value,mc_se\n";
    out << "replication samples that identified the correct number of groups (%)," << csv_number(r.pct_correct_bic)
        << ',' << csv_number(r.mc_se_bic) << '\n';
    out << "probability of having identified the correct number of groups (mean %),"
        << csv_number(r.mean_bayes_correct) << ',' << csv_number(r.mc_se_bayes) << '\n';
    out << "bootstrap samples that identified the correct number of groups (%),"
        << csv_number(r.pct_correct_bootstrap_pooled) << ',' << csv_number(r.mc_se_bootstrap) << '\n';
}

void write_adequacy_table_csv(std::ostream& out, const ExperimentReport& r, const AdequacyThresholds& t) {
    out << "criterion,threshold,n_above,n_total,percent_above,min,max\n";
    auto row = [&out](const char* name, double threshold, const CriterionSummary& s) {
        out << name << ',' << csv_number(threshold) << ',' << s.n_above << ',' << s.n_total << ','
            << csv_number(s.percent()) << ',' << csv_number(s.min) << ',' << csv_number(s.max) << '\n';
    };
    row("average posterior probability", t.app, r.adequacy.app);
    row("odds of correct classification", t.occ, r.adequacy.occ);
    row("relative entropy", t.relative_entropy, r.adequacy.relative_entropy);
}

}  // namespace lcga
