#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "lcga/experiment.hpp"
#include "lcga/report.hpp"

using namespace lcga;
namespace fs = std::filesystem;

namespace {

ExperimentConfig tiny_config() {
    ExperimentConfig c;
    c.scenario.name = "tiny";
    c.scenario.group_probs = Eigen::Vector2d(0.5, 0.5);
    c.scenario.coeffs = Eigen::MatrixXd(2, 2);
    c.scenario.coeffs << 0, 1, 50, -1;
    c.scenario.sigma2_noise = Eigen::Vector2d(1e-4, 1e-4);
    c.scenario.sigma2_intercept = Eigen::Vector2d(0, 0);
    c.scenario.times = Eigen::VectorXd::LinSpaced(4, 0, 3);
    c.scenario.n_subjects = 40;
    c.replications = 1;
    c.bootstraps = 0;
    c.k_max = 3;
    c.degree = 1;
    c.em.n_restarts = 3;
    c.master_seed = 17;
    return c;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

AdequacyReport crisp_report(int K) {
    AdequacyReport r;
    r.app = Eigen::VectorXd::Ones(K);
    r.occ = Eigen::VectorXd::Constant(K, std::numeric_limits<double>::infinity());
    r.relative_entropy = 1.0;
    return r;
}

}  // namespace

TEST_CASE("perfectly separated noiseless groups are always found") {
    const auto res = run_experiment(tiny_config());
    CHECK(res.report.pct_correct_bic == 100.0);
    CHECK(res.report.mean_bayes_correct > 99.999);
    CHECK(res.report.adequacy.app.percent() == 100.0);
}

TEST_CASE("Monte Carlo standard error of a proportion is at most five points at R = 100") {
    ExperimentConfig c = tiny_config();
    std::vector<ReplicationRecord> recs(100);
    for (int r = 0; r < 100; ++r) {
        recs[r].replication = r + 1;
        recs[r].selected_k = r % 2 ? 2 : 3;
        recs[r].weight_true = r % 2 ? 0.9 : 0.2;
    }
    const auto rep = aggregate(c, recs);
    CHECK(rep.pct_correct_bic == 50.0);
    CHECK(rep.mc_se_bic <= 5.0);
    CHECK(rep.mc_se_bic == doctest::Approx(5.0));
    CHECK(rep.mean_bayes_correct == doctest::Approx(55.0));
    CHECK(rep.selected_counts == std::map<int, int>{{2, 50}, {3, 50}});
}

TEST_CASE("bootstrap aggregates pool over all samples") {
    ExperimentConfig c = tiny_config();
    c.bootstraps = 10;
    std::vector<ReplicationRecord> recs(2);
    recs[0].replication = 1;
    recs[0].selected_k = 2;
    recs[0].bootstrap_counts = {{2, 10}};
    recs[1].replication = 2;
    recs[1].selected_k = 3;
    recs[1].bootstrap_counts = {{2, 4}, {3, 5}};
    recs[1].bootstrap_failures = 1;
    const auto rep = aggregate(c, recs);
    CHECK(rep.pct_correct_bootstrap_pooled == 70.0);
    CHECK(rep.pct_correct_bootstrap_per_rep == std::vector<double>{100.0, 40.0});
    CHECK(rep.bootstrap_failures == 1);
}

TEST_CASE("adequacy summary") {
    std::vector<AdequacyReport> certain = {crisp_report(2), crisp_report(3)};
    const auto s = summarize_adequacy(certain, {});
    CHECK(s.app.percent() == 100.0);
    CHECK(s.app.min == 1.0);
    CHECK(s.app.max == 1.0);
    CHECK(std::isinf(s.occ.min));
    CHECK(s.relative_entropy.min == 1.0);
    ExperimentReport rep;
    rep.adequacy = s;
    CHECK(to_json(rep)["adequacy"]["occ"]["min"] == "Inf");

    auto low = crisp_report(2);
    low.app[1] = 0.69;
    const auto t = summarize_adequacy({low}, {});
    CHECK(t.app.percent() == 0.0);
    CHECK(t.app.min == 0.69);
    CHECK(t.occ.percent() == 100.0);
}

TEST_CASE("records round-trip through JSON") {
    const auto res = run_experiment(tiny_config());
    const auto& rec = res.records.front();
    const auto back = replication_from_json(nlohmann::json::parse(to_json(rec).dump()));
    CHECK(back.selected_k == rec.selected_k);
    CHECK(back.bic == rec.bic);
    CHECK(back.weights == rec.weights);
    CHECK(back.weight_true == rec.weight_true);
    REQUIRE(back.adequacy.has_value());
    CHECK(back.adequacy->app == rec.adequacy->app);
    CHECK(to_json(back).dump() == to_json(rec).dump());
}

TEST_CASE("checkpoint resume reproduces the same file and report") {
    const fs::path dir = fs::temp_directory_path() / "lcga_test_checkpoint";
    fs::remove_all(dir);
    fs::create_directories(dir);
    ExperimentConfig c = tiny_config();
    c.replications = 4;
    c.bootstraps = 2;
    ExperimentOptions o;
    o.checkpoint = dir / "a.jsonl";
    o.jobs = 2;
    const auto full = run_experiment(c, o);
    const std::string reference = slurp(dir / "a.jsonl");

    // Keep the header and two records, then add a torn third line.
    std::istringstream lines(reference);
    std::string line, partial;
    for (int i = 0; i < 3 && std::getline(lines, line); ++i) partial += line + "\n";
    std::getline(lines, line);
    partial += line.substr(0, line.size() / 2);
    {
        std::ofstream out(dir / "b.jsonl", std::ios::binary);
        out << partial;
    }
    o.checkpoint = dir / "b.jsonl";
    int first_progress = -1;
    o.progress = [&](int done, int) {
        if (first_progress < 0) first_progress = done;
    };
    const auto resumed = run_experiment(c, o);
    CHECK(first_progress == 2);
    CHECK(slurp(dir / "b.jsonl") == reference);
    CHECK(to_json(resumed.report).dump() == to_json(full.report).dump());

    // A different configuration starts over.
    c.master_seed += 1;
    const auto fresh = run_experiment(c, o);
    CHECK(slurp(dir / "b.jsonl") != reference);
    fs::remove_all(dir);
}

TEST_CASE("config validation and JSON") {
    ExperimentConfig c = tiny_config();
    c.k_max = 1;
    CHECK_THROWS_AS(c.validate(), std::invalid_argument);
    c = tiny_config();
    const auto back = experiment_config_from_json(to_json(c));
    CHECK(to_json(back).dump() == to_json(c).dump());
    const auto named = experiment_config_from_json(
        nlohmann::json::parse(R"({"scenario":"scenario2","n_subjects":100,"replications":3})"));
    CHECK(named.scenario.n_subjects == 100);
    CHECK(named.scenario.k_true() == 3);
}

TEST_CASE("shipped experiment configs load and validate") {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(fs::path(LCGA_CONFIG_DIR) / "experiments")) {
        std::ifstream in(entry.path());
        const auto c = experiment_config_from_json(nlohmann::json::parse(in));
        CAPTURE(entry.path().string());
        CHECK_NOTHROW(c.validate());
        CHECK(c.k_max == 5);
        ++n;
    }
    CHECK(n == 10);
}
