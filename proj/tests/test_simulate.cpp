#include <doctest.h>

#include <cmath>
#include <set>

#include "lcga/simulate.hpp"

using namespace lcga;

namespace {

// Unordered pairs of groups whose mean curves change sign on a fine grid.
int crossing_pairs(const ScenarioSpec& s) {
    const double lo = s.times[0], hi = s.times[s.times.size() - 1];
    int pairs = 0;
    for (int k = 0; k < s.k_true(); ++k)
        for (int l = k + 1; l < s.k_true(); ++l) {
            int sign = 0;
            bool crosses = false;
            for (int g = 0; g <= 4000; ++g) {
                const double t = lo + (hi - lo) * g / 4000.0;
                const double d = s.mean(k, t) - s.mean(l, t);
                const int now = d > 0 ? 1 : (d < 0 ? -1 : 0);
                if (now != 0 && sign != 0 && now != sign) crosses = true;
                if (now != 0) sign = now;
            }
            pairs += crosses;
        }
    return pairs;
}

ScenarioSpec flat(double s2_noise, double s2_intercept, int n) {
    ScenarioSpec s;
    s.name = "flat";
    s.group_probs = Eigen::VectorXd::Ones(1);
    s.coeffs = Eigen::MatrixXd(1, 3);
    s.coeffs << 2.0, 0.5, -0.25;
    s.sigma2_noise = Eigen::VectorXd::Constant(1, s2_noise);
    s.sigma2_intercept = Eigen::VectorXd::Constant(1, s2_intercept);
    s.times = Eigen::VectorXd::LinSpaced(5, 0, 4);
    s.n_subjects = n;
    return s;
}

}  // namespace

TEST_CASE("noiseless single group reproduces the polynomial") {
    const auto sim = generate(flat(0, 0, 7), 1);
    for (Eigen::Index i = 0; i < 7; ++i)
        for (Eigen::Index t = 0; t < 5; ++t) {
            const double u = static_cast<double>(t);
            CHECK(sim.data.outcomes()(i, t) == 2.0 + 0.5 * u - 0.25 * u * u);
        }
    CHECK((sim.labels.array() == 0).all());
}

TEST_CASE("intercept-only variation is flat within subjects") {
    auto s = flat(0, 1, 5000);
    s.coeffs.setZero();
    s.coeffs(0, 0) = 3.0;
    const auto sim = generate(s, 2);
    const Eigen::MatrixXd& y = sim.data.outcomes();
    CHECK(((y.colwise() - y.col(0)).cwiseAbs().maxCoeff()) == 0.0);
    const double m = y.col(0).mean();
    const double v = (y.col(0).array() - m).square().mean();
    CHECK(std::abs(v - 1.0) < 3 * std::sqrt(2.0 / 5000));
}

TEST_CASE("built-in scenarios") {
    const auto all = builtin_scenarios();
    std::set<std::string> names;
    for (const auto& [name, s] : all) {
        names.insert(name);
        CHECK_NOTHROW(s.validate());
        CHECK(s.times.size() == 5);
        CHECK(s.times[0] == 0.0);
        CHECK(s.times[4] == 4.0);
    }
    CHECK(names == std::set<std::string>{"scenario1", "scenario2", "scenario3", "scenario4"});
    CHECK(all.at("scenario1").k_true() == 3);
    CHECK(all.at("scenario2").k_true() == 3);
    CHECK(all.at("scenario3").k_true() == 4);
    CHECK(all.at("scenario4").k_true() == 4);
    CHECK(crossing_pairs(all.at("scenario1")) == 0);
    CHECK(crossing_pairs(all.at("scenario2")) == 1);
    CHECK(crossing_pairs(all.at("scenario3")) == 0);
    CHECK(crossing_pairs(all.at("scenario4")) == 1);
    CHECK_THROWS(builtin_scenario("scenario9"));
}

TEST_CASE("spec invariants") {
    auto s = flat(1, 0, 10);
    s.group_probs[0] = 0.9;
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
    s = flat(-1, 0, 10);
    CHECK_THROWS_AS(s.validate(), std::invalid_argument);
}

TEST_CASE("generation is deterministic and seed-sensitive") {
    const auto s = builtin_scenario("scenario1");
    const auto a = generate(s, 42);
    CHECK(a.data == generate(s, 42).data);
    CHECK(a.labels == generate(s, 42).labels);
    CHECK_FALSE(a.data == generate(s, 43).data);
}

TEST_CASE("large-sample moments match the analytic mixture") {
    auto s = builtin_scenario("scenario1");
    s.n_subjects = 10000;
    const auto sim = generate(s, 7);
    const Eigen::MatrixXd& y = sim.data.outcomes();
    const int K = s.k_true();

    // Per-time means.
    for (Eigen::Index t = 0; t < 5; ++t) {
        double mu = 0, second = 0;
        for (int k = 0; k < K; ++k) {
            const double m = s.mean(k, s.times[t]);
            mu += s.group_probs[k] * m;
            second += s.group_probs[k] * (m * m + s.sigma2_noise[k] + s.sigma2_intercept[k]);
        }
        const double sd = std::sqrt(second - mu * mu);
        CHECK(std::abs(y.col(t).mean() - mu) < 3 * sd / std::sqrt(10000.0));
    }

    // Pooled variance of every y_it against the analytic total.
    double mean_all = 0, second_all = 0;
    for (int k = 0; k < K; ++k)
        for (Eigen::Index t = 0; t < 5; ++t) {
            const double m = s.mean(k, s.times[t]);
            mean_all += s.group_probs[k] * m / 5;
            second_all += s.group_probs[k] * (m * m + s.sigma2_noise[k] + s.sigma2_intercept[k]) / 5;
        }
    const double total_var = second_all - mean_all * mean_all;
    // Subject-level bootstrap of the pooled variance gives its standard error.
    const Eigen::VectorXd row_sq = (y.array() - y.mean()).square().rowwise().mean();
    const double se = std::sqrt((row_sq.array() - row_sq.mean()).square().mean() / 10000.0);
    CHECK(std::abs(sim.data.outcome_variance() - total_var) < 3 * se);

    // Label frequencies: chi-square at alpha = 0.001 with K - 1 = 2 degrees of freedom.
    double chi2 = 0;
    for (int k = 0; k < K; ++k) {
        const double observed = static_cast<double>((sim.labels.array() == k).count());
        const double expected = 10000.0 * s.group_probs[k];
        chi2 += (observed - expected) * (observed - expected) / expected;
    }
    CHECK(chi2 < 13.816);
}

TEST_CASE("scenario JSON round trip") {
    for (const auto& [name, s] : builtin_scenarios()) {
        const auto back = scenario_from_json(to_json(s));
        CHECK(back.name == s.name);
        CHECK(back.coeffs == s.coeffs);
        CHECK(back.group_probs == s.group_probs);
        CHECK(back.sigma2_noise == s.sigma2_noise);
        CHECK(back.sigma2_intercept == s.sigma2_intercept);
        CHECK(back.times == s.times);
        CHECK(back.n_subjects == s.n_subjects);
    }
    const auto shared = scenario_from_json(nlohmann::json::parse(
        R"({"group_probs":[0.5,0.5],"coeffs":[[0,1],[3,1]],"sigma2_noise":1,"sigma2_intercept":0.2,"T":4})"));
    CHECK(shared.sigma2_intercept == Eigen::Vector2d(0.2, 0.2));
    CHECK(shared.times == Eigen::Vector4d(0, 1, 2, 3));
}
