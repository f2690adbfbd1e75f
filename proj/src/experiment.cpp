#include "lcga/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <mutex>
#include <stdexcept>

#include "lcga/basis.hpp"
#include "lcga/bootstrap.hpp"
#include "lcga/error.hpp"
#include "lcga/parallel.hpp"
#include "lcga/report.hpp"
#include "lcga/rng.hpp"
#include "lcga/selection.hpp"

namespace lcga {

void ExperimentConfig::validate() const {
    scenario.validate();
    em.validate();
    if (replications < 1) throw std::invalid_argument("replications must be at least 1");
    if (bootstraps < 0) throw std::invalid_argument("bootstraps must be non-negative");
    if (k_max < scenario.k_true()) throw std::invalid_argument("k_max must be at least the true number of groups");
    if (degree < 0 || degree + 1 > scenario.times.size())
        throw std::invalid_argument("degree must be in [0, T - 1]");
}

namespace {

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
        if (std::isnan(v)) return;
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
};

CriterionSummary finish(int above, int total, const Range& r) {
    CriterionSummary s;
    s.n_above = above;
    s.n_total = total;
    s.min = r.lo <= r.hi ? r.lo : std::numeric_limits<double>::quiet_NaN();
    s.max = r.lo <= r.hi ? r.hi : std::numeric_limits<double>::quiet_NaN();
    return s;
}

// Population standard error of the mean of values in percent.
double standard_error(const std::vector<double>& values) {
    if (values.empty()) return 0.0;
    const double n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return std::sqrt(ss / n) / std::sqrt(n);
}

}  // namespace

AdequacySummary summarize_adequacy(const std::vector<AdequacyReport>& reports, const AdequacyThresholds& thresholds) {
    if (reports.empty()) throw std::invalid_argument("summarize_adequacy needs at least one report");
    int app_ok = 0, occ_ok = 0, ent_ok = 0;
    Range app_r, occ_r, ent_r;
    for (const auto& r : reports) {
        bool app_all = true, occ_all = true;
        for (Eigen::Index k = 0; k < r.app.size(); ++k) {
            app_r.add(r.app[k]);
            occ_r.add(r.occ[k]);
            if (!(r.app[k] >= thresholds.app)) app_all = false;
            if (!(r.occ[k] >= thresholds.occ)) occ_all = false;
        }
        ent_r.add(r.relative_entropy);
        app_ok += app_all;
        occ_ok += occ_all;
        ent_ok += r.relative_entropy >= thresholds.relative_entropy;
    }
    const int n = static_cast<int>(reports.size());
    return {finish(app_ok, n, app_r), finish(occ_ok, n, occ_r), finish(ent_ok, n, ent_r)};
}

ReplicationRecord run_replication(const ExperimentConfig& config, int replication) {
    const auto r = static_cast<std::uint64_t>(replication);
    const SimulatedData sim = generate(config.scenario, derive_seed(config.master_seed, {tag(StreamTag::experiment_data), r}));
    const Basis basis = Basis::build(sim.data.times(), config.degree);

    EmConfig em = config.em;
    em.seed = derive_seed(config.master_seed, {tag(StreamTag::experiment_em), r});
    em.jobs = 1;

    ReplicationRecord rec;
    rec.replication = replication;
    try {
        const ModelScan s = scan(sim.data, basis, config.k_max, em);
        rec.selected_k = s.selected_k;
        rec.bic = s.bic;
        rec.weights = s.weights;
        auto w = s.weights.find(config.scenario.k_true());
        rec.weight_true = w == s.weights.end() ? 0.0 : w->second;
        const MixtureFit& chosen = s.selected();
        rec.adequacy = assess(chosen.posterior, chosen.params.pi, config.thresholds);
        rec.loglik_order_warnings = s.loglik_order_warnings;
    } catch (const NoModelAvailable&) {
        rec.selected_k = 0;
    }

    if (config.bootstraps > 0) {
        BootstrapOptions opts;
        opts.n_samples = config.bootstraps;
        opts.seed = derive_seed(config.master_seed, {tag(StreamTag::experiment_bootstrap), r});
        opts.jobs = 1;
        const BootstrapReport b = run_bootstrap(sim.data, basis, config.k_max, em, opts, rec.selected_k);
        rec.bootstrap_counts = b.counts;
        rec.bootstrap_failures = b.failures;
    }
    return rec;
}

ExperimentReport aggregate(const ExperimentConfig& config, const std::vector<ReplicationRecord>& records) {
    ExperimentReport rep;
    rep.k_true = config.scenario.k_true();
    rep.replications = static_cast<int>(records.size());
    rep.bootstraps = config.bootstraps;
    if (records.empty()) return rep;

    const double R = static_cast<double>(records.size());
    std::vector<double> hits, weights, boot_shares;
    std::vector<AdequacyReport> adequacy;
    long long boot_correct = 0, boot_total = 0;
    for (const auto& rec : records) {
        if (rec.selected_k == 0) ++rep.scan_failures;
        else ++rep.selected_counts[rec.selected_k];
        hits.push_back(rec.selected_k == rep.k_true ? 100.0 : 0.0);
        weights.push_back(100.0 * rec.weight_true);
        if (rec.adequacy) adequacy.push_back(*rec.adequacy);
        if (config.bootstraps > 0) {
            auto it = rec.bootstrap_counts.find(rep.k_true);
            const int correct = it == rec.bootstrap_counts.end() ? 0 : it->second;
            boot_correct += correct;
            boot_total += config.bootstraps;
            rep.bootstrap_failures += rec.bootstrap_failures;
            const double share = 100.0 * correct / config.bootstraps;
            rep.pct_correct_bootstrap_per_rep.push_back(share);
            boot_shares.push_back(share);
        }
    }
    auto mean = [](const std::vector<double>& v) {
        double s = 0.0;
        for (double x : v) s += x;
        return v.empty() ? 0.0 : s / static_cast<double>(v.size());
    };
    rep.pct_correct_bic = mean(hits);
    rep.mean_bayes_correct = mean(weights);
    rep.mc_se_bic = 100.0 * std::sqrt(rep.pct_correct_bic / 100.0 * (1.0 - rep.pct_correct_bic / 100.0) / R);
    rep.mc_se_bayes = standard_error(weights);
    if (boot_total > 0) {
        rep.pct_correct_bootstrap_pooled = 100.0 * static_cast<double>(boot_correct) / static_cast<double>(boot_total);
        rep.pct_correct_bootstrap_mean = mean(boot_shares);
        rep.mc_se_bootstrap = standard_error(boot_shares);
    }
    if (!adequacy.empty()) rep.adequacy = summarize_adequacy(adequacy, config.thresholds);
    return rep;
}

namespace {

// Reads the contiguous prefix of records from an existing checkpoint whose
// header matches `header`. Returns an empty vector otherwise.
std::vector<ReplicationRecord> load_checkpoint(const std::filesystem::path& path, const nlohmann::json& header) {
    std::vector<ReplicationRecord> out;
    std::ifstream in(path);
    if (!in) return out;
    std::string line;
    if (!std::getline(in, line) || in.eof()) return out;
    try {
        if (nlohmann::json::parse(line) != header) return out;
        while (std::getline(in, line)) {
            if (in.eof()) break;  // no trailing newline: interrupted write
            ReplicationRecord rec = replication_from_json(nlohmann::json::parse(line));
            if (rec.replication != static_cast<int>(out.size()) + 1) break;
            out.push_back(std::move(rec));
        }
    } catch (const nlohmann::json::exception&) {
    }
    return out;
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config, const ExperimentOptions& options) {
    config.validate();
    const int R = config.replications;
    std::vector<std::optional<ReplicationRecord>> slots(static_cast<std::size_t>(R));

    const nlohmann::json header = {{"type", "header"}, {"config", to_json(config)}};
    std::ofstream sink;
    int next_to_write = 1;
    if (options.checkpoint) {
        auto existing = load_checkpoint(*options.checkpoint, header);
        existing.resize(std::min<std::size_t>(existing.size(), slots.size()));
        // Rewrite header and the reusable prefix, dropping any torn tail.
        sink.open(*options.checkpoint, std::ios::trunc);
        if (!sink) throw std::runtime_error("cannot write checkpoint " + options.checkpoint->string());
        sink << header.dump() << '\n';
        for (auto& rec : existing) {
            sink << to_json(rec).dump() << '\n';
            slots[static_cast<std::size_t>(rec.replication - 1)] = std::move(rec);
        }
        sink.flush();
        next_to_write = static_cast<int>(existing.size()) + 1;
    }

    std::vector<int> todo;
    for (int r = 1; r <= R; ++r)
        if (!slots[static_cast<std::size_t>(r - 1)]) todo.push_back(r);

    std::mutex writer;
    int done = R - static_cast<int>(todo.size());
    if (options.progress) options.progress(done, R);
    parallel_for(todo.size(), options.jobs, [&](std::size_t idx) {
        const int r = todo[idx];
        ReplicationRecord rec = run_replication(config, r);
        std::lock_guard lock(writer);
        slots[static_cast<std::size_t>(r - 1)] = std::move(rec);
        // Records are written strictly in replication order.
        while (sink.is_open() && next_to_write <= R && slots[static_cast<std::size_t>(next_to_write - 1)]) {
            sink << to_json(*slots[static_cast<std::size_t>(next_to_write - 1)]).dump() << '\n';
            ++next_to_write;
        }
        if (sink.is_open()) sink.flush();
        ++done;
        if (options.progress) options.progress(done, R);
    });

    ExperimentResult result;
    result.records.reserve(slots.size());
    for (auto& s : slots) result.records.push_back(std::move(*s));
    result.report = aggregate(config, result.records);
    return result;
}

}  // namespace lcga
