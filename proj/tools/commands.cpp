#include "commands.hpp"

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <random>

#include <CLI11.hpp>
#include <json.hpp>

#include "lcga/adequacy.hpp"
#include "lcga/bootstrap.hpp"
#include "lcga/error.hpp"
#include "lcga/experiment.hpp"
#include "lcga/parallel.hpp"
#include "lcga/report.hpp"
#include "lcga/selection.hpp"
#include "lcga/simulate.hpp"
#include "manifest.hpp"

namespace lcga::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOptions {
    int degree = 3;
    int k_max = 5;
    int restarts = 10;
    int max_iter = 500;
    double rel_tol = 1e-8;
    double min_mixing = EmConfig{}.min_mixing;
    std::string variance = "per_group";
    std::optional<std::uint64_t> seed;
    int jobs = default_jobs();
    fs::path out_dir = ".";
};

void add_common(CLI::App& app, CommonOptions& o, bool with_kmax) {
    app.add_option("--degree", o.degree, "Polynomial degree of every group's trajectory")->capture_default_str();
    if (with_kmax) app.add_option("--kmax", o.k_max, "Largest number of groups to fit")->capture_default_str();
    app.add_option("--restarts", o.restarts, "EM restarts per K")->capture_default_str();
    app.add_option("--max-iter", o.max_iter, "EM iteration cap per restart")->capture_default_str();
    app.add_option("--rel-tol", o.rel_tol, "Relative log-likelihood convergence tolerance")->capture_default_str();
    app.add_option("--min-mixing", o.min_mixing, "Abandon an EM run when a mixing proportion drops below this")
        ->capture_default_str();
    app.add_option("--variance", o.variance, "Residual variance model")
        ->check(CLI::IsMember({"per_group", "pooled"}))
        ->capture_default_str();
    app.add_option("--seed", o.seed, "Random seed (drawn and printed when omitted)");
    app.add_option("--jobs", o.jobs, "Worker threads")->capture_default_str();
    app.add_option("--out-dir", o.out_dir, "Directory for output files")->capture_default_str();
}

std::uint64_t resolve_seed(std::optional<std::uint64_t> seed, std::ostream& out) {
    if (seed) return *seed;
    std::random_device rd;
    const std::uint64_t s = (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
    out << "seed: " << s << '\n';
    return s;
}

EmConfig em_config(const CommonOptions& o, std::uint64_t seed) {
    EmConfig c;
    c.max_iter = o.max_iter;
    c.rel_tol = o.rel_tol;
    c.n_restarts = o.restarts;
    c.min_mixing = o.min_mixing;
    c.seed = seed;
    c.variance = variance_model_from_string(o.variance);
    c.jobs = o.jobs;
    c.validate();
    return c;
}

void write_text(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    f << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

template <typename Writer>
void write_stream(const fs::path& path, Writer&& writer) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw std::runtime_error("cannot write " + path.string());
    writer(f);
}

void finish_manifest(RunManifest& m, const fs::path& out_dir) {
    m.finished_at = utc_timestamp();
    write_json(out_dir / "manifest.json", m.full());
}

json common_config(const CommonOptions& o, const EmConfig& em) {
    return {{"degree", o.degree}, {"k_max", o.k_max}, {"em", to_json(em)}};
}

struct DataJob {
    TrajectoryDataset data;
    Basis basis;
};

DataJob load(const fs::path& path, int degree) {
    TrajectoryDataset ds = read_csv(path);
    Basis basis = Basis::build(ds.times(), degree);
    return {std::move(ds), std::move(basis)};
}

int cmd_fit(const fs::path& data_path, int k, const CommonOptions& o, std::ostream& out) {
    RunManifest m;
    m.command = "fit";
    m.started_at = utc_timestamp();
    const std::uint64_t seed = resolve_seed(o.seed, out);
    const EmConfig em = em_config(o, seed);
    auto [ds, basis] = load(data_path, o.degree);
    m.config = common_config(o, em);
    m.config["K"] = k;
    m.seeds["seed"] = seed;
    m.inputs.emplace_back(data_path.string(), sha256_file(data_path));

    const MixtureFit f = fit(ds, basis, k, em);
    json report = to_json(f, basis, ds.n_subjects());
    report["adequacy"] = to_json(assess(f.posterior, f.params.pi));
    report["n_subjects"] = ds.n_subjects();
    report["n_times"] = ds.n_times();
    report["manifest"] = m.reproducible();

    fs::create_directories(o.out_dir);
    write_json(o.out_dir / "fit.json", report);
    write_stream(o.out_dir / "fit_means.csv", [&](std::ostream& s) { write_means_csv(s, f, basis); });
    m.outputs = {"fit.json", "fit_means.csv"};
    finish_manifest(m, o.out_dir);
    out << "K=" << k << " loglik=" << f.loglik << " BIC=" << bic(f, ds.n_subjects()) << '\n';
    return ok;
}

int cmd_scan(const fs::path& data_path, const CommonOptions& o, std::ostream& out) {
    RunManifest m;
    m.command = "scan";
    m.started_at = utc_timestamp();
    const std::uint64_t seed = resolve_seed(o.seed, out);
    const EmConfig em = em_config(o, seed);
    auto [ds, basis] = load(data_path, o.degree);
    m.config = common_config(o, em);
    m.seeds["seed"] = seed;
    m.inputs.emplace_back(data_path.string(), sha256_file(data_path));

    const ModelScan s = scan(ds, basis, o.k_max, em);
    json report = to_json(s, basis, ds.n_subjects());
    report["n_subjects"] = ds.n_subjects();
    report["n_times"] = ds.n_times();
    report["bic_sample_size"] = "subjects";
    report["manifest"] = m.reproducible();

    fs::create_directories(o.out_dir);
    write_json(o.out_dir / "scan.json", report);
    write_stream(o.out_dir / "scan_bic.csv", [&](std::ostream& f) {
        f << "K,bic,weight\n";
        for (const auto& [k, b] : s.bic) f << k << ',' << csv_number(b) << ',' << csv_number(s.weights.at(k)) << '\n';
    });
    write_stream(o.out_dir / "scan_means.csv", [&](std::ostream& f) { write_means_csv(f, s.selected(), basis); });
    m.outputs = {"scan.json", "scan_bic.csv", "scan_means.csv"};
    finish_manifest(m, o.out_dir);
    for (const auto& [k, b] : s.bic) out << "K=" << k << " BIC=" << b << " weight=" << s.weights.at(k) << '\n';
    out << "selected K=" << s.selected_k << '\n';
    return ok;
}

int cmd_bootstrap(const fs::path& data_path, int samples, const CommonOptions& o, std::ostream& out) {
    RunManifest m;
    m.command = "bootstrap";
    m.started_at = utc_timestamp();
    const std::uint64_t seed = resolve_seed(o.seed, out);
    const EmConfig em = em_config(o, seed);
    auto [ds, basis] = load(data_path, o.degree);
    m.config = common_config(o, em);
    m.config["B"] = samples;
    m.seeds["seed"] = seed;
    m.inputs.emplace_back(data_path.string(), sha256_file(data_path));

    BootstrapOptions opts;
    opts.n_samples = samples;
    opts.seed = seed;
    opts.jobs = o.jobs;
    const ModelScan original = scan(ds, basis, o.k_max, em);
    const BootstrapReport b = run_bootstrap(ds, basis, o.k_max, em, opts, original.selected_k);

    json report = to_json(b);
    // Best fit per K on the original data, for reporting the competing solutions.
    report["original_scan"] = to_json(original, basis, ds.n_subjects());
    report["manifest"] = m.reproducible();
    fs::create_directories(o.out_dir);
    write_json(o.out_dir / "bootstrap.json", report);
    write_stream(o.out_dir / "bootstrap_hist.csv", [&](std::ostream& f) { write_bootstrap_csv(f, b, o.k_max); });
    m.outputs = {"bootstrap.json", "bootstrap_hist.csv"};
    finish_manifest(m, o.out_dir);
    out << "original K=" << b.original_k << " agreement=" << b.agreement << " (se " << b.binomial_se() << ")\n";
    for (const auto& [k, c] : b.counts) out << "K=" << k << ": " << c << '\n';
    if (b.failures) out << "failed samples: " << b.failures << '\n';
    return ok;
}

int cmd_simulate(const std::string& scenario, const std::optional<int>& n, std::optional<std::uint64_t> seed_opt,
                 const fs::path& out_dir, const std::string& prefix, std::ostream& out) {
    RunManifest m;
    m.command = "simulate";
    m.started_at = utc_timestamp();
    ScenarioSpec spec;
    if (fs::exists(scenario)) {
        std::ifstream in(scenario);
        spec = scenario_from_json(json::parse(in));
        m.inputs.emplace_back(scenario, sha256_file(scenario));
    } else {
        spec = builtin_scenario(scenario);
    }
    if (n) spec.n_subjects = *n;
    spec.validate();
    const std::uint64_t seed = resolve_seed(seed_opt, out);
    m.config = {{"scenario", to_json(spec)}};
    m.seeds["seed"] = seed;

    const SimulatedData sim = generate(spec, seed);
    fs::create_directories(out_dir);
    const std::string stem = prefix.empty() ? (spec.name.empty() ? "simulated" : spec.name) : prefix;
    write_stream(out_dir / (stem + "_data.csv"), [&](std::ostream& f) { write_long_csv(f, sim.data); });
    write_stream(out_dir / (stem + "_labels.csv"), [&](std::ostream& f) {
        f << "id,group\n";
        for (Eigen::Index i = 0; i < sim.labels.size(); ++i)
            f << sim.data.subject_ids()[static_cast<std::size_t>(i)] << ',' << sim.labels[i] + 1 << '\n';
    });
    write_json(out_dir / (stem + "_scenario.json"), to_json(spec));
    m.outputs = {stem + "_data.csv", stem + "_labels.csv", stem + "_scenario.json"};
    finish_manifest(m, out_dir);
    out << "wrote " << spec.n_subjects << " subjects x " << spec.times.size() << " times to "
        << (out_dir / (stem + "_data.csv")).string() << '\n';
    return ok;
}

struct ReplicateOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<int> replications;
    std::optional<int> bootstraps;
    std::optional<int> n_subjects;
    int jobs = default_jobs();
    fs::path out_dir = ".";
    bool resume = true;
    bool quiet = false;
};

int cmd_replicate(const fs::path& config_path, const ReplicateOverrides& o, std::ostream& out) {
    RunManifest m;
    m.command = "replicate";
    m.started_at = utc_timestamp();
    std::ifstream in(config_path);
    if (!in) throw DataError("cannot open " + config_path.string());
    json j = json::parse(in);
    // A manifest from an earlier run replays its recorded configuration.
    if (j.contains("command") && j.contains("config")) j = j["config"];
    if (!j.contains("master_seed") || o.seed) j["master_seed"] = resolve_seed(o.seed, out);
    if (o.replications) j["replications"] = *o.replications;
    if (o.bootstraps) j["bootstraps"] = *o.bootstraps;
    if (o.n_subjects) j["n_subjects"] = *o.n_subjects;
    const ExperimentConfig config = experiment_config_from_json(j);
    m.config = to_json(config);
    m.seeds["master_seed"] = config.master_seed;
    m.inputs.emplace_back(config_path.string(), sha256_file(config_path));

    fs::create_directories(o.out_dir);
    const fs::path results = o.out_dir / "results.jsonl";
    if (!o.resume) fs::remove(results);
    ExperimentOptions opts;
    opts.jobs = o.jobs;
    opts.checkpoint = results;
    if (!o.quiet)
        opts.progress = [&out](int done, int total) { out << "replications " << done << "/" << total << '\n' << std::flush; };
    const ExperimentResult result = run_experiment(config, opts);

    json report = to_json(result.report);
    report["manifest"] = m.reproducible();
    write_json(o.out_dir / "report.json", report);
    write_stream(o.out_dir / "table_selection.csv",
                 [&](std::ostream& f) { write_selection_table_csv(f, result.report); });
    write_stream(o.out_dir / "table_adequacy.csv",
                 [&](std::ostream& f) { write_adequacy_table_csv(f, result.report, config.thresholds); });
    m.outputs = {"results.jsonl", "report.json", "table_selection.csv", "table_adequacy.csv"};
    finish_manifest(m, o.out_dir);

    const auto& r = result.report;
    out << "scenario " << config.scenario.name << " N=" << config.scenario.n_subjects << " R=" << r.replications
        << " B=" << r.bootstraps << '\n';
    out << "  BIC correct %:        " << r.pct_correct_bic << " (se " << r.mc_se_bic << ")\n";
    out << "  Bayes weight mean %:  " << r.mean_bayes_correct << " (se " << r.mc_se_bayes << ")\n";
    out << "  bootstrap correct %:  " << r.pct_correct_bootstrap_pooled << " (se " << r.mc_se_bootstrap << ")\n";
    return ok;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Latent class growth analysis with bootstrap validation of the number of groups", "lcga"};
    app.require_subcommand(1);

    CommonOptions fit_opts, scan_opts, boot_opts;
    std::string fit_data, scan_data, boot_data;
    int fit_k = 0;
    int boot_samples = 100;

    auto* fit_cmd = app.add_subcommand("fit", "Fit a model with a fixed number of groups");
    fit_cmd->add_option("data", fit_data, "CSV file (long: id,time,y or wide: id,y_<t>...)")->required();
    fit_cmd->add_option("-k,--groups", fit_k, "Number of groups")->required()->check(CLI::PositiveNumber);
    add_common(*fit_cmd, fit_opts, false);

    auto* scan_cmd = app.add_subcommand("scan", "Fit K = 1..kmax and select K by BIC");
    scan_cmd->add_option("data", scan_data, "CSV file")->required();
    add_common(*scan_cmd, scan_opts, true);

    auto* boot_cmd = app.add_subcommand("bootstrap", "Bootstrap the BIC-selected number of groups");
    boot_cmd->add_option("data", boot_data, "CSV file")->required();
    boot_cmd->add_option("-B,--samples", boot_samples, "Bootstrap samples")->capture_default_str()->check(
        CLI::PositiveNumber);
    add_common(*boot_cmd, boot_opts, true);

    std::string sim_scenario;
    std::optional<int> sim_n;
    std::optional<std::uint64_t> sim_seed;
    fs::path sim_out = ".";
    std::string sim_prefix;
    auto* sim_cmd = app.add_subcommand("simulate", "Generate a dataset from a scenario");
    sim_cmd->add_option("scenario", sim_scenario, "Built-in scenario name or scenario JSON file")->required();
    sim_cmd->add_option("-n,--subjects", sim_n, "Number of subjects");
    sim_cmd->add_option("--seed", sim_seed, "Random seed (drawn and printed when omitted)");
    sim_cmd->add_option("--out-dir", sim_out, "Output directory")->capture_default_str();
    sim_cmd->add_option("--prefix", sim_prefix, "Output file prefix (default: scenario name)");

    std::string rep_config;
    ReplicateOverrides rep;
    bool no_resume = false;
    auto* rep_cmd = app.add_subcommand("replicate", "Run a Monte Carlo replication study");
    rep_cmd->add_option("config", rep_config, "Experiment config JSON (or a manifest.json to replay)")->required();
    rep_cmd->add_option("--seed", rep.seed, "Master seed (overrides the config)");
    rep_cmd->add_option("--replications", rep.replications, "Override R");
    rep_cmd->add_option("--bootstraps", rep.bootstraps, "Override B");
    rep_cmd->add_option("-n,--subjects", rep.n_subjects, "Override the scenario's N");
    rep_cmd->add_option("--jobs", rep.jobs, "Worker threads")->capture_default_str();
    rep_cmd->add_option("--out-dir", rep.out_dir, "Output directory")->capture_default_str();
    rep_cmd->add_flag("--no-resume", no_resume, "Ignore an existing results file");
    rep_cmd->add_flag("--quiet", rep.quiet, "No progress output");

    std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return ok;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return bad_flags;
    }

    try {
        if (*fit_cmd) return cmd_fit(fit_data, fit_k, fit_opts, out);
        if (*scan_cmd) return cmd_scan(scan_data, scan_opts, out);
        if (*boot_cmd) return cmd_bootstrap(boot_data, boot_samples, boot_opts, out);
        if (*sim_cmd) return cmd_simulate(sim_scenario, sim_n, sim_seed, sim_out, sim_prefix, out);
        if (*rep_cmd) {
            rep.resume = !no_resume;
            return cmd_replicate(rep_config, rep, out);
        }
    } catch (const DataError& e) {
        err << "data error: " << e.what() << '\n';
        return data_error;
    } catch (const AllRestartsDegenerate& e) {
        err << "fit degenerate: " << e.what() << '\n';
        return fit_degenerate;
    } catch (const NoModelAvailable& e) {
        err << "fit degenerate: " << e.what() << '\n';
        return fit_degenerate;
    } catch (const nlohmann::json::exception& e) {
        err << "config error: " << e.what() << '\n';
        return bad_flags;
    } catch (const std::invalid_argument& e) {
        err << "invalid argument: " << e.what() << '\n';
        return bad_flags;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return failure;
    }
    return failure;
}

}  // namespace lcga::cli
