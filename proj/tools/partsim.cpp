#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "partsim/asymptotics.hpp"
#include "partsim/coalescent.hpp"
#include "partsim/freq.hpp"
#include "partsim/harness.hpp"
#include "partsim/occupancy.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace partsim;

namespace {

std::string padded(std::uint32_t i) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05u", i);
    return buf;
}

int cmd_freq(const std::string& model, double alpha, std::uint64_t trunc, int bosz_n,
             const std::vector<std::uint64_t>& schedule, std::uint64_t seed,
             const std::string& out) {
    FrequencySequence seq;
    if (model == "powerlaw") {
        seq = make_power_law(alpha, trunc).seq;
    } else if (model == "loglaw") {
        seq = make_log_law(trunc).seq;
    } else if (model == "newex") {
        RandomStream rng = make_stream(seed, 42);
        NewexOptions opts;
        opts.base_truncation = trunc;
        seq = make_example_newex(alpha, schedule, rng, opts).seq;
    } else if (model == "bosz") {
        seq = make_example_bosz(bosz_n).seq;
    } else {
        std::cerr << "unknown freq model: " << model << "\n";
        return 2;
    }
    save_sequence(out, seq);
    std::cout << "wrote " << out << " (" << seq.groups.size() << " groups, dust=" << seq.dust
              << ")\n";
    return 0;
}

int cmd_occupancy(const std::string& freq_file, std::uint64_t n, double poisson_t,
                  std::uint32_t reps, std::uint64_t seed, const std::string& out_dir) {
    const FrequencySequence seq = load_sequence(freq_file);
    fs::create_directories(out_dir);
    for (std::uint32_t rep = 0; rep < reps; ++rep) {
        const std::uint64_t rep_seed = derive_seed(seed, 0, rep);
        RandomStream rng(rep_seed);
        const BlockSpectrum spec = poisson_t > 0.0 ? sample_poissonized(seq, poisson_t, rng)
                                                   : sample_fixed(seq, n, rng);
        std::ofstream os(fs::path(out_dir) / ("spectrum_" + padded(rep) + ".csv"));
        write_spectrum_csv(os, spec, rep_seed);
    }
    std::cout << "wrote " << reps << " spectra to " << out_dir << "\n";
    return 0;
}

int cmd_coalescent(const std::string& model, std::uint32_t n, double theta, std::uint32_t reps,
                   std::uint64_t seed, const std::string& out_dir) {
    fs::create_directories(out_dir);
    double param = 0.0;
    std::string kind = model;
    const auto colon = model.find(':');
    if (colon != std::string::npos) {
        kind = model.substr(0, colon);
        param = std::stod(model.substr(colon + 1));
    }
    std::unique_ptr<LambdaRateCache> cache;
    if (kind == "uniform")
        cache = std::make_unique<LambdaRateCache>(LambdaMeasure::uniform01(), n);
    else if (kind == "beta")
        cache = std::make_unique<LambdaRateCache>(LambdaMeasure::beta(param), n);

    for (std::uint32_t rep = 0; rep < reps; ++rep) {
        RandomStream rng(derive_seed(seed, 0, rep));
        MergerHistory h;
        if (kind == "kingman")
            h = simulate_kingman(n, rng);
        else if (kind == "uniform")
            h = simulate_lambda(n, LambdaMeasure::uniform01(), rng, cache.get());
        else if (kind == "beta")
            h = simulate_lambda(n, LambdaMeasure::beta(param), rng, cache.get());
        else if (kind == "growpop")
            h = time_change(simulate_kingman(n, rng), param);
        else {
            std::cerr << "unknown coalescent model: " << model << "\n";
            return 2;
        }
        const MutationSet muts = drop_mutations(h, theta, rng);
        {
            std::ofstream os(fs::path(out_dir) / ("history_" + padded(rep) + ".tsv"));
            write_history(os, h);
        }
        {
            std::ofstream os(fs::path(out_dir) / ("mutations_" + padded(rep) + ".tsv"));
            write_mutations(os, muts);
        }
        const BlockSpectrum spec = allelic_partition(h, muts);
        std::ofstream os(fs::path(out_dir) / ("alleles_" + padded(rep) + ".csv"));
        write_spectrum_csv(os, spec, derive_seed(seed, 0, rep));
    }
    std::cout << "wrote " << reps << " genealogies to " << out_dir << "\n";
    return 0;
}

int cmd_constants(const std::string& model, double alpha, double theta, double gamma,
                  std::uint64_t r, bool as_json) {
    std::vector<LimitTarget> targets;
    if (model == "karlin") {
        targets.push_back(powerlaw_target(alpha, 1.0, 0));
        targets.push_back(powerlaw_target(alpha, 1.0, r ? r : 1));
    } else if (model == "loglaw") {
        targets.push_back(loglaw_targets(0));
        targets.push_back(loglaw_targets(1));
        targets.push_back(loglaw_targets(r >= 2 ? r : 2));
    } else if (model == "beta") {
        targets.push_back(coalescent_targets(CoalescentLaw::beta_blocks, theta, alpha));
        targets.push_back(coalescent_targets(CoalescentLaw::beta_size_r, theta, alpha, r ? r : 1));
        targets.push_back(coalescent_targets(CoalescentLaw::afs_ratio, theta, alpha, r ? r : 2));
    } else if (model == "uniform") {
        targets.push_back(coalescent_targets(CoalescentLaw::bosz_blocks, theta, 0.0));
        targets.push_back(coalescent_targets(CoalescentLaw::bosz_size_r, theta, 0.0, r >= 2 ? r : 2));
    } else if (model == "growpop") {
        targets.push_back(coalescent_targets(CoalescentLaw::growpop_blocks, theta, gamma));
        targets.push_back(coalescent_targets(CoalescentLaw::growpop_length, theta, gamma));
        targets.push_back(coalescent_targets(CoalescentLaw::growpop_mutations, theta, gamma));
        targets.push_back(coalescent_targets(CoalescentLaw::growpop_size_r, theta, gamma, r ? r : 2));
        const double a = gamma / (1.0 + gamma);
        targets.push_back(coalescent_targets(CoalescentLaw::afs_ratio, theta, a, r ? r : 2));
    } else {
        std::cerr << "unknown constants model: " << model << "\n";
        return 2;
    }
    if (as_json) {
        json j = json::array();
        for (const auto& t : targets)
            j.push_back({{"model", t.model},
                         {"statistic", t.statistic_label},
                         {"scaling", t.scaling_label},
                         {"constant", t.constant}});
        std::cout << j.dump(2) << "\n";
    } else {
        std::printf("%-10s %-12s %-12s %s\n", "model", "statistic", "scaling", "constant");
        for (const auto& t : targets)
            std::printf("%-10s %-12s %-12s %.10g\n", t.model.c_str(), t.statistic_label.c_str(),
                        t.scaling_label.c_str(), t.constant);
    }
    return 0;
}

void emit_reports(const RawTable& table, const std::vector<LimitTarget>& targets,
                  const ExperimentConfig& cfg, const fs::path& out) {
    export_raw_csv(table, (out / "raw.csv").string());
    for (const auto& t : targets) {
        const ConvergenceReport rep =
            convergence_report(table, t, cfg.epsilons, cfg.pass_threshold);
        std::string name = "report_" + t.model + "_" + t.statistic_label + ".json";
        for (auto& c : name)
            if (c == '/' || c == ',') c = '-';
        export_report_json(rep, (out / name).string());
        std::cout << (rep.verdict ? "pass " : "FAIL ") << rep.target << " -> constant "
                  << rep.constant << "\n";
    }
}

int cmd_verify(const std::string& suite, const std::string& config_file,
               const std::string& out_dir) {
    ExperimentConfig cfg;
    if (!config_file.empty()) cfg = parse_config_file(config_file);
    const fs::path out = out_dir.empty() ? fs::path("out_" + suite) : fs::path(out_dir);
    fs::create_directories(out);

    if (suite == "karlin") {
        if (config_file.empty()) cfg.model.kind = ExperimentModel::Kind::occupancy_powerlaw;
        const double ell = std::pow(
            make_power_law_infinite(cfg.model.alpha, cfg.model.truncation).normalizer,
            -cfg.model.alpha);
        const RawTable table = run_experiment(cfg);
        std::vector<LimitTarget> targets;
        for (std::uint64_t r = 0; r <= 5; ++r) targets.push_back(powerlaw_target(cfg.model.alpha, ell, r));
        emit_reports(table, targets, cfg, out);
    } else if (suite == "loglaw") {
        if (config_file.empty()) {
            cfg.model.kind = ExperimentModel::Kind::occupancy_loglaw;
            cfg.model.truncation = 100000;
        }
        const RawTable table = run_experiment(cfg);
        emit_reports(table, {loglaw_targets(0), loglaw_targets(1), loglaw_targets(2), loglaw_targets(3)},
                     cfg, out);
    } else if (suite == "beta") {
        if (config_file.empty()) {
            cfg.model.kind = ExperimentModel::Kind::beta_coalescent;
            cfg.n_grid = {100, 1000, 10000};
        }
        const RawTable table = run_experiment(cfg);
        emit_reports(table,
                     {coalescent_targets(CoalescentLaw::beta_blocks, cfg.model.theta, cfg.model.alpha),
                      coalescent_targets(CoalescentLaw::beta_size_r, cfg.model.theta, cfg.model.alpha, 2),
                      coalescent_targets(CoalescentLaw::afs_ratio, cfg.model.theta, cfg.model.alpha, 2)},
                     cfg, out);
    } else if (suite == "uniform") {
        if (config_file.empty()) {
            cfg.model.kind = ExperimentModel::Kind::uniform_coalescent;
            cfg.n_grid = {100, 1000, 10000};
        }
        const RawTable table = run_experiment(cfg);
        emit_reports(table,
                     {coalescent_targets(CoalescentLaw::bosz_blocks, cfg.model.theta, 0.0),
                      coalescent_targets(CoalescentLaw::bosz_size_r, cfg.model.theta, 0.0, 2)},
                     cfg, out);
    } else if (suite == "growpop") {
        if (config_file.empty()) {
            cfg.model.kind = ExperimentModel::Kind::growpop;
            cfg.n_grid = {100, 1000, 10000};
        }
        const double a = cfg.model.gamma / (1.0 + cfg.model.gamma);
        const RawTable table = run_experiment(cfg);
        emit_reports(table,
                     {coalescent_targets(CoalescentLaw::growpop_length, cfg.model.theta, cfg.model.gamma),
                      coalescent_targets(CoalescentLaw::growpop_mutations, cfg.model.theta, cfg.model.gamma),
                      coalescent_targets(CoalescentLaw::growpop_blocks, cfg.model.theta, cfg.model.gamma),
                      coalescent_targets(CoalescentLaw::afs_ratio, cfg.model.theta, a, 2)},
                     cfg, out);
    } else if (suite == "newex") {
        NewexConfig nc;
        if (!config_file.empty()) {
            nc.alpha = cfg.model.alpha;
            nc.replicates = cfg.replicates;
            nc.master_seed = cfg.master_seed;
        }
        const NewexReport rep = demonstrate_newex(nc);
        export_newex_json(rep, (out / "newex_report.json").string());
        std::cout << (rep.verdict ? "pass " : "FAIL ") << "newex demonstration; report in " << out
                  << "\n";
    } else if (suite == "bosz") {
        const BoszReport rep = demonstrate_bosz(3, cfg.replicates, cfg.master_seed);
        export_bosz_json(rep, (out / "bosz_report.json").string());
        std::cout << (rep.verdict ? "pass " : "FAIL ") << "bosz demonstration; report in " << out
                  << "\n";
    } else {
        std::cerr << "unknown suite: " << suite << "\n";
        return 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"partsim: exchangeable-partition and coalescent simulation toolkit"};
    app.require_subcommand(1);

    // freq
    std::string freq_model = "powerlaw", freq_out = "freq.tsv";
    double alpha = 0.5;
    std::uint64_t trunc = 100000;
    int bosz_n = 3;
    std::vector<std::uint64_t> schedule{100, 1000, 10000};
    std::uint64_t seed = 1;
    auto* freq = app.add_subcommand("freq", "generate a ranked frequency sequence");
    freq->add_option("--model", freq_model, "powerlaw|loglaw|newex|bosz");
    freq->add_option("--alpha", alpha);
    freq->add_option("--trunc", trunc);
    freq->add_option("--bosz-n", bosz_n, "n_max for the bosz construction");
    freq->add_option("--schedule", schedule, "newex scale schedule")->delimiter(',');
    freq->add_option("--seed", seed);
    freq->add_option("--out", freq_out);

    // occupancy
    std::string occ_freq, occ_out = "out_occupancy";
    std::uint64_t occ_n = 1000;
    double occ_t = 0.0;
    std::uint32_t reps = 100;
    auto* occ = app.add_subcommand("occupancy", "sample paintbox block spectra");
    occ->add_option("--freq", occ_freq, "frequency sequence file")->required();
    occ->add_option("--n", occ_n);
    occ->add_option("--poisson", occ_t, "Poissonized time t (0 = fixed n)");
    occ->add_option("--reps", reps);
    occ->add_option("--seed", seed);
    occ->add_option("--out", occ_out);

    // coalescent
    std::string coal_model = "kingman", coal_out = "out_coalescent";
    std::uint32_t coal_n = 100;
    double theta = 1.0;
    auto* coal = app.add_subcommand("coalescent", "simulate coalescents with mutation");
    coal->add_option("--model", coal_model, "kingman|uniform|beta:A|growpop:G");
    coal->add_option("--n", coal_n);
    coal->add_option("--theta", theta);
    coal->add_option("--reps", reps);
    coal->add_option("--seed", seed);
    coal->add_option("--out", coal_out);

    // constants
    std::string const_model = "karlin";
    double gamma = 1.0;
    std::uint64_t r = 2;
    bool as_json = false;
    auto* cons = app.add_subcommand("constants", "print limit scalings and constants");
    cons->add_option("--model", const_model, "karlin|loglaw|beta|uniform|growpop");
    cons->add_option("--alpha", alpha);
    cons->add_option("--theta", theta);
    cons->add_option("--gamma", gamma);
    cons->add_option("--r", r);
    cons->add_flag("--json", as_json);

    // verify
    std::string suite = "karlin", config_file, out_dir;
    auto* verify = app.add_subcommand("verify", "run a verification suite");
    verify->add_option("--suite", suite, "karlin|loglaw|beta|uniform|growpop|newex|bosz")->required();
    verify->add_option("--config", config_file);
    verify->add_option("--out", out_dir);

    CLI11_PARSE(app, argc, argv);
    try {
        if (freq->parsed()) return cmd_freq(freq_model, alpha, trunc, bosz_n, schedule, seed, freq_out);
        if (occ->parsed()) return cmd_occupancy(occ_freq, occ_n, occ_t, reps, seed, occ_out);
        if (coal->parsed()) return cmd_coalescent(coal_model, coal_n, theta, reps, seed, coal_out);
        if (cons->parsed()) return cmd_constants(const_model, alpha, theta, gamma, r, as_json);
        if (verify->parsed()) return cmd_verify(suite, config_file, out_dir);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
