#include "partsim/harness.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "partsim/errors.hpp"
#include "partsim/stats.hpp"

namespace partsim {

using nlohmann::json;

std::string ExperimentModel::label() const {
    std::ostringstream os;
    switch (kind) {
        case Kind::occupancy_powerlaw:
            os << "powerlaw(alpha=" << alpha << (poissonized ? ";poisson" : ";fixed") << ")";
            break;
        case Kind::occupancy_loglaw:
            os << "loglaw(" << (poissonized ? "poisson" : "fixed") << ")";
            break;
        case Kind::occupancy_dust:
            os << "dust(" << (poissonized ? "poisson" : "fixed") << ")";
            break;
        case Kind::kingman:
            os << "kingman(theta=" << theta << ")";
            break;
        case Kind::beta_coalescent:
            os << "beta(alpha=" << alpha << ";theta=" << theta << ")";
            break;
        case Kind::uniform_coalescent:
            os << "uniform(theta=" << theta << ")";
            break;
        case Kind::growpop:
            os << "growpop(gamma=" << gamma << ";theta=" << theta << ")";
            break;
    }
    return os.str();
}

void ExperimentConfig::validate() const {
    if (n_grid.empty()) throw std::invalid_argument("config: empty n grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw std::invalid_argument("config: n grid must increase");
    if (replicates < 1) throw std::invalid_argument("config: replicates must be >= 1");
    for (double e : epsilons)
        if (!(e > 0.0) || !(e < 1.0)) throw std::invalid_argument("config: epsilon outside (0,1)");
    if (r_max < 1 || r_max > 64) throw std::invalid_argument("config: r_max outside [1,64]");
}

std::uint32_t effective_workers(std::uint32_t configured) {
    if (const char* env = std::getenv("PARTSIM_WORKERS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) return static_cast<std::uint32_t>(v);
    }
    if (configured >= 1) return configured;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? hw : 1;
}

namespace {

ReplicateOutcome spectrum_outcome(const BlockSpectrum& spec, std::uint64_t n, int r_max) {
    ReplicateOutcome out;
    out.n = n;
    out.K_n = spec.total_blocks();
    out.K_r.assign(static_cast<std::size_t>(r_max) + 1, 0);
    for (const auto& [r, c] : spec.counts)
        if (r <= static_cast<std::uint64_t>(r_max)) out.K_r[r] = c;
    return out;
}

// One replicate of the configured model.  Invariants are checked here so that
// every experiment path enforces them on every realization.
ReplicateOutcome run_replicate(const ExperimentConfig& cfg, const FrequencySequence* paintbox,
                               const LambdaRateCache* rates, std::uint64_t n,
                               std::uint64_t seed) {
    RandomStream rng(seed);
    const auto& model = cfg.model;
    switch (model.kind) {
        case ExperimentModel::Kind::occupancy_powerlaw:
        case ExperimentModel::Kind::occupancy_loglaw:
        case ExperimentModel::Kind::occupancy_dust: {
            const BlockSpectrum spec =
                model.poissonized ? sample_poissonized(*paintbox, static_cast<double>(n), rng)
                                  : sample_fixed(*paintbox, n, rng);
            spec.validate();
            return spectrum_outcome(spec, n, cfg.r_max);
        }
        case ExperimentModel::Kind::kingman:
        case ExperimentModel::Kind::beta_coalescent:
        case ExperimentModel::Kind::uniform_coalescent:
        case ExperimentModel::Kind::growpop: {
            MergerHistory history;
            const std::uint32_t nn = static_cast<std::uint32_t>(n);
            if (model.kind == ExperimentModel::Kind::kingman) {
                history = simulate_kingman(nn, rng);
            } else if (model.kind == ExperimentModel::Kind::growpop) {
                history = time_change(simulate_kingman(nn, rng), model.gamma);
            } else {
                const LambdaMeasure measure = model.kind == ExperimentModel::Kind::beta_coalescent
                                                  ? LambdaMeasure::beta(model.alpha)
                                                  : LambdaMeasure::uniform01();
                history = simulate_lambda(nn, measure, rng, rates);
            }
            const MutationSet muts = drop_mutations(history, model.theta, rng);
            const BlockSpectrum spec = allelic_partition(history, muts);
            spec.validate();
            if (spec.sample_size != n) throw std::logic_error("replicate: partition size mismatch");
            ReplicateOutcome out = spectrum_outcome(spec, n, cfg.r_max);
            out.S_n = muts.records.size();
            out.L_n = total_length(history);
            if (out.K_n > out.S_n + 1) throw std::logic_error("replicate: K_n > S_n + 1");
            return out;
        }
    }
    throw std::logic_error("replicate: unknown model");
}

}  // namespace

RawTable run_experiment(const ExperimentConfig& config) {
    config.validate();
    RawTable table;
    table.model_label = config.model.label();
    table.r_max = config.r_max;

    // Shared immutable inputs built once.
    std::unique_ptr<FrequencySequence> paintbox;
    std::unique_ptr<LambdaRateCache> rates;
    switch (config.model.kind) {
        case ExperimentModel::Kind::occupancy_powerlaw:
            paintbox = std::make_unique<FrequencySequence>(
                make_power_law_infinite(config.model.alpha, config.model.truncation).seq);
            break;
        case ExperimentModel::Kind::occupancy_loglaw:
            paintbox = std::make_unique<FrequencySequence>(
                make_log_law(config.model.truncation).seq);
            break;
        case ExperimentModel::Kind::occupancy_dust: {
            paintbox = std::make_unique<FrequencySequence>();
            paintbox->dust = 1.0;
            paintbox->normalize_and_validate();
            break;
        }
        case ExperimentModel::Kind::beta_coalescent:
            rates = std::make_unique<LambdaRateCache>(LambdaMeasure::beta(config.model.alpha),
                                                      static_cast<std::uint32_t>(config.n_grid.back()));
            break;
        case ExperimentModel::Kind::uniform_coalescent:
            rates = std::make_unique<LambdaRateCache>(LambdaMeasure::uniform01(),
                                                      static_cast<std::uint32_t>(config.n_grid.back()));
            break;
        default:
            break;
    }

    const std::size_t tasks = config.n_grid.size() * config.replicates;
    table.outcomes.resize(tasks);
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mu;

    auto worker = [&] {
        for (;;) {
            const std::size_t task = next.fetch_add(1);
            if (task >= tasks || failed.load()) return;
            const std::size_t ni = task / config.replicates;
            const std::uint32_t rep = static_cast<std::uint32_t>(task % config.replicates);
            const std::uint64_t n = config.n_grid[ni];
            const std::uint64_t seed = derive_seed(config.master_seed, ni, rep);
            try {
                ReplicateOutcome out =
                    run_replicate(config, paintbox.get(), rates.get(), n, seed);
                out.replicate = rep;
                out.seed = seed;
                table.outcomes[task] = std::move(out);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!failed.exchange(true)) error = std::current_exception();
                return;
            }
        }
    };

    const std::uint32_t workers =
        std::min<std::uint32_t>(effective_workers(config.worker_count),
                                static_cast<std::uint32_t>(tasks));
    if (workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::uint32_t w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& th : pool) th.join();
    }
    if (failed.load()) std::rethrow_exception(error);
    return table;
}

// --- convergence reports -----------------------------------------------------

namespace {

double extract_statistic(const ReplicateOutcome& o, const LimitTarget& target) {
    switch (target.statistic) {
        case Statistic::total_blocks:
            return static_cast<double>(o.K_n);
        case Statistic::size_r:
            if (target.r >= o.K_r.size())
                throw std::invalid_argument("convergence_report: statistic r exceeds table r_max");
            return static_cast<double>(o.K_r[target.r]);
        case Statistic::ratio_r: {
            if (target.r >= o.K_r.size())
                throw std::invalid_argument("convergence_report: statistic r exceeds table r_max");
            return o.K_n == 0 ? 0.0
                              : static_cast<double>(o.K_r[target.r]) / static_cast<double>(o.K_n);
        }
        case Statistic::mutations:
            return static_cast<double>(o.S_n);
        case Statistic::tree_length:
            return o.L_n;
    }
    return 0.0;
}

}  // namespace

ConvergenceReport convergence_report(const RawTable& table, const LimitTarget& target,
                                     const std::vector<double>& epsilons, double pass_threshold) {
    if (table.outcomes.empty()) throw std::invalid_argument("convergence_report: empty table");
    ConvergenceReport rep;
    rep.target = target.model + ":" + target.statistic_label;
    rep.scaling = target.scaling_label;
    rep.constant = target.constant;
    rep.pass_threshold = pass_threshold;

    std::map<std::uint64_t, std::vector<double>> by_n;
    for (const auto& o : table.outcomes)
        by_n[o.n].push_back(extract_statistic(o, target));

    bool pass = true;
    for (double eps : epsilons) {
        double prev_q = 0.0, prev_hw = 0.0;
        bool first = true;
        for (const auto& [n, xs] : by_n) {
            const double denom = target.scaling(static_cast<double>(n)) * target.constant;
            std::uint64_t bad = 0;
            for (double x : xs)
                if (std::abs(x / denom - 1.0) > eps) ++bad;
            ReportRow row;
            row.epsilon = eps;
            row.n = n;
            row.q_hat = static_cast<double>(bad) / static_cast<double>(xs.size());
            row.half_width = binomial_halfwidth(row.q_hat, xs.size());
            rep.rows.push_back(row);
            if (!first && row.q_hat > prev_q + 2.0 * std::hypot(prev_hw, row.half_width))
                pass = false;  // trend must be nonincreasing up to noise
            prev_q = row.q_hat;
            prev_hw = row.half_width;
            first = false;
        }
        if (prev_q >= pass_threshold) pass = false;  // final-n level
    }
    rep.verdict = pass;
    return rep;
}

// --- counterexample demonstrations --------------------------------------------

NewexReport demonstrate_newex(const NewexConfig& config) {
    NewexReport rep;
    rep.config = config;
    rep.gamma_const = gamma_fn(1.0 - config.alpha);
    const NewexBase base = make_newex_base(config.alpha, config.base_truncation);
    NewexOptions opts;
    opts.r_max = config.r_max;
    opts.base_truncation = config.base_truncation;

    const std::size_t K = config.schedule.size();
    rep.scales.resize(K);
    for (std::size_t k = 0; k < K; ++k) {
        rep.scales[k].n_k = config.schedule[k];
        rep.scales[k].min_phi_marked_over_na = std::numeric_limits<double>::infinity();
        rep.scales[k].min_bound_margin = std::numeric_limits<double>::infinity();
        rep.scales[k].mean_k_by_r.assign(static_cast<std::size_t>(config.r_max) + 1, 0.0);
    }
    std::vector<std::vector<std::uint64_t>> samples_by_r(K);
    for (auto& v : samples_by_r) v.assign(static_cast<std::size_t>(config.r_max) + 1, 0);
    std::vector<std::vector<double>> sum_k_by_r(K);
    for (auto& v : sum_k_by_r) v.assign(static_cast<std::size_t>(config.r_max) + 1, 0.0);

    double worst_unmarked_dev_final = 0.0;
    bool grid_trend_ok = true;
    for (std::uint32_t repn = 0; repn < config.replicates; ++repn) {
        RandomStream rng = make_stream(config.master_seed, 7001, repn);
        const NewexResult ex = make_example_newex(base, config.schedule, rng, opts);
        const auto marked = ex.seq.marked_part();
        const auto unmarked = ex.seq.unmarked_part();
        for (std::size_t k = 0; k < K; ++k) {
            const double n = static_cast<double>(config.schedule[k]);
            const double na = std::pow(n, config.alpha);
            const int r = ex.realized_r[k];
            const double phi_marked = phi_groups(std::span<const AtomGroup>(marked), n) / na;
            const double pow2 = std::ldexp(1.0, 1 << r);  // 2^(2^r)
            const double bound =
                (-std::expm1(-1.0 / pow2)) * pow2 * (1.0 - std::pow(n, -config.alpha));
            auto& sc = rep.scales[k];
            sc.min_phi_marked_over_na = std::min(sc.min_phi_marked_over_na, phi_marked);
            sc.min_bound_margin = std::min(sc.min_bound_margin, phi_marked / bound);
            if (phi_marked < bound) sc.bound_ok = false;
            if (repn == 0)
                sc.phi_unmarked_over_na = phi_groups(std::span<const AtomGroup>(unmarked), n) / na;
            // Monte Carlo draw of K at the Poissonized scale n_k.
            const BlockSpectrum spec = sample_poissonized(ex.seq, n, rng);
            sum_k_by_r[k][r] += static_cast<double>(spec.total_blocks()) / na;
            ++samples_by_r[k][r];
        }
        // Counting-function law for the unmarked part, on a geometric x grid
        // covering the scales the schedule probes, inside the base's range.
        const double x_hi = 0.5 / static_cast<double>(config.schedule.front());
        const double x_lo = std::max(10.0 * unmarked.back().value,
                                     0.125 / static_cast<double>(config.schedule.back()));
        double x = x_hi;
        const int points = 8;
        const double step = std::pow(x_lo / x_hi, 1.0 / (points - 1));
        double first_dev = 0.0, final_dev = 0.0;
        for (int i = 0; i < points; ++i, x *= step) {
            const double g = counting_function(std::span<const AtomGroup>(unmarked), x).as_double();
            const double dev = std::abs(std::pow(x, config.alpha) * g - 1.0);
            if (i == 0) first_dev = dev;
            final_dev = dev;
        }
        worst_unmarked_dev_final = std::max(worst_unmarked_dev_final, final_dev);
        if (final_dev > first_dev + 0.02) grid_trend_ok = false;
    }

    for (std::size_t k = 0; k < K; ++k) {
        auto& sc = rep.scales[k];
        double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
        for (std::size_t r = 1; r < sc.mean_k_by_r.size(); ++r) {
            if (samples_by_r[k][r] == 0) continue;
            sc.mean_k_by_r[r] = sum_k_by_r[k][r] / static_cast<double>(samples_by_r[k][r]);
            lo = std::min(lo, sc.mean_k_by_r[r]);
            hi = std::max(hi, sc.mean_k_by_r[r]);
        }
        sc.spread = hi > lo ? hi - lo : 0.0;
    }
    rep.unmarked_final_dev = worst_unmarked_dev_final;
    rep.unmarked_grid_ok = worst_unmarked_dev_final <= 0.05 && grid_trend_ok;
    bool marked_ok = true;
    for (const auto& sc : rep.scales)
        if (!sc.bound_ok || sc.min_phi_marked_over_na < config.marked_floor) marked_ok = false;
    rep.verdict = marked_ok && rep.unmarked_grid_ok;
    return rep;
}

BoszReport demonstrate_bosz(int n_max, std::uint32_t replicates, std::uint64_t master_seed) {
    if (n_max < 2 || n_max > 4)
        throw std::invalid_argument("demonstrate_bosz: n_max must be in [2,4]");
    BoszReport rep;
    rep.n_max = n_max;
    rep.replicates = replicates;
    const BoszResult bosz = make_example_bosz(n_max);
    const auto unmarked = bosz.seq.unmarked_part();

    rep.blocks_in_band = true;
    for (int n = 2; n <= n_max; ++n) {
        BoszCheckpoint cp;
        cp.n = n;
        const double logt = static_cast<double>(n) * n * n;
        cp.t = std::exp(logt);
        const double exact_phi = phi(bosz.seq, cp.t);
        cp.exact_blocks_scaled = logt * exact_phi / cp.t;
        cp.exact_unmarked_scaled =
            logt * (phi_groups(std::span<const AtomGroup>(unmarked), cp.t) + cp.t * bosz.seq.dust) /
            cp.t;
        for (std::uint64_t r = 2; r <= 3; ++r)
            cp.exact_size_scaled.push_back(logt * logt * phi_r(bosz.seq, cp.t, r) / cp.t);

        std::vector<double> mc_blocks, mc_r2, mc_r3;
        for (std::uint32_t repn = 0; repn < replicates; ++repn) {
            RandomStream rng = make_stream(master_seed, 9000 + static_cast<std::uint64_t>(n), repn);
            const LowRSpectrum low = sample_low_r(bosz.seq, cp.t, 3, rng);
            mc_blocks.push_back(logt * low.total_blocks / cp.t);
            mc_r2.push_back(logt * logt * low.counts[2] / cp.t);
            mc_r3.push_back(logt * logt * low.counts[3] / cp.t);
        }
        const SampleStats sb = summarize(mc_blocks);
        cp.mc_blocks_scaled = sb.mean;
        cp.mc_blocks_se = sb.stderr_mean;
        for (const auto* xs : {&mc_r2, &mc_r3}) {
            const SampleStats s = summarize(*xs);
            cp.mc_size_scaled.push_back(s.mean);
            cp.mc_size_se.push_back(s.stderr_mean);
        }
        // The log-law band applies to the unmarked part at every checkpoint
        // (marked scales above n still inflate the full count at small t);
        // the full count must sit in band once the largest checkpoint is reached.
        if (!(cp.exact_unmarked_scaled >= 0.8 && cp.exact_unmarked_scaled <= 1.2))
            rep.blocks_in_band = false;
        if (n == n_max && !(cp.exact_blocks_scaled >= 0.8 && cp.exact_blocks_scaled <= 1.2))
            rep.blocks_in_band = false;
        if (n == 3 && cp.exact_size_scaled[0] >= 1.5 * 0.5) rep.size2_diverges = true;
        rep.checkpoints.push_back(std::move(cp));
    }
    if (n_max < 3) rep.size2_diverges = false;
    rep.verdict = rep.blocks_in_band && rep.size2_diverges;
    return rep;
}

// --- persistence ----------------------------------------------------------------

void write_raw_csv(std::ostream& os, const RawTable& table) {
    os << "model,n,replicate,seed,K_n,S_n,r,K_nr\n";
    for (const auto& o : table.outcomes) {
        const auto prefix = [&](std::ostream& s) -> std::ostream& {
            s << table.model_label << ',' << o.n << ',' << o.replicate << ',' << o.seed << ','
              << o.K_n << ',' << o.S_n << ',';
            return s;
        };
        prefix(os) << 0 << ',' << o.K_n << '\n';
        for (std::size_t r = 1; r < o.K_r.size(); ++r) prefix(os) << r << ',' << o.K_r[r] << '\n';
    }
}

std::string raw_csv_string(const RawTable& table) {
    std::ostringstream os;
    write_raw_csv(os, table);
    return os.str();
}

void export_raw_csv(const RawTable& table, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_raw_csv(os, table);
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

void write_report_json(std::ostream& os, const ConvergenceReport& report) {
    json rows = json::array();
    for (const auto& r : report.rows) {
        rows.push_back({{"target", report.target},
                        {"scaling", report.scaling},
                        {"constant", report.constant},
                        {"epsilon", r.epsilon},
                        {"n", r.n},
                        {"q_hat", r.q_hat},
                        {"half_width", r.half_width},
                        {"verdict", report.verdict ? "pass" : "fail"}});
    }
    os << rows.dump(2) << "\n";
}

void export_report_json(const ConvergenceReport& report, const std::string& path) {
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_report_json(os, report);
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

void export_newex_json(const NewexReport& report, const std::string& path) {
    json j;
    j["alpha"] = report.config.alpha;
    j["gamma_constant"] = report.gamma_const;
    j["replicates"] = report.config.replicates;
    j["marked_floor"] = report.config.marked_floor;
    j["unmarked_final_dev"] = report.unmarked_final_dev;
    j["unmarked_grid_ok"] = report.unmarked_grid_ok;
    j["verdict"] = report.verdict ? "non-convergence demonstrated" : "inconclusive";
    j["scales"] = json::array();
    for (const auto& s : report.scales) {
        json js;
        js["n_k"] = s.n_k;
        js["phi_unmarked_over_na"] = s.phi_unmarked_over_na;
        js["min_phi_marked_over_na"] = s.min_phi_marked_over_na;
        js["min_bound_margin"] = s.min_bound_margin;
        js["bound_ok"] = s.bound_ok;
        js["mean_k_by_r"] = s.mean_k_by_r;
        js["spread"] = s.spread;
        j["scales"].push_back(js);
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

void export_bosz_json(const BoszReport& report, const std::string& path) {
    json j;
    j["n_max"] = report.n_max;
    j["replicates"] = report.replicates;
    j["blocks_in_band"] = report.blocks_in_band;
    j["size2_diverges"] = report.size2_diverges;
    j["verdict"] = report.verdict ? "divergence demonstrated" : "inconclusive";
    j["checkpoints"] = json::array();
    for (const auto& c : report.checkpoints) {
        json jc;
        jc["n"] = c.n;
        jc["t"] = c.t;
        jc["exact_blocks_scaled"] = c.exact_blocks_scaled;
        jc["exact_unmarked_scaled"] = c.exact_unmarked_scaled;
        jc["mc_blocks_scaled"] = c.mc_blocks_scaled;
        jc["mc_blocks_se"] = c.mc_blocks_se;
        jc["exact_size_scaled"] = c.exact_size_scaled;
        jc["mc_size_scaled"] = c.mc_size_scaled;
        jc["mc_size_se"] = c.mc_size_se;
        j["checkpoints"].push_back(jc);
    }
    std::ofstream os(path, std::ios::trunc);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    os << j.dump(2) << "\n";
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

// --- config files ----------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::uint64_t> parse_u64_list(const std::string& s) {
    std::vector<std::uint64_t> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stoull(item));
    }
    return out;
}

std::vector<double> parse_double_list(const std::string& s) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(std::stod(item));
    }
    return out;
}

}  // namespace

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) continue;
        if (key == "model") {
            if (value == "powerlaw") cfg.model.kind = ExperimentModel::Kind::occupancy_powerlaw;
            else if (value == "loglaw") cfg.model.kind = ExperimentModel::Kind::occupancy_loglaw;
            else if (value == "dust") cfg.model.kind = ExperimentModel::Kind::occupancy_dust;
            else if (value == "kingman") cfg.model.kind = ExperimentModel::Kind::kingman;
            else if (value == "beta") cfg.model.kind = ExperimentModel::Kind::beta_coalescent;
            else if (value == "uniform") cfg.model.kind = ExperimentModel::Kind::uniform_coalescent;
            else if (value == "growpop") cfg.model.kind = ExperimentModel::Kind::growpop;
            else throw std::invalid_argument("config: unknown model " + value);
        } else if (key == "alpha") cfg.model.alpha = std::stod(value);
        else if (key == "gamma") cfg.model.gamma = std::stod(value);
        else if (key == "theta") cfg.model.theta = std::stod(value);
        else if (key == "truncation") cfg.model.truncation = std::stoull(value);
        else if (key == "poissonized") cfg.model.poissonized = value == "true" || value == "1";
        else if (key == "n_grid") cfg.n_grid = parse_u64_list(value);
        else if (key == "replicates") cfg.replicates = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "epsilons") cfg.epsilons = parse_double_list(value);
        else if (key == "pass_threshold") cfg.pass_threshold = std::stod(value);
        else if (key == "master_seed") cfg.master_seed = std::stoull(value);
        else if (key == "workers") cfg.worker_count = static_cast<std::uint32_t>(std::stoul(value));
        else if (key == "r_max") cfg.r_max = std::stoi(value);
        else if (key == "out_dir") cfg.out_dir = value;
        else throw std::invalid_argument("config: unknown key " + key);
    }
    cfg.validate();
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open config: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return parse_config_text(buf.str());
}

}  // namespace partsim
