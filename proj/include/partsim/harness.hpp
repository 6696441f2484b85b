#pragma once
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "partsim/asymptotics.hpp"
#include "partsim/coalescent.hpp"
#include "partsim/freq.hpp"
#include "partsim/occupancy.hpp"

namespace partsim {

struct ExperimentModel {
    enum class Kind {
        occupancy_powerlaw,
        occupancy_loglaw,
        occupancy_dust,  // degenerate all-dust paintbox; every ball a singleton
        kingman,
        beta_coalescent,
        uniform_coalescent,
        growpop,
    };
    Kind kind = Kind::occupancy_powerlaw;
    double alpha = 0.5;   // powerlaw / beta
    double gamma = 1.0;   // growpop
    double theta = 1.0;   // mutation rate for coalescent models
    std::uint64_t truncation = 1000000;  // paintbox depth
    bool poissonized = true;             // occupancy: Poisson(t=n) sample sizes

    std::string label() const;
};

struct ExperimentConfig {
    ExperimentModel model;
    std::vector<std::uint64_t> n_grid{1000, 10000, 100000, 1000000};
    std::uint32_t replicates = 200;
    std::vector<double> epsilons{0.05, 0.1, 0.2};
    double pass_threshold = 0.1;
    std::uint64_t master_seed = 1;
    std::uint32_t worker_count = 0;  // 0: hardware concurrency; PARTSIM_WORKERS overrides
    int r_max = 10;
    std::string out_dir;

    void validate() const;
};

// One simulated replicate; K_r holds K_{n,r} for r in [1, r_max].
struct ReplicateOutcome {
    std::uint64_t n = 0;
    std::uint32_t replicate = 0;
    std::uint64_t seed = 0;
    std::uint64_t K_n = 0;
    std::uint64_t S_n = 0;
    double L_n = 0.0;  // coalescent models only; not serialized
    std::vector<std::uint64_t> K_r;
};

struct RawTable {
    std::string model_label;
    int r_max = 10;
    std::vector<ReplicateOutcome> outcomes;  // ordered by (n, replicate)
};

// Runs the model over the n-grid; deterministic given (config, master_seed)
// regardless of worker count.  Structural invariants are enforced on every
// realization.
RawTable run_experiment(const ExperimentConfig& config);

struct ReportRow {
    double epsilon = 0.0;
    std::uint64_t n = 0;
    double q_hat = 0.0;
    double half_width = 0.0;
};
struct ConvergenceReport {
    std::string target;
    std::string scaling;
    double constant = 0.0;
    double pass_threshold = 0.0;
    std::vector<ReportRow> rows;
    bool verdict = false;
};
ConvergenceReport convergence_report(const RawTable& table, const LimitTarget& target,
                                     const std::vector<double>& epsilons, double pass_threshold);

// --- counterexample demonstrations ------------------------------------------

struct NewexConfig {
    double alpha = 0.5;
    std::vector<std::uint64_t> schedule{100, 1000, 10000};
    int r_max = 9;
    std::uint64_t base_truncation = 100000;
    std::uint32_t replicates = 200;
    std::uint64_t master_seed = 1;
    double marked_floor = 0.8;  // the demonstration's C
};
struct NewexScaleReport {
    std::uint64_t n_k = 0;
    double phi_unmarked_over_na = 0.0;   // should approach Gamma(1 - alpha)
    double min_phi_marked_over_na = 0.0;
    double min_bound_margin = 0.0;       // min over replicates of phi' / bound
    bool bound_ok = true;                // phi' >= per-realization bound, all replicates
    std::vector<double> mean_k_by_r;     // mean n^-alpha K_{n_k} grouped by realized R_k
    double spread = 0.0;                 // max - min over those group means
};
struct NewexReport {
    NewexConfig config;
    double gamma_const = 0.0;  // Gamma(1 - alpha)
    std::vector<NewexScaleReport> scales;
    double unmarked_final_dev = 0.0;  // |x^a g(x) - 1| at the deepest checked x
    bool unmarked_grid_ok = false;
    bool verdict = false;  // marked mass >= C at every k while the unmarked law holds
};
NewexReport demonstrate_newex(const NewexConfig& config);

struct BoszCheckpoint {
    int n = 0;
    double t = 0.0;                  // e^{n^3}
    double exact_blocks_scaled = 0.0;      // (log t) Phi(t) / t
    double exact_unmarked_scaled = 0.0;    // (log t) Phi''(t) / t
    double mc_blocks_scaled = 0.0;
    double mc_blocks_se = 0.0;
    std::vector<double> exact_size_scaled;     // (log t)^2 Phi_r(t) / t, r in [2,3]
    std::vector<double> mc_size_scaled;
    std::vector<double> mc_size_se;
};
struct BoszReport {
    int n_max = 0;
    std::uint32_t replicates = 0;
    std::vector<BoszCheckpoint> checkpoints;
    bool blocks_in_band = false;      // (log m) K / m in [0.8, 1.2] at all checkpoints
    bool size2_diverges = false;      // (log m)^2 K_2 / m >= 1.5 * 0.5 at n = 3
    bool verdict = false;
};
BoszReport demonstrate_bosz(int n_max, std::uint32_t replicates = 200,
                            std::uint64_t master_seed = 1);

// --- persistence -------------------------------------------------------------

// Raw CSV: model,n,replicate,seed,K_n,S_n,r,K_nr with one row per (replicate, r)
// for r <= r_max plus an r=0 summary row carrying K_n in the K_nr column.
void write_raw_csv(std::ostream& os, const RawTable& table);
void export_raw_csv(const RawTable& table, const std::string& path);
std::string raw_csv_string(const RawTable& table);

void write_report_json(std::ostream& os, const ConvergenceReport& report);
void export_report_json(const ConvergenceReport& report, const std::string& path);
void export_newex_json(const NewexReport& report, const std::string& path);
void export_bosz_json(const BoszReport& report, const std::string& path);

// Line-oriented `key = value` config files.
ExperimentConfig parse_config_file(const std::string& path);
ExperimentConfig parse_config_text(const std::string& text);

// Effective worker count: PARTSIM_WORKERS env var wins, then config, then
// hardware concurrency.
std::uint32_t effective_workers(std::uint32_t configured);

}  // namespace partsim
