#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <memory>
#include <vector>

#include "partsim/occupancy.hpp"
#include "partsim/rng.hpp"

namespace partsim {

// The finite measure Lambda on [0,1] driving the merger rates.
struct LambdaMeasure {
    enum class Kind { kingman, uniform01, beta, custom };
    Kind kind = Kind::kingman;
    double alpha = 0.0;                       // beta(alpha, 2 - alpha)
    std::function<double(double)> density;    // custom
    double total_mass = 1.0;

    static LambdaMeasure kingman();
    static LambdaMeasure uniform01();
    static LambdaMeasure beta(double alpha);
    static LambdaMeasure custom(std::function<double(double)> density, double total_mass);
};

// lambda_{b,k} = int_0^1 x^(k-2) (1-x)^(b-k) Lambda(dx).
double lambda_rate(const LambdaMeasure& measure, std::uint32_t b, std::uint32_t k);
// Total merger rate with b lineages: sum_k C(b,k) lambda_{b,k}.
double lambda_total_rate(const LambdaMeasure& measure, std::uint32_t b);

// Precomputed per-level total rates and first terms, shared across replicates.
class LambdaRateCache {
  public:
    LambdaRateCache(const LambdaMeasure& measure, std::uint32_t n_max);
    double total_rate(std::uint32_t b) const;
    std::uint32_t sample_merger_size(std::uint32_t b, RandomStream& rng) const;

  private:
    LambdaMeasure measure_;
    std::vector<double> total_;  // [b]
    std::vector<double> term2_;  // C(b,2) * lambda_{b,2}
    std::vector<std::vector<double>> custom_rows_;
};

struct MergeEvent {
    double time = 0.0;
    std::vector<std::uint32_t> participants;
    std::uint32_t result = 0;
};

enum class TimeScale { theta, psi };

// A genealogy: leaves are lineages 0..n-1, event i creates lineage n+i.
struct MergerHistory {
    std::uint32_t n = 0;
    std::vector<MergeEvent> events;
    TimeScale scale = TimeScale::theta;
    double gamma = 0.0;               // set when scale == psi
    std::vector<double> level_times;  // [k] = first time the count is <= k; [n] = 0

    void validate() const;
};

MergerHistory simulate_kingman(std::uint32_t n, RandomStream& rng);
MergerHistory simulate_lambda(std::uint32_t n, const LambdaMeasure& measure, RandomStream& rng,
                              const LambdaRateCache* cache = nullptr);

// Deterministic time change t -> (1-alpha)^-(1-alpha) t^(1-alpha) with
// alpha = gamma/(1+gamma); maps Kingman time onto the growing-population clock.
double growth_time_map(double theta_time, double gamma);
double growth_time_map_inverse(double psi_time, double gamma);
MergerHistory time_change(const MergerHistory& history, double gamma);
MergerHistory time_change_inverse(const MergerHistory& history);

// Total branch length sum_k k (U_{k-1} - U_k), and the variant truncated at
// lineage count k_min (the paper's L'_n with k_min = ceil(n^(3/4)) + 1).
double total_length(const MergerHistory& history);
double total_length_above(const MergerHistory& history, std::uint32_t k_min);

struct MutationRecord {
    std::uint32_t lineage = 0;
    double time = 0.0;
};
struct MutationSet {
    std::vector<MutationRecord> records;
    double theta = 0.0;
};

// Rate-theta Poisson marks along every branch of the history (in its own clock).
MutationSet drop_mutations(const MergerHistory& history, double theta, RandomStream& rng);

// Infinite-alleles partition: leaves sharing their most recent mutation share
// a block; leaves with no mutation form the ancestral block.
BlockSpectrum allelic_partition(const MergerHistory& history, const MutationSet& mutations);

// Event-log serialization: `time<TAB>merged_ids...<TAB>new_id` per line.
void write_history(std::ostream& os, const MergerHistory& history);
void write_mutations(std::ostream& os, const MutationSet& mutations);

}  // namespace partsim
