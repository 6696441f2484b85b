#pragma once
#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "partsim/freq.hpp"
#include "partsim/rng.hpp"

namespace partsim {

// Occupancy spectrum of a sampled partition restriction: counts[r] is the
// number of blocks of size r.  Dust singletons are included in counts[1] and
// additionally reported in singleton_dust so they can be excluded downstream.
struct BlockSpectrum {
    std::uint64_t sample_size = 0;
    std::map<std::uint64_t, std::uint64_t> counts;
    std::uint64_t singleton_dust = 0;

    std::uint64_t total_blocks() const;  // K_n
    std::uint64_t count_of(std::uint64_t r) const;
    void validate() const;  // sum r * counts[r] == sample_size
};

// Paintbox partition of {1..n}: n conditionally independent labels.
BlockSpectrum sample_fixed(const FrequencySequence& seq, std::uint64_t n, RandomStream& rng);

// Poissonized sample: every box holds Poisson(t * value) balls independently;
// dust contributes Poisson(t * dust) singletons.  sample_size is the realized
// total.  Groups with large multiplicities are sampled jointly as a
// multinomial over box sizes with negligible two-sided tails lumped.
BlockSpectrum sample_poissonized(const FrequencySequence& seq, double t, RandomStream& rng);

// Poissonized sample of the small-size end of the spectrum only, for scales at
// which materializing every occupied size is impossible.  counts[r] for
// 1 <= r <= r_max plus the total number of occupied boxes; values are doubles
// because counts can exceed 2^53 at extreme scales.  For huge multiplicities
// the per-size counts are drawn with matching means and variances but without
// exact joint coupling.
struct LowRSpectrum {
    double total_blocks = 0;             // K (occupied boxes + dust singletons)
    std::vector<double> counts;          // index r in [1, r_max]; [0] unused
    double singleton_dust = 0;
};
LowRSpectrum sample_low_r(const FrequencySequence& seq, double t, int r_max, RandomStream& rng);

// Exact occupancy expectations for a fixed sample size n.
struct MeanSpectrum {
    std::vector<double> by_size;  // E[K_{n,r}] for r in [1, r_max]; [0] unused
    double total = 0;             // E[K_n]
};
MeanSpectrum exact_mean_spectrum(const FrequencySequence& seq, std::uint64_t n, int r_max = 10);

// Poissonization functionals.
double phi(const FrequencySequence& seq, double t);
double phi_r(const FrequencySequence& seq, double t, std::uint64_t r);
// Same sums restricted to an explicit group set (no dust term).
double phi_groups(std::span<const AtomGroup> groups, double t);
double phi_r_groups(std::span<const AtomGroup> groups, double t, std::uint64_t r);
// sum_{s >= r} Phi_s(t), computed as Phi - sum_{s < r} Phi_s.
double phi_tail(const FrequencySequence& seq, double t, std::uint64_t r);

// Shared samplers (exposed for reuse by the coalescent and harness code).
std::uint64_t draw_poisson(double mean, RandomStream& rng);
std::uint64_t draw_binomial(std::uint64_t m, double p, RandomStream& rng);
// Binomial draw from a possibly astronomically large trial count given in log
// space; switches to Poisson or normal approximations per the occupancy
// sampling regimes.
double draw_binomial_big(double log_m, double p, RandomStream& rng);

// CSV serialization per the external interface: header lines with n and seed,
// then `r,count` rows.
void write_spectrum_csv(std::ostream& os, const BlockSpectrum& spec, std::uint64_t seed);

}  // namespace partsim
