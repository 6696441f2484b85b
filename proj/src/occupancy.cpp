#include "partsim/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

#include "partsim/errors.hpp"

namespace partsim {

namespace {

constexpr std::uint64_t kPerBoxLimit = 4096;     // below this, sample each box
constexpr double kTailThreshold = 1e-12;         // lump sizes with expected count below this
constexpr double kPoissonNormalCutoff = 1e9;     // normal approximation beyond

double poisson_log_pmf(std::uint64_t r, double mean) {
    return static_cast<double>(r) * std::log(mean) - mean - std::lgamma(static_cast<double>(r) + 1.0);
}

}  // namespace

std::uint64_t BlockSpectrum::total_blocks() const {
    std::uint64_t k = 0;
    for (const auto& [r, c] : counts) k += c;
    return k;
}

std::uint64_t BlockSpectrum::count_of(std::uint64_t r) const {
    const auto it = counts.find(r);
    return it == counts.end() ? 0 : it->second;
}

void BlockSpectrum::validate() const {
    unsigned __int128 balls = 0;
    for (const auto& [r, c] : counts) {
        if (r == 0) throw std::logic_error("BlockSpectrum: zero-size block");
        balls += static_cast<unsigned __int128>(r) * c;
    }
    if (balls != sample_size) throw std::logic_error("BlockSpectrum: sum r*K_r != sample size");
    if (singleton_dust > count_of(1)) throw std::logic_error("BlockSpectrum: dust exceeds singleton count");
}

// --- basic samplers ----------------------------------------------------------

std::uint64_t draw_poisson(double mean, RandomStream& rng) {
    if (mean <= 0.0) return 0;
    if (mean > kPoissonNormalCutoff) {
        std::normal_distribution<double> z;
        const double v = mean + std::sqrt(mean) * z(rng);
        return v <= 0 ? 0 : static_cast<std::uint64_t>(std::llround(v));
    }
    return std::poisson_distribution<std::uint64_t>(mean)(rng);
}

std::uint64_t draw_binomial(std::uint64_t m, double p, RandomStream& rng) {
    if (m == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return m;
    if (p > 0.999) return m - draw_binomial(m, 1.0 - p, rng);
    const double md = static_cast<double>(m);
    const double var = md * p * (1.0 - p);
    if (var > 1e6) {
        std::normal_distribution<double> z;
        const double v = md * p + std::sqrt(var) * z(rng);
        if (v <= 0) return 0;
        if (v >= md) return m;
        return static_cast<std::uint64_t>(std::llround(v));
    }
    if (m > 1000000000ULL && md * p < 1e3) {
        return std::min<std::uint64_t>(m, draw_poisson(md * p, rng));
    }
    return std::binomial_distribution<std::uint64_t>(m, p)(rng);
}

double draw_binomial_big(double log_m, double p, RandomStream& rng) {
    if (p <= 0.0) return 0.0;
    const double mean = std::exp(log_m + std::log(p));
    if (mean < 1e3) return static_cast<double>(draw_poisson(mean, rng));
    std::normal_distribution<double> z;
    const double v = mean + std::sqrt(mean * (1.0 - p)) * z(rng);
    return v <= 0 ? 0.0 : std::round(v);
}

namespace {

// Zero-truncated Poisson draw.
std::uint64_t draw_ztp(double mean, RandomStream& rng) {
    if (mean > 30.0) {
        for (;;) {
            const std::uint64_t r = draw_poisson(mean, rng);
            if (r > 0) return r;
        }
    }
    // Inverse CDF walk on the conditional pmf.
    const double denom = -std::expm1(-mean);
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * denom;
    double pmf = mean * std::exp(-mean);
    std::uint64_t r = 1;
    while (u > pmf && r < 400) {
        u -= pmf;
        ++r;
        pmf *= mean / static_cast<double>(r);
    }
    return r;
}

// Jointly multinomial box sizes for one group of m identical boxes, each box
// Poisson(mean).  Sizes whose expected count falls below kTailThreshold are
// lumped onto the nearest retained size; the walk is a sequential chain of
// conditional binomials, so the joint law is exact up to those lumps.
void sample_group_multinomial(std::uint64_t m, double mean,
                              std::map<std::uint64_t, std::uint64_t>& counts,
                              unsigned __int128& balls, RandomStream& rng) {
    const double md = static_cast<double>(m);
    std::uint64_t r_lo = 0;
    if (mean > 50.0) {
        const double spread = 12.0 * std::sqrt(mean) + 30.0;
        r_lo = static_cast<std::uint64_t>(std::max(0.0, std::floor(mean - spread)));
    }
    // Probability mass strictly below the window; folded into the first cell.
    double below_p = 0.0;
    if (r_lo > 0) {
        double pr = std::exp(poisson_log_pmf(r_lo - 1, mean));
        std::uint64_t rr = r_lo - 1;
        for (;;) {
            below_p += pr;
            if (rr == 0 || md * pr < kTailThreshold) break;
            pr *= static_cast<double>(rr) / mean;  // pmf(rr-1) from pmf(rr)
            --rr;
        }
    }
    std::uint64_t remaining = m;
    double remaining_p = 1.0;
    double pmf = std::exp(poisson_log_pmf(r_lo, mean));
    std::uint64_t r = r_lo;
    bool first = true;
    while (remaining > 0) {
        if (static_cast<double>(r) > mean && md * pmf < kTailThreshold) break;
        const double cell = pmf + (first ? below_p : 0.0);
        first = false;
        const std::uint64_t c =
            draw_binomial(remaining, std::clamp(cell / remaining_p, 0.0, 1.0), rng);
        if (c > 0 && r > 0) {
            counts[r] += c;
            balls += static_cast<unsigned __int128>(r) * c;
        }
        remaining -= c;
        remaining_p = std::max(remaining_p - cell, 1e-300);
        ++r;
        pmf *= mean / static_cast<double>(r);
    }
    // Any leftover boxes sit just past the retained window.
    if (remaining > 0 && r > 0) {
        counts[r] += remaining;
        balls += static_cast<unsigned __int128>(r) * remaining;
    }
}

}  // namespace

// --- fixed-n sampling ----------------------------------------------------------

BlockSpectrum sample_fixed(const FrequencySequence& seq, std::uint64_t n, RandomStream& rng) {
    if (n < 1) throw std::domain_error("sample_fixed: n must be >= 1");
    if (n > 100000000ULL)
        throw capacity_error("sample_fixed: n too large for per-ball sampling; use sample_poissonized");

    // Outcome table: one entry per group plus dust.
    std::vector<double> weights;
    weights.reserve(seq.groups.size() + 1);
    for (const auto& g : seq.groups) weights.push_back(g.mass());
    weights.push_back(std::max(seq.dust, 0.0));
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    std::uniform_real_distribution<double> unit(0.0, 1.0);

    // Per-group occupancy tables keyed by a box index inside the group.
    std::unordered_map<std::uint64_t, std::uint64_t> occupancy;  // (group, box) -> balls
    occupancy.reserve(n * 2);
    std::uint64_t dust_balls = 0;
    const std::size_t dust_slot = seq.groups.size();
    for (std::uint64_t i = 0; i < n; ++i) {
        const std::size_t slot = pick(rng);
        if (slot == dust_slot) {
            ++dust_balls;
            continue;
        }
        const AtomGroup& g = seq.groups[slot];
        std::uint64_t box;
        if (!g.log_only && g.count == 1) {
            box = 0;
        } else if (!g.log_only) {
            box = std::uniform_int_distribution<std::uint64_t>(0, g.count - 1)(rng);
        } else {
            // Astronomically many boxes: a raw 64-bit index is collision-free.
            box = rng();
        }
        // Single shared table keyed by a mixed (group, box) hash; cross-key
        // collisions are ~n^2 / 2^64 and below every tolerance used here.
        ++occupancy[splitmix64(splitmix64(static_cast<std::uint64_t>(slot) + 1) ^ box)];
    }

    BlockSpectrum spec;
    spec.sample_size = n;
    for (const auto& [key, balls] : occupancy) ++spec.counts[balls];
    spec.counts[1] += dust_balls;
    if (spec.counts[1] == 0) spec.counts.erase(1);
    spec.singleton_dust = dust_balls;
    spec.validate();
    return spec;
}

// --- Poissonized sampling --------------------------------------------------------

BlockSpectrum sample_poissonized(const FrequencySequence& seq, double t, RandomStream& rng) {
    if (!(t > 0.0)) throw std::domain_error("sample_poissonized: t must be positive");
    if (t * (seq.atom_mass() + seq.dust) > 5e17)
        throw capacity_error("sample_poissonized: expected ball count overflows; use sample_low_r");

    BlockSpectrum spec;
    unsigned __int128 balls = 0;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& g : seq.groups) {
        const double mean = t * g.value;
        if (!g.log_only && g.count <= kPerBoxLimit) {
            const double p_occ = -std::expm1(-mean);
            for (std::uint64_t b = 0; b < g.count; ++b) {
                if (unit(rng) >= p_occ) continue;
                const std::uint64_t r = draw_ztp(mean, rng);
                ++spec.counts[r];
                balls += r;
            }
        } else if (g.log_only) {
            // Huge multiplicity: expected occupied is modest in every use we
            // support, draw occupied boxes then their conditional sizes.
            const double occ_mean = std::exp(g.log_count + std::log(-std::expm1(-mean)));
            if (occ_mean > 1e7)
                throw capacity_error("sample_poissonized: occupied count too large; use sample_low_r");
            const std::uint64_t occ = draw_poisson(occ_mean, rng);
            for (std::uint64_t b = 0; b < occ; ++b) {
                const std::uint64_t r = draw_ztp(mean, rng);
                ++spec.counts[r];
                balls += r;
            }
        } else {
            sample_group_multinomial(g.count, mean, spec.counts, balls, rng);
        }
    }
    const std::uint64_t dust_balls = draw_poisson(t * seq.dust, rng);
    if (dust_balls > 0) spec.counts[1] += dust_balls;
    balls += dust_balls;
    spec.singleton_dust = dust_balls;
    if (balls > std::numeric_limits<std::uint64_t>::max())
        throw capacity_error("sample_poissonized: realized ball count overflows");
    spec.sample_size = static_cast<std::uint64_t>(balls);
    spec.validate();
    return spec;
}

LowRSpectrum sample_low_r(const FrequencySequence& seq, double t, int r_max, RandomStream& rng) {
    if (!(t > 0.0)) throw std::domain_error("sample_low_r: t must be positive");
    if (r_max < 1) throw std::domain_error("sample_low_r: r_max must be >= 1");
    LowRSpectrum out;
    out.counts.assign(static_cast<std::size_t>(r_max) + 1, 0.0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (const auto& g : seq.groups) {
        const double mean = t * g.value;
        if (!g.log_only && g.count <= kPerBoxLimit) {
            const double p_occ = -std::expm1(-mean);
            for (std::uint64_t b = 0; b < g.count; ++b) {
                if (unit(rng) >= p_occ) continue;
                const std::uint64_t r = draw_ztp(mean, rng);
                out.total_blocks += 1.0;
                if (r <= static_cast<std::uint64_t>(r_max)) out.counts[r] += 1.0;
            }
            continue;
        }
        const double p_occ = -std::expm1(-mean);
        if (g.log_only) {
            out.total_blocks += draw_binomial_big(g.log_count, p_occ, rng);
            for (int r = 1; r <= r_max; ++r)
                out.counts[r] += draw_binomial_big(g.log_count, std::exp(poisson_log_pmf(r, mean)), rng);
        } else {
            out.total_blocks += static_cast<double>(draw_binomial(g.count, p_occ, rng));
            for (int r = 1; r <= r_max; ++r) {
                const double pr = std::exp(poisson_log_pmf(static_cast<std::uint64_t>(r), mean));
                if (static_cast<double>(g.count) * pr < kTailThreshold) continue;
                out.counts[r] += static_cast<double>(draw_binomial(g.count, pr, rng));
            }
        }
    }
    out.singleton_dust = static_cast<double>(draw_poisson(t * seq.dust, rng));
    out.counts[1] += out.singleton_dust;
    out.total_blocks += out.singleton_dust;
    return out;
}

// --- exact functionals -------------------------------------------------------------

MeanSpectrum exact_mean_spectrum(const FrequencySequence& seq, std::uint64_t n, int r_max) {
    if (n < 1) throw std::domain_error("exact_mean_spectrum: n must be >= 1");
    if (r_max < 1) throw std::domain_error("exact_mean_spectrum: r_max must be >= 1");
    MeanSpectrum out;
    out.by_size.assign(static_cast<std::size_t>(r_max) + 1, 0.0);
    const double nd = static_cast<double>(n);
    const double lg_n1 = std::lgamma(nd + 1.0);
    long double total = 0;
    for (const auto& g : seq.groups) {
        const double v = g.value;
        if (v >= 1.0) {  // degenerate single box holding every ball
            total += g.count_as_double();
            if (n <= static_cast<std::uint64_t>(r_max)) out.by_size[n] += g.count_as_double();
            continue;
        }
        const double log_q = std::log1p(-v);
        total += std::exp(g.log_count + std::log(-std::expm1(nd * log_q)));
        const std::uint64_t top = std::min<std::uint64_t>(r_max, n);
        for (std::uint64_t r = 1; r <= top; ++r) {
            const double rd = static_cast<double>(r);
            const double log_binom = lg_n1 - std::lgamma(rd + 1.0) - std::lgamma(nd - rd + 1.0);
            out.by_size[r] += std::exp(g.log_count + log_binom + rd * std::log(v) + (nd - rd) * log_q);
        }
    }
    // Dust balls are singletons; expected count is n * dust.
    out.by_size[1] += nd * seq.dust;
    total += nd * seq.dust;
    out.total = static_cast<double>(total);
    return out;
}

double phi_groups(std::span<const AtomGroup> groups, double t) {
    if (!(t > 0.0)) throw std::domain_error("phi: t must be positive");
    long double s = 0;
    for (const auto& g : groups)
        s += expl((long double)g.log_count + logl((long double)-std::expm1(-t * g.value)));
    return static_cast<double>(s);
}

double phi(const FrequencySequence& seq, double t) {
    return phi_groups(std::span<const AtomGroup>(seq.groups), t) + t * seq.dust;
}

double phi_r_groups(std::span<const AtomGroup> groups, double t, std::uint64_t r) {
    if (!(t > 0.0)) throw std::domain_error("phi_r: t must be positive");
    if (r < 1) throw std::domain_error("phi_r: r must be >= 1");
    long double s = 0;
    for (const auto& g : groups) {
        const double mean = t * g.value;
        s += expl((long double)(g.log_count + poisson_log_pmf(r, mean)));
    }
    return static_cast<double>(s);
}

double phi_r(const FrequencySequence& seq, double t, std::uint64_t r) {
    double s = phi_r_groups(std::span<const AtomGroup>(seq.groups), t, r);
    if (r == 1) s += t * seq.dust;  // dust boxes hold exactly one ball each
    return s;
}

double phi_tail(const FrequencySequence& seq, double t, std::uint64_t r) {
    double s = phi(seq, t);
    for (std::uint64_t k = 1; k < r; ++k) s -= phi_r(seq, t, k);
    return s;
}

void write_spectrum_csv(std::ostream& os, const BlockSpectrum& spec, std::uint64_t seed) {
    os << "# n=" << spec.sample_size << ",seed=" << seed
       << ",singleton_dust=" << spec.singleton_dust << "\n";
    os << "r,count\n";
    for (const auto& [r, c] : spec.counts) os << r << ',' << c << '\n';
}

}  // namespace partsim
