#include "partsim/coalescent.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <stdexcept>

#include "partsim/asymptotics.hpp"
#include "partsim/errors.hpp"

namespace partsim {

LambdaMeasure LambdaMeasure::kingman() { return LambdaMeasure{}; }

LambdaMeasure LambdaMeasure::uniform01() {
    LambdaMeasure m;
    m.kind = Kind::uniform01;
    return m;
}

LambdaMeasure LambdaMeasure::beta(double alpha) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("LambdaMeasure::beta: alpha in (0,1)");
    LambdaMeasure m;
    m.kind = Kind::beta;
    m.alpha = alpha;
    return m;
}

LambdaMeasure LambdaMeasure::custom(std::function<double(double)> density, double total_mass) {
    if (!(total_mass > 0.0)) throw std::domain_error("LambdaMeasure::custom: mass must be positive");
    LambdaMeasure m;
    m.kind = Kind::custom;
    m.density = std::move(density);
    m.total_mass = total_mass;
    return m;
}

namespace {

double log_beta(double a, double b) { return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b); }

}  // namespace

double lambda_rate(const LambdaMeasure& measure, std::uint32_t b, std::uint32_t k) {
    if (k < 2 || k > b) throw std::domain_error("lambda_rate: need 2 <= k <= b");
    const double bd = b, kd = k;
    switch (measure.kind) {
        case LambdaMeasure::Kind::kingman:
            return k == 2 ? 1.0 : 0.0;
        case LambdaMeasure::Kind::uniform01:
            // int x^(k-2) (1-x)^(b-k) dx = B(k-1, b-k+1)
            return std::exp(log_beta(kd - 1.0, bd - kd + 1.0));
        case LambdaMeasure::Kind::beta: {
            const double a = measure.alpha;
            // Beta(alpha, 2-alpha) weight folded in: B(k-2+alpha, b-k+2-alpha)/B(alpha, 2-alpha)
            return std::exp(log_beta(kd - 2.0 + a, bd - kd + 2.0 - a) - log_beta(a, 2.0 - a));
        }
        case LambdaMeasure::Kind::custom: {
            const auto& f = measure.density;
            // Logistic substitution x = 1/(1 + e^{-2s}) absorbs integrable
            // endpoint singularities: dx = 2 x (1-x) ds, and both x and 1-x
            // are evaluated without cancellation.
            const auto integrand = [&](double s) {
                const double x = 1.0 / (1.0 + std::exp(-2.0 * s));
                const double omx = 1.0 / (1.0 + std::exp(2.0 * s));
                return std::pow(x, kd - 2.0) * std::pow(omx, bd - kd) * f(x) * 2.0 * x * omx;
            };
            const double L = 60.0;  // covers endpoint exponents down to ~0.2 at 1e-10
            return adaptive_simpson(integrand, -L, 0.0, 5e-12, 52) +
                   adaptive_simpson(integrand, 0.0, L, 5e-12, 52);
        }
    }
    return 0.0;
}

double lambda_total_rate(const LambdaMeasure& measure, std::uint32_t b) {
    if (b < 2) throw std::domain_error("lambda_total_rate: b must be >= 2");
    const double bd = b;
    switch (measure.kind) {
        case LambdaMeasure::Kind::kingman:
            return 0.5 * bd * (bd - 1.0);
        case LambdaMeasure::Kind::uniform01:
            // C(b,k) B(k-1,b-k+1) = b/(k(k-1)); the sum telescopes to b-1.
            return bd - 1.0;
        default: {
            double total = 0.0;
            for (std::uint32_t k = 2; k <= b; ++k) {
                double log_binom = std::lgamma(bd + 1.0) - std::lgamma((double)k + 1.0) -
                                   std::lgamma(bd - (double)k + 1.0);
                total += std::exp(log_binom) * lambda_rate(measure, b, k);
            }
            return total;
        }
    }
}

LambdaRateCache::LambdaRateCache(const LambdaMeasure& measure, std::uint32_t n_max)
    : measure_(measure) {
    total_.assign(n_max + 1, 0.0);
    term2_.assign(n_max + 1, 0.0);
    switch (measure.kind) {
        case LambdaMeasure::Kind::kingman:
            for (std::uint32_t b = 2; b <= n_max; ++b) {
                term2_[b] = 0.5 * (double)b * (b - 1.0);
                total_[b] = term2_[b];
            }
            break;
        case LambdaMeasure::Kind::uniform01:
            for (std::uint32_t b = 2; b <= n_max; ++b) {
                term2_[b] = (double)b / 2.0;
                total_[b] = (double)b - 1.0;
            }
            break;
        case LambdaMeasure::Kind::beta: {
            const double a = measure.alpha;
            const double lB = log_beta(a, 2.0 - a);
            for (std::uint32_t b = 2; b <= n_max; ++b) {
                const double bd = b;
                // C(b,2) * B(alpha, b-alpha) / B(alpha, 2-alpha)
                double term = 0.5 * bd * (bd - 1.0) *
                              std::exp(std::lgamma(a) + std::lgamma(bd - a) - std::lgamma(bd) - lB);
                term2_[b] = term;
                double sum = term;
                for (std::uint32_t k = 2; k < b; ++k) {
                    term *= (bd - k) * ((double)k - 2.0 + a) /
                            (((double)k + 1.0) * (bd - (double)k + 1.0 - a));
                    sum += term;
                }
                total_[b] = sum;
            }
            break;
        }
        case LambdaMeasure::Kind::custom: {
            custom_rows_.assign(n_max + 1, {});
            for (std::uint32_t b = 2; b <= n_max; ++b) {
                auto& row = custom_rows_[b];
                row.assign(b + 1, 0.0);
                const double bd = b;
                double sum = 0.0;
                for (std::uint32_t k = 2; k <= b; ++k) {
                    const double log_binom = std::lgamma(bd + 1.0) - std::lgamma((double)k + 1.0) -
                                             std::lgamma(bd - (double)k + 1.0);
                    row[k] = std::exp(log_binom) * lambda_rate(measure, b, k);
                    sum += row[k];
                }
                term2_[b] = row[2];
                total_[b] = sum;
            }
            break;
        }
    }
}

double LambdaRateCache::total_rate(std::uint32_t b) const { return total_[b]; }

std::uint32_t LambdaRateCache::sample_merger_size(std::uint32_t b, RandomStream& rng) const {
    if (measure_.kind == LambdaMeasure::Kind::kingman) return 2;
    double u = std::uniform_real_distribution<double>(0.0, 1.0)(rng) * total_[b];
    const double bd = b;
    if (measure_.kind == LambdaMeasure::Kind::custom) {
        const auto& row = custom_rows_[b];
        for (std::uint32_t k = 2; k < b; ++k) {
            u -= row[k];
            if (u <= 0.0) return k;
        }
        return b;
    }
    double term = term2_[b];
    for (std::uint32_t k = 2; k < b; ++k) {
        u -= term;
        if (u <= 0.0) return k;
        if (measure_.kind == LambdaMeasure::Kind::uniform01)
            term = bd / ((double)(k + 1) * (double)k);
        else  // beta
            term *= (bd - k) * ((double)k - 2.0 + measure_.alpha) /
                    (((double)k + 1.0) * (bd - (double)k + 1.0 - measure_.alpha));
    }
    return b;
}

// --- histories -----------------------------------------------------------------

void MergerHistory::validate() const {
    if (n < 2) throw std::logic_error("MergerHistory: n must be >= 2");
    double prev = 0.0;
    std::uint32_t count = n;
    std::uint32_t next_id = n;
    for (const auto& e : events) {
        if (!(e.time > prev)) throw std::logic_error("MergerHistory: times not increasing");
        if (e.participants.size() < 2) throw std::logic_error("MergerHistory: merger of < 2");
        if (e.result != next_id) throw std::logic_error("MergerHistory: unexpected result id");
        prev = e.time;
        count -= static_cast<std::uint32_t>(e.participants.size()) - 1;
        ++next_id;
    }
    if (count != 1) throw std::logic_error("MergerHistory: did not reach a single lineage");
}

MergerHistory simulate_kingman(std::uint32_t n, RandomStream& rng) {
    if (n < 2) throw std::domain_error("simulate_kingman: n must be >= 2");
    MergerHistory h;
    h.n = n;
    h.scale = TimeScale::theta;
    h.level_times.assign(n + 1, 0.0);
    h.events.reserve(n - 1);

    std::vector<std::uint32_t> alive(n);
    for (std::uint32_t i = 0; i < n; ++i) alive[i] = i;
    double t = 0.0;
    std::uint32_t next_id = n;
    for (std::uint32_t b = n; b >= 2; --b) {
        const double rate = 0.5 * (double)b * ((double)b - 1.0);
        t += std::exponential_distribution<double>(rate)(rng);
        const std::uint32_t i = std::uniform_int_distribution<std::uint32_t>(0, b - 1)(rng);
        std::uint32_t j = std::uniform_int_distribution<std::uint32_t>(0, b - 2)(rng);
        if (j >= i) ++j;
        MergeEvent e;
        e.time = t;
        e.participants = {alive[i], alive[j]};
        e.result = next_id++;
        // swap-remove the two participants, append the parent
        const std::uint32_t lo = std::min(i, j), hi = std::max(i, j);
        alive[hi] = alive.back();
        alive.pop_back();
        alive[lo] = alive.back();
        alive.back() = e.result;
        h.level_times[b - 1] = t;
        h.events.push_back(std::move(e));
    }
    return h;
}

MergerHistory simulate_lambda(std::uint32_t n, const LambdaMeasure& measure, RandomStream& rng,
                              const LambdaRateCache* cache) {
    if (n < 2) throw std::domain_error("simulate_lambda: n must be >= 2");
    std::unique_ptr<LambdaRateCache> own;
    if (cache == nullptr) {
        own = std::make_unique<LambdaRateCache>(measure, n);
        cache = own.get();
    }
    MergerHistory h;
    h.n = n;
    h.scale = TimeScale::theta;
    h.level_times.assign(n + 1, 0.0);

    std::vector<std::uint32_t> alive(n);
    for (std::uint32_t i = 0; i < n; ++i) alive[i] = i;
    double t = 0.0;
    std::uint32_t next_id = n;
    std::uint32_t b = n;
    while (b >= 2) {
        const double rate = cache->total_rate(b);
        if (!(rate > 0.0)) throw std::runtime_error("simulate_lambda: zero total merge rate");
        t += std::exponential_distribution<double>(rate)(rng);
        const std::uint32_t k = cache->sample_merger_size(b, rng);
        MergeEvent e;
        e.time = t;
        e.participants.reserve(k);
        for (std::uint32_t pick = 0; pick < k; ++pick) {
            const std::uint32_t i =
                std::uniform_int_distribution<std::uint32_t>(pick, b - 1)(rng);
            std::swap(alive[pick], alive[i]);
            e.participants.push_back(alive[pick]);
        }
        alive.erase(alive.begin(), alive.begin() + k);
        e.result = next_id++;
        alive.push_back(e.result);
        for (std::uint32_t lvl = b - 1; lvl >= b - k + 1; --lvl) h.level_times[lvl] = t;
        b -= k - 1;
        h.events.push_back(std::move(e));
    }
    return h;
}

double growth_time_map(double theta_time, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("growth_time_map: gamma must be positive");
    const double alpha = gamma / (1.0 + gamma);
    return std::pow(1.0 - alpha, -(1.0 - alpha)) * std::pow(theta_time, 1.0 - alpha);
}

double growth_time_map_inverse(double psi_time, double gamma) {
    if (!(gamma > 0.0)) throw std::domain_error("growth_time_map_inverse: gamma must be positive");
    const double alpha = gamma / (1.0 + gamma);
    return std::pow(psi_time, 1.0 / (1.0 - alpha)) * (1.0 - alpha);
}

MergerHistory time_change(const MergerHistory& history, double gamma) {
    if (history.scale != TimeScale::theta)
        throw std::domain_error("time_change: history already in psi time");
    MergerHistory out = history;
    out.scale = TimeScale::psi;
    out.gamma = gamma;
    for (auto& e : out.events) e.time = growth_time_map(e.time, gamma);
    for (auto& u : out.level_times)
        if (u > 0.0) u = growth_time_map(u, gamma);
    return out;
}

MergerHistory time_change_inverse(const MergerHistory& history) {
    if (history.scale != TimeScale::psi)
        throw std::domain_error("time_change_inverse: history not in psi time");
    MergerHistory out = history;
    out.scale = TimeScale::theta;
    const double gamma = history.gamma;
    out.gamma = 0.0;
    for (auto& e : out.events) e.time = growth_time_map_inverse(e.time, gamma);
    for (auto& u : out.level_times)
        if (u > 0.0) u = growth_time_map_inverse(u, gamma);
    return out;
}

double total_length(const MergerHistory& history) {
    return total_length_above(history, 2);
}

double total_length_above(const MergerHistory& history, std::uint32_t k_min) {
    if (k_min < 2) k_min = 2;
    // L = sum_{k=k_min}^n k (U_{k-1} - U_k); skipped levels contribute zero.
    double L = 0.0;
    for (std::uint32_t k = k_min; k <= history.n; ++k)
        L += static_cast<double>(k) * (history.level_times[k - 1] - history.level_times[k]);
    return L;
}

// --- mutations -------------------------------------------------------------------

namespace {

struct LineageSpan {
    double birth = 0.0;
    double death = 0.0;  // time the lineage merges away; root: last event time
};

std::vector<LineageSpan> lineage_spans(const MergerHistory& history) {
    const std::size_t total = history.n + history.events.size();
    std::vector<LineageSpan> spans(total);
    const double end = history.events.empty() ? 0.0 : history.events.back().time;
    for (std::size_t i = 0; i < total; ++i) spans[i].death = end;
    for (const auto& e : history.events) {
        spans[e.result].birth = e.time;
        for (std::uint32_t p : e.participants) spans[p].death = e.time;
    }
    return spans;
}

}  // namespace

MutationSet drop_mutations(const MergerHistory& history, double theta, RandomStream& rng) {
    if (!(theta > 0.0)) throw std::domain_error("drop_mutations: theta must be positive");
    MutationSet out;
    out.theta = theta;
    const auto spans = lineage_spans(history);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint32_t id = 0; id < spans.size(); ++id) {
        const double len = spans[id].death - spans[id].birth;
        if (!(len > 0.0)) continue;
        const std::uint64_t marks = draw_poisson(theta * len, rng);
        for (std::uint64_t m = 0; m < marks; ++m)
            out.records.push_back({id, spans[id].birth + len * unit(rng)});
    }
    return out;
}

BlockSpectrum allelic_partition(const MergerHistory& history, const MutationSet& mutations) {
    const auto spans = lineage_spans(history);
    const std::size_t total_lineages = history.n + history.events.size();

    std::vector<MutationRecord> muts = mutations.records;
    for (const auto& m : muts) {
        if (m.lineage >= total_lineages)
            throw integrity_error("allelic_partition: mutation on unknown lineage");
        if (m.time < spans[m.lineage].birth || m.time > spans[m.lineage].death)
            throw integrity_error("allelic_partition: mutation outside lineage lifetime");
    }
    std::stable_sort(muts.begin(), muts.end(),
                     [](const MutationRecord& a, const MutationRecord& b) { return a.time < b.time; });

    // unassigned[l]: leaves currently on lineage l whose allele is still open.
    std::vector<std::vector<std::uint32_t>> unassigned(total_lineages);
    for (std::uint32_t i = 0; i < history.n; ++i) unassigned[i] = {i};

    BlockSpectrum spec;
    spec.sample_size = history.n;
    std::size_t mi = 0;
    auto absorb_mutations_before = [&](double t) {
        for (; mi < muts.size() && muts[mi].time <= t; ++mi) {
            auto& leaves = unassigned[muts[mi].lineage];
            if (!leaves.empty()) {
                ++spec.counts[leaves.size()];
                leaves.clear();
            }
        }
    };
    for (const auto& e : history.events) {
        absorb_mutations_before(e.time);
        auto& target = unassigned[e.result];
        for (std::uint32_t p : e.participants) {
            auto& src = unassigned[p];
            if (src.size() > target.size()) src.swap(target);
            target.insert(target.end(), src.begin(), src.end());
            src.clear();
            src.shrink_to_fit();
        }
    }
    absorb_mutations_before(std::numeric_limits<double>::infinity());
    const auto& root = unassigned[total_lineages - 1];
    if (!root.empty()) ++spec.counts[root.size()];  // the ancestral allele
    spec.validate();
    return spec;
}

// --- serialization ------------------------------------------------------------------

void write_history(std::ostream& os, const MergerHistory& history) {
    char buf[48];
    os << "# partsim-history n=" << history.n
       << " scale=" << (history.scale == TimeScale::theta ? "theta" : "psi");
    if (history.scale == TimeScale::psi) os << " gamma=" << history.gamma;
    os << "\n";
    for (const auto& e : history.events) {
        std::snprintf(buf, sizeof buf, "%.17g", e.time);
        os << buf;
        for (std::uint32_t p : e.participants) os << '\t' << p;
        os << '\t' << e.result << '\n';
    }
}

void write_mutations(std::ostream& os, const MutationSet& mutations) {
    char buf[48];
    os << "# partsim-mutations theta=" << mutations.theta << "\n";
    for (const auto& m : mutations.records) {
        std::snprintf(buf, sizeof buf, "%.17g", m.time);
        os << m.lineage << '\t' << buf << '\n';
    }
}

}  // namespace partsim
