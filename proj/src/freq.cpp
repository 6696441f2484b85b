#include "partsim/freq.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "partsim/errors.hpp"

namespace partsim {

namespace {

constexpr double kMassTol = 1e-12;
constexpr std::uint64_t kExactLimit = std::uint64_t(1) << 62;

double log_add(double a, double b) {
    if (a == -std::numeric_limits<double>::infinity()) return b;
    if (b == -std::numeric_limits<double>::infinity()) return a;
    double hi = std::max(a, b), lo = std::min(a, b);
    return hi + std::log1p(std::exp(lo - hi));
}

}  // namespace

AtomGroup AtomGroup::exact(double value, std::uint64_t count, bool marked) {
    AtomGroup g;
    g.value = value;
    g.count = count;
    g.log_count = std::log(static_cast<double>(count));
    g.log_only = false;
    g.marked = marked;
    return g;
}

AtomGroup AtomGroup::logspace(double value, double log_count, bool marked) {
    AtomGroup g;
    g.value = value;
    g.count = 0;
    g.log_count = log_count;
    g.log_only = true;
    g.marked = marked;
    return g;
}

double AtomGroup::count_as_double() const {
    return log_only ? std::exp(log_count) : static_cast<double>(count);
}

double AtomGroup::mass() const {
    if (log_only) return std::exp(log_count + std::log(value));
    return value * static_cast<double>(count);
}

double FrequencySequence::atom_mass() const {
    long double s = 0;
    for (const auto& g : groups) s += g.mass();
    return static_cast<double>(s);
}

double FrequencySequence::total_boxes() const {
    long double s = 0;
    for (const auto& g : groups) s += g.count_as_double();
    return static_cast<double>(s);
}

std::vector<AtomGroup> FrequencySequence::marked_part() const {
    std::vector<AtomGroup> out;
    for (const auto& g : groups)
        if (g.marked) out.push_back(g);
    return out;
}

std::vector<AtomGroup> FrequencySequence::unmarked_part() const {
    std::vector<AtomGroup> out;
    for (const auto& g : groups)
        if (!g.marked) out.push_back(g);
    return out;
}

void FrequencySequence::normalize_and_validate() {
    std::stable_sort(groups.begin(), groups.end(), [](const AtomGroup& a, const AtomGroup& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.marked < b.marked;
    });
    // Merge runs with identical (value, marked).
    std::vector<AtomGroup> merged;
    merged.reserve(groups.size());
    for (const auto& g : groups) {
        if (!merged.empty() && merged.back().value == g.value && merged.back().marked == g.marked) {
            AtomGroup& m = merged.back();
            if (!m.log_only && !g.log_only && m.count <= kExactLimit - g.count) {
                m.count += g.count;
                m.log_count = std::log(static_cast<double>(m.count));
            } else {
                m.log_count = log_add(m.log_count, g.log_count);
                m.log_only = true;
                m.count = 0;
            }
        } else {
            merged.push_back(g);
        }
    }
    groups = std::move(merged);
    if (dust < 0.0) {
        if (dust < -kMassTol) throw std::invalid_argument("FrequencySequence: negative dust");
        dust = 0.0;
    }
    validate();
}

void FrequencySequence::validate() const {
    double prev = std::numeric_limits<double>::infinity();
    bool prev_marked = false;
    for (const auto& g : groups) {
        if (!(g.value > 0.0) || g.value > 1.0)
            throw std::invalid_argument("FrequencySequence: atom value outside (0,1]");
        if (!g.log_only && g.count < 1)
            throw std::invalid_argument("FrequencySequence: multiplicity < 1");
        if (g.value > prev || (g.value == prev && g.marked == prev_marked))
            throw std::invalid_argument("FrequencySequence: groups not strictly decreasing");
        prev = g.value;
        prev_marked = g.marked;
    }
    if (dust < 0.0) throw std::invalid_argument("FrequencySequence: negative dust");
    const double total = atom_mass() + dust;
    if (std::abs(total - 1.0) > 1e-11)
        throw std::invalid_argument("FrequencySequence: mass " + std::to_string(total) + " != 1");
}

bool check_slowly_varying(const SlowlyVaryingFn& ell, double t_lo, double t_hi, int points,
                          double final_tol) {
    // Trend surrogate: the deviation of ell(ct)/ell(t) from 1 must shrink
    // materially along the grid, or already sit below final_tol throughout.
    const double step = std::pow(t_hi / t_lo, 1.0 / (points - 1));
    for (double c : {2.0, 10.0}) {
        double first_dev = -1.0, last_dev = -1.0;
        double t = t_lo;
        for (int i = 0; i < points; ++i, t *= step) {
            const double v = ell.eval(t);
            if (!(v > 0.0)) return false;
            const double dev = std::abs(ell.eval(c * t) / v - 1.0);
            if (first_dev < 0) first_dev = dev;
            if (dev > first_dev + final_tol) return false;  // moving away from 1
            last_dev = dev;
        }
        if (last_dev > final_tol && last_dev > 0.7 * first_dev) return false;
    }
    return true;
}

// --- power law ---------------------------------------------------------------

namespace {

PowerLawResult build_power_law(double alpha, std::uint64_t truncation, bool infinite_norm) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("make_power_law: alpha must be in (0,1)");
    if (truncation < 1) throw std::invalid_argument("make_power_law: truncation must be >= 1");
    const std::uint64_t J = truncation;
    const long double inv_alpha = 1.0L / static_cast<long double>(alpha);

    std::vector<long double> w(J);
    long double Z = 0;
    for (std::uint64_t j = 1; j <= J; ++j) {
        w[j - 1] = powl(static_cast<long double>(j), -inv_alpha);
        Z += w[j - 1];
    }
    long double tail = 0;
    if (infinite_norm) {
        // Euler-Maclaurin for sum_{j>J} j^(-s); the J^-s-3 remainder is negligible.
        const long double Jl = static_cast<long double>(J);
        tail = powl(Jl, 1.0L - inv_alpha) / (inv_alpha - 1.0L) - 0.5L * powl(Jl, -inv_alpha) +
               inv_alpha / 12.0L * powl(Jl, -inv_alpha - 1.0L);
        Z += tail;
    }

    PowerLawResult out;
    out.normalizer = static_cast<double>(Z);
    out.tail_mass = static_cast<double>(tail / Z);
    out.seq.groups.reserve(J);
    long double mass = 0;
    for (std::uint64_t j = 1; j <= J; ++j) {
        const long double p = w[j - 1] / Z;
        mass += p;
        out.seq.groups.push_back(AtomGroup::exact(static_cast<double>(p), 1));
    }
    out.seq.dust = infinite_norm ? static_cast<double>(1.0L - mass) : 0.0;
    {
        std::ostringstream p;
        p << "powerlaw alpha=" << alpha << " J=" << J << " Z=" << out.normalizer
          << (infinite_norm ? " tail_as_dust" : "");
        out.seq.provenance = p.str();
    }
    out.seq.normalize_and_validate();

    const double ell_const = std::pow(out.normalizer, -alpha);
    out.ell.eval = [ell_const](double) { return ell_const; };
    out.ell.label = "const Z^-alpha";
    out.ell.integrated = std::nullopt;
    return out;
}

}  // namespace

PowerLawResult make_power_law(double alpha, std::uint64_t truncation) {
    return build_power_law(alpha, truncation, false);
}

PowerLawResult make_power_law_infinite(double alpha, std::uint64_t truncation) {
    return build_power_law(alpha, truncation, true);
}

// --- log law -----------------------------------------------------------------

namespace {

// x (log x)^2, increasing on (0, e^-2].
double loglaw_h(double x) {
    const double l = std::log(x);
    return x * l * l;
}

double loglaw_invert(double target) {
    const double hi0 = std::exp(-2.0);
    if (target >= loglaw_h(hi0)) return hi0;
    double lo = 1e-280, hi = hi0;
    int it = 0;
    for (;;) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;  // interval exhausted at double precision
        if (++it > 200) throw std::runtime_error("make_log_law: bisection did not converge");
        (loglaw_h(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

}  // namespace

LogLawResult make_log_law(std::uint64_t truncation) {
    if (truncation < 1) throw std::invalid_argument("make_log_law: truncation must be >= 1");
    LogLawResult out;
    out.seq.groups.reserve(truncation);
    long double mass = 0;
    for (std::uint64_t j = 1; j <= truncation; ++j) {
        const double q = loglaw_invert(1.0 / static_cast<double>(j));
        mass += q;
        out.seq.groups.push_back(AtomGroup::exact(q, 1));
    }
    out.seq.dust = static_cast<double>(1.0L - mass);
    {
        std::ostringstream p;
        p << "loglaw J=" << truncation << " scale=1 atom_mass=" << static_cast<double>(mass);
        out.seq.provenance = p.str();
    }
    out.seq.normalize_and_validate();

    out.ell.eval = [](double t) {
        if (!(t > 1.0)) throw std::domain_error("loglaw ell: t must exceed 1");
        const double l = std::log(t);
        return 1.0 / (l * l);
    };
    out.ell.label = "(log t)^-2";
    out.ell.integrated = [](double t) {
        if (!(t > 1.0)) throw std::domain_error("loglaw ell1: t must exceed 1");
        return 1.0 / std::log(t);
    };
    return out;
}

// --- randomized marked-scale counterexample ------------------------------------

NewexBase make_newex_base(double alpha, std::uint64_t truncation) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("make_newex_base: alpha in (0,1)");
    if (truncation < 10) throw std::invalid_argument("make_newex_base: truncation too small");
    const long double inv_alpha = 1.0L / static_cast<long double>(alpha);

    // Smallest j0 with sum_{j>j0} j^(-1/alpha) < 1/2; start from the integral
    // bound and refine by direct summation plus an integral tail.
    auto tail_mass = [&](std::uint64_t j0) {
        long double s = 0;
        const std::uint64_t big = j0 + 2000000;
        for (std::uint64_t j = j0 + 1; j <= big; ++j) s += powl((long double)j, -inv_alpha);
        s += powl((long double)big, 1.0L - inv_alpha) / (inv_alpha - 1.0L);
        return s;
    };
    std::uint64_t j0 = static_cast<std::uint64_t>(
        std::ceil(std::pow(2.0 / (1.0 / alpha - 1.0), alpha / (1.0 - alpha))));
    while (tail_mass(j0) >= 0.5L) ++j0;

    NewexBase base;
    base.alpha = alpha;
    base.j0 = j0;
    base.groups.reserve(truncation);
    long double mass = 0;
    for (std::uint64_t j = j0 + 1; j <= j0 + truncation; ++j) {
        const double v = static_cast<double>(powl((long double)j, -inv_alpha));
        base.groups.push_back(AtomGroup::exact(v, 1));
        mass += v;
    }
    base.mass = static_cast<double>(mass);
    return base;
}

NewexResult make_example_newex(double alpha, const std::vector<std::uint64_t>& scale_schedule,
                               RandomStream& rng, const NewexOptions& opts) {
    return make_example_newex(make_newex_base(alpha, opts.base_truncation), scale_schedule, rng, opts);
}

NewexResult make_example_newex(const NewexBase& base, const std::vector<std::uint64_t>& scale_schedule,
                               RandomStream& rng, const NewexOptions& opts) {
    if (scale_schedule.empty()) throw std::invalid_argument("make_example_newex: empty schedule");
    for (std::size_t i = 1; i < scale_schedule.size(); ++i)
        if (scale_schedule[i] <= scale_schedule[i - 1])
            throw std::invalid_argument("make_example_newex: schedule must be strictly increasing");

    NewexResult out;
    out.alpha = base.alpha;
    out.base_j0 = base.j0;
    out.seq.groups = base.groups;
    long double mass = base.mass;

    const double ln2 = std::log(2.0);
    for (std::size_t idx = 0; idx < scale_schedule.size(); ++idx) {
        const double n = static_cast<double>(scale_schedule[idx]);
        // Largest r with n * 2^(2^r) still comfortably representable.
        const double max_pow = (std::log(1e250) - std::log(n)) / ln2;
        int r_cap = 0;
        while ((1 << (r_cap + 1)) <= max_pow && r_cap + 1 <= opts.r_max) ++r_cap;
        if (r_cap < 1)
            throw std::runtime_error("make_example_newex: atom underflow at schedule index " +
                                     std::to_string(idx));
        const int r = std::uniform_int_distribution<int>(1, r_cap)(rng);
        const double pow2 = std::ldexp(1.0, 1 << r);  // 2^(2^r)
        const double v = 1.0 / (n * pow2);
        const double log_mult = (double)(1 << r) * ln2 + base.alpha * std::log(n);
        const double mult_d = pow2 * std::pow(n, base.alpha);
        out.realized_r.push_back(r);
        out.marked_value.push_back(v);
        if (mult_d < static_cast<double>(std::uint64_t(1) << 62)) {
            // Nudge by an ulp so analytically integral products do not floor down.
            const long double prod = (long double)pow2 *
                                     powl((long double)n, (long double)base.alpha);
            const std::uint64_t m = static_cast<std::uint64_t>(floorl(prod * (1.0L + 3e-19L)));
            out.seq.groups.push_back(AtomGroup::exact(v, m, true));
            out.marked_log_mult.push_back(std::log((double)m));
            mass += (long double)v * (long double)m;
        } else {
            out.seq.groups.push_back(AtomGroup::logspace(v, log_mult, true));
            out.marked_log_mult.push_back(log_mult);
            mass += expl((long double)log_mult + logl((long double)v));
        }
    }

    const long double remainder = 1.0L - mass;
    if (remainder <= 0)
        throw std::invalid_argument("make_example_newex: schedule leaves no remainder mass");
    out.seq.groups.push_back(AtomGroup::exact(static_cast<double>(remainder), 1));
    out.seq.dust = 0.0;
    {
        std::ostringstream p;
        p << "newex alpha=" << base.alpha << " j0=" << base.j0 << " R=[";
        for (std::size_t i = 0; i < out.realized_r.size(); ++i)
            p << (i ? "," : "") << out.realized_r[i];
        p << "] schedule=[";
        for (std::size_t i = 0; i < scale_schedule.size(); ++i)
            p << (i ? "," : "") << scale_schedule[i];
        p << "]";
        out.seq.provenance = p.str();
    }
    out.seq.normalize_and_validate();
    return out;
}

// --- deterministic marked-scale counterexample ---------------------------------

BoszResult make_example_bosz(int n_max, std::uint64_t truncation) {
    if (n_max < 2 || n_max > 5) throw std::invalid_argument("make_example_bosz: n_max must be in [2,5]");
    const double cube = static_cast<double>(n_max) * n_max * n_max;
    const double L_min = cube + 5.0;          // base reaches down to e^-(n^3+5)
    if (truncation == 0) truncation = std::max<std::uint64_t>(1500, (std::uint64_t)(L_min * 60));

    BoszResult out;
    out.n_max = n_max;

    // Run-length-encoded base whose counting function g satisfies
    // x (log x)^2 g(x) -> 1: cumulative count at level x is round(1/(x log^2 x)).
    const double x_top = std::exp(-2.0);
    const double log_step = (L_min - 2.0) / static_cast<double>(truncation);
    long double mass = 0;
    long double prev_cum = 0;
    std::vector<AtomGroup> base;
    for (std::uint64_t i = 1; i <= truncation; ++i) {
        const double lx = -(2.0 + log_step * static_cast<double>(i));
        const double x = std::exp(lx);
        const long double cum = roundl(1.0L / ((long double)x * lx * lx));
        if (cum <= prev_cum) continue;
        const long double m = cum - prev_cum;
        prev_cum = cum;
        if (m < (long double)kExactLimit)
            base.push_back(AtomGroup::exact(x, (std::uint64_t)m));
        else
            base.push_back(AtomGroup::logspace(x, (double)logl(m)));
        mass += (long double)x * m;
    }
    (void)x_top;
    // Ideal tail below the deepest level, kept as dust: each ball landing there
    // is a singleton at the scales this sequence is used for.
    const double dust = 1.0 / L_min - 1.0 / (L_min * L_min);
    mass += dust;

    // Marked groups e^{-n^3} with multiplicity floor(n^{-9/2} e^{n^3}).
    const long double zeta_92 = [] {  // sum_{n>=2} n^{-9/2}
        long double s = 0;
        for (int n = 2; n <= 200000; ++n) s += powl((long double)n, -4.5L);
        return s;
    }();
    // Step 2: drop leading base levels until base mass fits under 1 - sum n^{-9/2}.
    std::size_t first = 0;
    while (mass >= 1.0L - zeta_92 && first < base.size()) {
        mass -= base[first].mass();
        ++first;
    }
    base.erase(base.begin(), base.begin() + (std::ptrdiff_t)first);

    std::vector<AtomGroup> groups = std::move(base);
    for (int n = 2; n <= n_max; ++n) {
        const long double c = (long double)n * n * n;
        const long double log_m = c - 4.5L * logl((long double)n);
        const double v = (double)expl(-c);
        out.marked_value.push_back(v);
        out.marked_log_mult.push_back((double)log_m);
        if (log_m < 42.0) {  // e^42 ~ 1.7e18, safely exact
            const std::uint64_t m = (std::uint64_t)floorl(expl(log_m) * (1.0L + 3e-19L));
            groups.push_back(AtomGroup::exact(v, m, true));
            mass += (long double)v * m;
            out.marked_log_mult.back() = std::log((double)m);
        } else {
            groups.push_back(AtomGroup::logspace(v, (double)log_m, true));
            mass += expl(log_m + logl((long double)v));
        }
    }

    const long double remainder = 1.0L - mass;
    if (remainder <= 0) throw std::runtime_error("make_example_bosz: mass bookkeeping failed");
    groups.push_back(AtomGroup::exact((double)remainder, 1));

    out.seq.groups = std::move(groups);
    out.seq.dust = dust;
    {
        std::ostringstream p;
        p << "bosz n_max=" << n_max << " levels=" << truncation << " dust=" << dust;
        out.seq.provenance = p.str();
    }
    out.seq.normalize_and_validate();
    return out;
}

// --- counting function --------------------------------------------------------

double BlockCount::as_double() const {
    return exact ? static_cast<double>(count) : std::exp(log_count);
}

void BlockCount::add_exact(std::uint64_t c) {
    if (exact && count <= kExactLimit - c) {
        count += c;
        log_count = count ? std::log(static_cast<double>(count)) : -std::numeric_limits<double>::infinity();
    } else {
        add_log(std::log(static_cast<double>(c)));
    }
}

void BlockCount::add_log(double log_c) {
    if (exact) {
        exact = false;
        log_count = count ? std::log(static_cast<double>(count)) : -std::numeric_limits<double>::infinity();
        count = 0;
    }
    log_count = log_add(log_count, log_c);
}

BlockCount counting_function(std::span<const AtomGroup> groups, double x) {
    if (!(x > 0.0)) throw std::domain_error("counting_function: x must be positive");
    BlockCount total;
    total.log_count = -std::numeric_limits<double>::infinity();
    for (const auto& g : groups) {
        if (g.value < x) continue;  // groups may be unsorted when filtered views are passed
        if (g.log_only)
            total.add_log(g.log_count);
        else
            total.add_exact(g.count);
    }
    return total;
}

BlockCount counting_function(const FrequencySequence& seq, double x) {
    return counting_function(std::span<const AtomGroup>(seq.groups), x);
}

// --- serialization -------------------------------------------------------------

void write_sequence(std::ostream& os, const FrequencySequence& seq) {
    char buf[64];
    os << "# partsim-freq v1\n";
    os << "# provenance: " << seq.provenance << "\n";
    std::snprintf(buf, sizeof buf, "%.17g", seq.dust);
    os << "# dust: " << buf << "\n";
    for (const auto& g : seq.groups) {
        std::snprintf(buf, sizeof buf, "%.17g", g.value);
        os << buf << '\t';
        if (g.log_only) {
            std::snprintf(buf, sizeof buf, "log:%.17g", g.log_count);
            os << buf;
        } else {
            os << g.count;
        }
        if (g.marked) os << "\t*";
        os << '\n';
    }
}

FrequencySequence read_sequence(std::istream& is) {
    FrequencySequence seq;
    std::string line;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        if (line[0] == '#') {
            const auto prov = line.find("provenance: ");
            if (prov != std::string::npos) seq.provenance = line.substr(prov + 12);
            const auto dust = line.find("dust: ");
            if (dust != std::string::npos) seq.dust = std::stod(line.substr(dust + 6));
            continue;
        }
        std::istringstream row(line);
        std::string value_s, mult_s, mark_s;
        row >> value_s >> mult_s;
        row >> mark_s;
        const double value = std::stod(value_s);
        const bool marked = mark_s == "*";
        if (mult_s.rfind("log:", 0) == 0)
            seq.groups.push_back(AtomGroup::logspace(value, std::stod(mult_s.substr(4)), marked));
        else
            seq.groups.push_back(AtomGroup::exact(value, std::stoull(mult_s), marked));
    }
    seq.normalize_and_validate();
    return seq;
}

void save_sequence(const std::string& path, const FrequencySequence& seq) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open for writing: " + path);
    write_sequence(os, seq);
    if (!os.good()) throw std::runtime_error("write failed: " + path);
}

FrequencySequence load_sequence(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw std::runtime_error("cannot open: " + path);
    return read_sequence(is);
}

}  // namespace partsim
