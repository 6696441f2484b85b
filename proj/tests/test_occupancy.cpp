#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "partsim/errors.hpp"
#include "partsim/freq.hpp"
#include "partsim/occupancy.hpp"
#include "partsim/asymptotics.hpp"
#include "partsim/stats.hpp"

using namespace partsim;

namespace {

FrequencySequence atoms(std::vector<AtomGroup> gs, double dust) {
    FrequencySequence seq;
    seq.groups = std::move(gs);
    seq.dust = dust;
    seq.normalize_and_validate();
    return seq;
}

double poisson_pmf(std::uint64_t r, double mean) {
    return std::exp(static_cast<double>(r) * std::log(mean) - mean -
                    std::lgamma(static_cast<double>(r) + 1.0));
}

// Naive per-box Poissonized sampler used as the distributional oracle.
BlockSpectrum naive_poissonized(const FrequencySequence& seq, double t, RandomStream& rng) {
    BlockSpectrum spec;
    unsigned __int128 balls = 0;
    for (const auto& g : seq.groups) {
        for (std::uint64_t b = 0; b < g.count; ++b) {
            const std::uint64_t r = std::poisson_distribution<std::uint64_t>(t * g.value)(rng);
            if (r > 0) {
                ++spec.counts[r];
                balls += r;
            }
        }
    }
    const std::uint64_t dust_balls = std::poisson_distribution<std::uint64_t>(t * seq.dust)(rng);
    if (dust_balls) spec.counts[1] += dust_balls;
    spec.singleton_dust = dust_balls;
    balls += dust_balls;
    spec.sample_size = static_cast<std::uint64_t>(balls);
    return spec;
}

// Exact integral form of Phi via quadrature of t e^{-tx} G(x) over the atom range.
double phi_by_quadrature(const FrequencySequence& seq, double t) {
    // G is constant between consecutive atom values; integrate segment by segment.
    std::vector<double> cuts{0.0};
    for (auto it = seq.groups.rbegin(); it != seq.groups.rend(); ++it) cuts.push_back(it->value);
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        const double a = cuts[i], b = cuts[i + 1];
        if (b <= a) continue;
        const double mid = 0.5 * (a + b);
        const double g = counting_function(seq, mid).as_double();
        if (g == 0.0) continue;
        total += g * adaptive_simpson([t](double x) { return t * std::exp(-t * x); }, a, b, 1e-13);
    }
    return total;
}

FrequencySequence random_sequence(RandomStream& rng, bool with_dust) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::uniform_int_distribution<int> n_groups(1, 12);
    std::uniform_int_distribution<std::uint64_t> mult(1, 9);
    const int k = n_groups(rng);
    std::vector<double> raw(k);
    double total = 0.0;
    for (auto& x : raw) {
        x = unit(rng);
        total += x;
    }
    const double scale = with_dust ? 0.6 + 0.3 * unit(rng) : 1.0;
    std::vector<AtomGroup> gs;
    double mass = 0.0;
    for (double x : raw) {
        AtomGroup g = AtomGroup::exact(1.0, mult(rng));
        const double share = scale * x / total / static_cast<double>(g.count);
        g.value = share;
        g.log_count = std::log(static_cast<double>(g.count));
        mass += g.mass();
        gs.push_back(g);
    }
    FrequencySequence seq;
    seq.groups = std::move(gs);
    seq.dust = 1.0 - mass;
    seq.normalize_and_validate();
    return seq;
}

}  // namespace

TEST_CASE("fixed sampling: degenerate single box") {
    const auto seq = atoms({AtomGroup::exact(1.0, 1)}, 0.0);
    RandomStream rng(3);
    const BlockSpectrum spec = sample_fixed(seq, 7, rng);
    CHECK(spec.sample_size == 7);
    CHECK(spec.count_of(7) == 1);
    CHECK(spec.total_blocks() == 1);
}

TEST_CASE("fixed sampling: pure dust gives singletons") {
    FrequencySequence seq;
    seq.dust = 1.0;
    seq.normalize_and_validate();
    RandomStream rng(4);
    const BlockSpectrum spec = sample_fixed(seq, 5, rng);
    CHECK(spec.count_of(1) == 5);
    CHECK(spec.singleton_dust == 5);
    CHECK(spec.total_blocks() == 5);
}

TEST_CASE("fixed sampling: two boxes of mass 1/2, two balls") {
    // Enumeration oracle: P(same box) = 1/2, P(two singletons) = 1/2.
    const auto seq = atoms({AtomGroup::exact(0.5, 2)}, 0.0);
    RandomStream rng(5);
    const int R = 40000;
    int together = 0;
    for (int i = 0; i < R; ++i) {
        const BlockSpectrum spec = sample_fixed(seq, 2, rng);
        if (spec.count_of(2) == 1) ++together;
    }
    const double se = std::sqrt(0.25 / R);
    CHECK(std::abs(together / double(R) - 0.5) < 4 * se);
}

TEST_CASE("fixed sampling: capacity guard") {
    const auto seq = atoms({AtomGroup::exact(1.0, 1)}, 0.0);
    RandomStream rng(1);
    CHECK_THROWS_AS(sample_fixed(seq, 200000001ULL, rng), capacity_error);
}

TEST_CASE("poissonized sampling: degenerate box matches Poisson pmf") {
    const auto seq = atoms({AtomGroup::exact(1.0, 1)}, 0.0);
    RandomStream rng(6);
    const int R = 50000;
    std::map<std::uint64_t, int> hist;
    for (int i = 0; i < R; ++i) {
        const BlockSpectrum spec = sample_poissonized(seq, 3.0, rng);
        CHECK(spec.total_blocks() <= 1);
        ++hist[spec.sample_size];
    }
    for (std::uint64_t r : {0ull, 1ull, 2ull, 3ull, 5ull, 8ull}) {
        const double expect = poisson_pmf(r, 3.0);
        const double got = hist.count(r) ? hist[r] / double(R) : 0.0;
        const double se = std::sqrt(expect * (1 - expect) / R);
        CHECK(std::abs(got - expect) < 4 * se + 1e-4);
    }
    // E[K_{N,r}] equals phi_r for the degenerate box.
    CHECK(phi_r(seq, 3.0, 2) == doctest::Approx(poisson_pmf(2, 3.0)).epsilon(1e-12));
}

TEST_CASE("poissonized sampling: t -> 0 gives an empty spectrum") {
    const auto seq = atoms({AtomGroup::exact(0.5, 2)}, 0.0);
    RandomStream rng(7);
    const BlockSpectrum spec = sample_poissonized(seq, 1e-12, rng);
    CHECK(spec.sample_size == 0);
    CHECK(spec.counts.empty());
}

TEST_CASE("poissonized sampling: bosz n=2 marked group at t=e^8") {
    // 131 boxes, each Poisson(1): E[# size-2 boxes] = 131 e^-1 / 2.
    const auto seq = atoms({AtomGroup::exact(std::exp(-8.0), 131)}, 1.0 - 131 * std::exp(-8.0));
    const double t = std::exp(8.0);
    const double expect = 131.0 * std::exp(-1.0) / 2.0;
    CHECK(phi_r_groups(std::span<const AtomGroup>(seq.groups), t, 2) ==
          doctest::Approx(expect).epsilon(1e-12));
    RandomStream rng(8);
    std::vector<double> counts2;
    for (int i = 0; i < 10000; ++i) {
        // Dust adds only singletons, so count_of(2) isolates the marked group.
        const BlockSpectrum spec = sample_poissonized(seq, t, rng);
        counts2.push_back(static_cast<double>(spec.count_of(2)));
    }
    const SampleStats s = summarize(counts2);
    CHECK(std::abs(s.mean - expect) < 4 * s.stderr_mean);
}

TEST_CASE("group-level sampling equals naive per-box sampling (chi-square)") {
    // Small sequence (<= 20 boxes); compare the joint spectrum distribution.
    const auto seq = atoms({AtomGroup::exact(0.21, 2), AtomGroup::exact(0.10, 3),
                            AtomGroup::exact(0.04, 5)}, 1.0 - 2 * 0.21 - 3 * 0.10 - 5 * 0.04);
    const double t = 6.0;
    const int R = 100000;
    RandomStream rng_a(11), rng_b(12);
    std::map<std::string, std::pair<int, int>> cells;
    auto key_of = [](const BlockSpectrum& spec) {
        std::string key;
        for (const auto& [r, c] : spec.counts)
            key += std::to_string(r) + ":" + std::to_string(std::min<std::uint64_t>(c, 6)) + ";";
        return key;
    };
    for (int i = 0; i < R; ++i) {
        ++cells[key_of(sample_poissonized(seq, t, rng_a))].first;
        ++cells[key_of(naive_poissonized(seq, t, rng_b))].second;
    }
    // Two-sample chi-square over cells with enough mass.
    double stat = 0.0;
    int dof = -1;
    int small_a = 0, small_b = 0;
    for (const auto& [key, ab] : cells) {
        const double a = ab.first, b = ab.second;
        if (a + b < 40) {
            small_a += ab.first;
            small_b += ab.second;
            continue;
        }
        stat += (a - b) * (a - b) / (a + b);
        ++dof;
    }
    if (small_a + small_b > 40) {
        stat += double(small_a - small_b) * (small_a - small_b) / double(small_a + small_b);
        ++dof;
    }
    REQUIRE(dof >= 1);
    CHECK(chi_square_pvalue(stat, dof) > 0.001);
}

TEST_CASE("poissonized sampling: multinomial path matches means for a large group") {
    // One group with m = 200000 boxes at mean 2.0 exercises the windowed path.
    const double v = 1e-6;
    const auto seq = atoms({AtomGroup::exact(v, 200000)}, 1.0 - 200000 * v);
    const double t = 2.0 / v;
    RandomStream rng(13);
    std::vector<double> k1, k3, ktot;
    for (int i = 0; i < 400; ++i) {
        FrequencySequence no_dust = seq;
        no_dust.dust = 0.0;
        BlockSpectrum spec = sample_poissonized(no_dust, t, rng);
        k1.push_back(static_cast<double>(spec.count_of(1)));
        k3.push_back(static_cast<double>(spec.count_of(3)));
        ktot.push_back(static_cast<double>(spec.total_blocks()));
    }
    FrequencySequence no_dust = seq;
    no_dust.dust = 0.0;
    const SampleStats s1 = summarize(k1), s3 = summarize(k3), st = summarize(ktot);
    CHECK(std::abs(s1.mean - phi_r(no_dust, t, 1)) < 4 * s1.stderr_mean);
    CHECK(std::abs(s3.mean - phi_r(no_dust, t, 3)) < 4 * s3.stderr_mean);
    CHECK(std::abs(st.mean - phi_groups(std::span<const AtomGroup>(no_dust.groups), t)) <
          4 * st.stderr_mean);
}

TEST_CASE("exact mean spectrum: small enumerations") {
    const auto seq = atoms({AtomGroup::exact(0.5, 2)}, 0.0);
    const MeanSpectrum ms = exact_mean_spectrum(seq, 2, 2);
    CHECK(ms.by_size[1] == doctest::Approx(1.0).epsilon(1e-12));  // 2 * C(2,1) * 0.25
    CHECK(ms.by_size[2] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(ms.total == doctest::Approx(1.5).epsilon(1e-12));

    FrequencySequence dust_only;
    dust_only.dust = 1.0;
    dust_only.normalize_and_validate();
    CHECK(exact_mean_spectrum(dust_only, 9, 3).total == doctest::Approx(9.0));
}

TEST_CASE("exact mean spectrum matches fixed-sample Monte Carlo") {
    const auto res = make_power_law(0.5, 10000);
    const std::uint64_t n = 1000;
    const MeanSpectrum ms = exact_mean_spectrum(res.seq, n, 3);
    RandomStream rng(17);
    const int R = 10000;
    std::vector<double> ktot, k2;
    for (int i = 0; i < R; ++i) {
        const BlockSpectrum spec = sample_fixed(res.seq, n, rng);
        ktot.push_back(static_cast<double>(spec.total_blocks()));
        k2.push_back(static_cast<double>(spec.count_of(2)));
    }
    const SampleStats st = summarize(ktot), s2 = summarize(k2);
    CHECK(std::abs(st.mean - ms.total) < 3 * st.stderr_mean);
    CHECK(std::abs(s2.mean - ms.by_size[2]) < 3 * s2.stderr_mean);
}

TEST_CASE("phi: closed form and quadrature oracle") {
    const auto single = atoms({AtomGroup::exact(1.0, 1)}, 0.0);
    CHECK(phi(single, 1.0) == doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-12));
    const auto pair = atoms({AtomGroup::exact(0.5, 2)}, 0.0);
    CHECK(phi(pair, 2.0) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));

    RandomStream rng(19);
    for (int i = 0; i < 10; ++i) {
        const FrequencySequence seq = random_sequence(rng, i % 2 == 1);
        const double t = std::uniform_real_distribution<double>(0.5, 40.0)(rng);
        const double closed = phi(seq, t) - t * seq.dust;  // atom part only
        const double quad = phi_by_quadrature(seq, t);
        CHECK(closed == doctest::Approx(quad).epsilon(1e-8));
    }
    CHECK_THROWS_AS(phi(single, 0.0), std::domain_error);
}

TEST_CASE("phi_r: pmf value and occupied-box partition identity") {
    const auto single = atoms({AtomGroup::exact(1.0, 1)}, 0.0);
    CHECK(phi_r(single, 2.0, 3) == doctest::Approx((8.0 / 6.0) * std::exp(-2.0)).epsilon(1e-12));

    RandomStream rng(23);
    for (int i = 0; i < 8; ++i) {
        const FrequencySequence seq = random_sequence(rng, i % 2 == 0);
        const double t = std::uniform_real_distribution<double>(0.5, 30.0)(rng);
        double sum = 0.0;
        for (std::uint64_t r = 1; r <= 400; ++r) {
            const double term = phi_r(seq, t, r);
            sum += term;
            if (r > 5 * t && term < 1e-14) break;
        }
        CHECK(sum == doctest::Approx(phi(seq, t)).epsilon(1e-10));
    }
}

TEST_CASE("phi_tail ratio approaches one (Poissonized block-size tail)") {
    const auto res = make_power_law(0.5, 100000);
    RandomStream rng(29);
    const std::uint64_t r = 2;
    double prev_gap = 1e9;
    for (double t : {1e3, 1e4}) {
        const int R = 150;
        double mc = 0.0;
        for (int i = 0; i < R; ++i) {
            const BlockSpectrum spec = sample_poissonized(res.seq, t, rng);
            std::uint64_t tail = 0;
            for (const auto& [size, c] : spec.counts)
                if (size >= r) tail += c;
            mc += static_cast<double>(tail);
        }
        mc /= R;
        const double ratio = mc / phi_tail(res.seq, t, r);
        const double gap = std::abs(ratio - 1.0);
        CHECK(gap < 0.05);
        CHECK(gap < prev_gap + 0.02);
        prev_gap = gap;
    }
}

TEST_CASE("low-r sampler agrees with the full sampler in means") {
    const BoszResult bosz = make_example_bosz(2);
    const double t = std::exp(8.0);
    RandomStream rng(31);
    std::vector<double> full_k, low_k, full_2, low_2;
    for (int i = 0; i < 1500; ++i) {
        const BlockSpectrum spec = sample_poissonized(bosz.seq, t, rng);
        full_k.push_back(static_cast<double>(spec.total_blocks()));
        full_2.push_back(static_cast<double>(spec.count_of(2)));
        const LowRSpectrum low = sample_low_r(bosz.seq, t, 3, rng);
        low_k.push_back(low.total_blocks);
        low_2.push_back(low.counts[2]);
    }
    const SampleStats fk = summarize(full_k), lk = summarize(low_k);
    const SampleStats f2 = summarize(full_2), l2 = summarize(low_2);
    CHECK(std::abs(fk.mean - lk.mean) < 4 * std::hypot(fk.stderr_mean, lk.stderr_mean));
    CHECK(std::abs(f2.mean - l2.mean) < 4 * std::hypot(f2.stderr_mean, l2.stderr_mean));
    // Exact anchors.
    CHECK(std::abs(lk.mean - phi(bosz.seq, t)) < 4 * lk.stderr_mean);
    CHECK(std::abs(l2.mean - phi_r(bosz.seq, t, 2)) < 4 * l2.stderr_mean);
}

TEST_CASE("newex marked-block expectation bound at t = n_k") {
    RandomStream rng(37);
    NewexOptions opts;
    opts.base_truncation = 20000;
    const NewexResult res = make_example_newex(0.5, {100, 1000}, rng, opts);
    const auto marked = res.seq.marked_part();
    for (std::size_t k = 0; k < res.realized_r.size(); ++k) {
        const double n = k == 0 ? 100.0 : 1000.0;
        const double pow2 = std::ldexp(1.0, 1 << res.realized_r[k]);
        const double floor_mult = std::floor(pow2 * std::sqrt(n));
        const double bound = floor_mult * (-std::expm1(-1.0 / pow2));
        CHECK(phi_groups(std::span<const AtomGroup>(marked), n) >= bound - 1e-9);
    }
}
