#include "partsim/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace partsim {

namespace {

// Lanczos approximation, g = 7, 9 terms.
constexpr double kLanczosG = 7.0;
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos_sum(double x) {  // x >= 0.5, series evaluated at x - 1
    double s = kLanczos[0];
    for (int i = 1; i < 9; ++i) s += kLanczos[i] / (x - 1.0 + i);
    return s;
}

}  // namespace

double gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma_fn: x must be positive");
    if (x < 0.5) return gamma_fn(x + 1.0) / x;
    const double t = x + kLanczosG - 0.5;
    return std::sqrt(2.0 * std::numbers::pi) * std::pow(t, x - 0.5) * std::exp(-t) * lanczos_sum(x);
}

double log_gamma_fn(double x) {
    if (!(x > 0.0)) throw std::domain_error("log_gamma_fn: x must be positive");
    if (x < 0.5) return log_gamma_fn(x + 1.0) - std::log(x);
    const double t = x + kLanczosG - 0.5;
    return 0.5 * std::log(2.0 * std::numbers::pi) + (x - 0.5) * std::log(t) - t +
           std::log(lanczos_sum(x));
}

KarlinConstants karlin_constants(double alpha, std::uint64_t r) {
    if (!(alpha > 0.0) || !(alpha < 1.0)) throw std::domain_error("karlin_constants: alpha in (0,1)");
    if (r < 1) throw std::domain_error("karlin_constants: r must be >= 1");
    KarlinConstants out;
    out.c_total = gamma_fn(1.0 - alpha);
    const double rd = static_cast<double>(r);
    out.c_size = std::exp(std::log(alpha) + log_gamma_fn(rd - alpha) - log_gamma_fn(rd + 1.0));
    return out;
}

LimitTarget powerlaw_target(double alpha, double ell_const, std::uint64_t r) {
    LimitTarget t;
    t.model = "powerlaw";
    t.r = r;
    t.scaling = [alpha, ell_const](double n) { return std::pow(n, alpha) * ell_const; };
    t.scaling_label = "n^alpha * ell";
    if (r == 0) {
        t.statistic = Statistic::total_blocks;
        t.statistic_label = "K_n";
        t.constant = karlin_constants(alpha, 1).c_total;
    } else {
        t.statistic = Statistic::size_r;
        t.statistic_label = "K_n," + std::to_string(r);
        t.constant = karlin_constants(alpha, r).c_size;
    }
    return t;
}

LimitTarget loglaw_targets(std::uint64_t r) {
    LimitTarget t;
    t.model = "loglaw";
    t.r = r;
    if (r <= 1) {
        t.statistic = r == 0 ? Statistic::total_blocks : Statistic::size_r;
        t.statistic_label = r == 0 ? "K_n" : "K_n,1";
        t.scaling = [](double n) { return n / std::log(n); };
        t.scaling_label = "n/log n";
        t.constant = 1.0;
    } else {
        t.statistic = Statistic::size_r;
        t.statistic_label = "K_n," + std::to_string(r);
        t.scaling = [](double n) { const double l = std::log(n); return n / (l * l); };
        t.scaling_label = "n/log^2 n";
        t.constant = 1.0 / (static_cast<double>(r) * static_cast<double>(r - 1));
    }
    return t;
}

LimitTarget coalescent_targets(CoalescentLaw law, double theta, double alpha_or_gamma,
                               std::uint64_t r) {
    if (!(theta > 0.0)) throw std::domain_error("coalescent_targets: theta must be positive");
    LimitTarget t;
    t.r = r;
    const auto power_scaling = [](double alpha) {
        return [alpha](double n) { return std::pow(n, alpha); };
    };
    switch (law) {
        case CoalescentLaw::beta_blocks: {
            const double a = alpha_or_gamma;
            if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("beta: alpha in (0,1)");
            t.model = "beta";
            t.statistic = Statistic::total_blocks;
            t.statistic_label = "K_n";
            t.scaling = power_scaling(a);
            t.scaling_label = "n^alpha";
            t.constant = theta * (2.0 - a) * (1.0 - a) * gamma_fn(2.0 - a) / a;
            break;
        }
        case CoalescentLaw::beta_size_r: {
            const double a = alpha_or_gamma;
            if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("beta: alpha in (0,1)");
            if (r < 1) throw std::domain_error("beta_size_r: r >= 1");
            t.model = "beta";
            t.statistic = Statistic::size_r;
            t.statistic_label = "K_n," + std::to_string(r);
            t.scaling = power_scaling(a);
            t.scaling_label = "n^alpha";
            t.constant = theta * (2.0 - a) * (1.0 - a) * (1.0 - a) *
                         std::exp(log_gamma_fn(static_cast<double>(r) - a) -
                                  log_gamma_fn(static_cast<double>(r) + 1.0));
            break;
        }
        case CoalescentLaw::bosz_blocks: {
            t.model = "uniform";
            t.statistic = Statistic::total_blocks;
            t.statistic_label = "K_n";
            t.scaling = [](double n) { return n / std::log(n); };
            t.scaling_label = "n/log n";
            t.constant = theta;
            break;
        }
        case CoalescentLaw::bosz_size_r: {
            if (r < 2) throw std::domain_error("bosz_size_r: r >= 2");
            t.model = "uniform";
            t.statistic = Statistic::size_r;
            t.statistic_label = "K_n," + std::to_string(r);
            t.scaling = [](double n) { const double l = std::log(n); return n / (l * l); };
            t.scaling_label = "n/log^2 n";
            t.constant = theta / (static_cast<double>(r) * static_cast<double>(r - 1));
            break;
        }
        case CoalescentLaw::growpop_blocks:
        case CoalescentLaw::growpop_length:
        case CoalescentLaw::growpop_mutations: {
            const double gamma = alpha_or_gamma;
            if (!(gamma > 0.0)) throw std::domain_error("growpop: gamma must be positive");
            const double a = gamma / (1.0 + gamma);
            t.model = "growpop";
            t.statistic = law == CoalescentLaw::growpop_blocks ? Statistic::total_blocks
                          : law == CoalescentLaw::growpop_length ? Statistic::tree_length
                                                                 : Statistic::mutations;
            t.statistic_label = law == CoalescentLaw::growpop_blocks ? "K_n"
                                : law == CoalescentLaw::growpop_length ? "L_n"
                                                                       : "S_n";
            t.scaling = power_scaling(a);
            t.scaling_label = "n^alpha";
            const double front = law == CoalescentLaw::growpop_length ? 1.0 : theta;
            t.constant = front * std::pow(2.0, 1.0 - a) * std::pow(1.0 - a, a) * std::numbers::pi /
                         std::sin(std::numbers::pi * a);
            break;
        }
        case CoalescentLaw::growpop_size_r: {
            const double gamma = alpha_or_gamma;
            if (!(gamma > 0.0)) throw std::domain_error("growpop: gamma must be positive");
            if (r < 1) throw std::domain_error("growpop_size_r: r >= 1");
            const double a = gamma / (1.0 + gamma);
            t.model = "growpop";
            t.statistic = Statistic::size_r;
            t.statistic_label = "K_n," + std::to_string(r);
            t.scaling = power_scaling(a);
            t.scaling_label = "n^alpha";
            const double blocks = theta * std::pow(2.0, 1.0 - a) * std::pow(1.0 - a, a) *
                                  std::numbers::pi / std::sin(std::numbers::pi * a);
            const double afs = a * std::exp(log_gamma_fn(static_cast<double>(r) - a) -
                                            log_gamma_fn(static_cast<double>(r) + 1.0) -
                                            log_gamma_fn(1.0 - a));
            t.constant = blocks * afs;
            break;
        }
        case CoalescentLaw::afs_ratio: {
            const double a = alpha_or_gamma;
            if (!(a > 0.0) || !(a < 1.0)) throw std::domain_error("afs: alpha in (0,1)");
            if (r < 1) throw std::domain_error("afs_ratio: r >= 1");
            t.model = "afs";
            t.statistic = Statistic::ratio_r;
            t.statistic_label = "K_n," + std::to_string(r) + "/K_n";
            t.scaling = [](double) { return 1.0; };
            t.scaling_label = "1";
            t.constant = a * std::exp(log_gamma_fn(static_cast<double>(r) - a) -
                                      log_gamma_fn(static_cast<double>(r) + 1.0) -
                                      log_gamma_fn(1.0 - a));
            break;
        }
    }
    return t;
}

// --- Ewens sampling formula ----------------------------------------------------

double esf_log_pmf(std::uint64_t n, double theta2,
                   const std::map<std::uint64_t, std::uint64_t>& spectrum) {
    if (n < 1) throw std::domain_error("esf_log_pmf: n must be >= 1");
    if (!(theta2 > 0.0)) throw std::domain_error("esf_log_pmf: theta2 must be positive");
    std::uint64_t mass = 0;
    for (const auto& [r, a] : spectrum) mass += r * a;
    if (mass != n) throw std::domain_error("esf_log_pmf: spectrum inconsistent with n");

    double lp = std::lgamma(static_cast<double>(n) + 1.0);
    for (std::uint64_t i = 0; i < n; ++i) lp -= std::log(theta2 + static_cast<double>(i));
    const double log_theta2 = std::log(theta2);
    for (const auto& [r, a] : spectrum) {
        const double ad = static_cast<double>(a);
        lp += ad * (log_theta2 - std::log(static_cast<double>(r)));
        lp -= std::lgamma(ad + 1.0);
    }
    return lp;
}

double esf_pmf(std::uint64_t n, double theta2,
               const std::map<std::uint64_t, std::uint64_t>& spectrum) {
    return std::exp(esf_log_pmf(n, theta2, spectrum));
}

BlockSpectrum crp_sample(std::uint64_t n, double theta2, RandomStream& rng) {
    if (n < 1) throw std::domain_error("crp_sample: n must be >= 1");
    std::vector<std::uint64_t> blocks;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (std::uint64_t m = 0; m < n; ++m) {
        const double u = unit(rng) * (static_cast<double>(m) + theta2);
        if (u < theta2) {
            blocks.push_back(1);
            continue;
        }
        // Existing blocks are chosen with probability size/(m + theta2).
        double acc = theta2;
        std::size_t j = 0;
        for (; j + 1 < blocks.size(); ++j) {
            acc += static_cast<double>(blocks[j]);
            if (u < acc) break;
        }
        ++blocks[j];
    }
    BlockSpectrum spec;
    spec.sample_size = n;
    for (std::uint64_t s : blocks) ++spec.counts[s];
    spec.validate();
    return spec;
}

namespace {

void partition_rec(std::uint64_t remaining, std::uint64_t max_part,
                   std::map<std::uint64_t, std::uint64_t>& acc,
                   const std::function<void(const std::map<std::uint64_t, std::uint64_t>&)>& fn) {
    if (remaining == 0) {
        fn(acc);
        return;
    }
    for (std::uint64_t part = std::min(remaining, max_part); part >= 1; --part) {
        ++acc[part];
        partition_rec(remaining - part, part, acc, fn);
        if (--acc[part] == 0) acc.erase(part);
    }
}

}  // namespace

void for_each_partition(std::uint64_t n,
                        const std::function<void(const std::map<std::uint64_t, std::uint64_t>&)>& fn) {
    std::map<std::uint64_t, std::uint64_t> acc;
    partition_rec(n, n, acc, fn);
}

// --- Potter bounds ---------------------------------------------------------------

PotterReport potter_check(const SlowlyVaryingFn& ell, double delta,
                          const std::vector<double>& grid) {
    if (!(delta > 0.0)) throw std::domain_error("potter_check: delta must be positive");
    static const double lambdas[] = {1.0, 2.0, 10.0, 100.0};
    PotterReport rep;
    // ok[i]: bounds hold at grid point i for every lambda.
    std::vector<char> ok(grid.size(), 1);
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double ex = ell.eval(x);
        for (double lam : lambdas) {
            const double ratio = ell.eval(lam * x) / ex;
            const double hi = (1.0 + delta) * std::pow(lam, delta);
            if (ratio > hi || ratio < 1.0 / hi) {
                ok[i] = 0;
                rep.worst_ratio = std::max(rep.worst_ratio, ratio / hi);
            }
        }
    }
    for (std::size_t i = 0; i < grid.size(); ++i) {
        bool all = true;
        for (std::size_t j = i; j < grid.size(); ++j)
            if (!ok[j]) { all = false; break; }
        if (all) {
            rep.found = true;
            rep.x0 = grid[i];
            return rep;
        }
    }
    return rep;
}

// --- quadrature ------------------------------------------------------------------

namespace {

double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double simpson_rec(const std::function<double(double)>& f, double a, double fa, double b,
                   double fb, double m, double fm, double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = simpson(a, fa, m, fm, flm);
    const double right = simpson(m, fm, b, fb, frm);
    const double delta = left + right - whole;
    if (std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) throw std::runtime_error("adaptive_simpson: depth limit reached");
    return simpson_rec(f, a, fa, m, fm, lm, flm, left, tol * 0.5, depth - 1) +
           simpson_rec(f, m, fm, b, fb, rm, frm, right, tol * 0.5, depth - 1);
}

}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int max_depth) {
    if (a == b) return 0.0;
    const double m = 0.5 * (a + b);
    const double fa = f(a), fb = f(b), fm = f(m);
    const double whole = simpson(a, fa, b, fb, fm);
    return simpson_rec(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

}  // namespace partsim
