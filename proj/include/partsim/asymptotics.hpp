#pragma once
#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "partsim/freq.hpp"
#include "partsim/occupancy.hpp"
#include "partsim/rng.hpp"

namespace partsim {

// Gamma function on the positive axis, relative error <= 1e-12 on [0.05, 50].
double gamma_fn(double x);
double log_gamma_fn(double x);

// Statistic a limit law talks about.
enum class Statistic { total_blocks, size_r, ratio_r, mutations, tree_length };

// A scaling limit: statistic / (scaling(n) * constant) -> 1.
struct LimitTarget {
    std::string model;
    std::string statistic_label;
    Statistic statistic = Statistic::total_blocks;
    std::uint64_t r = 0;
    std::function<double(double)> scaling;
    std::string scaling_label;
    double constant = 0.0;
};

struct KarlinConstants {
    double c_total;  // Gamma(1 - alpha)
    double c_size;   // alpha * Gamma(r - alpha) / r!
};
KarlinConstants karlin_constants(double alpha, std::uint64_t r);

LimitTarget powerlaw_target(double alpha, double ell_const, std::uint64_t r);  // r = 0 for K_n
LimitTarget loglaw_targets(std::uint64_t r);                                   // r = 0 or 1: n/log n; r >= 2: n/log^2 n

enum class CoalescentLaw {
    beta_blocks,     // K_n / n^alpha
    beta_size_r,     // K_{n,r} / n^alpha
    bosz_blocks,     // (log n) K_n / n
    bosz_size_r,     // (log n)^2 K_{n,r} / n
    growpop_blocks,  // K_n / n^alpha
    growpop_size_r,  // K_{n,r} / n^alpha
    growpop_length,  // L_n / n^alpha
    growpop_mutations,  // S_n / n^alpha
    afs_ratio,       // K_{n,r} / K_n
};
LimitTarget coalescent_targets(CoalescentLaw law, double theta, double alpha_or_gamma,
                               std::uint64_t r = 0);

// Ewens sampling formula with parameter theta2 (the paper's 2*theta).
double esf_log_pmf(std::uint64_t n, double theta2,
                   const std::map<std::uint64_t, std::uint64_t>& spectrum);
double esf_pmf(std::uint64_t n, double theta2,
               const std::map<std::uint64_t, std::uint64_t>& spectrum);

// Chinese-restaurant sequential construction; ESF(theta2)-distributed.
BlockSpectrum crp_sample(std::uint64_t n, double theta2, RandomStream& rng);

// Enumerates all partition spectra of n (maps r -> a_r with sum r*a_r = n).
void for_each_partition(std::uint64_t n,
                        const std::function<void(const std::map<std::uint64_t, std::uint64_t>&)>& fn);

// Finite-grid Potter bound check: finds the smallest grid point x0 past which
// ell(lambda x)/ell(x) stays within [(1+delta)^-1 lambda^-delta, (1+delta) lambda^delta]
// for lambda in {1, 2, 10, 100} at every tested x >= x0.
struct PotterReport {
    bool found = false;
    double x0 = 0.0;
    double worst_ratio = 0.0;  // max of ratio/bound over the grid tail
};
PotterReport potter_check(const SlowlyVaryingFn& ell, double delta, const std::vector<double>& grid);

// Adaptive Simpson quadrature; throws std::runtime_error when the tolerance
// cannot be met within the depth limit.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol = 1e-12, int max_depth = 60);

}  // namespace partsim
