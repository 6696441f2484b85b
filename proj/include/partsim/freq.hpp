#pragma once
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "partsim/rng.hpp"

namespace partsim {

// One run-length-encoded atom of a ranked frequency sequence: `multiplicity`
// boxes, each of probability `value`.  Multiplicities that do not fit in a
// 64-bit integer are carried in log space only (log_count is always valid).
struct AtomGroup {
    double value = 0.0;
    std::uint64_t count = 0;  // valid when !log_only
    double log_count = 0.0;   // natural log of the multiplicity
    bool log_only = false;
    bool marked = false;  // "marked block" designation used by the counterexample builders

    static AtomGroup exact(double value, std::uint64_t count, bool marked = false);
    static AtomGroup logspace(double value, double log_count, bool marked = false);

    double count_as_double() const;
    double mass() const;  // value * multiplicity
};

// Ranked frequency sequence (paintbox measure).  Groups are sorted by value
// descending; equal values may appear at most twice, once marked and once
// unmarked.  Atom mass plus dust is 1 within 1e-12.
struct FrequencySequence {
    std::vector<AtomGroup> groups;
    double dust = 0.0;
    std::string provenance;

    double atom_mass() const;
    // Sum of materialized multiplicities, as a double (may be astronomically large).
    double total_boxes() const;
    std::vector<AtomGroup> marked_part() const;
    std::vector<AtomGroup> unmarked_part() const;

    // Sorts, merges duplicate (value, marked) pairs, clamps tiny negative dust,
    // then checks all invariants.  Throws std::invalid_argument on violation.
    void normalize_and_validate();
    void validate() const;
};

struct SlowlyVaryingFn {
    std::function<double(double)> eval;  // t > 1
    std::string label;
    std::optional<std::function<double(double)>> integrated;  // ell_1(t) = int_t^inf ell(s)/s ds
};

// Finite-grid surrogate for the slow-variation property: for c in {2, 10},
// ell(c t)/ell(t) must approach 1 along a geometric grid (the deviation at the
// top of the grid must be small and not larger than at the bottom).
bool check_slowly_varying(const SlowlyVaryingFn& ell, double t_lo = 10.0, double t_hi = 1e10,
                          int points = 24, double final_tol = 0.05);

// --- generators ------------------------------------------------------------

struct PowerLawResult {
    FrequencySequence seq;
    SlowlyVaryingFn ell;  // the constant Z^-alpha
    double normalizer = 0.0;  // Z
    double tail_mass = 0.0;   // mass of ranks beyond the truncation (infinite variant)
};
// p_j = j^(-1/alpha) / Z for j <= J with Z the truncated sum.  Dust is zero.
PowerLawResult make_power_law(double alpha, std::uint64_t truncation);
// Same ranks normalized by the full series sum; the discarded tail rides along
// as dust, so sampled tail balls still show up as the singletons the ideal
// sequence would produce.  This is the construction experiments should use.
PowerLawResult make_power_law_infinite(double alpha, std::uint64_t truncation);

struct LogLawResult {
    FrequencySequence seq;
    SlowlyVaryingFn ell;  // (log t)^-2, with ell_1(t) = (log t)^-1
};
// q_j solves x (log x)^2 = 1/j on (0, e^-2] by bisection (clamped to e^-2 when
// the target is not attainable there).  Leftover mass becomes dust.
LogLawResult make_log_law(std::uint64_t truncation);

// Shared deterministic base for the random counterexample construction: the
// shifted power sequence q_j = j^(-1/alpha) for j0 < j <= j0 + J, with j0
// chosen so the full tail mass is below 1/2.
struct NewexBase {
    double alpha = 0.0;
    std::uint64_t j0 = 0;
    std::vector<AtomGroup> groups;
    double mass = 0.0;
};
NewexBase make_newex_base(double alpha, std::uint64_t truncation);

struct NewexOptions {
    int r_max = 9;                       // cap on the support of each R_k
    std::uint64_t base_truncation = 100000;
};
struct NewexResult {
    FrequencySequence seq;
    std::vector<int> realized_r;         // R_k draws, one per schedule entry
    std::vector<double> marked_value;    // atom value per scale
    std::vector<double> marked_log_mult; // log multiplicity per scale
    std::uint64_t base_j0 = 0;
    double alpha = 0.0;
};
NewexResult make_example_newex(double alpha, const std::vector<std::uint64_t>& scale_schedule,
                               RandomStream& rng, const NewexOptions& opts = {});
NewexResult make_example_newex(const NewexBase& base, const std::vector<std::uint64_t>& scale_schedule,
                               RandomStream& rng, const NewexOptions& opts = {});

// Deterministic counterexample sequence with marked groups e^{-n^3} for
// n = 2..n_max on top of a run-length-encoded log-law base.  `truncation` is
// the number of geometric base levels (0 picks a default).
struct BoszResult {
    FrequencySequence seq;
    int n_max = 0;
    std::vector<double> marked_value;     // per n = 2..n_max
    std::vector<double> marked_log_mult;
};
BoszResult make_example_bosz(int n_max, std::uint64_t truncation = 0);

// --- queries ---------------------------------------------------------------

// A block count that may exceed 2^63; exact when possible, log otherwise.
struct BlockCount {
    bool exact = true;
    std::uint64_t count = 0;
    double log_count = 0.0;  // -inf when zero

    double as_double() const;
    void add_exact(std::uint64_t c);
    void add_log(double log_c);
};

// G(x): number of box slots with value >= x.
BlockCount counting_function(const FrequencySequence& seq, double x);
BlockCount counting_function(std::span<const AtomGroup> groups, double x);

// --- serialization ---------------------------------------------------------

void write_sequence(std::ostream& os, const FrequencySequence& seq);
FrequencySequence read_sequence(std::istream& is);
void save_sequence(const std::string& path, const FrequencySequence& seq);
FrequencySequence load_sequence(const std::string& path);

}  // namespace partsim
