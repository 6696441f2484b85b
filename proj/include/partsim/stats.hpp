#pragma once
#include <cstdint>
#include <vector>

namespace partsim {

// Regularized incomplete gamma functions (series / continued fraction).
double reg_gamma_lower(double a, double x);
double reg_gamma_upper(double a, double x);

// Upper-tail p-value of a chi-square statistic with `dof` degrees of freedom.
double chi_square_pvalue(double stat, int dof);

// Wilson score half-width at 95% for an estimated proportion q over n trials.
double binomial_halfwidth(double q_hat, std::uint64_t n);

struct SampleStats {
    std::uint64_t n = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased
    double stderr_mean = 0.0;
};
SampleStats summarize(const std::vector<double>& xs);

}  // namespace partsim
