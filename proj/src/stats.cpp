#include "partsim/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace partsim {

namespace {

// Series expansion of the lower incomplete gamma, valid for x < a + 1.
double gamma_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-15)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_gamma: series did not converge");
}

// Lentz continued fraction for the upper incomplete gamma, valid for x >= a + 1.
double gamma_cf(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-15)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw std::runtime_error("reg_gamma: continued fraction did not converge");
}

}  // namespace

double reg_gamma_lower(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_lower: bad arguments");
    if (x == 0.0) return 0.0;
    return x < a + 1.0 ? gamma_series(a, x) : 1.0 - gamma_cf(a, x);
}

double reg_gamma_upper(double a, double x) {
    if (!(a > 0.0) || x < 0.0) throw std::domain_error("reg_gamma_upper: bad arguments");
    if (x == 0.0) return 1.0;
    return x < a + 1.0 ? 1.0 - gamma_series(a, x) : gamma_cf(a, x);
}

double chi_square_pvalue(double stat, int dof) {
    if (dof < 1) throw std::domain_error("chi_square_pvalue: dof must be >= 1");
    if (stat <= 0.0) return 1.0;
    return reg_gamma_upper(0.5 * static_cast<double>(dof), 0.5 * stat);
}

double binomial_halfwidth(double q_hat, std::uint64_t n) {
    if (n == 0) return 1.0;
    const double z = 1.959963984540054;
    const double nd = static_cast<double>(n);
    const double z2 = z * z;
    return z * std::sqrt(q_hat * (1.0 - q_hat) / nd + z2 / (4.0 * nd * nd)) / (1.0 + z2 / nd);
}

SampleStats summarize(const std::vector<double>& xs) {
    SampleStats s;
    s.n = xs.size();
    if (xs.empty()) return s;
    double m = 0.0;
    for (double x : xs) m += x;
    m /= static_cast<double>(xs.size());
    double v = 0.0;
    for (double x : xs) v += (x - m) * (x - m);
    s.mean = m;
    s.variance = xs.size() > 1 ? v / static_cast<double>(xs.size() - 1) : 0.0;
    s.stderr_mean = std::sqrt(s.variance / static_cast<double>(xs.size()));
    return s;
}

}  // namespace partsim
