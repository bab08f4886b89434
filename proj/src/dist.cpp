#include "sesum/dist.hpp"

#include <cmath>
#include <limits>

namespace sesum {

double gamma_fn(double x) {
    if (x <= 0.0) throw std::domain_error("gamma_fn requires x > 0");
    if (x > 171.6) return std::numeric_limits<double>::infinity(); // overflows double
    return std::tgamma(x);
}

// lgamma-based forms stay finite for small r where Gamma(1 + 2/r) overflows.
double mean(const StretchedExpParams& p) {
    p.validate();
    const double inv_r = 1.0 / p.r;
    return std::exp(std::lgamma(1.0 + inv_r) - inv_r * std::log(p.kappa));
}

double variance(const StretchedExpParams& p) {
    p.validate();
    const double inv_r = 1.0 / p.r;
    const double m = mean(p);
    const double second = std::exp(std::lgamma(1.0 + 2.0 * inv_r) - 2.0 * inv_r * std::log(p.kappa));
    return second - m * m;
}

} // namespace sesum
