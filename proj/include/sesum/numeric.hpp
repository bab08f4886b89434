#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>

namespace sesum {

inline constexpr double neg_inf = -std::numeric_limits<double>::infinity();

// Pairwise (cascade) summation over a fixed-order sequence. The result depends only
// on the contents and order of the input, never on thread count, which is what the
// deterministic merge of per-block partials relies on.
inline double pairwise_sum(std::span<const double> v) {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

// log(exp(a) + exp(b)) without overflow; tolerates -inf arguments.
inline double logsumexp2(double a, double b) {
    if (a == neg_inf) return b;
    if (b == neg_inf) return a;
    const double m = a > b ? a : b;
    return m + std::log1p(std::exp(-std::fabs(a - b)));
}

// log(1 - exp(-a)) for a > 0, stable for both tiny and large a.
inline double log1mexp(double a) {
    if (a <= 0.6931471805599453) return std::log(-std::expm1(-a));
    return std::log1p(-std::exp(-a));
}

} // namespace sesum
