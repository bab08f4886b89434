#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace sesum {

// Triangular-array weight families a_i(n). All built-ins keep sum_i a_i(n) = 1 for
// every n while a_max(n) -> 0, the regime in which the normalized log-probability
// of a weighted-sum exceedance converges.
struct WeightFamily {
    enum class Kind { cramer, remainder, moving_average, explicit_list };

    Kind kind = Kind::cramer;
    // Decay exponent of sigma_i = i^{-p} for remainder / moving_average; requires p > 1.
    double p = 2.0;
    // Fixed weights for explicit_list.
    std::vector<double> weights;

    static WeightFamily cramer();
    static WeightFamily remainder(double p);
    static WeightFamily moving_average(double p);
    static WeightFamily explicit_list(std::vector<double> w);
};

// One weight per line, '#' comments and blank lines allowed.
WeightFamily load_weight_file(const std::string& path);

// Finite realization of a_i(n). `values[k]` is the weight of original index
// first_index + k; indices outside the stored range carry total weight at most
// tail_sum_bound (exactly zero for cramer / moving_average / explicit_list).
struct WeightVector {
    std::size_t n = 0;
    std::size_t first_index = 1; // 1-based index of values[0] in the infinite array
    std::vector<double> values;
    double a_max = 0.0;
    std::size_t argmax_index = 1; // least original index attaining a_max
    double sum = 0.0;
    double sum_squares = 0.0;
    double tail_sum_bound = 0.0; // certified bound on the omitted weight mass
};

// Hard cap on materialized terms; families that need more to reach the requested
// truncation tolerance raise resource_error instead of thrashing memory.
inline constexpr std::size_t max_realized_terms = 100'000'000;

WeightVector realize(const WeightFamily& family, std::size_t n, double truncation_tol);

struct LimitSum {
    double value = 0.0;
    bool analytic = true; // false: value echoes a realized sum, no limit statement intended
};

// lim_n sum_i a_i(n) where known in closed form (all built-ins: 1).
LimitSum limit_sum(const WeightFamily& family);

// sum_{i >= n} i^{-p} for p > 1, by direct summation of the leading terms plus an
// Euler-Maclaurin tail. Accurate to ~1e-13 relative; validated against long direct
// sums in the tests.
double zeta_tail(double p, std::size_t n);

} // namespace sesum
