#pragma once

#include <cstdint>
#include <vector>

#include "sesum/dist.hpp"
#include "sesum/weights.hpp"

namespace sesum {

struct RareEventEstimate {
    double p_hat = 0.0;
    double std_err = 0.0;      // for p_hat == 0: one-sided 95% upper confidence bound instead
    double log_p_hat = 0.0;
    double normalized_rate = 0.0; // a_max^r * log_p_hat
    double relative_error = 0.0;  // std_err / p_hat
    double elapsed_seconds = 0.0;
    std::uint64_t samples = 0;
};

// Replications are split into contiguous fixed-size blocks; block b always consumes
// substream (seed, b) and partials merge in block order through a pairwise tree, so
// the estimate is a pure function of (instance, x, samples, seed) no matter how many
// workers run or in what order blocks finish.
struct StreamPlan {
    std::uint64_t seed = 0;
    std::uint64_t samples = 0;
    std::uint64_t block_size = 0;
    std::size_t num_blocks = 0;
    int workers = 1;

    struct Block {
        std::uint64_t first;
        std::uint64_t count;
        std::uint64_t stream; // substream id, == block index
    };
    Block block(std::size_t b) const;
    std::vector<std::size_t> blocks_for_worker(int w) const; // round-robin schedule
};

StreamPlan make_stream_plan(std::uint64_t seed, int workers, std::uint64_t samples);

// Plain hit-counting estimator of P(sum_i a_i X_i > x) over the realized weights.
RareEventEstimate naive_mc(const WeightVector& wv, const StretchedExpParams& p, double x,
                           std::uint64_t samples, std::uint64_t seed, int workers = 0);

// Conditional estimator that partitions the exceedance event by the index of the
// largest term a_i X_i and integrates that term out analytically: one replication
// draws every X_j once and returns sum_i P(X > max(M_-i, x - S_-i)/a_i), computed in
// O(|weights|) via the total sum and the top-two maxima. Unbiased, and usable down to
// probabilities far below what hit counting can see.
RareEventEstimate largest_jump_mc(const WeightVector& wv, const StretchedExpParams& p, double x,
                                  std::uint64_t samples, std::uint64_t seed, int workers = 0);

// Serial reference drivers: same block kernels, plain loop, bit-identical results.
// Kept for testing the OpenMP drivers and for the benchmark comparison.
RareEventEstimate naive_mc_serial(const WeightVector& wv, const StretchedExpParams& p, double x,
                                  std::uint64_t samples, std::uint64_t seed);
RareEventEstimate largest_jump_mc_serial(const WeightVector& wv, const StretchedExpParams& p,
                                         double x, std::uint64_t samples, std::uint64_t seed);

} // namespace sesum
