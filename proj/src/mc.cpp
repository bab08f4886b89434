#include "sesum/mc.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"
#include "sesum/rng.hpp"

namespace sesum {

StreamPlan::Block StreamPlan::block(std::size_t b) const {
    const std::uint64_t first = b * block_size;
    const std::uint64_t count = std::min(block_size, samples - first);
    return Block{first, count, b};
}

std::vector<std::size_t> StreamPlan::blocks_for_worker(int w) const {
    std::vector<std::size_t> out;
    for (std::size_t b = w; b < num_blocks; b += std::size_t(workers)) out.push_back(b);
    return out;
}

StreamPlan make_stream_plan(std::uint64_t seed, int workers, std::uint64_t samples) {
    if (samples == 0) throw config_error("sample count must be positive");
    StreamPlan plan;
    plan.seed = seed;
    plan.samples = samples;
    plan.block_size = 16384; // fixed: the partition must not depend on worker count
    plan.num_blocks = std::size_t((samples + plan.block_size - 1) / plan.block_size);
    plan.workers = workers > 0 ? workers : 1;
    return plan;
}

namespace {

struct BlockAcc {
    double sum_z = 0.0;
    double sum_z2 = 0.0;
};

// Kernels are noinline so the serial and OpenMP drivers execute the exact same
// machine code; that, plus the fixed-order merge, is what makes results identical
// across worker counts.

__attribute__((noinline)) BlockAcc naive_block(const double* a, std::size_t m,
                                               StretchedExpParams p, double x,
                                               std::uint64_t seed, std::uint64_t stream,
                                               std::uint64_t count) {
    RngStream rng(seed, stream);
    const double kappa = p.kappa, r = p.r, inv_r = 1.0 / p.r;
    BlockAcc acc;
    for (std::uint64_t rep = 0; rep < count; ++rep) {
        double s = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            const double draw = pow_inv_r(-std::log(rng.uniform_open()) / kappa, r, inv_r);
            s += a[j] * draw;
        }
        if (s > x) acc.sum_z += 1.0;
    }
    acc.sum_z2 = acc.sum_z; // indicator: z^2 == z
    return acc;
}

__attribute__((noinline)) BlockAcc largest_jump_block(const double* a, std::size_t m,
                                                      StretchedExpParams p, double x,
                                                      std::uint64_t seed, std::uint64_t stream,
                                                      std::uint64_t count) {
    RngStream rng(seed, stream);
    const double kappa = p.kappa, r = p.r, inv_r = 1.0 / p.r;
    std::vector<double> term(m);
    BlockAcc acc;
    for (std::uint64_t rep = 0; rep < count; ++rep) {
        double s = 0.0;
        double top1 = -1.0, top2 = -1.0;
        std::size_t top_j = 0;
        for (std::size_t j = 0; j < m; ++j) {
            const double draw = pow_inv_r(-std::log(rng.uniform_open()) / kappa, r, inv_r);
            const double y = a[j] * draw;
            term[j] = y;
            s += y;
            if (y > top1) {
                top2 = top1;
                top1 = y;
                top_j = j;
            } else if (y > top2) {
                top2 = y;
            }
        }
        double z = 0.0;
        for (std::size_t j = 0; j < m; ++j) {
            if (a[j] <= 0.0) continue; // zero weight can never carry the largest term
            double other_max = (j == top_j) ? top2 : top1;
            if (other_max < 0.0) other_max = 0.0; // no other terms
            const double need = x - (s - term[j]);
            const double thr = other_max > need ? other_max : need;
            z += thr <= 0.0 ? 1.0 : std::exp(-kappa * pow_r(thr / a[j], r));
        }
        acc.sum_z += z;
        acc.sum_z2 += z * z;
    }
    return acc;
}

using Kernel = BlockAcc (*)(const double*, std::size_t, StretchedExpParams, double,
                            std::uint64_t, std::uint64_t, std::uint64_t);

RareEventEstimate finish(const std::vector<BlockAcc>& acc, const WeightVector& wv,
                         const StretchedExpParams& p, bool binomial, std::uint64_t samples) {
    std::vector<double> zs(acc.size()), z2s(acc.size());
    for (std::size_t b = 0; b < acc.size(); ++b) {
        zs[b] = acc[b].sum_z;
        z2s[b] = acc[b].sum_z2;
    }
    const double sum_z = pairwise_sum(zs);
    const double sum_z2 = pairwise_sum(z2s);
    const double n = double(samples);
    const double mean_z = sum_z / n;

    RareEventEstimate est;
    est.samples = samples;
    est.p_hat = std::min(1.0, mean_z); // conditional z's can individually exceed 1
    if (binomial) {
        est.std_err = std::sqrt(est.p_hat * (1.0 - est.p_hat) / n);
    } else {
        const double var = std::max(0.0, (sum_z2 - n * mean_z * mean_z) / (n - 1.0));
        est.std_err = std::sqrt(var / n);
    }
    if (est.p_hat > 0.0) {
        est.log_p_hat = std::log(est.p_hat);
        est.relative_error = est.std_err / est.p_hat;
    } else {
        est.log_p_hat = neg_inf;
        est.std_err = -std::expm1(std::log(0.05) / n); // exact one-sided 95% bound at 0 hits
        est.relative_error = std::numeric_limits<double>::infinity();
    }
    est.normalized_rate = pow_r(wv.a_max, p.r) * est.log_p_hat;
    return est;
}

RareEventEstimate run_blocks(Kernel kernel, bool binomial, bool parallel,
                             const WeightVector& wv, const StretchedExpParams& p, double x,
                             std::uint64_t samples, std::uint64_t seed, int workers) {
    p.validate();
    if (!(x >= 0.0) || !std::isfinite(x)) throw std::domain_error("threshold x must be finite and nonnegative");
    const auto t0 = std::chrono::steady_clock::now();
    const StreamPlan plan = make_stream_plan(seed, workers, samples);
    const double* a = wv.values.data();
    const std::size_t m = wv.values.size();

    std::vector<BlockAcc> acc(plan.num_blocks);
    if (parallel) {
        int threads = workers;
#ifdef _OPENMP
        if (threads <= 0) threads = omp_get_max_threads();
#else
        threads = 1;
#endif
#pragma omp parallel for schedule(dynamic) num_threads(threads)
        for (std::size_t b = 0; b < plan.num_blocks; ++b) {
            const auto blk = plan.block(b);
            acc[b] = kernel(a, m, p, x, plan.seed, blk.stream, blk.count);
        }
    } else {
        for (std::size_t b = 0; b < plan.num_blocks; ++b) {
            const auto blk = plan.block(b);
            acc[b] = kernel(a, m, p, x, plan.seed, blk.stream, blk.count);
        }
    }

    RareEventEstimate est = finish(acc, wv, p, binomial, samples);
    est.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return est;
}

} // namespace

RareEventEstimate naive_mc(const WeightVector& wv, const StretchedExpParams& p, double x,
                           std::uint64_t samples, std::uint64_t seed, int workers) {
    return run_blocks(naive_block, true, true, wv, p, x, samples, seed, workers);
}

RareEventEstimate largest_jump_mc(const WeightVector& wv, const StretchedExpParams& p, double x,
                                  std::uint64_t samples, std::uint64_t seed, int workers) {
    return run_blocks(largest_jump_block, false, true, wv, p, x, samples, seed, workers);
}

RareEventEstimate naive_mc_serial(const WeightVector& wv, const StretchedExpParams& p, double x,
                                  std::uint64_t samples, std::uint64_t seed) {
    return run_blocks(naive_block, true, false, wv, p, x, samples, seed, 1);
}

RareEventEstimate largest_jump_mc_serial(const WeightVector& wv, const StretchedExpParams& p,
                                         double x, std::uint64_t samples, std::uint64_t seed) {
    return run_blocks(largest_jump_block, false, false, wv, p, x, samples, seed, 1);
}

} // namespace sesum
