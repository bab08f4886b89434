#include "doctest.h"

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "oracles.hpp"
#include "sesum/dist.hpp"
#include "sesum/errors.hpp"
#include "sesum/mc.hpp"
#include "sesum/numeric.hpp"
#include "sesum/weights.hpp"

using namespace sesum;

namespace {

const StretchedExpParams half{1.0, 0.5};

WeightVector two_weights(double a1, double a2) {
    return realize(WeightFamily::explicit_list({a1, a2}), 2, 0.0);
}

// self-consistency every estimate must satisfy
void check_estimate_shape(const RareEventEstimate& est, const WeightVector& wv,
                          std::uint64_t samples) {
    CHECK(est.samples == samples);
    CHECK(est.elapsed_seconds >= 0.0);
    CHECK(est.p_hat >= 0.0);
    CHECK(est.p_hat <= 1.0);
    if (est.p_hat > 0.0) {
        CHECK(est.log_p_hat == doctest::Approx(std::log(est.p_hat)).epsilon(1e-12));
        CHECK(est.relative_error == doctest::Approx(est.std_err / est.p_hat).epsilon(1e-12));
        CHECK(est.normalized_rate ==
              doctest::Approx(pow_r(wv.a_max, half.r) * est.log_p_hat).epsilon(1e-12));
    } else {
        CHECK(std::isinf(est.log_p_hat));
        CHECK(std::isinf(est.relative_error));
        CHECK(std::isinf(est.normalized_rate));
        CHECK(est.normalized_rate < 0.0);
    }
}

} // namespace

TEST_CASE("naive estimator is exact at a threshold every sample clears") {
    const WeightVector wv = two_weights(0.6, 0.4);
    const auto est = naive_mc(wv, half, 0.0, 10000, 5);
    CHECK(est.p_hat == 1.0);
    CHECK(est.std_err == 0.0);
    CHECK(est.log_p_hat == 0.0);
    CHECK(est.normalized_rate == 0.0);
    CHECK(est.relative_error == 0.0);
    check_estimate_shape(est, wv, 10000);
}

TEST_CASE("largest-jump estimator is exact for a single weight") {
    const WeightVector one = realize(WeightFamily::explicit_list({1.0}), 1, 0.0);
    const auto est = largest_jump_mc(one, half, 4.0, 1000, 77);
    // every replication integrates the lone term out analytically: the estimate is the
    // exact tail up to pairwise-summation roundoff, with (numerically) zero variance
    CHECK(est.p_hat == doctest::Approx(tail(half, 4.0)).epsilon(1e-14));
    CHECK(est.std_err <= 1e-12);
    CHECK(est.relative_error <= 1e-11);
    CHECK(est.log_p_hat == doctest::Approx(-2.0).epsilon(1e-12));
    check_estimate_shape(est, one, 1000);
}

TEST_CASE("both estimators agree with the quadrature oracle on two weights") {
    const WeightVector wv = two_weights(0.6, 0.4);
    // frozen values of the convolution integral for kappa=1, r=1/2
    struct Ref {
        double x;
        double p;
    };
    const Ref refs[] = {{2.0, 0.29050725}, {4.0, 0.13763326}, {6.0, 0.07563120}};
    for (const Ref& ref : refs) {
        const auto nv = naive_mc(wv, half, ref.x, 100000, 2024);
        const auto lj = largest_jump_mc(wv, half, ref.x, 100000, 2025);
        check_estimate_shape(nv, wv, 100000);
        check_estimate_shape(lj, wv, 100000);
        CHECK(std::fabs(nv.p_hat - ref.p) <= 4.0 * nv.std_err);
        CHECK(std::fabs(lj.p_hat - ref.p) <= 4.0 * lj.std_err);
        // estimators agree with each other within combined error
        CHECK(std::fabs(nv.p_hat - lj.p_hat) <=
              4.0 * std::sqrt(nv.std_err * nv.std_err + lj.std_err * lj.std_err));
    }
    const WeightVector eq = two_weights(0.5, 0.5);
    const auto nv = naive_mc(eq, half, 4.0, 100000, 11);
    const auto lj = largest_jump_mc(eq, half, 4.0, 100000, 12);
    CHECK(std::fabs(nv.p_hat - 0.13845697) <= 4.0 * nv.std_err);
    CHECK(std::fabs(lj.p_hat - 0.13845697) <= 4.0 * lj.std_err);
}

TEST_CASE("largest-jump variance beats hit counting in the rare regime") {
    const WeightVector wv = two_weights(0.6, 0.4);
    // frozen quadrature values; both probabilities sit below 1e-3
    const double p40 = 3.739693e-4;
    const double p50 = 1.365763e-4;
    for (const auto& [x, p] : {std::pair{40.0, p40}, std::pair{50.0, p50}}) {
        const auto nv = naive_mc(wv, half, x, 100000, 4040);
        const auto lj = largest_jump_mc(wv, half, x, 100000, 4041);
        CHECK(std::fabs(nv.p_hat - p) <= 4.0 * nv.std_err);
        CHECK(std::fabs(lj.p_hat - p) <= 4.0 * lj.std_err);
        CHECK(lj.relative_error < nv.relative_error);
    }
}

TEST_CASE("largest-jump keeps tight relative error on a 400-term instance") {
    const WeightVector wv = realize(WeightFamily::cramer(), 400, 0.0);
    const auto lj = largest_jump_mc(wv, half, 3.0, 100000, 606);
    check_estimate_shape(lj, wv, 100000);
    CHECK(lj.p_hat > 0.0);
    CHECK(lj.relative_error <= 0.1);
}

TEST_CASE("stream plan partitions samples into fixed blocks, round-robin by worker") {
    const StreamPlan plan = make_stream_plan(9001, 3, 100000);
    CHECK(plan.block_size == 16384);
    CHECK(plan.num_blocks == 7);
    std::uint64_t covered = 0;
    for (std::size_t b = 0; b < plan.num_blocks; ++b) {
        const auto blk = plan.block(b);
        CHECK(blk.stream == b);
        CHECK(blk.first == covered);
        covered += blk.count;
        if (b + 1 < plan.num_blocks) CHECK(blk.count == plan.block_size);
    }
    CHECK(covered == 100000);
    CHECK(plan.block(6).count == 100000 - 6 * 16384);

    const auto w0 = plan.blocks_for_worker(0);
    const auto w1 = plan.blocks_for_worker(1);
    const auto w2 = plan.blocks_for_worker(2);
    CHECK(w0 == std::vector<std::size_t>{0, 3, 6});
    CHECK(w1 == std::vector<std::size_t>{1, 4});
    CHECK(w2 == std::vector<std::size_t>{2, 5});

    const StreamPlan tiny = make_stream_plan(1, 1, 5);
    CHECK(tiny.num_blocks == 1);
    CHECK(tiny.block(0).count == 5);
    CHECK(tiny.block(0).first == 0);
    CHECK(tiny.blocks_for_worker(0) == std::vector<std::size_t>{0});
}

TEST_CASE("estimators validate their inputs") {
    const WeightVector wv = two_weights(0.6, 0.4);
    CHECK_THROWS_AS(naive_mc(wv, half, -1.0, 100, 1), std::domain_error);
    CHECK_THROWS_AS(largest_jump_mc(wv, half, -1.0, 100, 1), std::domain_error);
    CHECK_THROWS_AS(naive_mc(wv, half, std::nan(""), 100, 1), std::domain_error);
    CHECK_THROWS_AS(naive_mc(wv, half, 3.0, 0, 1), config_error);
    CHECK_THROWS_AS(largest_jump_mc(wv, half, 3.0, 0, 1), config_error);
}

TEST_CASE("results are a pure function of (instance, x, samples, seed)") {
    const WeightVector wv = realize(WeightFamily::cramer(), 50, 0.0);
    const auto ref_nv = naive_mc_serial(wv, half, 3.0, 30000, 321);
    const auto ref_lj = largest_jump_mc_serial(wv, half, 3.0, 30000, 321);
    for (int workers : {1, 2, 4}) {
        const auto nv = naive_mc(wv, half, 3.0, 30000, 321, workers);
        const auto lj = largest_jump_mc(wv, half, 3.0, 30000, 321, workers);
        CHECK(nv.p_hat == ref_nv.p_hat);
        CHECK(nv.std_err == ref_nv.std_err);
        CHECK(nv.log_p_hat == ref_nv.log_p_hat);
        CHECK(lj.p_hat == ref_lj.p_hat);
        CHECK(lj.std_err == ref_lj.std_err);
        CHECK(lj.log_p_hat == ref_lj.log_p_hat);
    }
    // rerun with the same arguments reproduces bit for bit
    const auto again = naive_mc(wv, half, 3.0, 30000, 321, 2);
    CHECK(again.p_hat == ref_nv.p_hat);
    CHECK(again.std_err == ref_nv.std_err);
    // a different seed does not
    const auto other = naive_mc(wv, half, 3.0, 30000, 322, 2);
    CHECK(other.p_hat != ref_nv.p_hat);
}

TEST_CASE("zero observed hits reports a one-sided confidence bound, not zero error") {
    const WeightVector wv = two_weights(0.6, 0.4);
    const auto est = naive_mc(wv, half, 1e6, 1000, 13);
    CHECK(est.p_hat == 0.0);
    CHECK(std::isinf(est.log_p_hat));
    CHECK(est.log_p_hat < 0.0);
    // upper 95% bound: largest p with (1-p)^n >= 0.05
    CHECK(est.std_err == doctest::Approx(-std::expm1(std::log(0.05) / 1000.0)).epsilon(1e-12));
    CHECK(std::isinf(est.relative_error));
    check_estimate_shape(est, wv, 1000);
}
