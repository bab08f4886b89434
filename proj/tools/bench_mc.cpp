// Benchmark: OpenMP block drivers against the serial reference drivers.
// Both must produce bit-identical estimates; the serial path is the
// correctness reference, the parallel path is the one the CLI uses.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <string>

#include "sesum/mc.hpp"
#include "sesum/weights.hpp"

using namespace sesum;

namespace {

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

struct Timed {
    RareEventEstimate est;
    double secs;
};

template <typename F>
Timed timed(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    RareEventEstimate est = f();
    return {est, seconds_since(t0)};
}

bool same_bits(double a, double b) {
    return std::memcmp(&a, &b, sizeof(double)) == 0;
}

} // namespace

int main(int argc, char** argv) {
    std::uint64_t samples = 400000;
    int workers = 0; // 0: library picks omp_get_max_threads()
    for (int i = 1; i + 1 < argc; i += 2) {
        if (!std::strcmp(argv[i], "--samples")) samples = std::stoull(argv[i + 1]);
        if (!std::strcmp(argv[i], "--workers")) workers = std::stoi(argv[i + 1]);
    }

    const StretchedExpParams p{1.0, 0.5};
    const WeightVector wv = realize(WeightFamily::cramer(), 400, 0.0);
    const double x = 3.0;
    const std::uint64_t seed = 42;

    std::printf("weights: cramer n=%zu, x=%g, samples=%llu\n", wv.n, x,
                static_cast<unsigned long long>(samples));

    int bad = 0;
    const struct {
        const char* name;
        RareEventEstimate (*serial)(const WeightVector&, const StretchedExpParams&, double,
                                    std::uint64_t, std::uint64_t);
        RareEventEstimate (*parallel)(const WeightVector&, const StretchedExpParams&, double,
                                      std::uint64_t, std::uint64_t, int);
    } kernels[] = {
        {"naive", naive_mc_serial, naive_mc},
        {"largest_jump", largest_jump_mc_serial, largest_jump_mc},
    };

    for (const auto& k : kernels) {
        const Timed s = timed([&] { return k.serial(wv, p, x, samples, seed); });
        const Timed m = timed([&] { return k.parallel(wv, p, x, samples, seed, workers); });
        const bool match = same_bits(s.est.p_hat, m.est.p_hat) &&
                           same_bits(s.est.std_err, m.est.std_err);
        if (!match) ++bad;
        std::printf("%-13s serial %8.3fs  openmp %8.3fs  speedup %5.2fx  p_hat %.17g  %s\n",
                    k.name, s.secs, m.secs, m.secs > 0 ? s.secs / m.secs : 0.0,
                    m.est.p_hat, match ? "bit-identical" : "MISMATCH");
    }

    if (bad) {
        std::printf("FAIL: %d kernel(s) disagree between serial and OpenMP drivers\n", bad);
        return 1;
    }
    return 0;
}
