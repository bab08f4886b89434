#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>

#include "sesum/rng.hpp"

namespace sesum {

// Law with survival function P(X > t) = exp(-kappa * t^r), t >= 0, with 0 < r < 1.
// All positive moments are finite but no exponential moment exists, which is why the
// bounds in theory.hpp work with truncated exponential integrals.
struct StretchedExpParams {
    double kappa = 1.0;
    double r = 0.5;

    void validate() const {
        if (!(kappa > 0.0) || !std::isfinite(kappa))
            throw std::domain_error("kappa must be positive and finite");
        if (!(r > 0.0) || !(r < 1.0))
            throw std::domain_error("r must lie strictly between 0 and 1");
    }
};

// Upper envelope P(X > t) <= k * exp(-B' * t^r) for all t >= 0. For the exact law the
// tight choice is k = 1, B' = kappa; looser envelopes (smaller B') stay valid.
struct TailEnvelope {
    double k = 1.0;
    double B_prime = 1.0;
};

inline TailEnvelope tail_envelope(const StretchedExpParams& p) {
    return TailEnvelope{1.0, p.kappa};
}

// t^r with a fast path for the common r = 1/2.
inline double pow_r(double t, double r) {
    return r == 0.5 ? std::sqrt(t) : std::pow(t, r);
}

// y^(1/r) given inv_r = 1/r precomputed.
inline double pow_inv_r(double y, double r, double inv_r) {
    return r == 0.5 ? y * y : std::pow(y, inv_r);
}

inline double log_tail(const StretchedExpParams& p, double t) {
    if (t < 0.0) throw std::domain_error("tail evaluated at negative t");
    return -p.kappa * pow_r(t, p.r);
}

inline double tail(const StretchedExpParams& p, double t) {
    return std::exp(log_tail(p, t));
}

inline double cdf(const StretchedExpParams& p, double t) {
    if (t < 0.0) return 0.0;
    return -std::expm1(-p.kappa * pow_r(t, p.r));
}

inline double density(const StretchedExpParams& p, double t) {
    if (t < 0.0) return 0.0;
    if (t == 0.0) return std::numeric_limits<double>::infinity(); // r < 1: t^(r-1) blows up
    return p.kappa * p.r * std::pow(t, p.r - 1.0) * std::exp(-p.kappa * pow_r(t, p.r));
}

// Inverse-transform sampling: with U uniform on (0,1), ((-ln U)/kappa)^(1/r) has
// exactly the survival function above, so tail(sample_from_uniform(u)) == u.
inline double sample_from_uniform(const StretchedExpParams& p, double u) {
    return pow_inv_r(-std::log(u) / p.kappa, p.r, 1.0 / p.r);
}

inline double sample(const StretchedExpParams& p, RngStream& rng) {
    return sample_from_uniform(p, rng.uniform_open());
}

// Gamma function binding (libm lgamma/tgamma); relative error verified against
// integer factorials in the unit tests.
double gamma_fn(double x);

// E[X] = kappa^{-1/r} Gamma(1 + 1/r).
double mean(const StretchedExpParams& p);

// Var[X] = kappa^{-2/r} Gamma(1 + 2/r) - mean^2.
double variance(const StretchedExpParams& p);

} // namespace sesum
