#pragma once

#include <vector>

#include "sesum/dist.hpp"
#include "sesum/weights.hpp"

namespace sesum {

// Controls for the certified upper bound.
//  - epsilon must lie in (0, kappa/2); it sets the Chernoff tilt B = kappa - 2*epsilon.
//  - lambda_grid: candidate Chernoff parameters. Empty means a geometric grid of 49
//    points, ratio 2^(1/8), centered on B * A^(r-1) / a_max^r, the tilt for which the
//    truncated exponential integrals stay controlled right up to the cutoff.
//  - quad_rel_tol: relative tolerance of each truncated-mgf quadrature; every factor
//    in the reported bound is inflated by this amount so the result stays an upper
//    bound despite quadrature error.
struct BoundConfig {
    double epsilon = 0.1;
    std::vector<double> lambda_grid;
    double quad_rel_tol = 1e-9;
    TailEnvelope envelope{1.0, 0.0}; // B_prime <= 0: use the exact-law envelope
};

struct BoundReport {
    double log_lower;
    double log_upper;
    double lambda_used;
    double A_used;
    // upper-bound components
    double log_sup_part;      // log P(max_i a_i X_i > A)
    double log_chernoff_part; // log of the truncated-mgf product term at lambda_used
    // lower-bound components
    double log_jump_part;     // log P(largest term alone carries the excess)
    double log_mean_part;     // log(1 - Q), Chebyshev control of the remaining mass
    double chebyshev_q;
    double epsilon_upper;
    double epsilon_lower;
    // Omitted-index bracket: P(full sum > x) <= P(realized sum > x - eta) + residual,
    // with eta = tail_sum_bound * (1 - 1e-12 quantile). Reported, never folded in.
    double tail_sum_bound;
    double eta;
};

// kappa * (x - D*E[X])^r, the limiting normalized decay rate. Domain: x > D*E[X].
double rate_function(const StretchedExpParams& p, double x, double D);

// -rate_function / a_max^r: the first-order prediction for log P(sum > x).
double predicted_log_prob(const StretchedExpParams& p, double x, double D, double a_max);

// log P(max_i a_i X_i > x) = log(1 - prod_i F(x/a_i)), evaluated as a sum of
// log(F) terms so it stays accurate when the probability underflows.
double sup_exceedance_log(const WeightVector& wv, const StretchedExpParams& p, double x);
double sup_exceedance_prob(const WeightVector& wv, const StretchedExpParams& p, double x);

// Single-term lower bound log P(X > x/a_max) and union upper bound
// log min(1, sum_i P(X > x/a_i)); together they sandwich sup_exceedance_log.
double sup_lower_log(const WeightVector& wv, const StretchedExpParams& p, double x);
double sup_union_upper_log(const WeightVector& wv, const StretchedExpParams& p, double x);

// Closed-form bound on E[(e^{b X^r} - 1) 1{X > a}] for an envelope law:
// k / (1 - b/B') * exp(-(B' - b) a^r), valid for 0 <= b < B'.
double truncated_exp_tail_bound(double a, double b, const TailEnvelope& env, double r);

// Rigorous finite-n bounds on log P(sum_i a_i X_i > x) over the realized support.
// Upper: split at A = x - sum*E[X]; P <= P(max term > A) + min_lambda e^{-lambda x}
// prod_i E[e^{lambda a_i X} 1{a_i X <= A}]. Factors for the many smallest weights are
// bounded by one bucketed quadrature per dyadic group (monotone in the weight), so the
// cost stays bounded when the realization has millions of distinct weights.
BoundReport certified_upper_bound(const WeightVector& wv, const StretchedExpParams& p,
                                  double x, const BoundConfig& cfg);

// Lower: largest term alone exceeds what the mean of the rest leaves over, while the
// rest stays above (1-eps) of its mean; the second factor is controlled by Chebyshev.
BoundReport certified_lower_bound(const WeightVector& wv, const StretchedExpParams& p,
                                  double x, double epsilon);

// Both halves in one report. eps_lower <= 0 selects the a_max^(r/2) schedule.
BoundReport certified_bounds(const WeightVector& wv, const StretchedExpParams& p,
                             double x, const BoundConfig& cfg, double eps_lower = 0.0);

// Closed-form upper bound assembled from the same constants the asymptotic analysis
// pins down (B = kappa-2eps, B' = kappa-eps, the split point eps/(lambda a_i), and the
// K-exponent collapse of the large-jump sum). Each finite-n inequality step that can
// fail is reported as a flag; when all flags hold the value is a true bound.
struct ClosedFormBound {
    double log_bound;
    double normalized; // a_max^r * log_bound
    double lambda;
    double A; // threshold-normalized: 1 - E[X]*sum/x
    double log_sup_part;
    double log_chernoff_part;
    bool small_exp_step_ok;  // (e^eps - 1)/eps <= 1 + eps
    bool poly_decay_step_ok; // e^{-u} <= u^{-1/r} at every retained split exponent
    bool mean_margin_ok;     // 1 - (1+eps) E[X] sum/x > 0
    bool certified() const { return small_exp_step_ok && poly_decay_step_ok && mean_margin_ok; }
};

ClosedFormBound closed_form_upper_bound(const WeightVector& wv, const StretchedExpParams& p,
                                        double x, const BoundConfig& cfg);

} // namespace sesum
