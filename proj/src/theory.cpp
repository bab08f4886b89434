#include "sesum/theory.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"
#include "sesum/quad.hpp"

namespace sesum {
namespace {

struct WeightGroup {
    double a;     // weight value
    double count; // multiplicity
};

// Distinct positive weights, descending, with multiplicities. Collapses the flat
// families (all-equal weights) to a single group.
std::vector<WeightGroup> group_weights(const WeightVector& wv) {
    std::vector<double> v;
    v.reserve(wv.values.size());
    for (double a : wv.values)
        if (a > 0.0) v.push_back(a);
    if (v.empty()) throw config_error("weight vector has no positive entries");
    std::sort(v.begin(), v.end(), std::greater<double>());
    std::vector<WeightGroup> g;
    for (double a : v) {
        if (!g.empty() && g.back().a == a)
            g.back().count += 1.0;
        else
            g.push_back(WeightGroup{a, 1.0});
    }
    return g;
}

// log sum_g count_g * exp(term_g), guarded against all-(-inf).
double logsumexp_groups(const std::vector<double>& terms, const std::vector<WeightGroup>& groups) {
    double m = neg_inf;
    for (double t : terms) m = std::max(m, t);
    if (m == neg_inf) return neg_inf;
    double s = 0.0;
    for (std::size_t i = 0; i < terms.size(); ++i) s += groups[i].count * std::exp(terms[i] - m);
    return m + std::log(s);
}

void validate_threshold(double x) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::domain_error("threshold x must be positive and finite");
}

double check_epsilon_upper(const StretchedExpParams& p, double eps) {
    if (!(eps > 0.0) || !(eps < p.kappa / 2.0))
        throw config_error("bound epsilon must lie in (0, kappa/2)");
    return eps;
}

} // namespace

double rate_function(const StretchedExpParams& p, double x, double D) {
    p.validate();
    if (D < 0.0) throw std::domain_error("limit sum D must be nonnegative");
    const double shift = x - D * mean(p);
    if (!(shift > 0.0))
        throw std::domain_error("rate function needs x > D*E[X]");
    return p.kappa * pow_r(shift, p.r);
}

double predicted_log_prob(const StretchedExpParams& p, double x, double D, double a_max) {
    if (!(a_max > 0.0)) throw std::domain_error("a_max must be positive");
    return -rate_function(p, x, D) / pow_r(a_max, p.r);
}

double sup_exceedance_log(const WeightVector& wv, const StretchedExpParams& p, double x) {
    p.validate();
    validate_threshold(x);
    // sum of log F(x/a_i); chunked so long realizations merge in a fixed order.
    const auto& v = wv.values;
    const std::size_t chunk = 8192;
    std::vector<double> partials((v.size() + chunk - 1) / chunk, 0.0);
    for (std::size_t c = 0; c < partials.size(); ++c) {
        double s = 0.0;
        const std::size_t hi = std::min(v.size(), (c + 1) * chunk);
        for (std::size_t i = c * chunk; i < hi; ++i) {
            if (v[i] <= 0.0) continue;
            s += std::log1p(-std::exp(-p.kappa * pow_r(x / v[i], p.r)));
        }
        partials[c] = s;
    }
    const double log_prod = pairwise_sum(partials); // log prod F <= 0
    if (log_prod == 0.0) return neg_inf;            // every factor rounded to 1
    return log1mexp(-log_prod);
}

double sup_exceedance_prob(const WeightVector& wv, const StretchedExpParams& p, double x) {
    return std::exp(sup_exceedance_log(wv, p, x));
}

double sup_lower_log(const WeightVector& wv, const StretchedExpParams& p, double x) {
    p.validate();
    validate_threshold(x);
    return -p.kappa * pow_r(x / wv.a_max, p.r);
}

double sup_union_upper_log(const WeightVector& wv, const StretchedExpParams& p, double x) {
    p.validate();
    validate_threshold(x);
    const auto groups = group_weights(wv);
    std::vector<double> terms(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        terms[i] = -p.kappa * pow_r(x / groups[i].a, p.r);
    return std::min(0.0, logsumexp_groups(terms, groups));
}

double truncated_exp_tail_bound(double a, double b, const TailEnvelope& env, double r) {
    if (a < 0.0) throw std::domain_error("threshold a must be nonnegative");
    if (!(env.k > 0.0) || !(env.B_prime > 0.0)) throw std::domain_error("invalid tail envelope");
    if (!(b >= 0.0) || !(b < env.B_prime))
        throw std::domain_error("exponent tilt b must satisfy 0 <= b < B'");
    return env.k / (1.0 - b / env.B_prime) * std::exp(-(env.B_prime - b) * pow_r(a, r));
}

namespace {

BoundReport empty_report() {
    BoundReport rep{};
    rep.log_lower = neg_inf;
    rep.log_upper = 0.0;
    rep.lambda_used = 0.0;
    rep.A_used = 0.0;
    rep.log_sup_part = neg_inf;
    rep.log_chernoff_part = neg_inf;
    rep.log_jump_part = neg_inf;
    rep.log_mean_part = neg_inf;
    rep.chebyshev_q = 0.0;
    rep.epsilon_upper = 0.0;
    rep.epsilon_lower = 0.0;
    rep.tail_sum_bound = 0.0;
    rep.eta = 0.0;
    return rep;
}

std::vector<double> default_lambda_grid(double center) {
    std::vector<double> grid;
    grid.reserve(49);
    for (int k = -24; k <= 24; ++k) grid.push_back(center * std::exp2(k / 8.0));
    return grid;
}

// Upper bound on log E[e^{s X} 1{X <= T}] that is monotone in the weight:
// E[e^{lambda min(aX, A)}] = (truncated integral) + e^{lambda A} P(aX > A).
double bucket_factor_log(const StretchedExpParams& p, double lambda, double a, double A,
                         double rel_tol) {
    const double T = A / a;
    const double quad = truncated_mgf_log(p, lambda * a, T, rel_tol);
    const double capped = lambda * A + log_tail(p, T);
    return logsumexp2(quad, capped);
}

} // namespace

BoundReport certified_upper_bound(const WeightVector& wv, const StretchedExpParams& p,
                                  double x, const BoundConfig& cfg) {
    p.validate();
    validate_threshold(x);
    const double mean_x = mean(p);
    const double A = x - wv.sum * mean_x;
    if (!(A > 0.0))
        throw std::domain_error("certified upper bound needs x above the realized mean sum*E[X]");
    const double eps = check_epsilon_upper(p, cfg.epsilon);
    const double qtol = cfg.quad_rel_tol;
    if (!(qtol > 0.0) || qtol >= 1.0) throw config_error("quad_rel_tol must lie in (0,1)");

    const double B = p.kappa - 2.0 * eps;
    const double lambda_center = B * std::pow(A, p.r - 1.0) / pow_r(wv.a_max, p.r);
    const std::vector<double> grid =
        cfg.lambda_grid.empty() ? default_lambda_grid(lambda_center) : cfg.lambda_grid;
    for (double l : grid)
        if (!(l > 0.0)) throw config_error("lambda grid entries must be positive");

    auto groups = group_weights(wv);

    // Exact per-group quadrature for the heads; dyadic buckets (keyed by the largest
    // weight in the bucket, which dominates the factor) for a long tail of distinct
    // small weights.
    const std::size_t direct_limit = 512, direct_head = 256;
    std::size_t n_direct = groups.size();
    std::vector<WeightGroup> buckets;
    if (groups.size() > direct_limit) {
        n_direct = direct_head;
        const double ratio = std::exp2(1.0 / 8.0);
        double edge = groups[n_direct].a; // bucket upper edge
        WeightGroup cur{edge, 0.0};
        for (std::size_t i = n_direct; i < groups.size(); ++i) {
            while (groups[i].a < edge / ratio) {
                if (cur.count > 0.0) buckets.push_back(cur);
                edge /= ratio;
                cur = WeightGroup{edge, 0.0};
            }
            cur.count += groups[i].count;
        }
        if (cur.count > 0.0) buckets.push_back(cur);
    }

    const double log_sup = sup_exceedance_log(wv, p, A);
    const double infl = std::log1p(qtol); // per-factor quadrature slack, kept on the high side

    std::vector<double> chernoff(grid.size());
#pragma omp parallel for schedule(dynamic)
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double lambda = grid[j];
        double total = -lambda * x;
        for (std::size_t i = 0; i < n_direct; ++i) {
            const double lg = truncated_mgf_log(p, lambda * groups[i].a, A / groups[i].a, qtol);
            total += groups[i].count * (lg + infl);
        }
        for (const auto& b : buckets)
            total += b.count * (bucket_factor_log(p, lambda, b.a, A, qtol) + infl);
        chernoff[j] = total;
    }

    std::size_t best = 0;
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (chernoff[j] < chernoff[best]) best = j;

    BoundReport rep = empty_report();
    rep.A_used = A;
    rep.epsilon_upper = eps;
    rep.lambda_used = grid[best];
    rep.log_sup_part = log_sup;
    rep.log_chernoff_part = chernoff[best];
    rep.log_upper = std::min(0.0, logsumexp2(log_sup, chernoff[best]));
    rep.tail_sum_bound = wv.tail_sum_bound;
    rep.eta = wv.tail_sum_bound * sample_from_uniform(p, 1e-12);
    return rep;
}

BoundReport certified_lower_bound(const WeightVector& wv, const StretchedExpParams& p,
                                  double x, double epsilon) {
    p.validate();
    validate_threshold(x);
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw config_error("lower-bound epsilon must lie in (0,1)");
    const double mean_x = mean(p);
    const double var_x = variance(p);

    const double s_minus = wv.sum - wv.a_max;
    const double ssq_minus = std::max(0.0, wv.sum_squares - wv.a_max * wv.a_max);

    BoundReport rep = empty_report();
    rep.epsilon_lower = epsilon;
    rep.tail_sum_bound = wv.tail_sum_bound;
    rep.eta = wv.tail_sum_bound * sample_from_uniform(p, 1e-12);

    double q = 0.0;
    if (s_minus > 0.0 && ssq_minus > 0.0)
        q = var_x * ssq_minus / std::pow(epsilon * mean_x * s_minus, 2);
    rep.chebyshev_q = q;
    if (q >= 1.0) {
        rep.log_lower = neg_inf; // Chebyshev gives nothing; bound is vacuous
        return rep;
    }
    const double t = (x - s_minus * mean_x * (1.0 - epsilon)) / wv.a_max;
    rep.log_jump_part = t <= 0.0 ? 0.0 : -p.kappa * pow_r(t, p.r);
    rep.log_mean_part = std::log1p(-q);
    rep.log_lower = rep.log_jump_part + rep.log_mean_part;
    return rep;
}

BoundReport certified_bounds(const WeightVector& wv, const StretchedExpParams& p,
                             double x, const BoundConfig& cfg, double eps_lower) {
    if (eps_lower <= 0.0) eps_lower = std::min(0.5, pow_r(wv.a_max, p.r / 2.0));
    BoundReport lower = certified_lower_bound(wv, p, x, eps_lower);
    BoundReport rep = certified_upper_bound(wv, p, x, cfg);
    rep.log_lower = lower.log_lower;
    rep.log_jump_part = lower.log_jump_part;
    rep.log_mean_part = lower.log_mean_part;
    rep.chebyshev_q = lower.chebyshev_q;
    rep.epsilon_lower = lower.epsilon_lower;
    return rep;
}

ClosedFormBound closed_form_upper_bound(const WeightVector& wv, const StretchedExpParams& p,
                                        double x, const BoundConfig& cfg) {
    p.validate();
    validate_threshold(x);
    const double eps = check_epsilon_upper(p, cfg.epsilon);
    const double mean_x = mean(p);

    // Absorb the threshold into the weights: work with a_i/x against level 1.
    const double s_sum = wv.sum / x;
    const double a_max = wv.a_max / x;
    const double A = 1.0 - mean_x * s_sum;
    if (!(A > 0.0))
        throw std::domain_error("closed-form bound needs x above the realized mean sum*E[X]");

    const double k_env = cfg.envelope.k > 0.0 ? cfg.envelope.k : 1.0;
    const double B = p.kappa - 2.0 * eps;
    const double B_prime = p.kappa - eps;
    const double r = p.r;
    const double lambda = B * std::pow(A, r - 1.0) / pow_r(a_max, r);

    // Split each summand at eps/(lambda a_i); below it e^y - 1 <= (1+eps) y, above it
    // the envelope lemma collapses the sum to the closed form below, with
    // 2K = eps^{1+r} B^{-r} A^{r(1-r)} and c_eps = k (kappa-eps)/eps.
    const double K = 0.5 * std::pow(eps, 1.0 + r) * std::pow(B, -r) * std::pow(A, r * (1.0 - r));
    const double c_eps = k_env * B_prime / eps;
    const double v_min = std::pow(a_max, -r * (1.0 - r));
    const double t2 = c_eps * std::pow(K, -1.0 / r) * std::exp(-K * v_min) * std::pow(a_max, -r) * s_sum;
    const double chernoff_log = -lambda + (1.0 + eps) * lambda * mean_x * s_sum + t2;

    const auto groups = group_weights(wv);
    std::vector<double> sup_terms(groups.size());
    for (std::size_t i = 0; i < groups.size(); ++i)
        sup_terms[i] = -B_prime * pow_r(A * x / groups[i].a, r);
    const double sup_log = std::log(k_env) + logsumexp_groups(sup_terms, groups);

    ClosedFormBound out{};
    out.lambda = lambda;
    out.A = A;
    out.log_sup_part = sup_log;
    out.log_chernoff_part = chernoff_log;
    out.log_bound = std::min(0.0, logsumexp2(sup_log, chernoff_log));
    out.normalized = pow_r(wv.a_max, r) * out.log_bound;

    out.small_exp_step_ok = std::expm1(eps) / eps <= 1.0 + eps;
    out.mean_margin_ok = 1.0 - (1.0 + eps) * mean_x * s_sum > 0.0;
    // e^{-u} <= u^{-1/r} at u = K (a_max^r / a_i)^r for every retained weight; for
    // 1/r < e this holds everywhere, otherwise a middle band of u can fail.
    bool decay_ok = true;
    const double amr = pow_r(a_max, r);
    for (const auto& g : groups) {
        const double u = K * pow_r(amr / (g.a / x), r);
        if (u <= 1.0) continue;
        if (-u > -std::log(u) / r) { // e^{-u} > u^{-1/r}
            decay_ok = false;
            break;
        }
    }
    out.poly_decay_step_ok = decay_ok;
    return out;
}

} // namespace sesum
