#include "sesum/weights.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"

namespace sesum {

WeightFamily WeightFamily::cramer() { return WeightFamily{Kind::cramer, 2.0, {}}; }

WeightFamily WeightFamily::remainder(double p) {
    if (!(p > 1.0)) throw config_error("remainder family requires decay exponent p > 1");
    return WeightFamily{Kind::remainder, p, {}};
}

WeightFamily WeightFamily::moving_average(double p) {
    if (!(p > 1.0)) throw config_error("moving_average family requires decay exponent p > 1");
    return WeightFamily{Kind::moving_average, p, {}};
}

WeightFamily WeightFamily::explicit_list(std::vector<double> w) {
    bool any_positive = false;
    for (double x : w) {
        if (!std::isfinite(x) || x < 0.0) throw config_error("explicit weights must be finite and nonnegative");
        if (x > 0.0) any_positive = true;
    }
    if (!any_positive) throw config_error("explicit weights need at least one positive entry");
    return WeightFamily{Kind::explicit_list, 2.0, std::move(w)};
}

WeightFamily load_weight_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open weight file: " + path);
    std::vector<double> w;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        double v;
        if (ls >> v) {
            std::string rest;
            if (ls >> rest)
                throw config_error(path + ":" + std::to_string(lineno) + ": expected one weight per line");
            w.push_back(v);
        } else {
            std::string rest;
            std::istringstream chk(line);
            if (chk >> rest)
                throw config_error(path + ":" + std::to_string(lineno) + ": not a number: " + rest);
        }
    }
    if (w.empty()) throw config_error(path + ": no weights found");
    return WeightFamily::explicit_list(std::move(w));
}

double zeta_tail(double p, std::size_t n) {
    if (!(p > 1.0)) throw config_error("zeta_tail requires p > 1");
    if (n == 0) n = 1;
    const std::size_t lead = 24;
    double direct = 0.0;
    for (std::size_t i = n; i < n + lead; ++i) direct += std::pow(double(i), -p);
    const double N = double(n + lead);
    // Euler-Maclaurin for sum_{i>=N} i^{-p}; correction terms through B6.
    double tail = std::pow(N, 1.0 - p) / (p - 1.0) + 0.5 * std::pow(N, -p);
    tail += p / 12.0 * std::pow(N, -p - 1.0);
    tail -= p * (p + 1.0) * (p + 2.0) / 720.0 * std::pow(N, -p - 3.0);
    tail += p * (p + 1.0) * (p + 2.0) * (p + 3.0) * (p + 4.0) / 30240.0 * std::pow(N, -p - 5.0);
    return direct + tail;
}

namespace {

void finalize(WeightVector& wv) {
    double best = -1.0;
    std::size_t best_k = 0;
    for (std::size_t k = 0; k < wv.values.size(); ++k) {
        if (wv.values[k] > best) {
            best = wv.values[k];
            best_k = k;
        }
    }
    wv.a_max = best;
    wv.argmax_index = wv.first_index + best_k;
    wv.sum = pairwise_sum(wv.values);
    std::vector<double> sq(wv.values.size());
    for (std::size_t k = 0; k < sq.size(); ++k) sq[k] = wv.values[k] * wv.values[k];
    wv.sum_squares = pairwise_sum(sq);
}

WeightVector realize_cramer(std::size_t n) {
    if (n == 0) throw config_error("cramer weights need n >= 1");
    WeightVector wv;
    wv.n = n;
    wv.first_index = 1;
    wv.values.assign(n, 1.0 / double(n));
    wv.tail_sum_bound = 0.0;
    finalize(wv);
    return wv;
}

WeightVector realize_remainder(double p, std::size_t n, double tol) {
    if (n == 0) throw config_error("remainder weights need n >= 1");
    if (!(tol > 0.0) || !(tol < 1.0)) throw config_error("truncation tolerance must be in (0,1)");
    const double rho = zeta_tail(p, n);
    // Integral bound sum_{i>M} i^{-p} <= M^{1-p}/(p-1): smallest M with omitted
    // normalized mass below tol.
    const double M_real = std::pow((p - 1.0) * tol * rho, -1.0 / (p - 1.0));
    if (!(M_real < double(max_realized_terms)))
        throw resource_error("remainder family cannot reach the requested truncation tolerance within " +
                             std::to_string(max_realized_terms) + " terms");
    std::size_t M = std::max<std::size_t>(n, std::size_t(std::ceil(M_real)));
    if (M - n + 1 > max_realized_terms)
        throw resource_error("remainder family cannot reach the requested truncation tolerance within " +
                             std::to_string(max_realized_terms) + " terms");
    WeightVector wv;
    wv.n = n;
    wv.first_index = n;
    wv.values.resize(M - n + 1);
    for (std::size_t i = n; i <= M; ++i) wv.values[i - n] = std::pow(double(i), -p) / rho;
    wv.tail_sum_bound = std::pow(double(M), 1.0 - p) / ((p - 1.0) * rho);
    finalize(wv);
    return wv;
}

WeightVector realize_moving_average(double p, std::size_t n) {
    if (n == 0) throw config_error("moving_average weights need n >= 1");
    const std::size_t phi = std::size_t(std::ceil(std::sqrt(double(n))));
    const std::size_t m = n; // window start
    WeightVector wv;
    wv.n = n;
    wv.first_index = m;
    wv.values.resize(phi);
    for (std::size_t j = 0; j < phi; ++j) wv.values[j] = std::pow(double(m + j), -p);
    const double w_sum = pairwise_sum(wv.values);
    for (double& v : wv.values) v /= w_sum; // window-sum normalizer: realized sum is 1
    wv.tail_sum_bound = 0.0;
    finalize(wv);
    return wv;
}

WeightVector realize_explicit(const std::vector<double>& w, std::size_t n) {
    WeightVector wv;
    wv.n = n == 0 ? w.size() : n;
    wv.first_index = 1;
    wv.values = w;
    wv.tail_sum_bound = 0.0;
    finalize(wv);
    return wv;
}

} // namespace

WeightVector realize(const WeightFamily& family, std::size_t n, double truncation_tol) {
    switch (family.kind) {
        case WeightFamily::Kind::cramer: return realize_cramer(n);
        case WeightFamily::Kind::remainder: return realize_remainder(family.p, n, truncation_tol);
        case WeightFamily::Kind::moving_average: return realize_moving_average(family.p, n);
        case WeightFamily::Kind::explicit_list: return realize_explicit(family.weights, n);
    }
    throw config_error("unknown weight family kind");
}

LimitSum limit_sum(const WeightFamily& family) {
    switch (family.kind) {
        case WeightFamily::Kind::cramer:
        case WeightFamily::Kind::remainder:
        case WeightFamily::Kind::moving_average:
            return LimitSum{1.0, true};
        case WeightFamily::Kind::explicit_list: {
            double s = 0.0;
            for (double x : family.weights) s += x;
            return LimitSum{s, false}; // fixed finite list: no n-limit to speak of
        }
    }
    throw config_error("unknown weight family kind");
}

} // namespace sesum
