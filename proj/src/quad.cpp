#include "sesum/quad.hpp"

#include <algorithm>
#include <cmath>

#include "sesum/errors.hpp"
#include "sesum/numeric.hpp"

namespace sesum {
namespace {

// Kronrod-15 abscissae (nonnegative half) and weights; Gauss-7 weights sit on the
// odd-indexed abscissae. Standard double-precision values.
constexpr double xgk[8] = {
    0.9914553711208126, 0.9491079123427585, 0.8648644233597691, 0.7415311855993945,
    0.5860872354676911, 0.4058451513773972, 0.2077849550078985, 0.0};
constexpr double wgk[8] = {
    0.0229353220105292, 0.0630920926299785, 0.1047900103222502, 0.1406532597155259,
    0.1690047266392679, 0.1903505780647854, 0.2044329400752989, 0.2094821410847278};
constexpr double wg[4] = {
    0.1294849661688697, 0.2797053914892767, 0.3818300505051189, 0.4179591836734694};

struct Panel {
    double value;
    double error;
};

Panel gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double k = wgk[7] * fc;
    double g = wg[3] * fc;
    for (int j = 0; j < 7; ++j) {
        const double x = h * xgk[j];
        const double fsum = f(c - x) + f(c + x);
        k += wgk[j] * fsum;
        if (j % 2 == 1) g += wg[j / 2] * fsum;
    }
    return Panel{k * h, std::fabs((k - g) * h)};
}

double integrate_rec(const std::function<double(double)>& f, double a, double b,
                     double rel_tol, double abs_floor, int depth) {
    const Panel p = gk15(f, a, b);
    if (p.error <= rel_tol * std::fabs(p.value) + abs_floor) return p.value;
    if (depth <= 0) throw numeric_error("adaptive quadrature did not converge");
    const double c = 0.5 * (a + b);
    return integrate_rec(f, a, c, rel_tol, abs_floor, depth - 1) +
           integrate_rec(f, c, b, rel_tol, abs_floor, depth - 1);
}

} // namespace

double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_floor) {
    if (!(b > a)) return 0.0;
    return integrate_rec(f, a, b, rel_tol, abs_floor, 60);
}

double truncated_mgf_log(const StretchedExpParams& p, double s, double T, double rel_tol) {
    if (!(T > 0.0)) return neg_inf; // empty truncation window
    const double inv_r = 1.0 / p.r;
    const double U = p.kappa * pow_r(T, p.r);

    // Exponent h(u) = s*(u/kappa)^{1/r} - u. h is convex (1/r > 1), so its maximum
    // over [0,U] is at an endpoint and its only interior critical point is a minimum.
    const auto h = [&](double u) { return s * pow_inv_r(u / p.kappa, p.r, inv_r) - u; };
    const double hU = h(U);
    const double m = std::max(0.0, hU);
    const auto g = [&](double u) { return std::exp(h(u) - m); };

    // Split at the interior minimum of h when it exists; both halves are then monotone.
    double split = -1.0;
    if (s > 0.0) {
        const double t_star = std::pow(p.kappa * p.r / s, 1.0 / (1.0 - p.r));
        const double u_star = p.kappa * pow_r(t_star, p.r);
        if (u_star > 0.0 && u_star < U) split = u_star;
    }

    double total;
    if (split > 0.0) {
        total = integrate_gk(g, 0.0, split, rel_tol) + integrate_gk(g, split, U, rel_tol);
    } else {
        total = integrate_gk(g, 0.0, U, rel_tol);
    }
    if (!(total > 0.0)) return neg_inf;
    return m + std::log(total);
}

} // namespace sesum
