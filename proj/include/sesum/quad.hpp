#pragma once

#include <functional>

#include "sesum/dist.hpp"

namespace sesum {

// Adaptive Gauss-Kronrod 7/15 on [a,b]. Each subinterval is accepted once the
// embedded error estimate drops below rel_tol times its own contribution (plus a
// tiny absolute floor), so for nonnegative integrands the total relative error is
// bounded by rel_tol. Throws numeric_error if the subdivision depth is exhausted.
double integrate_gk(const std::function<double(double)>& f, double a, double b,
                    double rel_tol, double abs_floor = 1e-300);

// log E[exp(s*X) * 1{X <= T}] for X stretched-exponential, computed as
// integral_0^{kappa T^r} exp(s*(u/kappa)^{1/r} - u) du under the substitution
// u = kappa * t^r, which removes the t^{r-1} density singularity at zero.
// The exponent is shifted by its maximum before integrating so the value cannot
// overflow even when s*T is in the hundreds.
double truncated_mgf_log(const StretchedExpParams& p, double s, double T, double rel_tol);

} // namespace sesum
