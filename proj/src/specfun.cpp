#include "toarng/specfun.hpp"

#include <cmath>
#include <limits>

#include "toarng/errors.hpp"

namespace toarng::specfun {

double erfc(double x) { return std::erfc(x); }

double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-16;
constexpr double kTiny = 1e-300;

// Lower regularized gamma P(a, x) by power series around x = 0.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    double ap = a;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    const double lg = std::lgamma(a);
    return sum * std::exp(-x + a * std::log(x) - lg);
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction.
double gamma_q_cf(double a, double x) {
    double b = x + 1.0 - a;
    double c = 1.0 / kTiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = b + an / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    const double lg = std::lgamma(a);
    return std::exp(-x + a * std::log(x) - lg) * h;
}

} // namespace

double regularized_gamma_q(double a, double x) {
    if (!(a > 0.0) || !(x >= 0.0) || !std::isfinite(a) || !std::isfinite(x))
        throw StatError("regularized_gamma_q: requires a > 0 and x >= 0");
    if (x == 0.0) return 1.0;
    // The series converges fast left of the mean, the fraction right of it.
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

} // namespace toarng::specfun
