#include "polblock/special_functions.hpp"

#include <cmath>
#include <limits>

#include "polblock/errors.hpp"

namespace polblock::special {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Ei(x) for 0 < x <= 40: gamma + ln x + sum x^k / (k k!). All terms are
// positive, so there is no cancellation in the sum.
double ei_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
        term *= x / k;
        const double contrib = term / k;
        sum += contrib;
        if (contrib < kEps * sum) break;
    }
    return euler_gamma + std::log(x) + sum;
}

// e^{-x} Ei(x) ~ (1/x) sum k!/x^k, truncated at the smallest term.
double scaled_ei_asymptotic(double x)
{
    double term = 1.0;
    double sum = 1.0;
    for (int k = 1; k < 200; ++k) {
        const double next = term * k / x;
        if (next > term) break;
        term = next;
        sum += term;
        if (term < kEps * sum) break;
    }
    return sum / x;
}

// E1(x) for 0 < x <= 1: -gamma - ln x - sum (-x)^k / (k k!)
double e1_series(double x)
{
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
        term *= -x / k;
        const double contrib = term / k;
        sum += contrib;
        if (std::abs(contrib) < kEps * std::abs(sum)) break;
    }
    return -euler_gamma - std::log(x) - sum;
}

// e^{x} E1(x) for x > 1: modified Lentz evaluation of the continued fraction
// 1 / (x + 1 - 1^2/(x + 3 - 2^2/(x + 5 - ...)))
double scaled_e1_continued_fraction(double x)
{
    constexpr double tiny = 1e-300;
    double b = x + 1.0;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i < 1000; ++i) {
        const double a = -static_cast<double>(i) * i;
        b += 2.0;
        d = 1.0 / (a * d + b);
        c = b + a / c;
        const double del = c * d;
        h *= del;
        if (std::abs(del - 1.0) < kEps) return h;
    }
    throw Error(ErrorKind::numerical_instability, "spectral", "E1 continued fraction did not converge");
}

} // namespace

double expint_e1(double x)
{
    if (!(x > 0.0)) throw Error(ErrorKind::domain, "spectral", "E1(x) requires x > 0");
    return x <= 1.0 ? e1_series(x) : std::exp(-x) * scaled_e1_continued_fraction(x);
}

double scaled_expint_e1(double x)
{
    if (!(x > 0.0)) throw Error(ErrorKind::domain, "spectral", "E1(x) requires x > 0");
    return x <= 1.0 ? std::exp(x) * e1_series(x) : scaled_e1_continued_fraction(x);
}

double expint_ei(double x)
{
    if (x == 0.0) return -std::numeric_limits<double>::infinity();
    if (x < 0.0) return -expint_e1(-x);
    if (x <= 40.0) return ei_series(x);
    return std::exp(x) * scaled_ei_asymptotic(x);
}

double scaled_expint_ei(double x)
{
    if (x > 40.0) return scaled_ei_asymptotic(x);
    if (x < 0.0) return -scaled_expint_e1(-x);
    return std::exp(-x) * expint_ei(x);
}

} // namespace polblock::special
