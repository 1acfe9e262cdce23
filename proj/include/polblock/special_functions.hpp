#pragma once

namespace polblock::special {

inline constexpr double euler_gamma = 0.57721566490153286060651209008240243;

// Exponential integral Ei(x) = -PV int_{-x}^inf e^{-t}/t dt, defined for x != 0.
// Ei(0) returns -inf.
double expint_ei(double x);

// E1(x) = int_x^inf e^{-t}/t dt for x > 0.
double expint_e1(double x);

// e^{x} E1(x) for x > 0
double scaled_expint_e1(double x);

// e^{-x} Ei(x), evaluated without overflow for large positive x.
double scaled_expint_ei(double x);

} // namespace polblock::special
