#pragma once

#include <vector>

namespace kacphi {

// Variance-c Hermite polynomial H_n(x, c), generated by
//   exp(x t - c t^2 / 2) = sum_n H_n(x, c) t^n / n!
// so H_0 = 1, H_1 = x, H_2 = x^2 - c, H_3 = x^3 - 3cx,
// H_4 = x^4 - 6cx^2 + 3c^2, H_5 = x^5 - 10cx^3 + 15c^2x.
// Degrees 0..5 are supported; out of range throws std::invalid_argument.
double hermite(int n, double x, double c);

// Coefficients d_0..d_n of the recombination identity
//   H_n(a + b, c) = sum_j binom(n,j) b^{n-j} H_j(a, c),
// i.e. d_j = binom(n,j) b^{n-j}. The coefficients do not depend on the
// variance; the unused parameter position in callers documents which c the
// right-hand side is taken at.
std::vector<double> wick_recombine(int n, double b);

// Re-expands a polynomial given in the variance-c_inf Hermite basis into the
// variance-c_t basis: with input a_n (index = degree) satisfying
// P(x) = sum_n a_n H_n(x, c_inf), returns a_n(t) with
// P(x) = sum_n a_n(t) H_n(x, c_t) identically in x. Follows from
//   H_n(x, c + d) = sum_m (-d/2)^m n!/(m! (n-2m)!) H_{n-2m}(x, c).
// For the cubic drift this is a_1(t) = a_1 - 3 a_3 (c_inf - c_t).
std::vector<double> coefficient_shift(const std::vector<double>& coeffs, double c_inf,
                                      double c_t);

} // namespace kacphi
