#include "kacphi/hermite.hpp"

#include <cmath>
#include <stdexcept>

namespace kacphi {

namespace {

double binom(int n, int k) {
    double r = 1.0;
    for (int i = 1; i <= k; ++i) r *= static_cast<double>(n - k + i) / static_cast<double>(i);
    return r;
}

double factorial(int n) {
    double r = 1.0;
    for (int i = 2; i <= n; ++i) r *= static_cast<double>(i);
    return r;
}

} // namespace

double hermite(int n, double x, double c) {
    if (n < 0 || n > 5) throw std::invalid_argument("hermite degree must lie in 0..5");
    // three-term recurrence H_{k+1} = x H_k - c k H_{k-1}
    double prev = 1.0;
    if (n == 0) return prev;
    double cur = x;
    for (int k = 1; k < n; ++k) {
        double next = x * cur - c * static_cast<double>(k) * prev;
        prev = cur;
        cur = next;
    }
    return cur;
}

std::vector<double> wick_recombine(int n, double b) {
    if (n < 0 || n > 5) throw std::invalid_argument("hermite degree must lie in 0..5");
    std::vector<double> d(static_cast<std::size_t>(n) + 1);
    for (int j = 0; j <= n; ++j) d[j] = binom(n, j) * std::pow(b, n - j);
    return d;
}

std::vector<double> coefficient_shift(const std::vector<double>& coeffs, double c_inf,
                                      double c_t) {
    double delta = c_inf - c_t;
    std::vector<double> shifted(coeffs.size(), 0.0);
    for (std::size_t n = 0; n < coeffs.size(); ++n) {
        if (coeffs[n] == 0.0) continue;
        for (std::size_t m = 0; 2 * m <= n; ++m) {
            std::size_t j = n - 2 * m;
            double weight = std::pow(-delta / 2.0, static_cast<double>(m)) /
                            factorial(static_cast<int>(m)) *
                            factorial(static_cast<int>(n)) / factorial(static_cast<int>(j));
            shifted[j] += coeffs[n] * weight;
        }
    }
    return shifted;
}

} // namespace kacphi
