#pragma once

#include <functional>
#include <utility>
#include <vector>

namespace kacphi {

// High-accuracy scalar ODE integration (adaptive Runge-Kutta), used as the
// reference oracle for deterministic reductions and inequality checks.
// Returns the solution at t1; `trace`, when non-null, receives the accepted
// mesh (t, value) pairs.
double integrate_scalar(const std::function<double(double, double)>& rhs, double f0, double t0,
                        double t1, double abs_tol = 1e-12, double rel_tol = 1e-12,
                        std::vector<std::pair<double, double>>* trace = nullptr);

// Reference solution of v' = A v - v^3 / 3 at time T
double cubic_ode_reference(double A, double v0, double T, double tol = 1e-12);

// Integrates f' = -2 c1 f^lambda + c2 from f(0) = f0 >= 0 with lambda > 1,
// c1 > 0, c2 >= 0, and verifies at every accepted mesh point the bound
//   f(t) <= max( f0 / (1 + c1 (lambda-1) t f0^{lambda-1})^{1/(lambda-1)},
//                (c2/c1)^{1/lambda} ).
struct ComparisonCheck {
    bool ok = false;
    double max_violation = 0.0; // max over mesh of f(t) - bound(t)
    std::size_t mesh_points = 0;
};

ComparisonCheck ode_comparison_check(double c1, double c2, double lambda, double f0, double T);

} // namespace kacphi
