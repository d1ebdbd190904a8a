#include "kacphi/ode.hpp"

#include <boost/numeric/odeint.hpp>

#include <array>
#include <cmath>
#include <stdexcept>

namespace kacphi {

namespace odeint = boost::numeric::odeint;

double integrate_scalar(const std::function<double(double, double)>& rhs, double f0, double t0,
                        double t1, double abs_tol, double rel_tol,
                        std::vector<std::pair<double, double>>* trace) {
    using state = std::array<double, 1>;
    state y{f0};
    auto system = [&rhs](const state& v, state& dvdt, double t) { dvdt[0] = rhs(t, v[0]); };
    auto stepper = odeint::make_controlled<odeint::runge_kutta_dopri5<state>>(abs_tol, rel_tol);
    double dt0 = (t1 - t0) / 100.0;
    if (trace) {
        odeint::integrate_adaptive(stepper, system, y, t0, t1, dt0,
                                   [trace](const state& v, double t) {
                                       trace->emplace_back(t, v[0]);
                                   });
    } else {
        odeint::integrate_adaptive(stepper, system, y, t0, t1, dt0);
    }
    return y[0];
}

double cubic_ode_reference(double A, double v0, double T, double tol) {
    return integrate_scalar(
        [A](double, double v) { return A * v - v * v * v / 3.0; }, v0, 0.0, T, tol, tol);
}

ComparisonCheck ode_comparison_check(double c1, double c2, double lambda, double f0, double T) {
    if (!(lambda > 1.0)) throw std::invalid_argument("comparison exponent must exceed 1");
    if (!(c1 > 0.0)) throw std::invalid_argument("decay coefficient must be positive");
    if (c2 < 0.0) throw std::invalid_argument("forcing coefficient must be nonnegative");
    if (f0 < 0.0) throw std::invalid_argument("initial value must be nonnegative");
    if (!(T > 0.0)) throw std::invalid_argument("horizon must be positive");

    std::vector<std::pair<double, double>> trace;
    integrate_scalar(
        [c1, c2, lambda](double, double f) {
            return -2.0 * c1 * std::pow(std::max(f, 0.0), lambda) + c2;
        },
        f0, 0.0, T, 1e-12, 1e-12, &trace);

    double floor_branch = std::pow(c2 / c1, 1.0 / lambda);
    ComparisonCheck check;
    check.mesh_points = trace.size();
    for (const auto& [t, f] : trace) {
        double decay_branch =
            f0 / std::pow(1.0 + c1 * (lambda - 1.0) * t * std::pow(f0, lambda - 1.0),
                          1.0 / (lambda - 1.0));
        double bound = std::max(decay_branch, floor_branch);
        check.max_violation = std::max(check.max_violation, f - bound);
    }
    check.ok = check.max_violation <= 1e-9;
    return check;
}

} // namespace kacphi
