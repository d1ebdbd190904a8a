#pragma once

#include "kacphi/torus_field.hpp"

#include <functional>
#include <string>
#include <vector>

namespace kacphi {

// Smooth test function on the torus [-1,1]^2, evaluable anywhere; sampled on
// lattices as needed for pairings.
struct TestFunction {
    std::string name;
    std::function<double(double, double)> eval;
};

// Named library: "one" (constant 1), "mode_<a>_<b>_re/_im" (real/imaginary
// parts of e^{i pi (a x1 + b x2)}), "bump" (smooth bump at the origin,
// radius 1/2).
TestFunction make_test_function(const std::string& name);
std::vector<TestFunction> standard_test_functions();

// phi sampled at the lattice points of Lambda_eps
TorusField sample_test_function(const TestFunction& phi, int n);

// <f, phi>_{Lambda_eps} = sum eps^2 f(x) phi(x)
double pair_with_test_function(const TorusField& f, const TestFunction& phi);

// Named scalar functionals of a field: "mean", "l2_pow" (sum eps^2 f^2),
// "l4_pow", "max_abs", "pair_<test function name>".
using FieldObservable = std::function<double(const TorusField&)>;
FieldObservable make_field_observable(const std::string& name);

} // namespace kacphi
