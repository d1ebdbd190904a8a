#include "kacphi/observables.hpp"

#include "kacphi/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kacphi {

namespace {

constexpr double kPi = 3.14159265358979323846264338327950288;

bool parse_mode_name(const std::string& name, int& a, int& b, bool& real_part) {
    // mode_<a>_<b>_re or mode_<a>_<b>_im
    if (name.rfind("mode_", 0) != 0) return false;
    std::size_t p1 = name.find('_', 5);
    if (p1 == std::string::npos) return false;
    std::size_t p2 = name.find('_', p1 + 1);
    if (p2 == std::string::npos) return false;
    std::string tail = name.substr(p2 + 1);
    if (tail != "re" && tail != "im") return false;
    try {
        a = std::stoi(name.substr(5, p1 - 5));
        b = std::stoi(name.substr(p1 + 1, p2 - p1 - 1));
    } catch (const std::exception&) {
        return false;
    }
    real_part = tail == "re";
    return true;
}

} // namespace

TestFunction make_test_function(const std::string& name) {
    if (name == "one") return {name, [](double, double) { return 1.0; }};
    if (name == "bump") {
        // smooth bump supported on |x| <= 1/2
        return {name, [](double x1, double x2) {
                    double r2 = x1 * x1 + x2 * x2;
                    double u = 1.0 - 4.0 * r2;
                    return u > 0.0 ? std::exp(1.0 - 1.0 / u) : 0.0;
                }};
    }
    int a = 0, b = 0;
    bool real_part = true;
    if (parse_mode_name(name, a, b, real_part)) {
        if (real_part)
            return {name, [a, b](double x1, double x2) {
                        return std::cos(kPi * (a * x1 + b * x2));
                    }};
        return {name, [a, b](double x1, double x2) {
                    return std::sin(kPi * (a * x1 + b * x2));
                }};
    }
    throw std::invalid_argument("unknown test function: " + name);
}

std::vector<TestFunction> standard_test_functions() {
    std::vector<TestFunction> fs;
    for (const char* n : {"one", "mode_1_0_re", "mode_0_1_re", "mode_1_1_re", "mode_1_0_im",
                          "mode_2_1_re", "bump"})
        fs.push_back(make_test_function(n));
    return fs;
}

TorusField sample_test_function(const TestFunction& phi, int n) {
    TorusField f(n);
    std::vector<double>& v = f.mutable_values();
    double eps = f.epsilon();
    for (std::size_t i = 0; i < v.size(); ++i) {
        auto [c1, c2] = f.coord(i);
        v[i] = phi.eval(eps * c1, eps * c2);
    }
    return f;
}

double pair_with_test_function(const TorusField& f, const TestFunction& phi) {
    double eps = f.epsilon();
    double cell = eps * eps;
    NeumaierSum sum;
    for (std::size_t i = 0; i < f.size(); ++i) {
        auto [c1, c2] = f.coord(i);
        sum.add(cell * f.values()[i] * phi.eval(eps * c1, eps * c2));
    }
    return sum.value();
}

FieldObservable make_field_observable(const std::string& name) {
    if (name == "mean")
        return [](const TorusField& f) {
            NeumaierSum s;
            for (double v : f.values()) s.add(v);
            return s.value() / static_cast<double>(f.size());
        };
    if (name == "l2_pow") return [](const TorusField& f) { return lp_norm_pow(f, 2.0); };
    if (name == "l4_pow") return [](const TorusField& f) { return lp_norm_pow(f, 4.0); };
    if (name == "max_abs")
        return [](const TorusField& f) {
            return lp_norm(f, std::numeric_limits<double>::infinity());
        };
    if (name.rfind("pair_", 0) == 0) {
        TestFunction phi = make_test_function(name.substr(5));
        return [phi](const TorusField& f) { return pair_with_test_function(f, phi); };
    }
    throw std::invalid_argument("unknown observable: " + name);
}

} // namespace kacphi
