#include "kacphi/torus_field.hpp"

#include "kacphi/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kacphi {

TorusField::TorusField(int n, double fill)
    : n_(n), values_(static_cast<std::size_t>(4) * n * n, fill) {
    if (n < 1) throw std::invalid_argument("TorusField: n must be >= 1");
}

TorusField::TorusField(int n, std::vector<double> values) : n_(n), values_(std::move(values)) {
    if (n < 1) throw std::invalid_argument("TorusField: n must be >= 1");
    if (values_.size() != static_cast<std::size_t>(4) * n * n)
        throw std::invalid_argument("TorusField: value count must be 4N^2");
}

TorusField::TorusField(const TorusField& other) : n_(other.n_), values_(other.values_) {
    std::lock_guard<std::mutex> lk(other.cache_mutex_);
    cache_ = other.cache_;
}

TorusField& TorusField::operator=(const TorusField& other) {
    if (this == &other) return *this;
    n_ = other.n_;
    values_ = other.values_;
    std::lock_guard<std::mutex> lk(other.cache_mutex_);
    cache_ = other.cache_;
    return *this;
}

TorusField& TorusField::operator+=(const TorusField& g) {
    if (g.n_ != n_) throw std::invalid_argument("TorusField +=: size mismatch");
    invalidate();
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += g.values_[i];
    return *this;
}

TorusField& TorusField::operator-=(const TorusField& g) {
    if (g.n_ != n_) throw std::invalid_argument("TorusField -=: size mismatch");
    invalidate();
    for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= g.values_[i];
    return *this;
}

TorusField& TorusField::operator*=(double a) {
    invalidate();
    for (double& v : values_) v *= a;
    return *this;
}

double lp_norm_pow(const TorusField& f, double p) {
    if (!(p >= 1.0) || std::isinf(p))
        throw std::invalid_argument("lp_norm_pow: need finite p >= 1");
    const double w = f.epsilon() * f.epsilon();
    NeumaierSum s;
    long pi = static_cast<long>(p);
    if (static_cast<double>(pi) == p && pi <= 8) {
        for (double v : f.values()) {
            double a = std::abs(v);
            double acc = 1.0;
            for (long k = 0; k < pi; ++k) acc *= a;
            s.add(w * acc);
        }
    } else {
        for (double v : f.values()) s.add(w * std::pow(std::abs(v), p));
    }
    return s.value();
}

double lp_norm(const TorusField& f, double p) {
    if (std::isinf(p) && p > 0) {
        double m = 0.0;
        for (double v : f.values()) m = std::max(m, std::abs(v));
        return m;
    }
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: need p >= 1 or p = inf");
    return std::pow(lp_norm_pow(f, p), 1.0 / p);
}

double inner_product(const TorusField& f, const TorusField& g) {
    if (f.n() != g.n()) throw std::invalid_argument("inner_product: size mismatch");
    const double w = f.epsilon() * f.epsilon();
    NeumaierSum s;
    const auto& fv = f.values();
    const auto& gv = g.values();
    for (std::size_t i = 0; i < fv.size(); ++i) s.add(w * fv[i] * gv[i]);
    return s.value();
}

} // namespace kacphi
