#include "kacphi/oracle.hpp"

#include "kacphi/glauber.hpp"
#include "kacphi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>

namespace kacphi {

ExactGibbs::ExactGibbs(std::shared_ptr<const KacKernel> kernel, double beta, double b)
    : kernel_(std::move(kernel)), beta_(beta), b_(b) {
    const TorusField& layout = kernel_->macroscopic_field();
    site_count_ = layout.size();
    if (site_count_ > 20)
        throw std::invalid_argument("enumeration budget is 20 spins; lattice has " +
                                    std::to_string(site_count_));

    pair_coupling_.resize(site_count_ * site_count_);
    for (std::size_t x = 0; x < site_count_; ++x) {
        auto [x1, x2] = layout.coord(x);
        for (std::size_t y = 0; y < site_count_; ++y) {
            auto [y1, y2] = layout.coord(y);
            pair_coupling_[x * site_count_ + y] = kernel_->kappa(x1 - y1, x2 - y2);
        }
    }

    std::size_t count = static_cast<std::size_t>(1) << site_count_;
    std::vector<double> logw(count);
    double max_logw = -std::numeric_limits<double>::infinity();
    for (std::size_t c = 0; c < count; ++c) {
        logw[c] = hamiltonian(static_cast<std::uint32_t>(c));
        max_logw = std::max(max_logw, logw[c]);
    }
    NeumaierSum z;
    for (double lw : logw) z.add(std::exp(lw - max_logw));
    log_partition_ = max_logw + std::log(z.value());
    weights_.resize(count);
    for (std::size_t c = 0; c < count; ++c) weights_[c] = std::exp(logw[c] - log_partition_);
}

double ExactGibbs::hamiltonian(std::uint32_t config) const {
    NeumaierSum h;
    for (std::size_t x = 0; x < site_count_; ++x) {
        double sx = spin(config, x);
        h.add(0.5 * beta_ * sx * site_field(config, x));
        h.add(b_ * sx);
    }
    return h.value();
}

double ExactGibbs::site_field(std::uint32_t config, std::size_t z) const {
    const double* row = pair_coupling_.data() + z * site_count_;
    double h = 0.0;
    for (std::size_t y = 0; y < site_count_; ++y) h += row[y] * spin(config, y);
    return h;
}

double ExactGibbs::flip_rate_at(std::uint32_t config, std::size_t z) const {
    return flip_probability(spin(config, z), beta_ * site_field(config, z) + b_);
}

double ExactGibbs::expectation(const std::function<double(std::uint32_t)>& f) const {
    NeumaierSum sum;
    for (std::size_t c = 0; c < weights_.size(); ++c)
        sum.add(weights_[c] * f(static_cast<std::uint32_t>(c)));
    return sum.value();
}

double ExactGibbs::spin_expectation(std::size_t x) const {
    return expectation([x](std::uint32_t c) { return spin(c, x); });
}

double ExactGibbs::pair_expectation(std::size_t x, std::size_t y) const {
    return expectation([x, y](std::uint32_t c) { return spin(c, x) * spin(c, y); });
}

double ExactGibbs::covariance(std::size_t x, std::size_t y) const {
    return pair_expectation(x, y) - spin_expectation(x) * spin_expectation(y);
}

double ExactGibbs::detailed_balance_violation() const {
    double worst = 0.0;
    for (std::size_t c = 0; c < weights_.size(); ++c) {
        std::uint32_t config = static_cast<std::uint32_t>(c);
        for (std::size_t z = 0; z < site_count_; ++z) {
            std::uint32_t flipped = config ^ (1u << z);
            double forward = flip_rate_at(config, z);
            double backward = flip_rate_at(flipped, z);
            // rates lie in (0,1) strictly for finite field terms
            double rate_ratio = forward / backward;
            double weight_ratio = std::exp(hamiltonian(flipped) - hamiltonian(config));
            worst = std::max(worst, std::abs(rate_ratio - weight_ratio) / weight_ratio);
        }
    }
    return worst;
}

double ExactGibbs::invariance_defect(const std::function<double(std::uint32_t)>& f) const {
    NeumaierSum sum;
    for (std::size_t c = 0; c < weights_.size(); ++c) {
        std::uint32_t config = static_cast<std::uint32_t>(c);
        double fc = f(config);
        double generator = 0.0;
        for (std::size_t z = 0; z < site_count_; ++z)
            generator += flip_rate_at(config, z) * (f(config ^ (1u << z)) - fc);
        sum.add(weights_[c] * generator);
    }
    return std::abs(sum.value());
}

double ExactGibbs::max_invariance_defect(int random_functionals, std::uint64_t seed) const {
    double worst = 0.0;
    for (std::size_t x = 0; x < site_count_; ++x)
        worst = std::max(worst,
                         invariance_defect([x](std::uint32_t c) { return spin(c, x); }));
    for (std::size_t x = 0; x < site_count_; ++x)
        for (std::size_t y = x + 1; y < site_count_; ++y)
            worst = std::max(worst, invariance_defect([x, y](std::uint32_t c) {
                                 return spin(c, x) * spin(c, y);
                             }));
    Rng rng(seed);
    for (int r = 0; r < random_functionals; ++r) {
        // random +-1 functional: sign of a hash of (config, draw)
        std::uint64_t salt = rng.raw();
        worst = std::max(worst, invariance_defect([salt](std::uint32_t c) {
                             std::uint64_t s = salt ^ (static_cast<std::uint64_t>(c) *
                                                       0x9e3779b97f4a7c15ULL);
                             return splitmix64(s) & 1ULL ? 1.0 : -1.0;
                         }));
    }
    return worst;
}

} // namespace kacphi
