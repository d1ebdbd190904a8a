#pragma once

#include "kacphi/kernel.hpp"
#include "kacphi/rng.hpp"

#include <cstdint>
#include <functional>
#include <memory>
#include <vector>

namespace kacphi {

// Exact Gibbs measure on a tiny lattice by full enumeration. Configurations
// are encoded as bit masks: bit i (the TorusField flat index) set means spin
// +1. Weights are proportional to exp(+H) with
//   H(s) = (beta/2) sum_{x,y} kappa(x-y) s_x s_y + b sum_x s_x,
// accumulated in the log domain and normalized by log-sum-exp, so large beta
// cannot overflow. Budget: 4N^2 <= 20 spins.
//
// Immutable after construction; safe for shared concurrent reads.
class ExactGibbs {
  public:
    ExactGibbs(std::shared_ptr<const KacKernel> kernel, double beta, double b);

    int n() const { return kernel_->n(); }
    std::size_t sites() const { return site_count_; }
    std::size_t configs() const { return weights_.size(); }
    double beta() const { return beta_; }
    double b() const { return b_; }
    const KacKernel& kernel() const { return *kernel_; }

    static double spin(std::uint32_t config, std::size_t site) {
        return (config >> site) & 1u ? 1.0 : -1.0;
    }

    double weight(std::uint32_t config) const { return weights_[config]; }
    double hamiltonian(std::uint32_t config) const;
    // h(z) = sum_y kappa(z-y) s_y for the given configuration
    double site_field(std::uint32_t config, std::size_t z) const;
    // the same acceptance probability the simulation uses
    double flip_rate_at(std::uint32_t config, std::size_t z) const;

    // E[f] over the exact measure
    double expectation(const std::function<double(std::uint32_t)>& f) const;
    double spin_expectation(std::size_t x) const;
    double pair_expectation(std::size_t x, std::size_t y) const;
    // E[s_x s_y] - E[s_x] E[s_y]
    double covariance(std::size_t x, std::size_t y) const;

    // max over (config, site) of the relative gap between the flip-rate ratio
    // and exp(H difference); zero in exact arithmetic
    double detailed_balance_violation() const;

    // |sum_config P(config) (Lf)(config)| for the exact jump generator
    // Lf(s) = sum_z rate(z, s) (f(s^z) - f(s))
    double invariance_defect(const std::function<double(std::uint32_t)>& f) const;
    // max defect over the standard family: all s_x, all pairs s_x s_y, and
    // `random_functionals` random +-1-valued functions of the configuration
    double max_invariance_defect(int random_functionals, std::uint64_t seed) const;

  private:
    std::shared_ptr<const KacKernel> kernel_;
    double beta_;
    double b_;
    std::size_t site_count_;
    std::vector<double> pair_coupling_; // kappa(x-y), site_count^2, row-major
    std::vector<double> weights_;       // normalized probabilities
    double log_partition_;
};

} // namespace kacphi
