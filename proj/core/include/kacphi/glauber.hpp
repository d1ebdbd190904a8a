#pragma once

#include "kacphi/kernel.hpp"
#include "kacphi/rng.hpp"
#include "kacphi/snapshot.hpp"
#include "kacphi/torus_field.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace kacphi {

// Parameters of the spin-flip dynamics plus the space/time/field scalings
// that connect the microscopic chain to the macroscopic fluctuation field.
struct DynamicsParams {
    double beta = 1.0; // inverse temperature
    double b = 0.0;    // external field
    double A = 0.0;    // coupling constant of the near-critical window
    double gamma = 0.5;
    double alpha = 1.0;   // time scaling: t_macro = alpha * t_micro
    double delta = 1.0;   // field scaling: X = delta^{-1} h
    double c_gamma = 0.0; // renormalization constant baked into beta
};

// Lattice size induced by the critical scaling eps = gamma^2 (up to integer
// rounding): N = round(gamma^{-2}).
int scaling_lattice_size(double gamma);

// Critical window: delta = gamma, alpha = gamma^2,
// beta = 1 + gamma^2 (C_gamma + A), with C_gamma computed from the kernel.
DynamicsParams critical_scaling(const KacKernel& kernel, double A, double b = 0.0);

// Fixed-parameter dynamics with trivial scalings (small-lattice/oracle use).
DynamicsParams plain_params(double beta, double b, double gamma);

// Probability that a proposed flip of a spin with value `spin` is accepted,
//   1/2 * (1 - spin * tanh(field_term)),   field_term = beta*h + b.
// The ratio between a configuration and its single-site flip equals
// exp(-2*spin*field_term), which is detailed balance with respect to the
// Gibbs weight exp(+H).
double flip_probability(double spin, double field_term);

// Continuous-time single-spin-flip dynamics, realized by superposition: a
// global Exponential(|Lambda_N|) clock, a uniformly chosen site, and thinning
// by flip_probability. The local field h(x) = sum_z kappa(x-z) s(z) is
// maintained incrementally (O(support) per flip) with a periodic
// recompute-from-scratch to bound floating-point drift.
//
// One trajectory is strictly sequential; replicas should each own a
// simulation constructed with an independent seed.
class GlauberSimulation {
  public:
    GlauberSimulation(std::shared_ptr<const KacKernel> kernel, DynamicsParams params,
                      std::uint64_t seed);

    // independent fair +-1 coins (the standard start for equilibrium runs)
    void randomize_spins();
    void set_spins(const std::vector<std::int8_t>& spins);

    struct Event {
        double dt_micro = 0.0; // clock increment (before the event)
        std::size_t site = 0;  // proposed site (flat index)
        bool flipped = false;
        std::int8_t new_spin = 0; // spin value after the event
    };

    // one ring of the global clock; at most one spin flips
    Event step();
    // advance the chain to exactly this micro time: rings at or before it are
    // executed, the ring that would land beyond it is discarded and the clock
    // parked at the target (law-exact: the exponential gap is memoryless)
    void run_micro_time(double t_micro_target);
    void run_macro_time(double t_macro_target) {
        run_micro_time(t_macro_target / params_.alpha);
    }
    void run_events(std::uint64_t n_events);

    double t_micro() const { return t_micro_; }
    double t_macro() const { return params_.alpha * t_micro_; }
    std::uint64_t events() const { return events_; }
    std::uint64_t flips() const { return flips_; }

    const DynamicsParams& params() const { return params_; }
    const KacKernel& kernel() const { return *kernel_; }
    int n() const { return field_.n(); }
    std::size_t sites() const { return field_.size(); }

    const std::vector<std::int8_t>& spins() const { return spins_; }
    const TorusField& local_field() const { return field_; }
    long long magnetization() const; // sum of spins, exact integer

    // X(x) = delta^{-1} h(x), the kernel-smoothed rescaled field
    TorusField fluctuation_field() const;
    // delta^{-1} (s(x) - m), the centered rescaled spin field
    TorusField centered_spin_field(double m) const;

    // recompute h from scratch (FFT convolution); returns the max absolute
    // deviation of the incremental field from the fresh one
    double refresh_local_field();
    // flips between automatic refreshes (default 1,000,000)
    void set_refresh_interval(std::uint64_t flips_between) { refresh_interval_ = flips_between; }
    std::uint64_t refreshes() const { return refreshes_; }
    double max_refresh_deviation() const { return max_refresh_deviation_; }

    SpinCheckpoint checkpoint() const;
    void restore(const SpinCheckpoint& c);

    // Test hook: force all acceptance decisions to reject (frozen dynamics,
    // clock still runs). Used by linearization tests.
    void freeze(bool frozen) { frozen_ = frozen; }

  private:
    Event step_after(double gap_micro);
    void apply_flip_to_field(std::size_t site, double new_spin);
    void recompute_field();

    std::shared_ptr<const KacKernel> kernel_;
    DynamicsParams params_;
    Rng rng_;
    std::vector<std::int8_t> spins_;
    TorusField field_; // local field h
    double t_micro_ = 0.0;
    std::uint64_t events_ = 0;
    std::uint64_t flips_ = 0;
    std::uint64_t flips_since_refresh_ = 0;
    std::uint64_t refresh_interval_ = 1000000;
    std::uint64_t refreshes_ = 0;
    double max_refresh_deviation_ = 0.0;
    bool frozen_ = false;
};

// Kernel Laplacian Delta f = eps^{-2} gamma^2 (K * f - f); its Fourier
// multiplier is eps^{-2} gamma^2 (khat(w) - 1) <= 0. Under the exact critical
// scaling eps = gamma^2 the prefactor equals gamma^{-2} = alpha^{-1}, so this
// is also the linear part of the exact drift below.
TorusField kernel_laplacian(const TorusField& f, const KacKernel& kernel);
std::vector<double> kernel_laplacian_multiplier(const KacKernel& kernel);
// e^{t Delta} f via the spectral multiplier, exact for the discrete operator
TorusField apply_heat_semigroup(const TorusField& f, const KacKernel& kernel, double t);

// Exact macroscopic compensator of the fluctuation field:
//   alpha^{-1} ( K * ( delta^{-1} tanh(beta*delta*X + b) ) - X ).
TorusField drift_field(const TorusField& x_field, const DynamicsParams& params,
                       const KacKernel& kernel);

// Third-order expansion of the exact drift around criticality (b = 0):
//   Delta X - (1/3)(X^3 - 3 c_gamma X) + A X,
// the cubic written as the variance-c_gamma Hermite polynomial so that the
// counterterm matches the exact drift to O(gamma^2).
TorusField drift_field_expanded(const TorusField& x_field, const DynamicsParams& params,
                                const KacKernel& kernel);

// Pointwise Hermite observable H_j(Z(x), c) for j in {1,2,3}
TorusField wick_observable(const TorusField& z_field, int j, double c);

} // namespace kacphi
