#pragma once

#include "kacphi/rng.hpp"
#include "kacphi/torus_field.hpp"

#include <cstdint>
#include <vector>

namespace kacphi {

// Renormalization constants of the Galerkin-truncated stochastic heat
// equation on modes Lambda_M \ {0}, with Laplacian coefficient theta
// (the linear flow is theta * Delta; theta = 1 is the canonical case):
//   renorm_c(t, M, theta)  = sum (1 - e^{-2 t theta pi^2 |w|^2}) / (4 theta pi^2 |w|^2)
//   renorm_c_inf(M, theta) = sum 1 / (4 theta pi^2 |w|^2)
// renorm_c increases to renorm_c_inf as t grows; both diverge like log M.
double renorm_c(double t, int m, double diffusivity = 1.0);
double renorm_c_inf(int m, double diffusivity = 1.0);

struct Phi42Params {
    int m = 8; // Galerkin size: modes Lambda_M, grid side 2M
    // drift coefficients by Hermite degree, taken at variance c_inf; the
    // cubic dynamics is {0, A, 0, -1/3}
    std::vector<double> coeffs{0.0, 0.0, 0.0, -1.0 / 3.0};
    double noise = 1.0; // noise amplitude multiplier; 0 switches randomness
                        // (and the Wick variances) off
    double pad = 1.5;   // zero-padding factor for pointwise products
    // coefficient of the Laplacian in the linear flow (theta * Delta).
    // theta = 1 is the canonical dynamics; a lattice model whose long-range
    // kernel carries diffusion coefficient theta is matched by setting this
    // to kernel_diffusivity(kernel). The Wick variances use the same theta,
    // keeping the renormalization self-consistent.
    double diffusivity = 1.0;
};

Phi42Params cubic_params(int m, double A, double noise = 1.0);

// Sampler for the renormalized cubic (degree <= 5 supported) stochastic
// dynamics via the decomposition X = heat-flowed initial condition + Z + V:
//   - Z solves dZ = theta Delta Z dt + sqrt(2) dW on the Galerkin modes; each
//     mode is advanced by its exact Ornstein-Uhlenbeck transition, calibrated
//     so that from Z(0) = 0 the point variance over nonzero modes equals
//     renorm_c(t, M, theta) exactly and the zero mode contributes variance
//     t/2 independent of theta.
//   - V solves the pathwise PDE with the Wick-renormalized polynomial drift,
//     discretized by first-order exponential Euler; products are formed
//     pointwise on the padded grid.
// step(dt) advances both and the shared clock.
class Phi42Sampler {
  public:
    Phi42Sampler(Phi42Params params, std::uint64_t seed);

    // project a lattice field (same M) as the initial condition; it is
    // carried under the heat flow exactly and absorbed into Z-tilde
    void set_initial_condition(const TorusField& x0);
    // convenience: spatially constant initial condition
    void set_constant_initial_condition(double v0);

    // exact OU transition of Z over dt; advances the clock and the variance
    // bookkeeping
    void ou_step(double dt);
    // one exponential-Euler update of V using the state at the current time;
    // does not advance the clock
    void dpd_step(double dt);
    // dpd_step followed by ou_step
    void step(double dt);

    double t() const { return t_; }
    int m() const { return m_; }
    const Phi42Params& params() const { return params_; }

    // noise^2-scaled Wick variance at the current time, maintained
    // incrementally per mode; c_t_recomputed() evaluates the closed form from
    // scratch (the two agree to ~1e-12, asserted by tests)
    double c_t() const;
    double c_t_recomputed() const {
        return params_.noise * params_.noise * renorm_c(t_, m_, params_.diffusivity);
    }
    double c_inf() const { return c_inf_; }

    const Spectrum& z_hat() const { return z_hat_; }
    TorusField z_field() const;
    TorusField z_tilde_field() const; // e^{t Delta} X0 + Z
    const TorusField& v_field() const { return v_; }
    TorusField x_field() const; // Z-tilde + V

  private:
    void refresh_step_factors(double dt);
    TorusField drift_field() const;

    Phi42Params params_;
    int m_;
    Rng rng_;
    double t_ = 0.0;
    Spectrum z_hat_;
    Spectrum x0_hat_;
    TorusField v_;
    double c_inf_;
    std::vector<double> wsq_;        // |w|^2 per mode
    std::vector<std::size_t> partner_; // index of -w per mode
    std::vector<double> decay_;      // e^{-2 t theta pi^2 |w|^2} per mode, incremental
    // per-dt cached factors
    double cached_dt_ = -1.0;
    std::vector<double> heat_;       // e^{-theta pi^2 |w|^2 dt}
    std::vector<double> xi_std_;     // per-mode noise scale
};

} // namespace kacphi
