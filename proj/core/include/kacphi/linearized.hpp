#pragma once

#include "kacphi/glauber.hpp"

#include <cstdint>
#include <vector>

namespace kacphi {

// Co-simulation of the linearized field Z alongside a spin trajectory. Z
// solves dZ = (Delta Z) dt + dM with the SAME martingale M that drives the
// fluctuation field X: jumps of X minus the exact compensator drift_field(X)
// integrated in macroscopic time.
//
// Between clock rings X is constant, so both the jump sum and the compensator
// integral over a window are exact; the only discretization is the operator
// splitting, which applies e^{window * Delta} at window boundaries (error
// O(window), verified by self-convergence tests). Bookkeeping is lazy: each
// site carries time-integral accumulators settled only when its local field
// changes, and the window update costs one convolution.
//
// The cosimulator drives the GlauberSimulation it wraps; it draws no
// randomness of its own, so trajectories remain seed-determined.
class LinearizedCosimulation {
  public:
    LinearizedCosimulation(GlauberSimulation& sim, double window_macro);

    // run the spin chain across k window boundaries, updating z at each
    void advance_windows(std::uint64_t k);
    void advance_to(double t_macro); // ceil to whole windows

    const TorusField& z_field() const { return z_; }
    double z_time_macro() const { return windows_done_ * window_macro_; }
    double window_macro() const { return window_macro_; }
    std::uint64_t windows_done() const { return windows_done_; }

    // override the zero initial condition (before any window has run)
    void set_z(TorusField z);

  private:
    void process_event(const GlauberSimulation::Event& ev, double s_event);
    void settle_site(std::size_t i, double s, double h_during);
    void finalize_window();

    GlauberSimulation& sim_;
    double window_macro_;
    double window_micro_;
    double window_end_micro_; // micro time of the next boundary
    std::uint64_t windows_done_ = 0;

    TorusField z_;
    // per-site lazy integrals over the current window (micro-time weighted)
    std::vector<double> acc_tanh_; // integral of tanh(beta h + b)
    std::vector<double> acc_h_;    // integral of h
    std::vector<double> jump_;     // total jump of h
    std::vector<double> tanh_cache_;
    std::vector<double> last_settle_;
};

} // namespace kacphi
