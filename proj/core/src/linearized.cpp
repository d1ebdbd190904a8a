#include "kacphi/linearized.hpp"

#include "kacphi/fourier.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace kacphi {

LinearizedCosimulation::LinearizedCosimulation(GlauberSimulation& sim, double window_macro)
    : sim_(sim), window_macro_(window_macro), z_(sim.n()) {
    if (!(window_macro > 0.0))
        throw std::invalid_argument("cosimulation window must be positive");
    window_micro_ = window_macro_ / sim_.params().alpha;
    window_end_micro_ = sim_.t_micro() + window_micro_;
    std::size_t cells = sim_.sites();
    acc_tanh_.assign(cells, 0.0);
    acc_h_.assign(cells, 0.0);
    jump_.assign(cells, 0.0);
    tanh_cache_.resize(cells);
    last_settle_.assign(cells, sim_.t_micro());
    const DynamicsParams& p = sim_.params();
    const std::vector<double>& h = sim_.local_field().values();
    for (std::size_t i = 0; i < cells; ++i)
        tanh_cache_[i] = std::tanh(p.beta * h[i] + p.b);
}

void LinearizedCosimulation::set_z(TorusField z) {
    if (z.n() != z_.n()) throw std::invalid_argument("initial field has wrong lattice size");
    z_ = std::move(z);
}

void LinearizedCosimulation::settle_site(std::size_t i, double s, double h_during) {
    double elapsed = s - last_settle_[i];
    acc_tanh_[i] += tanh_cache_[i] * elapsed;
    acc_h_[i] += h_during * elapsed;
    last_settle_[i] = s;
}

void LinearizedCosimulation::process_event(const GlauberSimulation::Event& ev, double s_event) {
    if (!ev.flipped) return;
    const KacKernel& kernel = sim_.kernel();
    const DynamicsParams& p = sim_.params();
    const std::vector<double>& h = sim_.local_field().values();
    const int side = 2 * sim_.n();
    const int row_z = static_cast<int>(ev.site) / side;
    const int col_z = static_cast<int>(ev.site) % side;
    const double scale = 2.0 * static_cast<double>(ev.new_spin);
    for (const KacKernel::Neighbor& nb : kernel.neighbors()) {
        int row = row_z + nb.dz1;
        if (row < 0) row += side;
        else if (row >= side) row -= side;
        int col = col_z + nb.dz2;
        if (col < 0) col += side;
        else if (col >= side) col -= side;
        std::size_t x = static_cast<std::size_t>(row) * side + col;
        double dh = scale * nb.weight;
        // h[x] already includes the jump; the field held h[x] - dh since the
        // last settle of x
        settle_site(x, s_event, h[x] - dh);
        tanh_cache_[x] = std::tanh(p.beta * h[x] + p.b);
        jump_[x] += dh;
    }
}

void LinearizedCosimulation::finalize_window() {
    std::size_t cells = acc_tanh_.size();
    const std::vector<double>& h = sim_.local_field().values();
    for (std::size_t i = 0; i < cells; ++i) settle_site(i, window_end_micro_, h[i]);

    // martingale increment delta^{-1} (jumps - K*acc_tanh + acc_h); the alpha
    // factors from macro-time integration cancel against the drift prefactor
    TorusField tanh_integral(z_.n(), acc_tanh_);
    TorusField smoothed = convolve(sim_.kernel().macroscopic_field(), tanh_integral);
    double inv_delta = 1.0 / sim_.params().delta;
    TorusField input = z_;
    std::vector<double>& iv = input.mutable_values();
    for (std::size_t i = 0; i < cells; ++i)
        iv[i] += inv_delta * (jump_[i] - smoothed.values()[i] + acc_h_[i]);
    z_ = apply_heat_semigroup(input, sim_.kernel(), window_macro_);

    std::fill(acc_tanh_.begin(), acc_tanh_.end(), 0.0);
    std::fill(acc_h_.begin(), acc_h_.end(), 0.0);
    std::fill(jump_.begin(), jump_.end(), 0.0);
    ++windows_done_;
    window_end_micro_ += window_micro_;
}

void LinearizedCosimulation::advance_windows(std::uint64_t k) {
    // may overshoot when a single ring gap spans several windows; those
    // windows genuinely elapsed, so z keeps its boundary semantics
    std::uint64_t target = windows_done_ + k;
    while (windows_done_ < target) {
        GlauberSimulation::Event ev = sim_.step();
        double s_event = sim_.t_micro();
        // every boundary crossed by this ring is finalized before the event's
        // own flip is booked into the window containing it
        while (s_event > window_end_micro_) finalize_window();
        process_event(ev, s_event);
    }
}

void LinearizedCosimulation::advance_to(double t_macro) {
    double done = z_time_macro();
    if (t_macro <= done) return;
    double remaining = (t_macro - done) / window_macro_;
    advance_windows(static_cast<std::uint64_t>(std::ceil(remaining - 1e-9)));
}

} // namespace kacphi
