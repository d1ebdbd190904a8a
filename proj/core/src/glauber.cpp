#include "kacphi/glauber.hpp"

#include "kacphi/fourier.hpp"
#include "kacphi/hermite.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace kacphi {

int scaling_lattice_size(double gamma) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("range parameter must lie in (0,1)");
    return static_cast<int>(std::lround(1.0 / (gamma * gamma)));
}

DynamicsParams critical_scaling(const KacKernel& kernel, double A, double b) {
    DynamicsParams p;
    p.gamma = kernel.gamma();
    p.delta = p.gamma;
    p.alpha = p.gamma * p.gamma;
    p.c_gamma = renorm_constant(kernel);
    p.beta = 1.0 + p.gamma * p.gamma * (p.c_gamma + A);
    p.A = A;
    p.b = b;
    return p;
}

DynamicsParams plain_params(double beta, double b, double gamma) {
    DynamicsParams p;
    p.beta = beta;
    p.b = b;
    p.gamma = gamma;
    return p;
}

double flip_probability(double spin, double field_term) {
    return 0.5 * (1.0 - spin * std::tanh(field_term));
}

GlauberSimulation::GlauberSimulation(std::shared_ptr<const KacKernel> kernel,
                                     DynamicsParams params, std::uint64_t seed)
    : kernel_(std::move(kernel)), params_(params), rng_(seed),
      spins_(kernel_->macroscopic_field().size(), 1), field_(kernel_->n()) {
    randomize_spins();
}

void GlauberSimulation::randomize_spins() {
    for (std::int8_t& s : spins_) s = (rng_.raw() & 1ULL) ? 1 : -1;
    recompute_field();
}

void GlauberSimulation::set_spins(const std::vector<std::int8_t>& spins) {
    if (spins.size() != spins_.size())
        throw std::invalid_argument("spin array has wrong size");
    for (std::int8_t s : spins)
        if (s != 1 && s != -1) throw std::invalid_argument("spins must be +-1");
    spins_ = spins;
    recompute_field();
}

GlauberSimulation::Event GlauberSimulation::step() {
    return step_after(rng_.exponential(static_cast<double>(spins_.size())));
}

GlauberSimulation::Event GlauberSimulation::step_after(double gap_micro) {
    Event ev;
    ev.dt_micro = gap_micro;
    t_micro_ += ev.dt_micro;
    ev.site = static_cast<std::size_t>(rng_.below(spins_.size()));
    double u = rng_.uniform_co();
    double spin = static_cast<double>(spins_[ev.site]);
    double rate =
        flip_probability(spin, params_.beta * field_.values()[ev.site] + params_.b);
    ++events_;
    if (!frozen_ && u < rate) {
        std::int8_t flipped = static_cast<std::int8_t>(-spins_[ev.site]);
        spins_[ev.site] = flipped;
        apply_flip_to_field(ev.site, static_cast<double>(flipped));
        ev.flipped = true;
        ++flips_;
        if (++flips_since_refresh_ >= refresh_interval_) refresh_local_field();
    }
    ev.new_spin = spins_[ev.site];
    return ev;
}

void GlauberSimulation::apply_flip_to_field(std::size_t site, double new_spin) {
    // h(x) gains (new - old) kappa(x - z) = 2*new_spin*kappa(x - z)
    const int side = 2 * field_.n();
    const int row_z = static_cast<int>(site) / side;
    const int col_z = static_cast<int>(site) % side;
    const double scale = 2.0 * new_spin;
    std::vector<double>& h = field_.mutable_values();
    for (const KacKernel::Neighbor& nb : kernel_->neighbors()) {
        int row = row_z + nb.dz1;
        if (row < 0) row += side;
        else if (row >= side) row -= side;
        int col = col_z + nb.dz2;
        if (col < 0) col += side;
        else if (col >= side) col -= side;
        h[static_cast<std::size_t>(row) * side + col] += scale * nb.weight;
    }
}

long long GlauberSimulation::magnetization() const {
    long long m = 0;
    for (std::int8_t s : spins_) m += s;
    return m;
}

void GlauberSimulation::run_micro_time(double t_micro_target) {
    // The chain's state at the target time is the state after the last ring at
    // or before it; the ring that would cross is discarded and the clock parked
    // exactly at the target, which is law-exact by memorylessness.
    while (t_micro_ < t_micro_target) {
        double gap = rng_.exponential(static_cast<double>(spins_.size()));
        if (t_micro_ + gap > t_micro_target) {
            t_micro_ = t_micro_target;
            break;
        }
        step_after(gap);
    }
}

void GlauberSimulation::run_events(std::uint64_t n_events) {
    for (std::uint64_t i = 0; i < n_events; ++i) step();
}

TorusField GlauberSimulation::fluctuation_field() const {
    TorusField x = field_;
    x *= 1.0 / params_.delta;
    return x;
}

TorusField GlauberSimulation::centered_spin_field(double m) const {
    TorusField f(field_.n());
    std::vector<double>& v = f.mutable_values();
    double inv_delta = 1.0 / params_.delta;
    for (std::size_t i = 0; i < spins_.size(); ++i)
        v[i] = inv_delta * (static_cast<double>(spins_[i]) - m);
    return f;
}

void GlauberSimulation::recompute_field() {
    TorusField spin_field(field_.n());
    std::vector<double>& v = spin_field.mutable_values();
    for (std::size_t i = 0; i < spins_.size(); ++i) v[i] = static_cast<double>(spins_[i]);
    field_ = convolve(kernel_->macroscopic_field(), spin_field);
    flips_since_refresh_ = 0;
}

double GlauberSimulation::refresh_local_field() {
    TorusField before = field_;
    recompute_field();
    double deviation = 0.0;
    for (std::size_t i = 0; i < before.size(); ++i)
        deviation = std::max(deviation, std::abs(before.values()[i] - field_.values()[i]));
    ++refreshes_;
    max_refresh_deviation_ = std::max(max_refresh_deviation_, deviation);
    return deviation;
}

SpinCheckpoint GlauberSimulation::checkpoint() const {
    return SpinCheckpoint{field_, spins_, t_micro_};
}

void GlauberSimulation::restore(const SpinCheckpoint& c) {
    if (c.spins.size() != spins_.size())
        throw std::invalid_argument("checkpoint lattice size mismatch");
    spins_ = c.spins;
    field_ = c.local_field;
    t_micro_ = c.t_micro;
    flips_since_refresh_ = 0;
}

std::vector<double> kernel_laplacian_multiplier(const KacKernel& kernel) {
    double prefactor = static_cast<double>(kernel.n()) * static_cast<double>(kernel.n()) *
                       kernel.gamma() * kernel.gamma();
    std::vector<double> mult = kernel.spectrum();
    for (double& m : mult) m = prefactor * (m - 1.0);
    return mult;
}

TorusField kernel_laplacian(const TorusField& f, const KacKernel& kernel) {
    std::vector<double> mult = kernel_laplacian_multiplier(kernel);
    Spectrum hat = *f.spectrum();
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= mult[i];
    return TorusField::from_spectrum(f.n(), std::move(hat));
}

TorusField apply_heat_semigroup(const TorusField& f, const KacKernel& kernel, double t) {
    std::vector<double> mult = kernel_laplacian_multiplier(kernel);
    Spectrum hat = *f.spectrum();
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= std::exp(t * mult[i]);
    return TorusField::from_spectrum(f.n(), std::move(hat));
}

TorusField drift_field(const TorusField& x_field, const DynamicsParams& params,
                       const KacKernel& kernel) {
    TorusField tanh_field(x_field.n());
    std::vector<double>& tv = tanh_field.mutable_values();
    const std::vector<double>& xv = x_field.values();
    double inv_delta = 1.0 / params.delta;
    for (std::size_t i = 0; i < xv.size(); ++i)
        tv[i] = inv_delta * std::tanh(params.beta * params.delta * xv[i] + params.b);
    TorusField smoothed = convolve(kernel.macroscopic_field(), tanh_field);
    TorusField drift(x_field.n());
    std::vector<double>& dv = drift.mutable_values();
    double inv_alpha = 1.0 / params.alpha;
    for (std::size_t i = 0; i < dv.size(); ++i)
        dv[i] = inv_alpha * (smoothed.values()[i] - xv[i]);
    return drift;
}

TorusField drift_field_expanded(const TorusField& x_field, const DynamicsParams& params,
                                const KacKernel& kernel) {
    TorusField drift = kernel_laplacian(x_field, kernel);
    std::vector<double>& dv = drift.mutable_values();
    const std::vector<double>& xv = x_field.values();
    for (std::size_t i = 0; i < dv.size(); ++i) {
        double x = xv[i];
        dv[i] += -(1.0 / 3.0) * hermite(3, x, params.c_gamma) + params.A * x;
    }
    return drift;
}

TorusField wick_observable(const TorusField& z_field, int j, double c) {
    if (j < 1 || j > 3) throw std::invalid_argument("wick observable degree must lie in 1..3");
    if (c < 0.0) throw std::invalid_argument("wick observable variance must be nonnegative");
    TorusField out(z_field.n());
    std::vector<double>& ov = out.mutable_values();
    const std::vector<double>& zv = z_field.values();
    for (std::size_t i = 0; i < zv.size(); ++i) ov[i] = hermite(j, zv[i], c);
    return out;
}

} // namespace kacphi
