#include "kacphi/phi42.hpp"

#include "kacphi/fourier.hpp"
#include "kacphi/hermite.hpp"
#include "kacphi/stats.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace kacphi {

namespace {

constexpr double kPiSq = 9.86960440108935861883449099988;

} // namespace

double renorm_c(double t, int m, double diffusivity) {
    if (t < 0.0) throw std::invalid_argument("time must be nonnegative");
    if (!(diffusivity > 0.0)) throw std::invalid_argument("diffusivity must be positive");
    TorusField layout(m);
    NeumaierSum sum;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        auto [w1, w2] = layout.coord(i);
        if (w1 == 0 && w2 == 0) continue;
        double lam = diffusivity * kPiSq *
                     (static_cast<double>(w1) * w1 + static_cast<double>(w2) * w2);
        sum.add((1.0 - std::exp(-2.0 * t * lam)) / (4.0 * lam));
    }
    return sum.value();
}

double renorm_c_inf(int m, double diffusivity) {
    if (!(diffusivity > 0.0)) throw std::invalid_argument("diffusivity must be positive");
    TorusField layout(m);
    NeumaierSum sum;
    for (std::size_t i = 0; i < layout.size(); ++i) {
        auto [w1, w2] = layout.coord(i);
        if (w1 == 0 && w2 == 0) continue;
        double lam = diffusivity * kPiSq *
                     (static_cast<double>(w1) * w1 + static_cast<double>(w2) * w2);
        sum.add(1.0 / (4.0 * lam));
    }
    return sum.value();
}

Phi42Params cubic_params(int m, double A, double noise) {
    Phi42Params p;
    p.m = m;
    p.coeffs = {0.0, A, 0.0, -1.0 / 3.0};
    p.noise = noise;
    return p;
}

Phi42Sampler::Phi42Sampler(Phi42Params params, std::uint64_t seed)
    : params_(std::move(params)), m_(params_.m), rng_(seed), v_(params_.m) {
    if (m_ < 1) throw std::invalid_argument("Galerkin size must be positive");
    if (params_.coeffs.size() > 6)
        throw std::invalid_argument("drift coefficients support degrees 0..5");
    if (!(params_.pad >= 1.0)) throw std::invalid_argument("padding factor must be >= 1");
    if (!(params_.diffusivity > 0.0))
        throw std::invalid_argument("diffusivity must be positive");
    std::size_t cells = v_.size();
    z_hat_.assign(cells, 0.0);
    x0_hat_.assign(cells, 0.0);
    c_inf_ = params_.noise * params_.noise * renorm_c_inf(m_, params_.diffusivity);
    wsq_.resize(cells);
    partner_.resize(cells);
    decay_.assign(cells, 1.0);
    for (std::size_t i = 0; i < cells; ++i) {
        auto [w1, w2] = v_.coord(i);
        wsq_[i] = static_cast<double>(w1) * w1 + static_cast<double>(w2) * w2;
        // -w wrapped back into {1-M,...,M}: only -M needs folding to M
        int p1 = -w1 == -m_ ? m_ : -w1;
        int p2 = -w2 == -m_ ? m_ : -w2;
        partner_[i] = v_.index(p1, p2);
    }
}

void Phi42Sampler::set_initial_condition(const TorusField& x0) {
    if (x0.n() != m_) throw std::invalid_argument("initial condition has wrong lattice size");
    if (t_ > 0.0) throw std::logic_error("initial condition must be set before stepping");
    x0_hat_ = *x0.spectrum();
}

void Phi42Sampler::set_constant_initial_condition(double v0) {
    if (t_ > 0.0) throw std::logic_error("initial condition must be set before stepping");
    std::fill(x0_hat_.begin(), x0_hat_.end(), std::complex<double>(0.0));
    // constant c has spectrum 4c at the zero mode (torus area 4)
    x0_hat_[v_.index(0, 0)] = 4.0 * v0;
}

void Phi42Sampler::refresh_step_factors(double dt) {
    if (dt == cached_dt_) return;
    std::size_t cells = wsq_.size();
    heat_.resize(cells);
    xi_std_.resize(cells);
    double noise_sq = params_.noise * params_.noise;
    double theta = params_.diffusivity;
    for (std::size_t i = 0; i < cells; ++i) {
        double lam = theta * kPiSq * wsq_[i];
        double q = std::exp(-lam * dt);
        heat_[i] = q;
        if (wsq_[i] == 0.0) {
            // zero mode: driftless, point-variance contribution dt/2
            xi_std_[i] = params_.noise * std::sqrt(8.0 * dt);
        } else {
            // calibrated so the point variance over nonzero modes from
            // Z(0) = 0 equals renorm_c(t, M, theta) at every t
            double var = noise_sq * 4.0 * (1.0 - q * q) / lam;
            xi_std_[i] = std::sqrt(var);
        }
    }
    cached_dt_ = dt;
}

void Phi42Sampler::ou_step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
    refresh_step_factors(dt);
    std::size_t cells = z_hat_.size();
    const double inv_sqrt2 = 0.70710678118654752440084436210485;
    for (std::size_t i = 0; i < cells; ++i) {
        std::size_t j = partner_[i];
        if (j < i) continue; // conjugate already written
        if (i == j) {
            // self-conjugate mode (components in {0, M}): real-valued
            double xi = xi_std_[i] * rng_.normal();
            z_hat_[i] = heat_[i] * z_hat_[i].real() + xi;
        } else {
            std::complex<double> xi(xi_std_[i] * inv_sqrt2 * rng_.normal(),
                                    xi_std_[i] * inv_sqrt2 * rng_.normal());
            z_hat_[i] = heat_[i] * z_hat_[i] + xi;
            z_hat_[j] = std::conj(z_hat_[i]);
        }
    }
    for (std::size_t i = 0; i < cells; ++i)
        if (wsq_[i] != 0.0) decay_[i] *= heat_[i] * heat_[i];
    t_ += dt;
}

double Phi42Sampler::c_t() const {
    NeumaierSum sum;
    for (std::size_t i = 0; i < decay_.size(); ++i) {
        if (wsq_[i] == 0.0) continue;
        sum.add((1.0 - decay_[i]) / (4.0 * params_.diffusivity * kPiSq * wsq_[i]));
    }
    return params_.noise * params_.noise * sum.value();
}

TorusField Phi42Sampler::z_field() const { return TorusField::from_spectrum(m_, z_hat_); }

TorusField Phi42Sampler::z_tilde_field() const {
    Spectrum hat = z_hat_;
    for (std::size_t i = 0; i < hat.size(); ++i)
        hat[i] += x0_hat_[i] * std::exp(-t_ * params_.diffusivity * kPiSq * wsq_[i]);
    return TorusField::from_spectrum(m_, std::move(hat));
}

TorusField Phi42Sampler::x_field() const {
    TorusField x = z_tilde_field();
    x += v_;
    return x;
}

TorusField Phi42Sampler::drift_field() const {
    // collapse the Wick-power expansion: the drift polynomial re-expressed in
    // the variance-c_t basis, then in plain monomials, evaluated pointwise at
    // X = Z-tilde + V on the padded grid
    std::vector<double> monomial = coefficient_shift(params_.coeffs, c_inf_, 0.0);
    int m_pad = static_cast<int>(std::ceil(params_.pad * static_cast<double>(m_)));
    TorusField x = x_field();
    TorusField fine = TorusField::from_spectrum(m_pad, pad_spectrum(*x.spectrum(), m_, m_pad));
    std::vector<double>& fv = fine.mutable_values();
    for (double& value : fv) {
        double acc = 0.0;
        for (std::size_t d = monomial.size(); d-- > 0;) acc = acc * value + monomial[d];
        value = acc;
    }
    return TorusField::from_spectrum(m_, truncate_spectrum(*fine.spectrum(), m_pad, m_));
}

void Phi42Sampler::dpd_step(double dt) {
    if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
    refresh_step_factors(dt);
    TorusField force = drift_field();
    Spectrum hat = *v_.spectrum();
    const Spectrum& fhat = *force.spectrum();
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] = (hat[i] + dt * fhat[i]) * heat_[i];
    v_ = TorusField::from_spectrum(m_, std::move(hat));
}

void Phi42Sampler::step(double dt) {
    dpd_step(dt);
    ou_step(dt);
}

} // namespace kacphi
