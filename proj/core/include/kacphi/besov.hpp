#pragma once

#include "kacphi/kernel.hpp"
#include "kacphi/rng.hpp"
#include "kacphi/torus_field.hpp"

#include <cstdint>
#include <vector>

namespace kacphi {

// Smooth radial cutoff: 1 on r <= 3/4, 0 on r >= 4/3, in between the
// exp-bump transition T(u) = psi(u)/(psi(u)+psi(1-u)), psi(u) = e^{-1/u} 1{u>0}
// mapped linearly onto the annulus. C^infinity and exactly 1/0 on the
// plateaus, which the bit-exact telescoping below relies on.
double smooth_cutoff(double r);

// Dyadic frequency decomposition on Lambda_N. Block k = -1 carries the cutoff
// itself, block k >= 0 carries the annulus multiplier
//   chi_k(w) = cutoff(|w|/2^{k+1}) - cutoff(|w|/2^k),
// evaluated with |w|/2^k computed by successive exact halvings so that the
// sum over blocks telescopes to cutoff(|w|/2^{k_max+1}) = 1 exactly up to
// rounding of the additions themselves. k_max is the smallest K with
// sqrt(2)*N / 2^{K+1} <= 3/4.
struct PaleyLittlewoodBank {
    int n = 0;
    int k_max = 0;
    // masks[k+1] is the spectral multiplier of block k, lattice layout
    std::vector<std::vector<double>> masks;

    const std::vector<double>& mask(int k) const { return masks[static_cast<std::size_t>(k + 1)]; }
};

PaleyLittlewoodBank build_block_bank(int n);

// max over frequencies of |sum_k chi_k(w) - 1|
double partition_defect(const PaleyLittlewoodBank& bank);

// Frequency projection onto block k: spectrum masked by chi_k, transformed
// back to the lattice. Equals the convolution with the block kernel
// (1/4) sum_w chi_k(w) e_w.
TorusField project_block(const TorusField& f, int k, const PaleyLittlewoodBank& bank);

struct BesovSpec {
    double nu = 0.0; // regularity index
    double p = 2.0;  // block integrability, in [1, inf]
    double q = 2.0;  // block summability, in [1, inf]
    // discrete: block L^p on Lambda_eps; continuous: L^p(T^2) of the
    // trigonometric extension, approximated on a `refine`-times finer grid
    enum class Mode { discrete, continuous } mode = Mode::discrete;
    int refine = 4;
};

// ( sum_k 2^{nu k q} ||block_k f||_p^q )^{1/q}, sup over k when q = inf
double besov_norm(const TorusField& f, const BesovSpec& spec, const PaleyLittlewoodBank& bank);

// p/(p-1) with the 1 <-> inf endpoints
double conjugate_exponent(double p);

// lhs <= C * rhs inequality instance; C is fitted over corpora by callers
struct InequalityCheck {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0; // lhs / rhs (0 when both vanish)
};

// <f,g> against ||f||_{B^alpha_{p,q}} ||g||_{B^{-alpha}_{p',q'}} (discrete)
InequalityCheck check_duality(const TorusField& f, const TorusField& g, double alpha, double p,
                              double q, const PaleyLittlewoodBank& bank);

// ||f||_{B^{-nu}_{inf,inf}} (discrete) against ||f||_{L^p(Lambda_eps)}, for
// nu > 0 and p >= d/nu
InequalityCheck check_lp_embedding(const TorusField& f, double nu, double p,
                                   const PaleyLittlewoodBank& bank);

// ||Ext f||_{L^p(T^2)} against log^2(eps^{-1}) ||f||_{L^p(Lambda_eps)}
InequalityCheck check_extension_lp_log(const TorusField& f, double p, int refine = 4);

// ||Ext f||_{L^p(T^2)} against
//   ||f||_p + eps^{-kappa} ||f||_{2p-2}^{1-1/p} (nearest-neighbor square
//   difference sum)^{1/(2p)}
InequalityCheck check_extension_lp_gradient(const TorusField& f, double p, double kappa,
                                            int refine = 4);

// ||f||_{B^nu_{1,1}} (discrete) against
//   ||f||_1^{1-2nu} (eps gamma sum_{x,dz} kappa(dz) |f(x+dz)-f(x)|)^{2nu} + ||f||_1
// for nu in (0, 1/2); the difference sum couples the norm to the same kernel
// that generates the dynamics.
InequalityCheck check_regularity_bound(const TorusField& f, const KacKernel& kernel, double nu,
                                       const PaleyLittlewoodBank& bank);

// Exploratory: ||f g||_{B^beta_{p,q}} against ||f||_{B^alpha_{p,q}}
// ||g||_{B^beta_{p,q}}, beta < 0 < alpha. Reported, never gating.
InequalityCheck check_product_estimate(const TorusField& f, const TorusField& g, double alpha,
                                       double beta, double p, double q,
                                       const PaleyLittlewoodBank& bank);

// Gaussian field with spectral decay (1+|w|^2)^{-decay/2}; decay 0 is white
// noise, larger is smoother. Hermitian symmetry is automatic (white noise is
// drawn in physical space, shaped in frequency).
TorusField random_spectral_field(int n, double decay, Rng& rng);

// Deterministic mixed corpus (decay cycling 0, 0.5, 1, 1.5, 2) for fitting
// and holding out inequality constants.
std::vector<TorusField> field_corpus(int n, int count, std::uint64_t seed);

} // namespace kacphi
