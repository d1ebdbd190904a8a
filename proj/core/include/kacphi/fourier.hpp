#pragma once

#include "kacphi/torus_field.hpp"

namespace kacphi {

// Forward DFT of a value array, lattice-ordered in and out (see TorusField for
// the conventions). Exposed mostly for tests; TorusField::spectrum() caches it.
Spectrum forward_transform(int n, const std::vector<double>& values);

// Convolution (f*g)(x) = sum_y eps^2 f(x-y) g(y). With the eps^2-weighted
// transform the identity (f*g)^ = hat f . hat g holds with no extra factor.
TorusField convolve(const TorusField& f, const TorusField& g);

// Value of hat f at a single frequency.
std::complex<double> spectrum_at(const TorusField& f, int w1, int w2);

// Trigonometric extension Ext(f) evaluated at an arbitrary point of T^2:
//   Ext(f)(x) = Re (1/4) sum_w hat f(w) B_w(x),
// where B_w is the product of per-axis characters, with the unpaired Nyquist
// frequency w_j = N symmetrized to cos(pi N x_j) (half weight on each of the
// +-N characters). This is the unique real trigonometric interpolant matching
// the product-form Dirichlet kernel; it agrees with f on Lambda_eps exactly.
double extend_evaluate(const TorusField& f, double x1, double x2);

// Spectrum re-indexing between lattice sizes, preserving field values under
// the inversion formula. Padding (n_dst >= n_src) splits the source Nyquist
// rows/columns into half-weight +-N pairs; truncation (n_dst <= n_src)
// gathers them back, so pad-then-truncate is the identity.
Spectrum pad_spectrum(const Spectrum& hat, int n_src, int n_dst);
Spectrum truncate_spectrum(const Spectrum& hat, int n_src, int n_dst);

// Ext(f) sampled on the refined lattice Lambda_{eps/refine} (zero-padding in
// frequency). Exact: the result's values are extend_evaluate at the refined
// sites, up to FFT roundoff.
TorusField extend_to_refined(const TorusField& f, int refine);

// L^p(T^2) norm of Ext(f), approximated by the L^p(Lambda_{eps/refine}) norm
// on the refined lattice.
double extended_lp_norm(const TorusField& f, double p, int refine = 4);

} // namespace kacphi
