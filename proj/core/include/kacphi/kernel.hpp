#pragma once

#include "kacphi/torus_field.hpp"

#include <string>
#include <vector>

namespace kacphi {

// Shape functions for the interaction kernel. `bump` is the default
// (1-(r/3)^2)^3 on r <= 3: twice differentiable at the support edge,
// nonnegative, isotropic. `flat` is the indicator of r <= 3, used by tests
// where uniform weights make hand computation easy.
enum class ProfileId { bump, flat };

double profile_value(ProfileId profile, double r);
std::string profile_name(ProfileId profile);
ProfileId profile_from_name(const std::string& name);

// Long-range interaction kernel kappa on Lambda_N:
//
//   kappa(z) = shape(gamma*|z|) / Z   for z != 0,     kappa(0) = 0,
//
// where |z| is the Euclidean length of the minimal periodic representative
// and Z is the exact discrete normalizer, so sum_z kappa(z) = 1 exactly.
// The support lies in |z| <= 3/gamma; build_kernel requires 3/gamma < N so
// the support fits in half the torus and wrapping is unambiguous.
//
// Immutable after construction; safe for shared concurrent reads.
class KacKernel {
  public:
    struct Neighbor {
        int dz1, dz2;  // displacement, components in {1-N,...,N}
        double weight; // kappa at that displacement (nonzero)
    };

    int n() const { return n_; }
    double gamma() const { return gamma_; }
    double epsilon() const { return 1.0 / static_cast<double>(n_); }
    const std::string& name() const { return name_; }

    // kappa at an arbitrary displacement (wrapped into Lambda_N)
    double kappa(int z1, int z2) const;
    // kappa on the TorusField index layout
    const std::vector<double>& kappa_table() const { return kappa_; }

    // nonzero displacements, for O(support) local-field updates
    const std::vector<Neighbor>& neighbors() const { return neighbors_; }
    // max |component| over the support
    int radius() const { return radius_; }

    // Macroscopic kernel K(x) = eps^{-2} kappa(eps^{-1} x) as a lattice
    // field; convolving fields with it (eps^2-weighted) reproduces the
    // unweighted spin-space convolution sum_z kappa(x-z) s(z).
    const TorusField& macroscopic_field() const { return macro_; }

    // Fourier multiplier khat(w) of that convolution; real and even, with
    // khat(0) = 1 and |khat| <= 1. Same index layout as the fields.
    const std::vector<double>& spectrum() const { return spectrum_; }
    double spectrum_at(int w1, int w2) const;

  private:
    KacKernel(int n, double gamma, std::string name, std::vector<double> kappa);

    int n_;
    double gamma_;
    std::string name_;
    std::vector<double> kappa_;
    std::vector<Neighbor> neighbors_;
    int radius_;
    TorusField macro_;
    std::vector<double> spectrum_;

    friend KacKernel kernel_from_table(int n, double gamma, std::vector<double> kappa,
                                       std::string name);
};

// The standard construction: kappa(z) proportional to shape(gamma*|z|),
// zero at the origin, exactly normalized. Throws std::invalid_argument when
// 3/gamma >= N (support violation) or the profile misbehaves.
KacKernel build_kernel(ProfileId profile, double gamma, int n);

// Synthetic constructions for small-lattice oracles, where no admissible
// gamma satisfies 3/gamma < N. All are zero at the origin, nonnegative and
// exactly normalized; `gamma` is carried along for the scaling prefactors.
KacKernel kernel_from_table(int n, double gamma, std::vector<double> kappa, std::string name);
KacKernel uniform_kernel(int n, double gamma);          // 1/(4N^2-1) off the origin
KacKernel nearest_neighbor_kernel(int n, double gamma); // 1/4 on each unit step
// shape(gamma*|.|) summed over all periodic images before normalizing; valid
// for any N >= 1
KacKernel wrapped_profile_kernel(ProfileId profile, double gamma, int n);

// Renormalization constant
//
//   C = (1/4) sum_{w != 0} khat(w)^2 / (eps^{-2} gamma^2 (1 - khat(w))),
//
// with eps = 1/N taken from the kernel. Under the critical scaling
// N = round(gamma^-2) the prefactor eps^{-2} gamma^2 is ~1; the formula is
// evaluated with the kernel's actual N for any lattice size. Grows like
// log(1/gamma) along the critical family. Throws std::domain_error when some
// w != 0 has khat(w) >= 1 (vanishing denominator: degenerate kernel).
double renorm_constant(const KacKernel& kernel);
double renorm_constant_from_spectrum(const std::vector<double>& khat, int n, double gamma);

// Long-wavelength diffusion coefficient of the rescaled kernel Laplacian
// eps^{-2} gamma^2 (kappa * f - f):
//
//   theta = (gamma^2 / 4) sum_z kappa(z) |z|^2,
//
// the coefficient such that its Fourier symbol approaches -theta pi^2 |w|^2
// for |w| << 1/gamma. Roughly the profile's radial second moment over four
// (~0.45 for the default bump shape, ~1.125 for the flat indicator); it is
// NOT 1 in general, so the kernel dynamics diffuse theta times slower than
// the unit-coefficient heat flow at matched scales.
double kernel_diffusivity(const KacKernel& kernel);

struct KernelBoundsReport {
    // largest c with 1 - khat(w) >= c * min(|gamma w|^2, 1) for all w != 0
    double lower_c;
    // smallest C with |khat(w)| <= min(1, C gamma^{-2} / |w|^2) for all w != 0
    double upper_C;
    bool lower_positive; // lower_c > 0
    // max over shells {|w|^2 = const, |w| <= 1/gamma} of the relative spread
    // of khat within the shell; 0 when khat is exactly radial on that range
    double anisotropy;
};

// Fits the two-sided spectral estimates and records how nearly radial the
// multiplier is at low frequency.
KernelBoundsReport verify_kernel_bounds(const KacKernel& kernel);

// Writes the macroscopic kernel field to `snapshot_path` (field-snapshot
// format) and a text sidecar to snapshot_path + ".txt" holding the profile
// name, gamma, N, and the renormalization constant at 17 significant digits.
void write_kernel_dump(const KacKernel& kernel, const std::string& snapshot_path);

} // namespace kacphi
