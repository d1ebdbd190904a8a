#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

namespace kacphi {

using Spectrum = std::vector<std::complex<double>>;

// Real scalar field on the periodic lattice Lambda_N = {1-N,...,N}^2, embedded
// in the torus T^2 = [-1,1]^2 with mesh eps = 1/N (so site c sits at x = eps*c
// and the cell area is eps^2; total area 4).
//
// Storage is row-major with the first coordinate slow:
//   index(x1,x2) = (x1+N-1)*2N + (x2+N-1),
// which is also the on-disk layout of field snapshots (see snapshot.hpp).
//
// The Fourier transform pair used throughout:
//   hat f(w) = sum_{x in Lambda_eps} eps^2 f(x) e^{-i pi w.x},   w in Lambda_N
//   f(x)     = (1/4) sum_{w in Lambda_N} hat f(w) e^{+i pi w.x}
// The spectrum is stored on the same index layout (entry i holds hat f at
// frequency coord(i)). The asymmetric endpoint w_j = N is kept, identified
// with its Hermitian partner modulo 2N.
class TorusField {
  public:
    explicit TorusField(int n, double fill = 0.0);
    TorusField(int n, std::vector<double> values);

    TorusField(const TorusField& other);
    TorusField& operator=(const TorusField& other);
    TorusField(TorusField&&) noexcept = default;
    TorusField& operator=(TorusField&&) noexcept = default;

    int n() const { return n_; }
    int side() const { return 2 * n_; }
    std::size_t size() const { return values_.size(); }
    double epsilon() const { return 1.0 / static_cast<double>(n_); }

    std::size_t index(int x1, int x2) const {
        return static_cast<std::size_t>(x1 + n_ - 1) * static_cast<std::size_t>(2 * n_) +
               static_cast<std::size_t>(x2 + n_ - 1);
    }
    std::pair<int, int> coord(std::size_t idx) const {
        int i1 = static_cast<int>(idx) / (2 * n_);
        int i2 = static_cast<int>(idx) % (2 * n_);
        return {i1 - (n_ - 1), i2 - (n_ - 1)};
    }

    double at(int x1, int x2) const { return values_[index(x1, x2)]; }
    void set(int x1, int x2, double v) {
        invalidate();
        values_[index(x1, x2)] = v;
    }

    const std::vector<double>& values() const { return values_; }
    // mutable access drops any cached spectrum
    std::vector<double>& mutable_values() {
        invalidate();
        return values_;
    }

    // Lazily computed, cached, safe under concurrent read (compute-once behind
    // a mutex; the transform is deterministic so racers would agree anyway).
    std::shared_ptr<const Spectrum> spectrum() const;

    // Inverse transform; throws if `hat` is not Hermitian-symmetric (inverse
    // would be non-real). The returned field carries `hat` as its cached
    // spectrum, so the pair is consistent by construction.
    static TorusField from_spectrum(int n, Spectrum hat);

    TorusField& operator+=(const TorusField& g);
    TorusField& operator-=(const TorusField& g);
    TorusField& operator*=(double a);

  private:
    void invalidate() { cache_.reset(); }

    int n_;
    std::vector<double> values_;
    mutable std::shared_ptr<const Spectrum> cache_;
    mutable std::mutex cache_mutex_;

    friend TorusField field_with_spectrum_cache(int, std::vector<double>, Spectrum);
};

// ||f||_{L^p(Lambda_eps)} = (sum eps^2 |f|^p)^{1/p} for finite p >= 1;
// p = infinity (std::numeric_limits<double>::infinity()) gives max |f|.
double lp_norm(const TorusField& f, double p);

// sum_x eps^2 |f(x)|^p (the p-th power of the finite-p norm)
double lp_norm_pow(const TorusField& f, double p);

// <f,g> = sum_x eps^2 f(x) g(x)
double inner_product(const TorusField& f, const TorusField& g);

} // namespace kacphi
