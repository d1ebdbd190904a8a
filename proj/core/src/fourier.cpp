#include "kacphi/fourier.hpp"

#include "kacphi/stats.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <stdexcept>

namespace kacphi {

namespace {

// FFTW plan creation is not thread-safe; execution on distinct arrays is.
// Plans are created once per (side, direction) with FFTW_ESTIMATE against
// fftw_malloc'ed dummies (maximal alignment), then reused via the new-array
// execute interface on buffers that are also fftw_malloc'ed.
class PlanCache {
  public:
    static PlanCache& instance() {
        static PlanCache c;
        return c;
    }

    fftw_plan get(int side, int sign) {
        std::lock_guard<std::mutex> lk(mutex_);
        auto key = std::make_pair(side, sign);
        auto it = plans_.find(key);
        if (it != plans_.end()) return it->second;
        std::size_t count = static_cast<std::size_t>(side) * side;
        fftw_complex* in = fftw_alloc_complex(count);
        fftw_complex* out = fftw_alloc_complex(count);
        fftw_plan p = fftw_plan_dft_2d(side, side, in, out, sign, FFTW_ESTIMATE);
        fftw_free(in);
        fftw_free(out);
        if (!p) throw std::runtime_error("fourier: fftw plan creation failed");
        plans_[key] = p;
        return p;
    }

  private:
    PlanCache() = default;
    std::mutex mutex_;
    std::map<std::pair<int, int>, fftw_plan> plans_;
};

struct FftwBuffer {
    explicit FftwBuffer(std::size_t count)
        : data(fftw_alloc_complex(count)) {
        if (!data) throw std::bad_alloc();
    }
    ~FftwBuffer() { fftw_free(data); }
    FftwBuffer(const FftwBuffer&) = delete;
    FftwBuffer& operator=(const FftwBuffer&) = delete;
    fftw_complex* data;
};

// lattice storage index -> DFT bin: coordinate c = i-(N-1), bin k = c mod 2N
inline int wrap_bin(int i, int n) { return (i + n + 1) % (2 * n); }

void execute(int side, int sign, fftw_complex* in, fftw_complex* out) {
    fftw_execute_dft(PlanCache::instance().get(side, sign), in, out);
}

} // namespace

Spectrum forward_transform(int n, const std::vector<double>& values) {
    const int side = 2 * n;
    const std::size_t count = static_cast<std::size_t>(side) * side;
    if (values.size() != count) throw std::invalid_argument("forward_transform: bad size");
    FftwBuffer in(count), out(count);
    for (int i1 = 0; i1 < side; ++i1) {
        int k1 = wrap_bin(i1, n);
        for (int i2 = 0; i2 < side; ++i2) {
            int k2 = wrap_bin(i2, n);
            fftw_complex& c = in.data[static_cast<std::size_t>(k1) * side + k2];
            c[0] = values[static_cast<std::size_t>(i1) * side + i2];
            c[1] = 0.0;
        }
    }
    execute(side, FFTW_FORWARD, in.data, out.data);
    const double eps2 = 1.0 / (static_cast<double>(n) * n);
    Spectrum hat(count);
    for (int i1 = 0; i1 < side; ++i1) {
        int k1 = wrap_bin(i1, n);
        for (int i2 = 0; i2 < side; ++i2) {
            int k2 = wrap_bin(i2, n);
            const fftw_complex& c = out.data[static_cast<std::size_t>(k1) * side + k2];
            hat[static_cast<std::size_t>(i1) * side + i2] = {eps2 * c[0], eps2 * c[1]};
        }
    }
    return hat;
}

std::shared_ptr<const Spectrum> TorusField::spectrum() const {
    std::lock_guard<std::mutex> lk(cache_mutex_);
    if (!cache_) cache_ = std::make_shared<const Spectrum>(forward_transform(n_, values_));
    return cache_;
}

TorusField TorusField::from_spectrum(int n, Spectrum hat) {
    const int side = 2 * n;
    const std::size_t count = static_cast<std::size_t>(side) * side;
    if (hat.size() != count) throw std::invalid_argument("from_spectrum: bad size");
    FftwBuffer in(count), out(count);
    for (int i1 = 0; i1 < side; ++i1) {
        int k1 = wrap_bin(i1, n);
        for (int i2 = 0; i2 < side; ++i2) {
            int k2 = wrap_bin(i2, n);
            const std::complex<double>& c = hat[static_cast<std::size_t>(i1) * side + i2];
            fftw_complex& b = in.data[static_cast<std::size_t>(k1) * side + k2];
            b[0] = c.real();
            b[1] = c.imag();
        }
    }
    execute(side, FFTW_BACKWARD, in.data, out.data);
    TorusField f(n);
    auto& v = f.values_;
    double max_abs = 0.0, max_imag = 0.0;
    for (int i1 = 0; i1 < side; ++i1) {
        int k1 = wrap_bin(i1, n);
        for (int i2 = 0; i2 < side; ++i2) {
            int k2 = wrap_bin(i2, n);
            const fftw_complex& c = out.data[static_cast<std::size_t>(k1) * side + k2];
            v[static_cast<std::size_t>(i1) * side + i2] = 0.25 * c[0];
            max_abs = std::max(max_abs, std::abs(c[0]));
            max_imag = std::max(max_imag, std::abs(c[1]));
        }
    }
    if (max_imag > 1e-9 * (1.0 + max_abs))
        throw std::invalid_argument(
            "from_spectrum: spectrum is not Hermitian-symmetric (inverse transform non-real)");
    f.cache_ = std::make_shared<const Spectrum>(std::move(hat));
    return f;
}

TorusField convolve(const TorusField& f, const TorusField& g) {
    if (f.n() != g.n()) throw std::invalid_argument("convolve: size mismatch");
    auto fh = f.spectrum();
    auto gh = g.spectrum();
    Spectrum prod(fh->size());
    for (std::size_t i = 0; i < prod.size(); ++i) prod[i] = (*fh)[i] * (*gh)[i];
    return TorusField::from_spectrum(f.n(), std::move(prod));
}

std::complex<double> spectrum_at(const TorusField& f, int w1, int w2) {
    auto h = f.spectrum();
    return (*h)[f.index(w1, w2)];
}

double extend_evaluate(const TorusField& f, double x1, double x2) {
    const int n = f.n();
    const int side = 2 * n;
    auto hat = f.spectrum();
    // per-axis character tables; w = N contributes cos(pi N x) (Nyquist pair
    // symmetrized with half weights)
    std::vector<std::complex<double>> b1(side), b2(side);
    for (int i = 0; i < side; ++i) {
        int w = i - (n - 1);
        if (w == n) {
            b1[i] = std::cos(M_PI * n * x1);
            b2[i] = std::cos(M_PI * n * x2);
        } else {
            b1[i] = std::exp(std::complex<double>(0.0, M_PI * w * x1));
            b2[i] = std::exp(std::complex<double>(0.0, M_PI * w * x2));
        }
    }
    NeumaierSum re;
    for (int i1 = 0; i1 < side; ++i1)
        for (int i2 = 0; i2 < side; ++i2) {
            std::complex<double> term =
                (*hat)[static_cast<std::size_t>(i1) * side + i2] * b1[i1] * b2[i2];
            re.add(term.real());
        }
    return 0.25 * re.value();
}

Spectrum pad_spectrum(const Spectrum& hat, int n_src, int n_dst) {
    if (n_dst < n_src) throw std::invalid_argument("pad_spectrum: n_dst < n_src");
    const int s_side = 2 * n_src, d_side = 2 * n_dst;
    if (hat.size() != static_cast<std::size_t>(s_side) * s_side)
        throw std::invalid_argument("pad_spectrum: bad size");
    Spectrum out(static_cast<std::size_t>(d_side) * d_side, {0.0, 0.0});
    auto dst_index = [&](int w1, int w2) {
        return static_cast<std::size_t>(w1 + n_dst - 1) * d_side + (w2 + n_dst - 1);
    };
    for (int i1 = 0; i1 < s_side; ++i1) {
        int w1 = i1 - (n_src - 1);
        for (int i2 = 0; i2 < s_side; ++i2) {
            int w2 = i2 - (n_src - 1);
            std::complex<double> c = hat[static_cast<std::size_t>(i1) * s_side + i2];
            if (n_dst == n_src) {
                out[dst_index(w1, w2)] = c;
                continue;
            }
            // split every source-Nyquist axis into its +-N pair, half each
            int t1[2] = {w1, 0}, c1 = 1;
            int t2[2] = {w2, 0}, c2 = 1;
            if (w1 == n_src) t1[0] = n_src, t1[1] = -n_src, c1 = 2;
            if (w2 == n_src) t2[0] = n_src, t2[1] = -n_src, c2 = 2;
            std::complex<double> share = c / static_cast<double>(c1 * c2);
            for (int a = 0; a < c1; ++a)
                for (int b = 0; b < c2; ++b) out[dst_index(t1[a], t2[b])] += share;
        }
    }
    return out;
}

Spectrum truncate_spectrum(const Spectrum& hat, int n_src, int n_dst) {
    if (n_dst > n_src) throw std::invalid_argument("truncate_spectrum: n_dst > n_src");
    const int s_side = 2 * n_src, d_side = 2 * n_dst;
    if (hat.size() != static_cast<std::size_t>(s_side) * s_side)
        throw std::invalid_argument("truncate_spectrum: bad size");
    Spectrum out(static_cast<std::size_t>(d_side) * d_side, {0.0, 0.0});
    auto src_at = [&](int w1, int w2) {
        return hat[static_cast<std::size_t>(w1 + n_src - 1) * s_side + (w2 + n_src - 1)];
    };
    for (int i1 = 0; i1 < d_side; ++i1) {
        int w1 = i1 - (n_dst - 1);
        for (int i2 = 0; i2 < d_side; ++i2) {
            int w2 = i2 - (n_dst - 1);
            // gather the destination-Nyquist pair back together
            int s1[2] = {w1, 0}, c1 = 1;
            int s2[2] = {w2, 0}, c2 = 1;
            if (w1 == n_dst && n_dst < n_src) s1[0] = n_dst, s1[1] = -n_dst, c1 = 2;
            if (w2 == n_dst && n_dst < n_src) s2[0] = n_dst, s2[1] = -n_dst, c2 = 2;
            std::complex<double> acc = 0.0;
            for (int a = 0; a < c1; ++a)
                for (int b = 0; b < c2; ++b) acc += src_at(s1[a], s2[b]);
            out[static_cast<std::size_t>(i1) * d_side + i2] = acc;
        }
    }
    return out;
}

TorusField extend_to_refined(const TorusField& f, int refine) {
    if (refine < 1) throw std::invalid_argument("extend_to_refined: refine >= 1");
    if (refine == 1) return f;
    return TorusField::from_spectrum(f.n() * refine,
                                     pad_spectrum(*f.spectrum(), f.n(), f.n() * refine));
}

double extended_lp_norm(const TorusField& f, double p, int refine) {
    return lp_norm(extend_to_refined(f, refine), p);
}

} // namespace kacphi
