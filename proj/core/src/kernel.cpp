#include "kacphi/kernel.hpp"

#include "kacphi/csv.hpp"
#include "kacphi/fourier.hpp"
#include "kacphi/snapshot.hpp"
#include "kacphi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <stdexcept>
#include <utility>

namespace kacphi {

namespace {

// wrap an integer displacement component into {1-N,...,N}
int wrap_component(int c, int n) {
    int period = 2 * n;
    int r = (c - (1 - n)) % period;
    if (r < 0) r += period;
    return r + (1 - n);
}

std::vector<double> normalized(std::vector<double> weights) {
    NeumaierSum total;
    for (double w : weights) {
        if (w < 0.0) throw std::invalid_argument("kernel weights must be nonnegative");
        total.add(w);
    }
    double z = total.value();
    if (!(z > 0.0)) throw std::invalid_argument("kernel weights sum to zero");
    for (double& w : weights) w /= z;
    return weights;
}

} // namespace

double profile_value(ProfileId profile, double r) {
    switch (profile) {
        case ProfileId::bump: {
            if (r > 3.0) return 0.0;
            double u = 1.0 - (r / 3.0) * (r / 3.0);
            return u * u * u;
        }
        case ProfileId::flat:
            return r <= 3.0 ? 1.0 : 0.0;
    }
    throw std::invalid_argument("unknown profile");
}

std::string profile_name(ProfileId profile) {
    switch (profile) {
        case ProfileId::bump: return "bump";
        case ProfileId::flat: return "flat";
    }
    throw std::invalid_argument("unknown profile");
}

ProfileId profile_from_name(const std::string& name) {
    if (name == "bump") return ProfileId::bump;
    if (name == "flat") return ProfileId::flat;
    throw std::invalid_argument("unknown profile name: " + name);
}

KacKernel::KacKernel(int n, double gamma, std::string name, std::vector<double> kappa)
    : n_(n), gamma_(gamma), name_(std::move(name)), kappa_(std::move(kappa)), radius_(0),
      macro_(n) {
    if (n_ < 1) throw std::invalid_argument("kernel lattice size must be positive");
    if (!(gamma_ > 0.0) || !(gamma_ < 1.0))
        throw std::invalid_argument("kernel range parameter must lie in (0,1)");
    std::size_t cells = static_cast<std::size_t>(4) * n_ * n_;
    if (kappa_.size() != cells) throw std::invalid_argument("kernel table has wrong size");
    if (kappa_[macro_.index(0, 0)] != 0.0)
        throw std::invalid_argument("kernel must vanish at the origin");

    double inv_eps2 = static_cast<double>(n_) * static_cast<double>(n_);
    std::vector<double>& macro_values = macro_.mutable_values();
    for (std::size_t i = 0; i < cells; ++i) {
        double w = kappa_[i];
        macro_values[i] = inv_eps2 * w;
        if (w != 0.0) {
            auto [z1, z2] = macro_.coord(i);
            neighbors_.push_back({z1, z2, w});
            radius_ = std::max({radius_, std::abs(z1), std::abs(z2)});
        }
    }

    Spectrum hat = forward_transform(n_, macro_values);
    spectrum_.resize(cells);
    double max_imag = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        spectrum_[i] = hat[i].real();
        max_imag = std::max(max_imag, std::abs(hat[i].imag()));
    }
    if (max_imag > 1e-9)
        throw std::invalid_argument("kernel is not symmetric under negation (complex spectrum)");
}

double KacKernel::kappa(int z1, int z2) const {
    return kappa_[macro_.index(wrap_component(z1, n_), wrap_component(z2, n_))];
}

double KacKernel::spectrum_at(int w1, int w2) const {
    return spectrum_[macro_.index(wrap_component(w1, n_), wrap_component(w2, n_))];
}

KacKernel build_kernel(ProfileId profile, double gamma, int n) {
    if (!(gamma > 0.0) || !(gamma < 1.0))
        throw std::invalid_argument("kernel range parameter must lie in (0,1)");
    if (!(3.0 / gamma < static_cast<double>(n)))
        throw std::invalid_argument("kernel support 3/gamma = " + std::to_string(3.0 / gamma) +
                                    " does not fit in half the torus (N = " + std::to_string(n) +
                                    ")");

    TorusField layout(n);
    std::size_t cells = layout.size();
    std::vector<double> weights(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        auto [z1, z2] = layout.coord(i);
        if (z1 == 0 && z2 == 0) continue;
        // components of Lambda_N displacements are already minimal
        // representatives (|z_j| <= N), so the Euclidean length is direct
        double w = profile_value(profile, gamma * std::hypot(z1, z2));
        if (w < 0.0 || !std::isfinite(w)) throw std::invalid_argument("profile is not admissible");
        weights[i] = w;
    }
    return kernel_from_table(n, gamma, normalized(std::move(weights)), profile_name(profile));
}

KacKernel kernel_from_table(int n, double gamma, std::vector<double> kappa, std::string name) {
    return KacKernel(n, gamma, std::move(name), normalized(std::move(kappa)));
}

KacKernel uniform_kernel(int n, double gamma) {
    TorusField layout(n);
    std::vector<double> weights(layout.size(), 1.0);
    weights[layout.index(0, 0)] = 0.0;
    return kernel_from_table(n, gamma, std::move(weights), "uniform");
}

KacKernel nearest_neighbor_kernel(int n, double gamma) {
    TorusField layout(n);
    std::vector<double> weights(layout.size(), 0.0);
    // on N = 1 the four unit steps land on two distinct sites; the wrap
    // accumulates their weights
    auto deposit = [&](int z1, int z2) {
        weights[layout.index(wrap_component(z1, n), wrap_component(z2, n))] += 1.0;
    };
    deposit(1, 0);
    deposit(-1, 0);
    deposit(0, 1);
    deposit(0, -1);
    return kernel_from_table(n, gamma, std::move(weights), "nearest-neighbor");
}

KacKernel wrapped_profile_kernel(ProfileId profile, double gamma, int n) {
    TorusField layout(n);
    std::size_t cells = layout.size();
    int period = 2 * n;
    // images z + period*m contribute while gamma*|...| <= 3
    int m_max = static_cast<int>(std::ceil(3.0 / (gamma * period))) + 1;
    std::vector<double> weights(cells, 0.0);
    for (std::size_t i = 0; i < cells; ++i) {
        auto [z1, z2] = layout.coord(i);
        if (z1 == 0 && z2 == 0) continue;
        NeumaierSum w;
        for (int m1 = -m_max; m1 <= m_max; ++m1)
            for (int m2 = -m_max; m2 <= m_max; ++m2)
                w.add(profile_value(profile,
                                    gamma * std::hypot(z1 + period * m1, z2 + period * m2)));
        weights[i] = w.value();
    }
    return kernel_from_table(n, gamma, std::move(weights),
                             "wrapped-" + profile_name(profile));
}

double renorm_constant_from_spectrum(const std::vector<double>& khat, int n, double gamma) {
    TorusField layout(n);
    if (khat.size() != layout.size())
        throw std::invalid_argument("spectrum table has wrong size");
    double prefactor = static_cast<double>(n) * static_cast<double>(n) * gamma * gamma;
    std::size_t origin = layout.index(0, 0);
    NeumaierSum sum;
    for (std::size_t i = 0; i < khat.size(); ++i) {
        if (i == origin) continue;
        double denom = 1.0 - khat[i];
        if (!(denom > 0.0))
            throw std::domain_error("degenerate kernel: multiplier reaches 1 off the zero mode");
        sum.add(khat[i] * khat[i] / (prefactor * denom));
    }
    return 0.25 * sum.value();
}

double renorm_constant(const KacKernel& kernel) {
    return renorm_constant_from_spectrum(kernel.spectrum(), kernel.n(), kernel.gamma());
}

double kernel_diffusivity(const KacKernel& kernel) {
    NeumaierSum second_moment;
    for (const KacKernel::Neighbor& nb : kernel.neighbors()) {
        double zsq = static_cast<double>(nb.dz1) * nb.dz1 + static_cast<double>(nb.dz2) * nb.dz2;
        second_moment.add(nb.weight * zsq);
    }
    double gamma = kernel.gamma();
    return 0.25 * gamma * gamma * second_moment.value();
}

KernelBoundsReport verify_kernel_bounds(const KacKernel& kernel) {
    const std::vector<double>& khat = kernel.spectrum();
    const TorusField& layout = kernel.macroscopic_field();
    double gamma = kernel.gamma();
    double g2 = gamma * gamma;

    KernelBoundsReport report{};
    double lower = std::numeric_limits<double>::infinity();
    double upper = 0.0;
    // shells of constant |w|^2 within |w| <= 1/gamma: (min, max) of khat
    std::map<long long, std::pair<double, double>> shells;
    long long shell_cut = static_cast<long long>(std::floor(1.0 / g2));

    for (std::size_t i = 0; i < khat.size(); ++i) {
        auto [w1, w2] = layout.coord(i);
        if (w1 == 0 && w2 == 0) continue;
        long long wsq = static_cast<long long>(w1) * w1 + static_cast<long long>(w2) * w2;
        double lower_envelope = std::min(g2 * static_cast<double>(wsq), 1.0);
        lower = std::min(lower, (1.0 - khat[i]) / lower_envelope);
        upper = std::max(upper, std::abs(khat[i]) * g2 * static_cast<double>(wsq));
        if (wsq <= shell_cut) {
            auto [it, inserted] = shells.try_emplace(wsq, khat[i], khat[i]);
            if (!inserted) {
                it->second.first = std::min(it->second.first, khat[i]);
                it->second.second = std::max(it->second.second, khat[i]);
            }
        }
    }

    double anisotropy = 0.0;
    for (const auto& [wsq, range] : shells) {
        double scale = std::max(std::abs(range.first), std::abs(range.second));
        if (scale > 1e-12)
            anisotropy = std::max(anisotropy, (range.second - range.first) / scale);
    }

    report.lower_c = lower;
    report.upper_C = upper;
    report.lower_positive = lower > 0.0;
    report.anisotropy = anisotropy;
    return report;
}

void write_kernel_dump(const KacKernel& kernel, const std::string& snapshot_path) {
    write_snapshot_file(snapshot_path, kernel.macroscopic_field());
    std::ofstream sidecar(snapshot_path + ".txt", std::ios::trunc);
    if (!sidecar) throw std::runtime_error("cannot open " + snapshot_path + ".txt for writing");
    sidecar << "profile " << kernel.name() << "\n";
    sidecar << "gamma " << format_double(kernel.gamma()) << "\n";
    sidecar << "N " << kernel.n() << "\n";
    sidecar << "C_gamma " << format_double(renorm_constant(kernel)) << "\n";
    if (!sidecar.flush()) throw std::runtime_error("failed writing " + snapshot_path + ".txt");
}

} // namespace kacphi
