#include "kacphi/besov.hpp"

#include "kacphi/fourier.hpp"
#include "kacphi/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace kacphi {

namespace {

double psi_bump(double u) { return u > 0.0 ? std::exp(-1.0 / u) : 0.0; }

double safe_ratio(double lhs, double rhs) {
    if (rhs == 0.0) return lhs == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
    return lhs / rhs;
}

InequalityCheck make_check(double lhs, double rhs) { return {lhs, rhs, safe_ratio(lhs, rhs)}; }

} // namespace

double smooth_cutoff(double r) {
    if (r <= 0.75) return 1.0;
    if (r >= 4.0 / 3.0) return 0.0;
    double u = (4.0 / 3.0 - r) / (4.0 / 3.0 - 0.75);
    double a = psi_bump(u);
    double b = psi_bump(1.0 - u);
    return a / (a + b);
}

PaleyLittlewoodBank build_block_bank(int n) {
    if (n < 1) throw std::invalid_argument("bank lattice size must be positive");
    PaleyLittlewoodBank bank;
    bank.n = n;
    double max_mod = std::sqrt(2.0) * static_cast<double>(n);
    int k_max = 0;
    while (max_mod / std::ldexp(1.0, k_max + 1) > 0.75) ++k_max;
    bank.k_max = k_max;

    TorusField layout(n);
    std::size_t cells = layout.size();
    bank.masks.assign(static_cast<std::size_t>(k_max + 2), std::vector<double>(cells, 0.0));
    for (std::size_t i = 0; i < cells; ++i) {
        auto [w1, w2] = layout.coord(i);
        double r = std::hypot(static_cast<double>(w1), static_cast<double>(w2));
        // cutoff at r/2^k via exact halvings, so adjacent blocks share the
        // identical double and the telescoping cancels bit-for-bit
        double prev = smooth_cutoff(r);
        bank.masks[0][i] = prev;
        for (int k = 0; k <= k_max; ++k) {
            r *= 0.5;
            double next = smooth_cutoff(r);
            bank.masks[static_cast<std::size_t>(k + 1)][i] = next - prev;
            prev = next;
        }
    }
    return bank;
}

double partition_defect(const PaleyLittlewoodBank& bank) {
    std::size_t cells = bank.masks[0].size();
    double worst = 0.0;
    for (std::size_t i = 0; i < cells; ++i) {
        NeumaierSum sum;
        for (const std::vector<double>& mask : bank.masks) sum.add(mask[i]);
        worst = std::max(worst, std::abs(sum.value() - 1.0));
    }
    return worst;
}

TorusField project_block(const TorusField& f, int k, const PaleyLittlewoodBank& bank) {
    if (f.n() != bank.n) throw std::invalid_argument("field and bank lattice sizes differ");
    if (k < -1 || k > bank.k_max) throw std::invalid_argument("block index out of range");
    const std::vector<double>& mask = bank.mask(k);
    Spectrum hat = *f.spectrum();
    for (std::size_t i = 0; i < hat.size(); ++i) hat[i] *= mask[i];
    return TorusField::from_spectrum(f.n(), std::move(hat));
}

double besov_norm(const TorusField& f, const BesovSpec& spec, const PaleyLittlewoodBank& bank) {
    bool q_inf = std::isinf(spec.q);
    if (!q_inf && !(spec.q >= 1.0)) throw std::invalid_argument("besov q must lie in [1,inf]");
    double result = 0.0;
    NeumaierSum power_sum;
    for (int k = -1; k <= bank.k_max; ++k) {
        TorusField block = project_block(f, k, bank);
        double block_norm = spec.mode == BesovSpec::Mode::discrete
                                ? lp_norm(block, spec.p)
                                : extended_lp_norm(block, spec.p, spec.refine);
        double weighted = std::pow(2.0, spec.nu * static_cast<double>(k)) * block_norm;
        if (q_inf)
            result = std::max(result, weighted);
        else
            power_sum.add(std::pow(weighted, spec.q));
    }
    if (!q_inf) result = std::pow(power_sum.value(), 1.0 / spec.q);
    return result;
}

double conjugate_exponent(double p) {
    if (std::isinf(p)) return 1.0;
    if (!(p >= 1.0)) throw std::invalid_argument("exponent must lie in [1,inf]");
    if (p == 1.0) return std::numeric_limits<double>::infinity();
    return p / (p - 1.0);
}

InequalityCheck check_duality(const TorusField& f, const TorusField& g, double alpha, double p,
                              double q, const PaleyLittlewoodBank& bank) {
    BesovSpec left{alpha, p, q, BesovSpec::Mode::discrete, 4};
    BesovSpec right{-alpha, conjugate_exponent(p), conjugate_exponent(q),
                    BesovSpec::Mode::discrete, 4};
    // the pairing bound is two-sided, so the tested quantity is |<f,g>|
    double lhs = std::abs(inner_product(f, g));
    double rhs = besov_norm(f, left, bank) * besov_norm(g, right, bank);
    return make_check(lhs, rhs);
}

InequalityCheck check_lp_embedding(const TorusField& f, double nu, double p,
                                   const PaleyLittlewoodBank& bank) {
    if (!(nu > 0.0)) throw std::invalid_argument("embedding regularity must be positive");
    if (!(p >= 2.0 / nu))
        throw std::invalid_argument("embedding requires p >= d/nu (d = 2)");
    BesovSpec spec{-nu, std::numeric_limits<double>::infinity(),
                   std::numeric_limits<double>::infinity(), BesovSpec::Mode::discrete, 4};
    return make_check(besov_norm(f, spec, bank), lp_norm(f, p));
}

InequalityCheck check_extension_lp_log(const TorusField& f, double p, int refine) {
    double log_eps = std::log(static_cast<double>(f.n()));
    return make_check(extended_lp_norm(f, p, refine), log_eps * log_eps * lp_norm(f, p));
}

InequalityCheck check_extension_lp_gradient(const TorusField& f, double p, double kappa,
                                            int refine) {
    int n = f.n();
    int side = 2 * n;
    double eps = f.epsilon();
    const std::vector<double>& v = f.values();
    // ordered nearest-neighbor pairs: each site against its +e1/+e2
    // neighbors, both orientations
    NeumaierSum diff_sq;
    for (int row = 0; row < side; ++row) {
        int row_next = row + 1 == side ? 0 : row + 1;
        for (int col = 0; col < side; ++col) {
            int col_next = col + 1 == side ? 0 : col + 1;
            double fx = v[static_cast<std::size_t>(row) * side + col];
            double d1 = v[static_cast<std::size_t>(row_next) * side + col] - fx;
            double d2 = v[static_cast<std::size_t>(row) * side + col_next] - fx;
            diff_sq.add(2.0 * (d1 * d1 + d2 * d2));
        }
    }
    double grad_term = std::pow(eps * eps * diff_sq.value(), 1.0 / (2.0 * p));
    double rhs = lp_norm(f, p) + std::pow(eps, -kappa) *
                                     std::pow(lp_norm(f, 2.0 * p - 2.0), 1.0 - 1.0 / p) *
                                     grad_term;
    return make_check(extended_lp_norm(f, p, refine), rhs);
}

InequalityCheck check_regularity_bound(const TorusField& f, const KacKernel& kernel, double nu,
                                       const PaleyLittlewoodBank& bank) {
    if (!(nu > 0.0) || !(nu < 0.5))
        throw std::invalid_argument("regularity index must lie in (0, 1/2)");
    if (f.n() != kernel.n()) throw std::invalid_argument("field and kernel lattice sizes differ");
    BesovSpec spec{nu, 1.0, 1.0, BesovSpec::Mode::discrete, 4};
    double lhs = besov_norm(f, spec, bank);

    int side = 2 * f.n();
    const std::vector<double>& v = f.values();
    NeumaierSum diffs;
    for (int row = 0; row < side; ++row) {
        for (int col = 0; col < side; ++col) {
            double fx = v[static_cast<std::size_t>(row) * side + col];
            for (const KacKernel::Neighbor& nb : kernel.neighbors()) {
                int r = row + nb.dz1;
                if (r < 0) r += side;
                else if (r >= side) r -= side;
                int c = col + nb.dz2;
                if (c < 0) c += side;
                else if (c >= side) c -= side;
                diffs.add(nb.weight * std::abs(v[static_cast<std::size_t>(r) * side + c] - fx));
            }
        }
    }
    // sum_{x,y} eps^4 K(x-y) eps^{-1} gamma |f(x)-f(y)| collapses to
    // eps gamma sum_{x,dz} kappa(dz) |f(x+dz)-f(x)|
    double diff_term = f.epsilon() * kernel.gamma() * diffs.value();
    double l1 = lp_norm(f, 1.0);
    double rhs = std::pow(l1, 1.0 - 2.0 * nu) * std::pow(diff_term, 2.0 * nu) + l1;
    return make_check(lhs, rhs);
}

InequalityCheck check_product_estimate(const TorusField& f, const TorusField& g, double alpha,
                                       double beta, double p, double q,
                                       const PaleyLittlewoodBank& bank) {
    TorusField product(f.n());
    std::vector<double>& pv = product.mutable_values();
    for (std::size_t i = 0; i < pv.size(); ++i) pv[i] = f.values()[i] * g.values()[i];
    BesovSpec beta_spec{beta, p, q, BesovSpec::Mode::discrete, 4};
    BesovSpec alpha_spec{alpha, p, q, BesovSpec::Mode::discrete, 4};
    double lhs = besov_norm(product, beta_spec, bank);
    double rhs = besov_norm(f, alpha_spec, bank) * besov_norm(g, beta_spec, bank);
    return make_check(lhs, rhs);
}

TorusField random_spectral_field(int n, double decay, Rng& rng) {
    TorusField noise(n);
    std::vector<double>& nv = noise.mutable_values();
    for (double& x : nv) x = rng.normal();
    Spectrum hat = *noise.spectrum();
    TorusField layout(n);
    for (std::size_t i = 0; i < hat.size(); ++i) {
        auto [w1, w2] = layout.coord(i);
        double wsq = static_cast<double>(w1) * w1 + static_cast<double>(w2) * w2;
        hat[i] *= std::pow(1.0 + wsq, -decay / 2.0);
    }
    return TorusField::from_spectrum(n, std::move(hat));
}

std::vector<TorusField> field_corpus(int n, int count, std::uint64_t seed) {
    static constexpr double decays[] = {0.0, 0.5, 1.0, 1.5, 2.0};
    std::vector<TorusField> corpus;
    corpus.reserve(static_cast<std::size_t>(count));
    Rng rng(derive_seed(seed, 0));
    for (int i = 0; i < count; ++i)
        corpus.push_back(random_spectral_field(n, decays[i % 5], rng));
    return corpus;
}

} // namespace kacphi
