#include "kacphi/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace kacphi {

double compensated_sum(const std::vector<double>& xs) {
    NeumaierSum s;
    for (double x : xs) s.add(x);
    return s.value();
}

double mean(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("mean: empty series");
    return compensated_sum(xs) / static_cast<double>(xs.size());
}

double variance(const std::vector<double>& xs) {
    if (xs.size() < 2) throw std::invalid_argument("variance: need >= 2 samples");
    double m = mean(xs);
    NeumaierSum s;
    for (double x : xs) s.add((x - m) * (x - m));
    return s.value() / static_cast<double>(xs.size() - 1);
}

double integrated_autocorrelation_time(const std::vector<double>& xs) {
    std::size_t n = xs.size();
    if (n < 8) return 1.0;
    double m = mean(xs);
    double c0 = 0.0;
    for (double x : xs) c0 += (x - m) * (x - m);
    c0 /= static_cast<double>(n);
    if (c0 <= 0.0) return 1.0;
    double tau = 1.0;
    std::size_t max_lag = n / 4;
    for (std::size_t k = 1; k <= max_lag; ++k) {
        double ck = 0.0;
        for (std::size_t i = 0; i + k < n; ++i) ck += (xs[i] - m) * (xs[i + k] - m);
        ck /= static_cast<double>(n - k);
        double rho = ck / c0;
        if (rho <= 0.0) break;
        tau += 2.0 * rho;
        // once the window is clearly past the correlation scale, stop
        if (static_cast<double>(k) > 6.0 * tau) break;
    }
    return std::max(1.0, tau);
}

BatchMeans batch_means(const std::vector<double>& xs) {
    if (xs.empty()) throw std::invalid_argument("batch_means: empty series");
    if (xs.size() < 16) {
        // too short to estimate the correlation scale: fall back to the
        // i.i.d. error bar (an underestimate on correlated data)
        BatchMeans out;
        out.mean = mean(xs);
        out.batch_length = 1;
        out.n_batches = xs.size();
        out.tau_int = 1.0;
        out.stderr_of_mean =
            xs.size() >= 2 ? std::sqrt(variance(xs) / static_cast<double>(xs.size())) : 0.0;
        return out;
    }
    BatchMeans out;
    out.tau_int = integrated_autocorrelation_time(xs);
    std::size_t n = xs.size();
    std::size_t len = static_cast<std::size_t>(std::ceil(5.0 * out.tau_int));
    len = std::max<std::size_t>(len, 1);
    // keep at least 8 batches; the error bar degrades gracefully if the series
    // is shorter than 40 tau
    if (len > n / 8) len = std::max<std::size_t>(n / 8, 1);
    std::size_t nb = n / len;
    std::vector<double> bm(nb);
    for (std::size_t b = 0; b < nb; ++b) {
        NeumaierSum s;
        for (std::size_t i = b * len; i < (b + 1) * len; ++i) s.add(xs[i]);
        bm[b] = s.value() / static_cast<double>(len);
    }
    out.mean = mean(bm);
    out.batch_length = len;
    out.n_batches = nb;
    out.stderr_of_mean = nb >= 2 ? std::sqrt(variance(bm) / static_cast<double>(nb)) : 0.0;
    return out;
}

MomentSummary moment_summary(const std::vector<double>& xs) {
    MomentSummary out;
    std::vector<double> pw(xs.size());
    auto fill = [&](int k) {
        for (std::size_t i = 0; i < xs.size(); ++i) {
            double v = xs[i];
            double p = v;
            for (int j = 1; j < k; ++j) p *= v;
            pw[i] = p;
        }
    };
    fill(1);
    auto b1 = batch_means(pw);
    out.m1 = b1.mean, out.m1_se = b1.stderr_of_mean;
    fill(2);
    auto b2 = batch_means(pw);
    out.m2 = b2.mean, out.m2_se = b2.stderr_of_mean;
    fill(3);
    auto b3 = batch_means(pw);
    out.m3 = b3.mean, out.m3_se = b3.stderr_of_mean;
    fill(4);
    auto b4 = batch_means(pw);
    out.m4 = b4.mean, out.m4_se = b4.stderr_of_mean;
    return out;
}

double ks_statistic(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("ks_statistic: empty sample");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size() || x.size() < 2)
        throw std::invalid_argument("linear_fit: need matched series, n >= 2");
    double n = static_cast<double>(x.size());
    double mx = mean(x), my = mean(y);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinearFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        double r = y[i] - (f.intercept + f.slope * x[i]);
        ss_res += r * r;
    }
    f.r_squared = syy > 0.0 ? 1.0 - ss_res / syy : 1.0;
    (void)n;
    return f;
}

} // namespace kacphi
