#pragma once

#include <cstddef>
#include <vector>

namespace kacphi {

// Neumaier compensated summation; used wherever lattice-sized or longer sums
// feed quantities with tight tolerances (norms, renormalization constants).
class NeumaierSum {
  public:
    void add(double x) {
        double t = sum_ + x;
        if (std::abs(sum_) >= std::abs(x))
            comp_ += (sum_ - t) + x;
        else
            comp_ += (x - t) + sum_;
        sum_ = t;
    }
    double value() const { return sum_ + comp_; }

  private:
    double sum_ = 0.0;
    double comp_ = 0.0;
};

double compensated_sum(const std::vector<double>& xs);

double mean(const std::vector<double>& xs);
double variance(const std::vector<double>& xs); // unbiased, n-1

// Integrated autocorrelation time of a stationary series, via the windowed
// estimator (sum of autocorrelations until the first nonpositive pair).
double integrated_autocorrelation_time(const std::vector<double>& xs);

struct BatchMeans {
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t batch_length = 0;
    std::size_t n_batches = 0;
    double tau_int = 0.0;
};

// Batch-means error bar with batch length chosen from the estimated
// autocorrelation time (>= 5 tau, at least 25 data-limited batches capped).
BatchMeans batch_means(const std::vector<double>& xs);

struct MomentSummary {
    double m1 = 0.0, m1_se = 0.0;
    double m2 = 0.0, m2_se = 0.0;
    double m3 = 0.0, m3_se = 0.0;
    double m4 = 0.0, m4_se = 0.0;
};

// Raw moments E[x^k], k = 1..4, with batch-means standard errors.
MomentSummary moment_summary(const std::vector<double>& xs);

// Two-sample Kolmogorov-Smirnov statistic sup_x |F_a(x) - F_b(x)|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

} // namespace kacphi
