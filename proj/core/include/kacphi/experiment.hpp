#pragma once

#include "kacphi/glauber.hpp"
#include "kacphi/observables.hpp"
#include "kacphi/stats.hpp"

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace kacphi {

// Raised by configuration parsing/validation; the message always names the
// offending key.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// One batch run. Parsed from JSON with strict key checking (unknown keys are
// a ConfigError naming the key); every field has a workable default so small
// configs stay small. See config_schema() for the key table.
struct ExperimentConfig {
    std::string mode = "glauber"; // glauber | phi42 | oracle | compare |
                                  // kernel-scan | besov-corpus | ode-check
    std::string run_id = "run";
    std::uint64_t seed = 1;
    int replicas = 1;
    int threads = 1;
    std::string out_dir = ".";

    // spin dynamics
    std::vector<double> gammas{0.25};
    std::string profile = "bump";
    double A = 0.0;
    double b = 0.0;
    double beta = 0.0; // 0 = critical scaling; > 0 = plain fixed-beta dynamics
    double t_burn = 1.0;
    double t_sample = 4.0;
    double cadence = 0.1; // macroscopic time between recorded samples

    std::vector<std::string> observables{"mean", "l2_pow"};

    // Galerkin sampler
    int modes = 8;
    double dt = 1e-3;
    double noise = 1.0;
    std::vector<double> coeffs; // empty = cubic {0, A, 0, -1/3}
    // Laplacian coefficient of the sampler; 0 = automatic: 1 (canonical) in
    // phi42 mode, kernel_diffusivity(kernel) in compare mode so both sides
    // diffuse at the lattice rate
    double diffusivity = 0.0;

    // compare mode
    int samples = 500;
    std::string test_function = "mode_1_0_re";

    // oracle mode
    int lattice_n = 2;
    int random_functionals = 16;

    // besov-corpus mode
    int corpus_size = 20;
    int corpus_n = 64;
    double nu = 0.4;
    double p = 2.0;
    double q = 2.0;
    double kappa_exponent = 0.1;

    // ode-check mode
    int draws = 100;
    double horizon = 10.0;
};

ExperimentConfig config_from_json(const std::string& text);
ExperimentConfig load_config_file(const std::string& path);
// one line per key: name, type, default, meaning
std::string config_schema();

// One recorded observable sample. t_macro is measured from the end of the
// burn-in and is monotone within a replica.
struct ObservableRecord {
    double gamma = 0.0; // 0 in modes without a lattice scaling
    int replica = 0;
    double t_macro = 0.0;
    std::string name;
    double value = 0.0;
};

// Batch-means aggregate of one observable across replicas: independent
// replicas are combined by averaging the per-replica batch means and adding
// their squared standard errors.
struct SummaryRow {
    double gamma = 0.0;
    std::string name;
    double mean = 0.0;
    double stderr_of_mean = 0.0;
    std::size_t count = 0;
    double tau_int = 0.0;
};

struct ExperimentResult {
    std::vector<std::string> csv_paths;
    std::vector<ObservableRecord> records;
    std::vector<SummaryRow> summary;
};

// Dispatch on config.mode. Deterministic given (config, seed): replicas run
// on a worker pool but each owns the seed stream derive_seed(seed, replica)
// and aggregation is replica-ordered, so the CSV bytes do not depend on the
// thread count. Record CSVs are written one full line at a time so an
// interrupted run still leaves a parseable file.
ExperimentResult run_experiment(const ExperimentConfig& config);

// gamma^{p/2} E||X_gamma||_p^p across a gamma sweep at equilibrium; the
// normalized sequence should stay within a bounded band (max/min <= 4).
struct LpScalingRow {
    double gamma = 0.0;
    int n = 0;
    double scaled_mean = 0.0;   // gamma^{p/2} * mean of ||X||_p^p
    double scaled_stderr = 0.0; // batch-means error, same scaling
    std::size_t count = 0;
};

struct LpScalingResult {
    int p = 0;
    std::vector<LpScalingRow> rows;
    double max_over_min = 0.0;
    bool bounded = false; // max_over_min <= 4
};

struct LpScalingOptions {
    double A = 0.0;
    std::string profile = "bump";
    double t_burn = 1.0;
    double t_sample = 4.0;
    double cadence = 0.05;
    int replicas = 2;
    std::uint64_t seed = 1;
};

// p must be even and >= 2 (odd or tiny p is a domain error).
LpScalingResult lp_scaling_check(const std::vector<double>& gammas, int p,
                                 const LpScalingOptions& options = {});

// Pairing of a spin configuration against a test function, both as the raw
// rescaled spin field delta^{-1} s and as the kernel-smoothed fluctuation
// field X = delta^{-1} kappa * s; the two differ by O(gamma) for smooth phi.
struct SpinPairing {
    double raw = 0.0;
    double smoothed = 0.0;
    double difference = 0.0; // raw - smoothed
};

SpinPairing pair_spin_field(const GlauberSimulation& sim, const TestFunction& phi);

// Two-sample comparison: Kolmogorov-Smirnov statistic plus the first four
// moments of each sample with batch-means errors. Requires >= 100 samples on
// each side.
struct DistributionComparison {
    double ks = 0.0;
    std::size_t count_a = 0;
    std::size_t count_b = 0;
    MomentSummary moments_a;
    MomentSummary moments_b;
};

DistributionComparison compare_distributions(const std::vector<double>& a,
                                             const std::vector<double>& b);

// Grid supremum over s of s^lambda ||H_j(Z(s), c_gamma)||_{B^{-nu}_{inf,inf}}
// with Z produced by the linearized cosimulation riding on `sim` (driven
// forward; Z starts from zero at the current state).
struct WickNormTrace {
    std::vector<double> times;
    std::vector<double> norms; // plain Besov norms at each grid time
    double grid_sup = 0.0;     // sup_s s^lambda * norm(s)
};

WickNormTrace wick_norm_grid(GlauberSimulation& sim, int j, double lambda, double nu, double s_min,
                             double s_max, int n_grid, double window = 0.005);

} // namespace kacphi
