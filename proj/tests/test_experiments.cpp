// Batch experiment layer: strict config parsing, deterministic CSV output,
// the normalized-norm sweep, pairings against test functions, two-sample
// comparison, the comparison-ODE bound, and smoke coverage of every mode.

#include <doctest.h>

#include "kacphi/experiment.hpp"
#include "kacphi/glauber.hpp"
#include "kacphi/kernel.hpp"
#include "kacphi/ode.hpp"
#include "kacphi/oracle.hpp"
#include "kacphi/rng.hpp"

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace kacphi;

namespace {

std::string fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("kacphi_test_" + tag);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// data lines of a CSV, skipping '#' meta comments
std::vector<std::string> data_lines(const std::string& path) {
    std::ifstream in(path);
    REQUIRE(in.good());
    std::vector<std::string> out;
    std::string line;
    while (std::getline(in, line))
        if (!line.empty() && line[0] != '#') out.push_back(line);
    return out;
}

const SummaryRow& find_summary(const ExperimentResult& res, const std::string& name,
                               double gamma = -1.0) {
    for (const auto& s : res.summary)
        if (s.name == name && (gamma < 0.0 || s.gamma == gamma)) return s;
    REQUIRE_MESSAGE(false, ("summary row not found: " + name));
    static SummaryRow dummy;
    return dummy;
}

} // namespace

TEST_CASE("config parsing: defaults, strict keys, typed and domain errors") {
    ExperimentConfig d = config_from_json("{}");
    CHECK(d.mode == "glauber");
    CHECK(d.seed == 1);
    REQUIRE(d.gammas.size() == 1);
    CHECK(d.gammas[0] == 0.25);

    auto message_of = [](const std::string& json) {
        try {
            (void)config_from_json(json);
        } catch (const ConfigError& e) {
            return std::string(e.what());
        }
        return std::string("(no error)");
    };
    CHECK(message_of("{\"bogus_key\": 1}").find("bogus_key") != std::string::npos);
    CHECK(message_of("{\"gammas\": \"x\"}").find("gammas") != std::string::npos);
    CHECK(message_of("{\"gammas\": [1.5]}").find("gammas") != std::string::npos);
    CHECK(message_of("{\"mode\": \"warp\"}").find("warp") != std::string::npos);
    CHECK(message_of("{\"observables\": [\"nope\"]}").find("observables") != std::string::npos);
    CHECK(message_of("{\"cadence\": 0}").find("cadence") != std::string::npos);
    CHECK(message_of("{\"diffusivity\": -0.5}").find("diffusivity") != std::string::npos);
    CHECK(config_from_json("{\"diffusivity\": 0.45}").diffusivity == 0.45);
    CHECK(d.diffusivity == 0.0); // 0 = resolved per mode at run time
    CHECK(message_of("{\"mode\": \"oracle\"}").find("beta") != std::string::npos);
    CHECK(message_of("{\"mode\": \"oracle\", \"beta\": 0.5, \"lattice_n\": 3}")
              .find("lattice_n") != std::string::npos);
    CHECK(message_of("{").find("JSON") != std::string::npos);
    CHECK(message_of("[]").find("object") != std::string::npos);
    CHECK_THROWS_AS((void)load_config_file("/nonexistent/kacphi.json"), ConfigError);

    std::string schema = config_schema();
    for (const char* key : {"mode", "gammas", "cadence", "dt", "observables", "corpus_n"})
        CHECK(schema.find(key) != std::string::npos);
}

TEST_CASE("glauber mode: output bytes are a function of config and seed only") {
    auto base = [](const std::string& out_dir, int threads) {
        ExperimentConfig c;
        c.mode = "glauber";
        c.run_id = "det";
        c.seed = 99;
        c.replicas = 2;
        c.threads = threads;
        c.out_dir = out_dir;
        c.gammas = {0.5};
        c.t_burn = 0.1;
        c.t_sample = 0.6;
        c.cadence = 0.1;
        c.observables = {"mean", "l2_pow", "pair_mode_1_0_re"};
        return c;
    };
    std::string dir_a = fresh_dir("det_a"), dir_b = fresh_dir("det_b");
    ExperimentResult ra = run_experiment(base(dir_a, 1));
    ExperimentResult rb = run_experiment(base(dir_b, 2));

    REQUIRE(ra.csv_paths.size() == 2);
    REQUIRE(rb.csv_paths.size() == 2);
    for (std::size_t i = 0; i < 2; ++i)
        CHECK(slurp(ra.csv_paths[i]) == slurp(rb.csv_paths[i]));

    REQUIRE(!ra.records.empty());
    CHECK(ra.records.size() == rb.records.size());
    for (const auto& r : ra.records) {
        CHECK(std::isfinite(r.value));
        CHECK(r.gamma == 0.5);
        CHECK(r.t_macro >= 0.0);
    }
    // 3 observables x 2 replicas x 6 cadence points
    CHECK(ra.records.size() == 36);
    for (const char* name : {"mean", "l2_pow", "pair_mode_1_0_re"}) {
        const SummaryRow& s = find_summary(ra, name);
        CHECK(std::isfinite(s.mean));
        CHECK(s.stderr_of_mean >= 0.0);
        CHECK(s.count == 12);
    }
}

TEST_CASE("empty observable list still writes parseable header-only records") {
    ExperimentConfig c;
    c.mode = "glauber";
    c.run_id = "empty";
    c.out_dir = fresh_dir("empty");
    c.gammas = {0.5};
    c.t_burn = 0.05;
    c.t_sample = 0.1;
    c.cadence = 0.05;
    c.observables = {};
    ExperimentResult res = run_experiment(c);
    CHECK(res.records.empty());
    CHECK(res.summary.empty());
    auto lines = data_lines(res.csv_paths[0]);
    REQUIRE(lines.size() == 1); // just the header
    CHECK(lines[0] == "run_id,gamma,replica,t_macro,observable,value");
}

TEST_CASE("field observables are exact on the all-plus configuration") {
    const double gamma = 0.25;
    auto kernel = std::make_shared<const KacKernel>(
        wrapped_profile_kernel(ProfileId::bump, gamma, scaling_lattice_size(gamma)));
    GlauberSimulation sim(kernel, critical_scaling(*kernel, 0.0), 7);
    sim.set_spins(std::vector<std::int8_t>(sim.sites(), 1));
    TorusField x = sim.fluctuation_field(); // kappa * 1 = 1, so X = 1/gamma
    CHECK(make_field_observable("mean")(x) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(make_field_observable("l2_pow")(x) == doctest::Approx(64.0).epsilon(1e-12));
    CHECK(make_field_observable("l4_pow")(x) == doctest::Approx(1024.0).epsilon(1e-12));
    CHECK(make_field_observable("max_abs")(x) == doctest::Approx(4.0).epsilon(1e-12));
    CHECK(make_field_observable("pair_one")(x) == doctest::Approx(16.0).epsilon(1e-12));
    CHECK_THROWS((void)make_field_observable("nope"));
}

TEST_CASE("normalized p-norm sweep stays in a bounded band; odd p rejected") {
    CHECK_THROWS_AS((void)lp_scaling_check({0.25}, 3), std::invalid_argument);
    CHECK_THROWS_AS((void)lp_scaling_check({0.25}, 0), std::invalid_argument);
    CHECK_THROWS_AS((void)lp_scaling_check({}, 2), std::invalid_argument);

    LpScalingOptions opt;
    opt.t_burn = 0.3;
    opt.t_sample = 1.5;
    opt.cadence = 0.1;
    opt.replicas = 2;
    opt.seed = 5;
    LpScalingResult res = lp_scaling_check({0.5, 0.25}, 2, opt);
    CHECK(res.p == 2);
    REQUIRE(res.rows.size() == 2);
    for (const auto& row : res.rows) {
        CHECK(row.n == scaling_lattice_size(row.gamma));
        CHECK(row.scaled_mean > 0.0);
        CHECK(std::isfinite(row.scaled_stderr));
        CHECK(row.count > 0);
    }
    CHECK(res.max_over_min >= 1.0);
    CHECK(res.bounded);
    CHECK(res.max_over_min <= 4.0);
}

TEST_CASE("test-function pairings: constants, orthonormal modes, bad names") {
    TorusField c(16, 1.3);
    CHECK(pair_with_test_function(c, make_test_function("one")) ==
          doctest::Approx(4.0 * 1.3).epsilon(1e-12));
    // <cos(pi x1), cos(pi x1)> over the torus of area 4 is 2
    TorusField mode = sample_test_function(make_test_function("mode_1_0_re"), 16);
    CHECK(pair_with_test_function(mode, make_test_function("mode_1_0_re")) ==
          doctest::Approx(2.0).epsilon(1e-12));
    CHECK(pair_with_test_function(mode, make_test_function("mode_0_1_re")) ==
          doctest::Approx(0.0).epsilon(1e-12));
    // named modes evaluate to the advertised trigonometric functions
    TestFunction f = make_test_function("mode_2_3_im");
    Rng rng(77);
    for (int t = 0; t < 50; ++t) {
        double x1 = 2.0 * rng.uniform_co() - 1.0, x2 = 2.0 * rng.uniform_co() - 1.0;
        CHECK(f.eval(x1, x2) ==
              doctest::Approx(std::sin(std::numbers::pi * (2 * x1 + 3 * x2))).epsilon(1e-12));
    }
    CHECK_THROWS((void)make_test_function("mode_1_0_xx"));
    CHECK_THROWS((void)make_test_function("wavelet"));
    for (const auto& tf : standard_test_functions()) CHECK(!tf.name.empty());
}

TEST_CASE("raw and smoothed spin pairings differ at first order in the range") {
    // a fixed half-torus sign pattern pairs order-one with sin(pi x1); the
    // raw/smoothed gap then shrinks linearly in gamma (measured slope ~ 11 g)
    TestFunction phi = make_test_function("mode_1_0_im");
    std::vector<double> diffs;
    for (double gamma : {0.25, 0.125, 0.0625}) {
        int n = scaling_lattice_size(gamma);
        auto kernel = std::make_shared<const KacKernel>(
            wrapped_profile_kernel(ProfileId::bump, gamma, n));
        GlauberSimulation sim(kernel, critical_scaling(*kernel, 0.0), 1);
        std::vector<std::int8_t> s(sim.sites());
        TorusField layout(n);
        for (std::size_t i = 0; i < s.size(); ++i) {
            auto [c1, c2] = layout.coord(i);
            s[i] = c1 >= 1 ? 1 : -1;
        }
        sim.set_spins(s);
        SpinPairing p = pair_spin_field(sim, phi);
        CHECK(p.difference == doctest::Approx(p.raw - p.smoothed).epsilon(1e-12));
        CHECK(p.raw > 1.0); // the pairing itself is order gamma^{-1}
        CHECK(p.difference / gamma > 8.0);
        CHECK(p.difference / gamma < 14.0);
        diffs.push_back(p.difference);
    }
    CHECK(diffs[0] / diffs[1] > 1.6);
    CHECK(diffs[0] / diffs[1] < 2.4);
    CHECK(diffs[1] / diffs[2] > 1.6);
    CHECK(diffs[1] / diffs[2] < 2.4);
}

TEST_CASE("two-sample comparison: exact zero on equal samples, calibrated null") {
    Rng rng(404);
    std::vector<double> a(500);
    for (auto& v : a) v = rng.normal();
    DistributionComparison same = compare_distributions(a, a);
    CHECK(same.ks == 0.0);
    CHECK(same.count_a == 500);
    CHECK(same.moments_a.m1 == doctest::Approx(same.moments_b.m1));
    CHECK(same.moments_a.m2 == doctest::Approx(same.moments_b.m2));

    CHECK_THROWS_AS((void)compare_distributions(std::vector<double>(99, 0.0), a),
                    std::invalid_argument);

    // null calibration: two independent standard normal samples of 500; the
    // 1% two-sample critical value is 1.628 sqrt(2/500) = 0.103
    int below = 0;
    const double critical = 1.628 * std::sqrt(2.0 / 500.0);
    for (int rep = 0; rep < 20; ++rep) {
        Rng ra(derive_seed(1000, rep)), rb(derive_seed(2000, rep));
        std::vector<double> u(500), v(500);
        for (auto& x : u) x = ra.normal();
        for (auto& x : v) x = rb.normal();
        DistributionComparison comp = compare_distributions(u, v);
        CHECK(comp.ks >= 0.0);
        if (comp.ks < critical) ++below;
    }
    CHECK(below >= 19);
}

TEST_CASE("comparison ODE: closed forms, bound violations, domain errors") {
    // c2 = 0, lambda = 2: f(t) = f0 / (1 + 2 c1 f0 t), and the bound with
    // exponent 1/(lambda-1) is exactly twice as slow, so it dominates
    const double c1 = 0.7, f0 = 1.3;
    double exact = f0 / (1.0 + 2.0 * c1 * f0 * 5.0);
    double integrated = integrate_scalar(
        [&](double, double f) { return -2.0 * c1 * f * f; }, f0, 0.0, 5.0);
    CHECK(integrated == doctest::Approx(exact).epsilon(1e-9));

    ComparisonCheck chk = ode_comparison_check(c1, 0.0, 2.0, f0, 5.0);
    CHECK(chk.ok);
    CHECK(chk.max_violation <= 1e-9);
    CHECK(chk.mesh_points >= 100);

    ComparisonCheck forced = ode_comparison_check(0.5, 1.0, 3.0, 4.0, 10.0);
    CHECK(forced.ok);

    CHECK_THROWS((void)ode_comparison_check(0.0, 1.0, 2.0, 1.0, 1.0)); // c1 > 0 required
    CHECK_THROWS((void)ode_comparison_check(0.5, 1.0, 1.0, 1.0, 1.0)); // lambda > 1
    CHECK_THROWS((void)ode_comparison_check(0.5, 1.0, 2.0, -1.0, 1.0)); // f0 >= 0

    Rng rng(31);
    for (int draw = 0; draw < 100; ++draw) {
        double rc1 = 0.1 + 2.0 * rng.uniform_co();
        double rc2 = 2.0 * rng.uniform_co();
        double lambda = double(2 + int(rng.below(4)));
        double rf0 = 4.0 * rng.uniform_co();
        ComparisonCheck r = ode_comparison_check(rc1, rc2, lambda, rf0, 10.0);
        CHECK(r.ok);
    }
}

TEST_CASE("kernel-scan mode: deterministic file with the exact constants") {
    auto cfg = [](const std::string& dir) {
        ExperimentConfig c;
        c.mode = "kernel-scan";
        c.run_id = "scan";
        c.out_dir = dir;
        c.gammas = {0.5, 0.25};
        return c;
    };
    std::string dir_a = fresh_dir("scan_a"), dir_b = fresh_dir("scan_b");
    ExperimentResult res = run_experiment(cfg(dir_a));
    ExperimentResult res_b = run_experiment(cfg(dir_b));
    REQUIRE(res.csv_paths.size() == 1);
    CHECK(slurp(res.csv_paths[0]) == slurp(res_b.csv_paths[0]));

    auto lines = data_lines(res.csv_paths[0]);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] ==
          "gamma,N,eps,gamma_sq,c_gamma,lower_c,upper_C,lower_positive,anisotropy");

    for (double gamma : {0.5, 0.25}) {
        KacKernel k = wrapped_profile_kernel(ProfileId::bump, gamma, scaling_lattice_size(gamma));
        const SummaryRow& c_row = find_summary(res, "c_gamma", gamma);
        CHECK(c_row.mean == doctest::Approx(renorm_constant(k)).epsilon(1e-14));
        CHECK(find_summary(res, "anisotropy", gamma).mean < 0.1);
        CHECK(find_summary(res, "lower_c", gamma).mean > 0.0);
        CHECK(find_summary(res, "upper_C", gamma).mean > 0.0);
    }
}

TEST_CASE("oracle mode: records echo the exact enumeration") {
    ExperimentConfig c;
    c.mode = "oracle";
    c.run_id = "oracle";
    c.out_dir = fresh_dir("oracle");
    c.gammas = {0.5};
    c.beta = 0.9;
    c.b = 0.15;
    c.lattice_n = 2;
    c.random_functionals = 8;
    ExperimentResult res = run_experiment(c);
    REQUIRE(res.csv_paths.size() == 1);
    CHECK(!data_lines(res.csv_paths[0]).empty());

    auto kernel = std::make_shared<const KacKernel>(wrapped_profile_kernel(ProfileId::bump, 0.5, 2));
    ExactGibbs g(kernel, 0.9, 0.15);
    TorusField layout(2);
    CHECK(find_summary(res, "spin_0_0").mean ==
          doctest::Approx(g.spin_expectation(layout.index(0, 0))).epsilon(1e-14));
    CHECK(find_summary(res, "pair_origin_1_0").mean ==
          doctest::Approx(g.pair_expectation(layout.index(0, 0), layout.index(1, 0)))
              .epsilon(1e-14));
    CHECK(find_summary(res, "detailed_balance_violation").mean <= 1e-12);
    CHECK(find_summary(res, "invariance_defect_max").mean <= 1e-10);
}

TEST_CASE("compare mode smoke: matched sample counts and a finite statistic") {
    ExperimentConfig c;
    c.mode = "compare";
    c.run_id = "cmp";
    c.out_dir = fresh_dir("cmp");
    c.seed = 11;
    c.replicas = 2;
    c.gammas = {0.5};
    c.modes = 4;
    c.dt = 5e-3;
    c.cadence = 0.05;
    c.t_burn = 0.2;
    c.samples = 120;
    c.test_function = "mode_1_0_re";
    ExperimentResult res = run_experiment(c);
    REQUIRE(res.csv_paths.size() == 2);
    int n_a = 0, n_b = 0;
    for (const auto& r : res.records) {
        CHECK(std::isfinite(r.value));
        if (r.name == "glauber_pairing") ++n_a;
        if (r.name == "phi42_pairing") ++n_b;
    }
    CHECK(n_a == 120);
    CHECK(n_b == 120);
    const SummaryRow& ks = find_summary(res, "ks");
    CHECK(ks.mean >= 0.0);
    CHECK(ks.mean <= 1.0);

    // by default the sampler's Laplacian coefficient is matched to the kernel;
    // the resolved value is recorded in the samples file header
    std::string samples_text = slurp(res.csv_paths[0]);
    auto pos = samples_text.find("diffusivity=");
    REQUIRE(pos != std::string::npos);
    double recorded = std::stod(samples_text.substr(pos + std::string("diffusivity=").size()));
    KacKernel kern = wrapped_profile_kernel(ProfileId::bump, 0.5, 4);
    CHECK(recorded == doctest::Approx(kernel_diffusivity(kern)).epsilon(1e-12));

    // an explicit coefficient overrides the automatic matching
    c.out_dir = fresh_dir("cmp_theta");
    c.diffusivity = 1.0;
    ExperimentResult res_unit = run_experiment(c);
    std::string unit_text = slurp(res_unit.csv_paths[0]);
    CHECK(unit_text.find("diffusivity=1\n") != std::string::npos);
}

TEST_CASE("besov-corpus mode smoke: every inequality ratio is finite") {
    ExperimentConfig c;
    c.mode = "besov-corpus";
    c.run_id = "ineq";
    c.out_dir = fresh_dir("ineq");
    c.gammas = {0.25};
    c.corpus_n = 16;
    c.corpus_size = 6;
    c.nu = 0.4;
    c.p = 2.0;
    c.q = 2.0;
    ExperimentResult res = run_experiment(c);
    REQUIRE(res.csv_paths.size() == 1);
    CHECK(data_lines(res.csv_paths[0]).size() == 1 + 6 * 6); // header + 6 checks x 6 fields
    for (const char* name : {"max_ratio_duality", "max_ratio_lp_embedding",
                             "max_ratio_extension_log", "max_ratio_extension_gradient",
                             "max_ratio_regularity", "max_ratio_product"}) {
        const SummaryRow& s = find_summary(res, name);
        CHECK(std::isfinite(s.mean));
        CHECK(s.mean > 0.0);
        CHECK(s.count == 6);
    }
}

TEST_CASE("ode-check mode: random comparisons report zero violations") {
    ExperimentConfig c;
    c.mode = "ode-check";
    c.run_id = "ode";
    c.out_dir = fresh_dir("ode");
    c.draws = 50;
    c.horizon = 8.0;
    ExperimentResult res = run_experiment(c);
    REQUIRE(res.csv_paths.size() == 1);
    CHECK(data_lines(res.csv_paths[0]).size() == 51);
    CHECK(find_summary(res, "violations").mean == 0.0);
    CHECK(find_summary(res, "max_violation").mean <= 1e-9);
}

TEST_CASE("Wick norm grid: consistent supremum over ceiled grid times") {
    const double gamma = 0.25;
    auto kernel = std::make_shared<const KacKernel>(
        wrapped_profile_kernel(ProfileId::bump, gamma, scaling_lattice_size(gamma)));
    GlauberSimulation sim(kernel, critical_scaling(*kernel, 0.0), 909);
    sim.randomize_spins();
    sim.run_macro_time(0.1);
    WickNormTrace trace = wick_norm_grid(sim, 2, 0.5, 0.4, 0.1, 0.5, 5, 0.025);
    REQUIRE(trace.times.size() == 5);
    REQUIRE(trace.norms.size() == 5);
    double sup = 0.0;
    for (std::size_t i = 0; i < trace.times.size(); ++i) {
        CHECK(trace.times[i] >= 0.1 - 1e-12);
        CHECK(trace.times[i] <= 0.5 + 0.025 + 1e-12);
        if (i) CHECK(trace.times[i] > trace.times[i - 1]);
        // grid times land on whole cosimulation windows
        double ratio = trace.times[i] / 0.025;
        CHECK(std::abs(ratio - std::lround(ratio)) < 1e-9);
        CHECK(std::isfinite(trace.norms[i]));
        CHECK(trace.norms[i] >= 0.0);
        sup = std::max(sup, std::pow(trace.times[i], 0.5) * trace.norms[i]);
    }
    CHECK(trace.grid_sup == doctest::Approx(sup).epsilon(1e-12));
    CHECK(trace.grid_sup > 0.0);
}
