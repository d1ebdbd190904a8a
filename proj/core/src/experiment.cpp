#include "kacphi/experiment.hpp"

#include "kacphi/besov.hpp"
#include "kacphi/csv.hpp"
#include "kacphi/linearized.hpp"
#include "kacphi/ode.hpp"
#include "kacphi/oracle.hpp"
#include "kacphi/phi42.hpp"

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <thread>

namespace kacphi {

namespace {

// ---------------------------------------------------------------------------
// configuration

const std::array<const char*, 7> kModes = {"glauber",     "phi42",        "oracle",   "compare",
                                           "kernel-scan", "besov-corpus", "ode-check"};

void validate(const ExperimentConfig& c) {
    bool known_mode = std::find_if(kModes.begin(), kModes.end(), [&](const char* m) {
                          return c.mode == m;
                      }) != kModes.end();
    if (!known_mode) throw ConfigError("config key 'mode': unknown mode '" + c.mode + "'");
    if (c.run_id.empty()) throw ConfigError("config key 'run_id': must be nonempty");
    if (c.replicas < 1) throw ConfigError("config key 'replicas': must be >= 1");
    if (c.threads < 1) throw ConfigError("config key 'threads': must be >= 1");
    if (c.gammas.empty()) throw ConfigError("config key 'gammas': must be nonempty");
    for (double g : c.gammas)
        if (!(g > 0.0 && g < 1.0))
            throw ConfigError("config key 'gammas': each gamma must lie in (0,1)");
    try {
        profile_from_name(c.profile);
    } catch (const std::exception&) {
        throw ConfigError("config key 'profile': unknown profile '" + c.profile + "'");
    }
    if (!(c.beta >= 0.0)) throw ConfigError("config key 'beta': must be >= 0");
    if (!(c.t_burn >= 0.0)) throw ConfigError("config key 't_burn': must be >= 0");
    if (!(c.t_sample >= 0.0)) throw ConfigError("config key 't_sample': must be >= 0");
    if (!(c.cadence > 0.0)) throw ConfigError("config key 'cadence': must be > 0");
    for (const auto& name : c.observables) {
        try {
            make_field_observable(name);
        } catch (const std::exception& e) {
            throw ConfigError("config key 'observables': " + std::string(e.what()));
        }
    }
    if (c.modes < 1) throw ConfigError("config key 'modes': must be >= 1");
    if (!(c.dt > 0.0)) throw ConfigError("config key 'dt': must be > 0");
    if (!(c.noise >= 0.0)) throw ConfigError("config key 'noise': must be >= 0");
    if (!(c.diffusivity >= 0.0))
        throw ConfigError("config key 'diffusivity': must be >= 0 (0 = automatic)");
    if (c.coeffs.size() > 6)
        throw ConfigError("config key 'coeffs': at most 6 coefficients (degree <= 5)");
    try {
        make_test_function(c.test_function);
    } catch (const std::exception&) {
        throw ConfigError("config key 'test_function': unknown test function '" + c.test_function +
                          "'");
    }
    if (c.mode == "oracle") {
        if (!(c.beta > 0.0)) throw ConfigError("config key 'beta': oracle mode needs beta > 0");
        if (c.lattice_n < 1 || 4 * c.lattice_n * c.lattice_n > 20)
            throw ConfigError("config key 'lattice_n': enumeration budget is 4*N^2 <= 20 spins");
        if (c.random_functionals < 0)
            throw ConfigError("config key 'random_functionals': must be >= 0");
    }
    if (c.mode == "compare" && c.samples < 100)
        throw ConfigError("config key 'samples': compare mode needs >= 100 samples per side");
    if (c.mode == "besov-corpus") {
        if (!(c.nu > 0.0 && c.nu < 0.5))
            throw ConfigError("config key 'nu': must lie in (0, 1/2)");
        if (!(c.p >= 1.0)) throw ConfigError("config key 'p': must be >= 1");
        if (!(c.q >= 1.0)) throw ConfigError("config key 'q': must be >= 1");
        if (c.corpus_size < 2)
            throw ConfigError("config key 'corpus_size': need >= 2 fields for duality pairs");
        if (c.corpus_n < 2) throw ConfigError("config key 'corpus_n': must be >= 2");
        if (!(c.kappa_exponent >= 0.0))
            throw ConfigError("config key 'kappa_exponent': must be >= 0");
    }
    if (c.mode == "ode-check") {
        if (c.draws < 1) throw ConfigError("config key 'draws': must be >= 1");
        if (!(c.horizon > 0.0)) throw ConfigError("config key 'horizon': must be > 0");
    }
}

} // namespace

ExperimentConfig config_from_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const std::exception& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    ExperimentConfig c;
    for (const auto& [key, val] : j.items()) {
        try {
            if (key == "mode")
                c.mode = val.get<std::string>();
            else if (key == "run_id")
                c.run_id = val.get<std::string>();
            else if (key == "seed")
                c.seed = val.get<std::uint64_t>();
            else if (key == "replicas")
                c.replicas = val.get<int>();
            else if (key == "threads")
                c.threads = val.get<int>();
            else if (key == "out_dir")
                c.out_dir = val.get<std::string>();
            else if (key == "gammas")
                c.gammas = val.get<std::vector<double>>();
            else if (key == "profile")
                c.profile = val.get<std::string>();
            else if (key == "A")
                c.A = val.get<double>();
            else if (key == "b")
                c.b = val.get<double>();
            else if (key == "beta")
                c.beta = val.get<double>();
            else if (key == "t_burn")
                c.t_burn = val.get<double>();
            else if (key == "t_sample")
                c.t_sample = val.get<double>();
            else if (key == "cadence")
                c.cadence = val.get<double>();
            else if (key == "observables")
                c.observables = val.get<std::vector<std::string>>();
            else if (key == "modes")
                c.modes = val.get<int>();
            else if (key == "dt")
                c.dt = val.get<double>();
            else if (key == "noise")
                c.noise = val.get<double>();
            else if (key == "coeffs")
                c.coeffs = val.get<std::vector<double>>();
            else if (key == "diffusivity")
                c.diffusivity = val.get<double>();
            else if (key == "samples")
                c.samples = val.get<int>();
            else if (key == "test_function")
                c.test_function = val.get<std::string>();
            else if (key == "lattice_n")
                c.lattice_n = val.get<int>();
            else if (key == "random_functionals")
                c.random_functionals = val.get<int>();
            else if (key == "corpus_size")
                c.corpus_size = val.get<int>();
            else if (key == "corpus_n")
                c.corpus_n = val.get<int>();
            else if (key == "nu")
                c.nu = val.get<double>();
            else if (key == "p")
                c.p = val.get<double>();
            else if (key == "q")
                c.q = val.get<double>();
            else if (key == "kappa_exponent")
                c.kappa_exponent = val.get<double>();
            else if (key == "draws")
                c.draws = val.get<int>();
            else if (key == "horizon")
                c.horizon = val.get<double>();
            else
                throw ConfigError("unknown config key: '" + key + "'");
        } catch (const nlohmann::json::exception& e) {
            throw ConfigError("config key '" + key + "': " + e.what());
        }
    }
    validate(c);
    return c;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read config file: " + path);
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    return config_from_json(text);
}

std::string config_schema() {
    return "key                 type      default        meaning\n"
           "mode                string    glauber        glauber | phi42 | oracle | compare | "
           "kernel-scan | besov-corpus | ode-check\n"
           "run_id              string    run            prefix of output files and CSV run id\n"
           "seed                uint64    1              master seed; replica r uses a derived "
           "stream\n"
           "replicas            int       1              independent chains/samplers\n"
           "threads             int       1              worker threads (output is "
           "thread-count-independent)\n"
           "out_dir             string    .              directory for CSV outputs\n"
           "gammas              [double]  [0.25]         interaction ranges, each in (0,1)\n"
           "profile             string    bump           kernel shape: bump | flat\n"
           "A                   double    0              coupling constant of the critical "
           "window\n"
           "b                   double    0              external field\n"
           "beta                double    0              0 = critical scaling; > 0 = plain "
           "fixed-temperature dynamics\n"
           "t_burn              double    1              macroscopic burn-in time\n"
           "t_sample            double    4              macroscopic sampling time\n"
           "cadence             double    0.1            macroscopic time between samples\n"
           "observables         [string]  [mean,l2_pow]  named field observables (mean, l2_pow, "
           "l4_pow, max_abs, pair_<test fn>)\n"
           "modes               int       8              Galerkin size M (grid side 2M)\n"
           "dt                  double    0.001          Galerkin time step\n"
           "noise               double    1              noise amplitude (0 = deterministic)\n"
           "coeffs              [double]  []             drift coefficients by Hermite degree "
           "(empty = cubic with A)\n"
           "diffusivity         double    0              Galerkin Laplacian coefficient; 0 = "
           "automatic (1 in phi42 mode, kernel-matched in compare mode)\n"
           "samples             int       500            compare mode: samples per side (>= "
           "100)\n"
           "test_function       string    mode_1_0_re    pairing test function\n"
           "lattice_n           int       2              oracle lattice size N (4N^2 <= 20)\n"
           "random_functionals  int       16             oracle: random functionals in the "
           "invariance family\n"
           "corpus_size         int       20             besov-corpus: number of random fields\n"
           "corpus_n            int       64             besov-corpus: lattice size\n"
           "nu                  double    0.4            besov-corpus: regularity index, in (0, "
           "1/2)\n"
           "p                   double    2              besov-corpus: integrability index\n"
           "q                   double    2              besov-corpus: summability index\n"
           "kappa_exponent      double    0.1            besov-corpus: epsilon exponent of the "
           "gradient bound\n"
           "draws               int       100            ode-check: random parameter draws\n"
           "horizon             double    10             ode-check: integration horizon\n";
}

namespace {

// ---------------------------------------------------------------------------
// worker pool: replicas pull task indices from a shared counter; results land
// in preassigned slots so aggregation order never depends on scheduling

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
    threads = std::max(1, std::min(threads, count));
    if (threads == 1) {
        for (int i = 0; i < count; ++i) body(i);
        return;
    }
    std::atomic<int> next{0};
    std::mutex err_mutex;
    std::exception_ptr err;
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&] {
            while (true) {
                int i = next.fetch_add(1);
                if (i >= count) break;
                try {
                    body(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(err_mutex);
                    if (!err) err = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (err) std::rethrow_exception(err);
}

// ---------------------------------------------------------------------------
// output plumbing

std::string join_path(const std::string& dir, const std::string& file) {
    return (std::filesystem::path(dir) / file).string();
}

std::ofstream open_output(const std::string& path) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot open output file: " + path);
    return os;
}

// Every output starts with the run identity and, per gamma, the integer
// rounding of the critical scaling: N = round(gamma^{-2}) makes eps = 1/N
// differ from gamma^2 whenever gamma^{-2} is not an integer, and that
// mismatch is recorded here.
void write_meta(std::ostream& os, const ExperimentConfig& c, const std::vector<double>& gammas) {
    os << "# run_id=" << c.run_id << " mode=" << c.mode << " seed=" << c.seed
       << " replicas=" << c.replicas << "\n";
    for (double g : gammas) {
        int n = scaling_lattice_size(g);
        double eps = 1.0 / static_cast<double>(n);
        os << "# scaling gamma=" << format_double(g) << " N=" << n << " eps=" << format_double(eps)
           << " gamma_sq=" << format_double(g * g)
           << " eps_minus_gamma_sq=" << format_double(eps - g * g) << "\n";
    }
}

void write_records_csv(std::ostream& os, const ExperimentConfig& c,
                       const std::vector<ObservableRecord>& records) {
    CsvWriter w(os, {"run_id", "gamma", "replica", "t_macro", "observable", "value"});
    for (const auto& r : records) {
        w.write_row({c.run_id, format_double(r.gamma), std::to_string(r.replica),
                     format_double(r.t_macro), r.name, format_double(r.value)});
        os.flush(); // keep partial files line-complete
    }
}

void write_summary_csv(std::ostream& os, const ExperimentConfig& c,
                       const std::vector<SummaryRow>& rows) {
    CsvWriter w(os, {"run_id", "gamma", "observable", "mean", "stderr", "count", "tau_int"});
    for (const auto& r : rows) {
        w.write_row({c.run_id, format_double(r.gamma), r.name, format_double(r.mean),
                     format_double(r.stderr_of_mean), std::to_string(r.count),
                     format_double(r.tau_int)});
        os.flush();
    }
}

// Combine records into per-(gamma, observable) batch-means rows; independent
// replicas average their means and add squared errors.
std::vector<SummaryRow> summarize(const std::vector<ObservableRecord>& records) {
    std::map<std::pair<double, std::string>, std::map<int, std::vector<double>>> groups;
    for (const auto& r : records) groups[{r.gamma, r.name}][r.replica].push_back(r.value);
    std::vector<SummaryRow> out;
    for (const auto& [key, by_replica] : groups) {
        double mean_sum = 0.0, var_sum = 0.0, tau_sum = 0.0;
        std::size_t count = 0;
        for (const auto& [rep, series] : by_replica) {
            (void)rep;
            BatchMeans bm = batch_means(series);
            mean_sum += bm.mean;
            var_sum += bm.stderr_of_mean * bm.stderr_of_mean;
            tau_sum += bm.tau_int;
            count += series.size();
        }
        double reps = static_cast<double>(by_replica.size());
        SummaryRow row;
        row.gamma = key.first;
        row.name = key.second;
        row.mean = mean_sum / reps;
        row.stderr_of_mean = std::sqrt(var_sum) / reps;
        row.count = count;
        row.tau_int = tau_sum / reps;
        out.push_back(row);
    }
    return out;
}

void write_standard_outputs(const ExperimentConfig& c, const std::vector<double>& gammas,
                            ExperimentResult& res) {
    std::filesystem::create_directories(c.out_dir);
    std::string records_path = join_path(c.out_dir, c.run_id + "_records.csv");
    std::string summary_path = join_path(c.out_dir, c.run_id + "_summary.csv");
    {
        auto os = open_output(records_path);
        write_meta(os, c, gammas);
        write_records_csv(os, c, res.records);
    }
    {
        auto os = open_output(summary_path);
        write_meta(os, c, gammas);
        write_summary_csv(os, c, res.summary);
    }
    res.csv_paths.push_back(records_path);
    res.csv_paths.push_back(summary_path);
}

std::shared_ptr<const KacKernel> make_scaling_kernel(const std::string& profile, double gamma) {
    int n = scaling_lattice_size(gamma);
    // periodized construction: identical to build_kernel whenever the support
    // fits in half the torus, and still well defined for coarse gammas
    // (gamma >= 3/N) where build_kernel would refuse
    return std::make_shared<const KacKernel>(
        wrapped_profile_kernel(profile_from_name(profile), gamma, n));
}

DynamicsParams dynamics_for(const ExperimentConfig& c, const KacKernel& kernel) {
    if (c.beta > 0.0) return plain_params(c.beta, c.b, kernel.gamma());
    return critical_scaling(kernel, c.A, c.b);
}

// ---------------------------------------------------------------------------
// mode drivers

ExperimentResult run_glauber_mode(const ExperimentConfig& c) {
    const int n_samples = static_cast<int>(std::floor(c.t_sample / c.cadence + 1e-9));
    const int n_tasks = static_cast<int>(c.gammas.size()) * c.replicas;
    std::vector<std::vector<ObservableRecord>> buckets(static_cast<std::size_t>(n_tasks));
    parallel_for(n_tasks, c.threads, [&](int task) {
        const int gi = task / c.replicas;
        const int rep = task % c.replicas;
        const double gamma = c.gammas[static_cast<std::size_t>(gi)];
        auto kernel = make_scaling_kernel(c.profile, gamma);
        GlauberSimulation sim(kernel, dynamics_for(c, *kernel),
                              derive_seed(derive_seed(c.seed, static_cast<std::uint64_t>(gi)),
                                          static_cast<std::uint64_t>(rep)));
        sim.randomize_spins();
        sim.run_macro_time(c.t_burn);
        std::vector<FieldObservable> obs;
        obs.reserve(c.observables.size());
        for (const auto& name : c.observables) obs.push_back(make_field_observable(name));
        auto& out = buckets[static_cast<std::size_t>(task)];
        for (int k = 1; k <= n_samples; ++k) {
            sim.run_macro_time(c.t_burn + k * c.cadence);
            TorusField x = sim.fluctuation_field();
            for (std::size_t oi = 0; oi < obs.size(); ++oi)
                out.push_back({gamma, rep, k * c.cadence, c.observables[oi], obs[oi](x)});
        }
    });
    ExperimentResult res;
    for (auto& b : buckets)
        for (auto& r : b) res.records.push_back(std::move(r));
    res.summary = summarize(res.records);
    write_standard_outputs(c, c.gammas, res);
    return res;
}

ExperimentResult run_phi42_mode(const ExperimentConfig& c) {
    Phi42Params params = cubic_params(c.modes, c.A, c.noise);
    if (!c.coeffs.empty()) params.coeffs = c.coeffs;
    if (c.diffusivity > 0.0) params.diffusivity = c.diffusivity;
    const int record_every = std::max(1, static_cast<int>(std::lround(c.cadence / c.dt)));
    const double cadence_eff = record_every * c.dt;
    const int n_samples = static_cast<int>(std::floor(c.t_sample / cadence_eff + 1e-9));
    const long long burn_steps = std::llround(c.t_burn / c.dt);
    std::vector<std::vector<ObservableRecord>> buckets(static_cast<std::size_t>(c.replicas));
    parallel_for(c.replicas, c.threads, [&](int rep) {
        Phi42Sampler sampler(params, derive_seed(c.seed, static_cast<std::uint64_t>(rep)));
        for (long long s = 0; s < burn_steps; ++s) sampler.step(c.dt);
        std::vector<FieldObservable> obs;
        obs.reserve(c.observables.size());
        for (const auto& name : c.observables) obs.push_back(make_field_observable(name));
        auto& out = buckets[static_cast<std::size_t>(rep)];
        for (int k = 1; k <= n_samples; ++k) {
            for (int s = 0; s < record_every; ++s) sampler.step(c.dt);
            TorusField x = sampler.x_field();
            for (std::size_t oi = 0; oi < obs.size(); ++oi)
                out.push_back({0.0, rep, k * cadence_eff, c.observables[oi], obs[oi](x)});
        }
    });
    ExperimentResult res;
    for (auto& b : buckets)
        for (auto& r : b) res.records.push_back(std::move(r));
    res.summary = summarize(res.records);
    write_standard_outputs(c, {}, res);
    return res;
}

ExperimentResult run_oracle_mode(const ExperimentConfig& c) {
    const double gamma = c.gammas.front();
    auto kernel = std::make_shared<const KacKernel>(
        wrapped_profile_kernel(profile_from_name(c.profile), gamma, c.lattice_n));
    ExactGibbs gibbs(kernel, c.beta, c.b);
    const TorusField& layout = kernel->macroscopic_field();
    std::vector<std::pair<std::string, double>> rows;
    const std::size_t origin = layout.index(0, 0);
    for (std::size_t x = 0; x < gibbs.sites(); ++x) {
        auto [x1, x2] = layout.coord(x);
        rows.emplace_back("spin_" + std::to_string(x1) + "_" + std::to_string(x2),
                          gibbs.spin_expectation(x));
    }
    for (std::size_t y = 0; y < gibbs.sites(); ++y) {
        if (y == origin) continue;
        auto [y1, y2] = layout.coord(y);
        std::string suffix = std::to_string(y1) + "_" + std::to_string(y2);
        rows.emplace_back("pair_origin_" + suffix, gibbs.pair_expectation(origin, y));
        rows.emplace_back("cov_origin_" + suffix, gibbs.covariance(origin, y));
    }
    rows.emplace_back("detailed_balance_violation", gibbs.detailed_balance_violation());
    rows.emplace_back("invariance_defect_max",
                      gibbs.max_invariance_defect(c.random_functionals, derive_seed(c.seed, 7)));

    ExperimentResult res;
    std::filesystem::create_directories(c.out_dir);
    std::string path = join_path(c.out_dir, c.run_id + "_oracle.csv");
    auto os = open_output(path);
    write_meta(os, c, {});
    os << "# oracle gamma=" << format_double(gamma) << " N=" << c.lattice_n << "\n";
    CsvWriter w(os, {"N", "beta", "b", "observable", "exact_value"});
    for (const auto& [name, value] : rows) {
        w.write_row({std::to_string(c.lattice_n), format_double(c.beta), format_double(c.b), name,
                     format_double(value)});
        os.flush();
        res.records.push_back({gamma, 0, 0.0, name, value});
        SummaryRow s;
        s.gamma = gamma;
        s.name = name;
        s.mean = value;
        s.count = 1;
        res.summary.push_back(s);
    }
    res.csv_paths.push_back(path);
    return res;
}

ExperimentResult run_compare_mode(const ExperimentConfig& c) {
    TestFunction phi = make_test_function(c.test_function);
    const double gamma = c.gammas.front();
    const int per_rep = (c.samples + c.replicas - 1) / c.replicas;
    std::vector<std::vector<double>> side_a(static_cast<std::size_t>(c.replicas));
    std::vector<std::vector<double>> side_b(static_cast<std::size_t>(c.replicas));
    Phi42Params params = cubic_params(c.modes, c.A, c.noise);
    if (!c.coeffs.empty()) params.coeffs = c.coeffs;
    // the lattice dynamics diffuse at the kernel's long-wavelength coefficient
    // (second moment over four), not at the unit rate; the two pipelines only
    // target the same limiting field when the spectral sampler runs at that
    // same coefficient, so match it unless one was given explicitly
    params.diffusivity = c.diffusivity > 0.0
                             ? c.diffusivity
                             : kernel_diffusivity(*make_scaling_kernel(c.profile, gamma));
    const int record_every = std::max(1, static_cast<int>(std::lround(c.cadence / c.dt)));
    const long long burn_steps = std::llround(c.t_burn / c.dt);

    parallel_for(2 * c.replicas, c.threads, [&](int task) {
        const int side = task / c.replicas;
        const int rep = task % c.replicas;
        if (side == 0) {
            auto kernel = make_scaling_kernel(c.profile, gamma);
            GlauberSimulation sim(kernel, dynamics_for(c, *kernel),
                                  derive_seed(derive_seed(c.seed, 1),
                                              static_cast<std::uint64_t>(rep)));
            sim.randomize_spins();
            sim.run_macro_time(c.t_burn);
            auto& out = side_a[static_cast<std::size_t>(rep)];
            for (int s = 1; s <= per_rep; ++s) {
                sim.run_macro_time(c.t_burn + s * c.cadence);
                out.push_back(pair_with_test_function(sim.fluctuation_field(), phi));
            }
        } else {
            Phi42Sampler sampler(params, derive_seed(derive_seed(c.seed, 2),
                                                     static_cast<std::uint64_t>(rep)));
            for (long long s = 0; s < burn_steps; ++s) sampler.step(c.dt);
            auto& out = side_b[static_cast<std::size_t>(rep)];
            for (int s = 0; s < per_rep; ++s) {
                for (int k = 0; k < record_every; ++k) sampler.step(c.dt);
                out.push_back(pair_with_test_function(sampler.x_field(), phi));
            }
        }
    });

    std::vector<double> a, b;
    for (const auto& v : side_a) a.insert(a.end(), v.begin(), v.end());
    for (const auto& v : side_b) b.insert(b.end(), v.begin(), v.end());
    a.resize(static_cast<std::size_t>(c.samples));
    b.resize(static_cast<std::size_t>(c.samples));
    DistributionComparison comp = compare_distributions(a, b);

    ExperimentResult res;
    std::filesystem::create_directories(c.out_dir);
    std::string samples_path = join_path(c.out_dir, c.run_id + "_samples.csv");
    {
        auto os = open_output(samples_path);
        write_meta(os, c, {gamma});
        os << "# pairing test_function=" << c.test_function << " modes=" << c.modes
           << " diffusivity=" << format_double(params.diffusivity) << "\n";
        CsvWriter w(os, {"source", "index", "value"});
        for (std::size_t i = 0; i < a.size(); ++i) {
            w.write_row({"glauber", std::to_string(i), format_double(a[i])});
            os.flush();
        }
        for (std::size_t i = 0; i < b.size(); ++i) {
            w.write_row({"phi42", std::to_string(i), format_double(b[i])});
            os.flush();
        }
    }
    std::string compare_path = join_path(c.out_dir, c.run_id + "_compare.csv");
    {
        auto os = open_output(compare_path);
        write_meta(os, c, {gamma});
        CsvWriter w(os, {"metric", "value", "stderr"});
        auto row = [&](const std::string& name, double v, double se) {
            w.write_row({name, format_double(v), format_double(se)});
            os.flush();
            SummaryRow s;
            s.gamma = gamma;
            s.name = name;
            s.mean = v;
            s.stderr_of_mean = se;
            s.count = static_cast<std::size_t>(c.samples);
            res.summary.push_back(s);
        };
        row("ks", comp.ks, 0.0);
        row("glauber_m1", comp.moments_a.m1, comp.moments_a.m1_se);
        row("glauber_m2", comp.moments_a.m2, comp.moments_a.m2_se);
        row("glauber_m3", comp.moments_a.m3, comp.moments_a.m3_se);
        row("glauber_m4", comp.moments_a.m4, comp.moments_a.m4_se);
        row("phi42_m1", comp.moments_b.m1, comp.moments_b.m1_se);
        row("phi42_m2", comp.moments_b.m2, comp.moments_b.m2_se);
        row("phi42_m3", comp.moments_b.m3, comp.moments_b.m3_se);
        row("phi42_m4", comp.moments_b.m4, comp.moments_b.m4_se);
    }
    for (std::size_t i = 0; i < a.size(); ++i)
        res.records.push_back({gamma, 0, static_cast<double>(i), "glauber_pairing", a[i]});
    for (std::size_t i = 0; i < b.size(); ++i)
        res.records.push_back({0.0, 0, static_cast<double>(i), "phi42_pairing", b[i]});
    res.csv_paths.push_back(samples_path);
    res.csv_paths.push_back(compare_path);
    return res;
}

ExperimentResult run_kernel_scan_mode(const ExperimentConfig& c) {
    struct Row {
        double gamma = 0.0;
        int n = 0;
        double c_gamma = 0.0;
        KernelBoundsReport bounds;
    };
    std::vector<Row> rows(c.gammas.size());
    parallel_for(static_cast<int>(c.gammas.size()), c.threads, [&](int i) {
        double gamma = c.gammas[static_cast<std::size_t>(i)];
        // periodized construction: agrees with build_kernel whenever the
        // support fits, and stays valid for coarse gammas where it does not
        int n = scaling_lattice_size(gamma);
        KacKernel kernel = wrapped_profile_kernel(profile_from_name(c.profile), gamma, n);
        rows[static_cast<std::size_t>(i)] = {gamma, kernel.n(), renorm_constant(kernel),
                                             verify_kernel_bounds(kernel)};
    });

    ExperimentResult res;
    std::filesystem::create_directories(c.out_dir);
    std::string path = join_path(c.out_dir, c.run_id + "_kernel_scan.csv");
    auto os = open_output(path);
    write_meta(os, c, c.gammas);
    CsvWriter w(os, {"gamma", "N", "eps", "gamma_sq", "c_gamma", "lower_c", "upper_C",
                     "lower_positive", "anisotropy"});
    for (const auto& r : rows) {
        double eps = 1.0 / static_cast<double>(r.n);
        w.write_row({format_double(r.gamma), std::to_string(r.n), format_double(eps),
                     format_double(r.gamma * r.gamma), format_double(r.c_gamma),
                     format_double(r.bounds.lower_c), format_double(r.bounds.upper_C),
                     r.bounds.lower_positive ? "1" : "0", format_double(r.bounds.anisotropy)});
        os.flush();
        auto push = [&](const std::string& name, double v) {
            res.records.push_back({r.gamma, 0, 0.0, name, v});
            SummaryRow s;
            s.gamma = r.gamma;
            s.name = name;
            s.mean = v;
            s.count = 1;
            res.summary.push_back(s);
        };
        push("c_gamma", r.c_gamma);
        push("lower_c", r.bounds.lower_c);
        push("upper_C", r.bounds.upper_C);
        push("anisotropy", r.bounds.anisotropy);
    }
    res.csv_paths.push_back(path);
    return res;
}

ExperimentResult run_besov_corpus_mode(const ExperimentConfig& c) {
    const double gamma = c.gammas.front();
    PaleyLittlewoodBank bank = build_block_bank(c.corpus_n);
    std::vector<TorusField> corpus = field_corpus(c.corpus_n, c.corpus_size, c.seed);
    KacKernel kernel = wrapped_profile_kernel(profile_from_name(c.profile), gamma, c.corpus_n);
    const double p_embed = std::max(c.p, 2.0 / c.nu);

    struct Entry {
        const char* name;
        std::string params;
        InequalityCheck check;
    };
    std::vector<std::array<Entry, 6>> all(corpus.size());
    parallel_for(static_cast<int>(corpus.size()), c.threads, [&](int i) {
        const TorusField& f = corpus[static_cast<std::size_t>(i)];
        const TorusField& g = corpus[(static_cast<std::size_t>(i) + 1) % corpus.size()];
        auto fmt = format_double;
        all[static_cast<std::size_t>(i)] = {
            Entry{"duality", "alpha=" + fmt(c.nu) + ";p=" + fmt(c.p) + ";q=" + fmt(c.q),
                  check_duality(f, g, c.nu, c.p, c.q, bank)},
            Entry{"lp_embedding", "nu=" + fmt(c.nu) + ";p=" + fmt(p_embed),
                  check_lp_embedding(f, c.nu, p_embed, bank)},
            Entry{"extension_log", "p=" + fmt(c.p), check_extension_lp_log(f, c.p)},
            Entry{"extension_gradient", "p=" + fmt(c.p) + ";kappa=" + fmt(c.kappa_exponent),
                  check_extension_lp_gradient(f, c.p, c.kappa_exponent)},
            Entry{"regularity", "nu=" + fmt(c.nu) + ";gamma=" + fmt(gamma),
                  check_regularity_bound(f, kernel, c.nu, bank)},
            Entry{"product", "alpha=" + fmt(c.nu) + ";beta=" + fmt(-c.nu) + ";p=" + fmt(c.p) +
                                 ";q=" + fmt(c.q),
                  check_product_estimate(f, g, c.nu, -c.nu, c.p, c.q, bank)},
        };
    });

    ExperimentResult res;
    std::filesystem::create_directories(c.out_dir);
    std::string path = join_path(c.out_dir, c.run_id + "_inequalities.csv");
    auto os = open_output(path);
    write_meta(os, c, {});
    os << "# corpus n=" << c.corpus_n << " size=" << c.corpus_size << "\n";
    CsvWriter w(os, {"inequality", "corpus_id", "params", "lhs", "rhs", "ratio"});
    std::map<std::string, double> max_ratio;
    for (std::size_t i = 0; i < all.size(); ++i) {
        for (const auto& e : all[i]) {
            w.write_row({e.name, std::to_string(i), e.params, format_double(e.check.lhs),
                         format_double(e.check.rhs), format_double(e.check.ratio)});
            os.flush();
            res.records.push_back({0.0, 0, static_cast<double>(i), e.name, e.check.ratio});
            double& m = max_ratio[e.name];
            m = std::max(m, e.check.ratio);
        }
    }
    for (const auto& [name, m] : max_ratio) {
        SummaryRow s;
        s.name = "max_ratio_" + name;
        s.mean = m;
        s.count = all.size();
        res.summary.push_back(s);
    }
    res.csv_paths.push_back(path);
    return res;
}

ExperimentResult run_ode_check_mode(const ExperimentConfig& c) {
    Rng rng(derive_seed(c.seed, 0));
    ExperimentResult res;
    std::filesystem::create_directories(c.out_dir);
    std::string path = join_path(c.out_dir, c.run_id + "_ode_check.csv");
    auto os = open_output(path);
    write_meta(os, c, {});
    CsvWriter w(os, {"draw", "c1", "c2", "lambda", "f0", "ok", "max_violation", "mesh_points"});
    int violations = 0;
    double worst = 0.0;
    for (int d = 0; d < c.draws; ++d) {
        double c1 = 0.1 + 4.9 * rng.uniform_co();
        double c2 = 5.0 * rng.uniform_co();
        double lambda = 1.1 + 2.9 * rng.uniform_co();
        double f0 = 5.0 * rng.uniform_co();
        ComparisonCheck chk = ode_comparison_check(c1, c2, lambda, f0, c.horizon);
        w.write_row({std::to_string(d), format_double(c1), format_double(c2),
                     format_double(lambda), format_double(f0), chk.ok ? "1" : "0",
                     format_double(chk.max_violation), std::to_string(chk.mesh_points)});
        os.flush();
        res.records.push_back({0.0, 0, static_cast<double>(d), "max_violation",
                               chk.max_violation});
        if (!chk.ok) ++violations;
        worst = std::max(worst, chk.max_violation);
    }
    SummaryRow sv;
    sv.name = "violations";
    sv.mean = violations;
    sv.count = static_cast<std::size_t>(c.draws);
    res.summary.push_back(sv);
    SummaryRow sw;
    sw.name = "max_violation";
    sw.mean = worst;
    sw.count = static_cast<std::size_t>(c.draws);
    res.summary.push_back(sw);
    res.csv_paths.push_back(path);
    return res;
}

} // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
    validate(config);
    if (config.mode == "glauber") return run_glauber_mode(config);
    if (config.mode == "phi42") return run_phi42_mode(config);
    if (config.mode == "oracle") return run_oracle_mode(config);
    if (config.mode == "compare") return run_compare_mode(config);
    if (config.mode == "kernel-scan") return run_kernel_scan_mode(config);
    if (config.mode == "besov-corpus") return run_besov_corpus_mode(config);
    return run_ode_check_mode(config);
}

LpScalingResult lp_scaling_check(const std::vector<double>& gammas, int p,
                                 const LpScalingOptions& options) {
    if (p < 2 || p % 2 != 0)
        throw std::invalid_argument("lp_scaling_check requires even p >= 2");
    if (gammas.empty()) throw std::invalid_argument("lp_scaling_check requires >= 1 gamma");
    LpScalingResult res;
    res.p = p;
    const int n_samples =
        static_cast<int>(std::floor(options.t_sample / options.cadence + 1e-9));
    for (std::size_t gi = 0; gi < gammas.size(); ++gi) {
        const double gamma = gammas[gi];
        int n = scaling_lattice_size(gamma);
        auto kernel = std::make_shared<const KacKernel>(
            wrapped_profile_kernel(profile_from_name(options.profile), gamma, n));
        DynamicsParams params = critical_scaling(*kernel, options.A);
        double mean_sum = 0.0, var_sum = 0.0;
        std::size_t count = 0;
        for (int rep = 0; rep < options.replicas; ++rep) {
            GlauberSimulation sim(kernel, params,
                                  derive_seed(derive_seed(options.seed, gi),
                                              static_cast<std::uint64_t>(rep)));
            sim.randomize_spins();
            sim.run_macro_time(options.t_burn);
            std::vector<double> series;
            series.reserve(static_cast<std::size_t>(n_samples));
            for (int k = 1; k <= n_samples; ++k) {
                sim.run_macro_time(options.t_burn + k * options.cadence);
                series.push_back(lp_norm_pow(sim.fluctuation_field(), static_cast<double>(p)));
            }
            BatchMeans bm = batch_means(series);
            mean_sum += bm.mean;
            var_sum += bm.stderr_of_mean * bm.stderr_of_mean;
            count += series.size();
        }
        double reps = static_cast<double>(options.replicas);
        double scale = std::pow(gamma, p / 2.0);
        LpScalingRow row;
        row.gamma = gamma;
        row.n = n;
        row.scaled_mean = scale * mean_sum / reps;
        row.scaled_stderr = scale * std::sqrt(var_sum) / reps;
        row.count = count;
        res.rows.push_back(row);
    }
    double lo = std::numeric_limits<double>::infinity();
    double hi = 0.0;
    for (const auto& r : res.rows) {
        lo = std::min(lo, r.scaled_mean);
        hi = std::max(hi, r.scaled_mean);
    }
    res.max_over_min = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
    res.bounded = res.max_over_min <= 4.0;
    return res;
}

SpinPairing pair_spin_field(const GlauberSimulation& sim, const TestFunction& phi) {
    const auto& spins = sim.spins();
    const double inv_delta = 1.0 / sim.params().delta;
    TorusField raw(sim.n());
    auto& v = raw.mutable_values();
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = inv_delta * spins[i];
    SpinPairing out;
    out.raw = pair_with_test_function(raw, phi);
    out.smoothed = pair_with_test_function(sim.fluctuation_field(), phi);
    out.difference = out.raw - out.smoothed;
    return out;
}

DistributionComparison compare_distributions(const std::vector<double>& a,
                                             const std::vector<double>& b) {
    if (a.size() < 100 || b.size() < 100)
        throw std::invalid_argument("compare_distributions needs >= 100 samples per side");
    DistributionComparison out;
    out.count_a = a.size();
    out.count_b = b.size();
    out.ks = ks_statistic(a, b);
    out.moments_a = moment_summary(a);
    out.moments_b = moment_summary(b);
    return out;
}

WickNormTrace wick_norm_grid(GlauberSimulation& sim, int j, double lambda, double nu, double s_min,
                             double s_max, int n_grid, double window) {
    if (n_grid < 1) throw std::invalid_argument("wick_norm_grid needs >= 1 grid point");
    if (!(window > 0.0)) throw std::invalid_argument("wick_norm_grid needs window > 0");
    if (!(s_min >= 0.0) || !(s_max >= s_min))
        throw std::invalid_argument("wick_norm_grid needs 0 <= s_min <= s_max");
    LinearizedCosimulation cosim(sim, window);
    PaleyLittlewoodBank bank = build_block_bank(sim.n());
    BesovSpec spec;
    spec.nu = -nu;
    spec.p = std::numeric_limits<double>::infinity();
    spec.q = std::numeric_limits<double>::infinity();
    spec.mode = BesovSpec::Mode::discrete;
    WickNormTrace trace;
    for (int k = 0; k < n_grid; ++k) {
        double s = n_grid == 1 ? s_max
                               : s_min + (s_max - s_min) * static_cast<double>(k) /
                                             static_cast<double>(n_grid - 1);
        cosim.advance_to(s);
        double s_actual = cosim.z_time_macro();
        TorusField h = wick_observable(cosim.z_field(), j, sim.params().c_gamma);
        double norm = besov_norm(h, spec, bank);
        trace.times.push_back(s_actual);
        trace.norms.push_back(norm);
        trace.grid_sup = std::max(trace.grid_sup, std::pow(s_actual, lambda) * norm);
    }
    return trace;
}

} // namespace kacphi
