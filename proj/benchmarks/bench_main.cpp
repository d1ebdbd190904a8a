#include "kacphi/besov.hpp"
#include "kacphi/fourier.hpp"
#include "kacphi/glauber.hpp"
#include "kacphi/kernel.hpp"

#include <benchmark/benchmark.h>

#include <memory>

namespace {

using namespace kacphi;

TorusField random_field(int n, std::uint64_t seed) {
    Rng rng(seed);
    TorusField f(n);
    for (double& v : f.mutable_values()) v = rng.normal();
    return f;
}

void bm_forward_transform(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TorusField f = random_field(n, 17);
    for (auto _ : state) {
        Spectrum hat = forward_transform(n, f.values());
        benchmark::DoNotOptimize(hat.data());
    }
    state.SetItemsProcessed(state.iterations() * f.size());
}
BENCHMARK(bm_forward_transform)->Arg(16)->Arg(64)->Arg(128);

void bm_convolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TorusField f = random_field(n, 17);
    TorusField g = random_field(n, 18);
    for (auto _ : state) {
        TorusField h = convolve(f, g);
        benchmark::DoNotOptimize(h.values().data());
    }
    state.SetItemsProcessed(state.iterations() * f.size());
}
BENCHMARK(bm_convolve)->Arg(16)->Arg(64)->Arg(128);

void bm_glauber_events(benchmark::State& state) {
    const double gamma = 1.0 / static_cast<double>(state.range(0));
    const int n = scaling_lattice_size(gamma);
    auto kernel = std::make_shared<const KacKernel>(build_kernel(ProfileId::bump, gamma, n));
    GlauberSimulation sim(kernel, critical_scaling(*kernel, 0.0), 23);
    sim.randomize_spins();
    for (auto _ : state) {
        sim.run_events(1000);
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(bm_glauber_events)->Arg(4)->Arg(8);

void bm_besov_norm(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    TorusField f = random_field(n, 29);
    PaleyLittlewoodBank bank = build_block_bank(n);
    BesovSpec spec;
    spec.nu = -0.1;
    spec.p = 2.0;
    spec.q = 2.0;
    for (auto _ : state) {
        double v = besov_norm(f, spec, bank);
        benchmark::DoNotOptimize(v);
    }
}
BENCHMARK(bm_besov_norm)->Arg(16)->Arg(64);

} // namespace

BENCHMARK_MAIN();
