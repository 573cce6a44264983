#include <random>

#include <benchmark/benchmark.h>

#include "chpca/eigenmodes.hpp"
#include "chpca/hilbert.hpp"
#include "chpca/hodge.hpp"
#include "chpca/significance.hpp"
#include "chpca/synth.hpp"

namespace {

chpca::PanelSeries panel(std::size_t products, std::size_t length) {
    chpca::LeadLagOptions o;
    o.cycles = chpca::cycle_band(1, 24);
    o.per_product = true;
    o.market_loading = 0.4;
    o.noise_sd = 0.3;
    o.seed = 1;
    o.length = length;
    const auto spec = chpca::lead_lag_spec(
        products, {{chpca::Variable::P, 0.0}, {chpca::Variable::Q, 2.0}, {chpca::Variable::TVAd, 4.0}}, o);
    return chpca::standardize(chpca::generate(spec).panel);
}

void BM_Complexify(benchmark::State& state) {
    const auto p = panel(static_cast<std::size_t>(state.range(0)), 365);
    for (auto _ : state) benchmark::DoNotOptimize(chpca::complexify(p));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(p.size()));
}
BENCHMARK(BM_Complexify)->Arg(6)->Arg(22)->Unit(benchmark::kMicrosecond);

void BM_CorrelationAndEigen(benchmark::State& state) {
    const auto z = chpca::complexify(panel(static_cast<std::size_t>(state.range(0)), 365));
    for (auto _ : state) {
        const auto c = chpca::correlation(z);
        benchmark::DoNotOptimize(chpca::eigendecompose(c, z));
    }
}
BENCHMARK(BM_CorrelationAndEigen)->Arg(6)->Arg(22)->Unit(benchmark::kMicrosecond);

void BM_RotatedSpectrum(benchmark::State& state) {
    const auto z = chpca::complexify(panel(static_cast<std::size_t>(state.range(0)), 365));
    const Eigen::MatrixXd rows = z.unnormalized.real();
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<std::size_t> offset(0, 364);
    std::vector<std::size_t> offsets(static_cast<std::size_t>(rows.rows()));
    for (auto _ : state) {
        for (auto& o : offsets) o = offset(rng);
        benchmark::DoNotOptimize(chpca::rotated_spectrum(rows, offsets));
    }
}
BENCHMARK(BM_RotatedSpectrum)->Arg(6)->Arg(22)->Unit(benchmark::kMicrosecond);

void BM_Rrs(benchmark::State& state) {
    const auto z = chpca::complexify(panel(6, 365));
    chpca::RrsOptions o;
    o.n_sims = static_cast<std::size_t>(state.range(0));
    o.seed = 1;
    for (auto _ : state) benchmark::DoNotOptimize(chpca::rrs_test(z, o));
}
BENCHMARK(BM_Rrs)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_ThresholdAndHodge(benchmark::State& state) {
    const auto z = chpca::complexify(panel(static_cast<std::size_t>(state.range(0)), 365));
    const auto p = chpca::polar(chpca::correlation(z));
    for (auto _ : state) {
        const auto net = chpca::build_network(p, chpca::select_threshold(p), z.labels);
        benchmark::DoNotOptimize(chpca::hodge_decompose(net));
    }
}
BENCHMARK(BM_ThresholdAndHodge)->Arg(6)->Arg(22)->Unit(benchmark::kMicrosecond);

} // namespace

BENCHMARK_MAIN();
