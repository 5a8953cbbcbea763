#include <benchmark/benchmark.h>

#include <random>

#include "mrct/evalbatch.hpp"
#include "mrct/metrics.hpp"

namespace {

mrct::ImagePlane plane(std::size_t side, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> u(0, 255);
    std::vector<double> px(side * side);
    for (auto& p : px) p = u(rng);
    return {side, side, std::move(px)};
}

template <double (*Metric)(const mrct::ImagePlane&, const mrct::ImagePlane&)>
void run_metric(benchmark::State& state) {
    const auto side = static_cast<std::size_t>(state.range(0));
    const auto a = plane(side, 1), b = plane(side, 2);
    for (auto _ : state) benchmark::DoNotOptimize(Metric(a, b));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(side * side));
}

double psnr(const mrct::ImagePlane& a, const mrct::ImagePlane& b) { return mrct::metrics::psnr(a, b); }
double ssim(const mrct::ImagePlane& a, const mrct::ImagePlane& b) { return mrct::metrics::ssim(a, b); }
double uqi(const mrct::ImagePlane& a, const mrct::ImagePlane& b) { return mrct::metrics::uqi(a, b); }
double vif(const mrct::ImagePlane& a, const mrct::ImagePlane& b) { return mrct::metrics::vif(a, b); }

void BM_Aggregate(benchmark::State& state) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<mrct::eval::PairResult> results;
    for (int i = 0; i < state.range(0); ++i) {
        mrct::PairRecord r;
        r.model_id = "m" + std::to_string(i % 18);
        r.direction = i % 2 ? mrct::Direction::CT2MR : mrct::Direction::MR2CT;
        r.generated_path = std::to_string(i);
        results.push_back({r, {20 + 15 * u(rng), u(rng), u(rng), u(rng)}});
    }
    for (auto _ : state) benchmark::DoNotOptimize(mrct::eval::aggregate(results));
}

}  // namespace

BENCHMARK(run_metric<psnr>)->Name("psnr")->Arg(256);
BENCHMARK(run_metric<ssim>)->Name("ssim")->Arg(64)->Arg(256);
BENCHMARK(run_metric<uqi>)->Name("uqi")->Arg(64)->Arg(256);
BENCHMARK(run_metric<vif>)->Name("vif")->Arg(64)->Arg(256);
BENCHMARK(BM_Aggregate)->Arg(1000)->Arg(10000);
BENCHMARK_MAIN();
