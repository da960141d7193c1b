#include <benchmark/benchmark.h>

#include "support.hpp"
#include "sweptvol/mpu.hpp"
#include "sweptvol/query.hpp"
#include "sweptvol/slim.hpp"
#include "sweptvol/sweep.hpp"

using namespace sweptvol;
using namespace sweptvol::test;

namespace {

SweptVolumeRep const& capsule_swept()
{
    static SweptVolumeRep const rep = [] {
        auto [base, m] = capsule_example();
        return build_swept_rep(base, m, {});
    }();
    return rep;
}

void BM_MpuBuild(benchmark::State& state)
{
    auto cloud = sphere_cloud(std::size_t(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(mpu_build(cloud, MpuParams{}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MpuBuild)->Arg(2000)->Arg(10000)->Unit(benchmark::kMillisecond);

void BM_SlimBuild(benchmark::State& state)
{
    auto cloud = sphere_cloud(std::size_t(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(slim_build(cloud, SlimParams{}));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_SlimBuild)->Arg(1000)->Arg(5000)->Unit(benchmark::kMillisecond);

void BM_SweepBuild(benchmark::State& state)
{
    auto [base, m] = capsule_example();
    SweepParams p;
    p.time_samples = int(state.range(0));
    p.fast_mode = state.range(1) != 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(build_swept_rep(base, m, p));
}
BENCHMARK(BM_SweepBuild)->Args({64, 0})->Args({128, 0})->Args({128, 1})->Unit(benchmark::kMillisecond);

void BM_SweepBuildRandomBalls(benchmark::State& state)
{
    Rng rng(7);
    auto base = random_ball_rep(rng, int(state.range(0)));
    auto m = random_motion(rng, 4, 2);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_swept_rep(base, m, {}));
}
BENCHMARK(BM_SweepBuildRandomBalls)->Arg(10)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_PointMembership(benchmark::State& state)
{
    auto const& rep = capsule_swept();
    Rng rng(1);
    std::vector<Vec3> probes(4096);
    for (auto& p : probes)
        p = uniform_in(rng, rep.bound);
    std::size_t k = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(point_membership(rep, probes[k++ % probes.size()]));
}
BENCHMARK(BM_PointMembership);

void BM_Locate(benchmark::State& state)
{
    auto const& rep = capsule_swept();
    Rng rng(2);
    std::vector<Vec3> probes(4096);
    for (auto& p : probes)
        p = uniform_in(rng, rep.bound);
    std::size_t k = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(rep.locate(probes[k++ % probes.size()]));
}
BENCHMARK(BM_Locate);

void BM_RayFirstHit(benchmark::State& state)
{
    auto const& rep = capsule_swept();
    Rng rng(3);
    std::vector<Ray> rays;
    for (int k = 0; k < 256; ++k)
    {
        Vec3 o = uniform_in(rng, rep.bound.inflated(5));
        Vec3 target(uniform(rng, -1, 1), uniform(rng, 0, 16), uniform(rng, -1, 1));
        rays.emplace_back(o, (target - o).normalized());
    }
    std::size_t k = 0;
    for (auto _ : state)
        benchmark::DoNotOptimize(ray_intersect_first(rep, rays[k++ % rays.size()]));
}
BENCHMARK(BM_RayFirstHit)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
