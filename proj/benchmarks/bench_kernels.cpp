#include <map>
#include <memory>
#include <random>

#include <benchmark/benchmark.h>

#include "semflow/gather_scatter.hpp"
#include "semflow/operators.hpp"
#include "semflow/precond.hpp"
#include "semflow/space.hpp"

namespace {

using namespace semflow;

// Shared 4^3 box for each order, built once.
struct Fixture {
  std::shared_ptr<Mesh> mesh;
  std::unique_ptr<FunctionSpace> space;
  std::unique_ptr<GatherScatter> gs;
  std::vector<double> u;
  std::vector<double> w;
  std::vector<double> mask;

  explicit Fixture(int order) {
    mesh = std::make_shared<Mesh>(gen_box_mesh({Interval{0, 1}, Interval{0, 1}, Interval{0, 1}}, {4, 4, 4},
                                               {"w", "w", "w", "w", "w", "w"}));
    space = std::make_unique<FunctionSpace>(mesh, order);
    gs = std::make_unique<GatherScatter>(*space);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    u.resize(space->num_local());
    for (auto& x : u) x = d(rng);
    w.assign(u.size(), 0.0);
    mask.assign(u.size(), 1.0);
    for (const auto& f : space->facets())
      for (auto p : f.points) mask[static_cast<std::size_t>(p)] = 0.0;
    gs->avg(mask);
    for (auto& m : mask) m = m < 1.0 ? 0.0 : 1.0;
  }

  static Fixture& get(int order) {
    static std::map<int, std::unique_ptr<Fixture>> cache;
    auto& f = cache[order];
    if (!f) f = std::make_unique<Fixture>(order);
    return *f;
  }
};

void points_processed(benchmark::State& state, const Fixture& f) {
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.space->num_local()));
}

void BM_AxLaplace(benchmark::State& state) {
  auto& f = Fixture::get(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    ax_laplace(*f.space, f.u, f.w);
    benchmark::DoNotOptimize(f.w.data());
  }
  points_processed(state, f);
}
BENCHMARK(BM_AxLaplace)->Arg(5)->Arg(7)->Arg(9);

void BM_GatherScatter(benchmark::State& state) {
  auto& f = Fixture::get(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    gs_add(*f.gs, f.w);
    benchmark::DoNotOptimize(f.w.data());
  }
  points_processed(state, f);
}
BENCHMARK(BM_GatherScatter)->Arg(5)->Arg(7)->Arg(9);

void BM_Advect(benchmark::State& state) {
  auto& f = Fixture::get(static_cast<int>(state.range(0)));
  const bool dealiased = state.range(1) != 0;
  const VecField v{f.u, f.u, f.u};
  const Dealias dl(*f.space);
  for (auto _ : state) {
    advect(*f.space, v, f.u, f.w, dealiased ? &dl : nullptr);
    benchmark::DoNotOptimize(f.w.data());
  }
  points_processed(state, f);
}
BENCHMARK(BM_Advect)->Args({5, 0})->Args({5, 1})->Args({7, 0})->Args({7, 1});

void BM_Schwarz(benchmark::State& state) {
  auto& f = Fixture::get(static_cast<int>(state.range(0)));
  const HybridSchwarz hs(*f.space, *f.gs, f.mask);
  for (auto _ : state) {
    hs.apply(f.u, f.w);
    benchmark::DoNotOptimize(f.w.data());
  }
  points_processed(state, f);
}
BENCHMARK(BM_Schwarz)->Arg(5)->Arg(7);

}  // namespace

BENCHMARK_MAIN();
