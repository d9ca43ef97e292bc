#include <benchmark/benchmark.h>

#include <map>
#include <numeric>

#include "condscat/corner_probe.hpp"
#include "condscat/forward.hpp"

using namespace condscat;

namespace {

Polygon square(double a) { return Polygon({{-a, -a}, {a, -a}, {a, a}, {-a, a}}); }

const BoundaryMesh& mesh_for(int n) {
    static std::map<int, BoundaryMesh> cache;
    auto it = cache.find(n);
    if (it == cache.end()) {
        const Medium m = make_nest_medium(NestPartition{{square(1.0), square(0.5)}}, {2.0, 3.0},
                                          {cplx(0.0, 0.5), 0.0}, 1.0);
        it = cache.emplace(n, build_mesh(m, MeshSpec{n, 6})).first;
    }
    return it->second;
}

void assembly(benchmark::State& state, Exec exec) {
    const BoundaryMesh& mesh = mesh_for(int(state.range(0)));
    std::vector<int> rows(mesh.node_count());
    std::iota(rows.begin(), rows.end(), 0);
    for (auto _ : state) benchmark::DoNotOptimize(assemble_rows(mesh, rows, exec));
    state.counters["nodes"] = double(mesh.node_count());
}

void farfield(benchmark::State& state, Exec exec) {
    const BoundaryMesh& mesh = mesh_for(int(state.range(0)));
    const IncidentField inc = IncidentField::plane_wave({0.6, 0.8});
    const SolveResult sr = solve_scatter(mesh, inc);
    const auto dirs = uniform_directions(256);
    for (auto _ : state) benchmark::DoNotOptimize(far_field(mesh, inc, sr, dirs, exec));
}

void sector_quadrature(benchmark::State& state, Exec exec) {
    const CornerSector sec = corner_sector(square(1.0), 0, 0.4);
    auto f = [](Vec2 x) { return std::exp(cplx(0.3 * x.x, -0.7 * x.y)); };
    const double s = double(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(probe::area_integral(f, sec, s, {1e-12, exec}));
}

}  // namespace

BENCHMARK_CAPTURE(assembly, serial, Exec::serial)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(assembly, parallel, Exec::parallel)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(farfield, serial, Exec::serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(farfield, parallel, Exec::parallel)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sector_quadrature, serial, Exec::serial)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(sector_quadrature, parallel, Exec::parallel)->Arg(10)->Arg(1000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
