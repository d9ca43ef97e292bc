#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <numeric>
#include <omp.h>

#include "condscat/corner_probe.hpp"
#include "condscat/forward.hpp"

using namespace condscat;

namespace {

Polygon square(double a) { return Polygon({{-a, -a}, {a, -a}, {a, a}, {-a, a}}); }

Medium nested() {
    return make_nest_medium(NestPartition{{square(1.0), square(0.5)}}, {2.0, cplx(3.0, 0.2)},
                            {cplx(0.0, 0.5), cplx(0.2, 0.1)}, 1.0);
}

double max_rel(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    return (a - b).cwiseAbs().maxCoeff() / std::max(b.cwiseAbs().maxCoeff(), 1e-300);
}

double max_rel(const std::vector<cplx>& a, const std::vector<cplx>& b) {
    double num = 0, den = 0;
    for (size_t i = 0; i < a.size(); ++i) {
        num = std::max(num, std::abs(a[i] - b[i]));
        den = std::max(den, std::abs(b[i]));
    }
    return num / std::max(den, 1e-300);
}

}  // namespace

TEST_CASE("assembly rows") {
    omp_set_num_threads(4);
    const BoundaryMesh mesh = build_mesh(nested(), MeshSpec{16, 6});
    std::vector<int> rows(mesh.node_count());
    std::iota(rows.begin(), rows.end(), 0);
    const RowBlock s = assemble_rows(mesh, rows, Exec::serial);
    const RowBlock p = assemble_rows(mesh, rows, Exec::parallel);
    CHECK(max_rel(p.A, s.A) == 0.0);
    CHECK(max_rel(p.G1, s.G1) == 0.0);
    CHECK(max_rel(p.G2, s.G2) == 0.0);

    const std::vector<int> some{0, 5, int(mesh.node_count()) - 1};
    const RowBlock part = assemble_rows(mesh, some, Exec::parallel);
    for (int i = 0; i < 3; ++i) CHECK((part.A.row(i) - s.A.row(some[i])).norm() == 0.0);
}

TEST_CASE("solve and far field") {
    omp_set_num_threads(4);
    const BoundaryMesh mesh = build_mesh(nested(), MeshSpec{16, 6});
    const IncidentField inc = IncidentField::plane_wave({0.6, 0.8});
    SolveOptions so;
    so.exec = Exec::serial;
    const SolveResult rs = solve_scatter(mesh, inc, so);
    so.exec = Exec::parallel;
    const SolveResult rp = solve_scatter(mesh, inc, so);
    CHECK(max_rel(rp.phi, rs.phi) < 1e-14);
    CHECK(max_rel(rp.y, rs.y) < 1e-14);

    const auto dirs = uniform_directions(96);
    const FarFieldPattern fs = far_field(mesh, inc, rs, dirs, Exec::serial);
    const FarFieldPattern fp = far_field(mesh, inc, rs, dirs, Exec::parallel);
    CHECK(max_rel(fp.values, fs.values) == 0.0);
}

TEST_CASE("sector quadrature") {
    omp_set_num_threads(4);
    const CornerSector sec = corner_sector(square(1.0), 2, 0.4);
    auto f = [](Vec2 x) { return std::exp(cplx(0.3 * x.x, -0.7 * x.y)) * (1.0 + std::hypot(x.x - 1.0, x.y - 1.0)); };
    for (double s : {2.0, 20.0}) {
        const cplx a = probe::area_integral(f, sec, s, {1e-12, Exec::serial});
        const cplx b = probe::area_integral(f, sec, s, {1e-12, Exec::parallel});
        CHECK(std::abs(a - b) <= 1e-13 * std::abs(a));
    }
}

TEST_CASE("tabulated sampler") {
    const CornerSector sec = corner_sector(square(1.0), 0, 0.3);
    probe::FieldSampler f;
    f.eval = [](Vec2 x) {
        const cplx e = std::exp(cplx(0.0, 1.1 * x.x - 0.4 * x.y));
        return FieldSample{e, {cplx(0.0, 1.1) * e, cplx(0.0, -0.4) * e}};
    };
    omp_set_num_threads(1);
    const probe::FieldSampler t1 = probe::tabulated(f, sec);
    omp_set_num_threads(4);
    const probe::FieldSampler t4 = probe::tabulated(f, sec);
    for (double r : {0.01, 0.1, 0.29})
        for (double th : {0.1, 0.7, 1.4}) {
            const Vec2 x = sec.to_world(polar_point(r, sec.theta_m + th / 1.5 * sec.opening()));
            const FieldSample a = t1(x), b = t4(x);
            CHECK(a.value == b.value);
            CHECK(a.grad[0] == b.grad[0]);
            CHECK(std::abs(a.value - f.value(x)) < 1e-10);
        }
}
