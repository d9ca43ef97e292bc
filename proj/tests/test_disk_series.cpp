#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "condscat/disk_series.hpp"
#include "condscat/special.hpp"

using namespace condscat;

namespace {

// single disk with conductive boundary, mode by mode in the test; jump d_r u_in - d_r u_out = lambda u
FarFieldPattern one_disk(double R, cplx q, cplx lambda, double k, double theta_d, const std::vector<double>& angles) {
    const cplx kap = region_wavenumber(k, q);
    const int M = int(k * std::abs(std::sqrt(q)) * R) + 30;
    std::vector<cplx> c(size_t(2 * M + 1));
    for (int n = -M; n <= M; ++n) {
        const cplx jk = std::cyl_bessel_j(double(std::abs(n)), k * R) * (n < 0 && n % 2 ? -1.0 : 1.0);
        const cplx jkp = special::besselj_prime(n, k * R);
        const cplx hk = special::hankel1(n, k * R), hkp = special::hankel1_prime(n, k * R);
        const cplx ji = special::besselj(n, kap * R), jip = special::besselj_prime(n, kap * R);
        // a ji = jk + c hk ;  kap a jip - k (jkp + c hkp) = lambda a ji
        const cplx a11 = ji, a12 = -hk, a21 = kap * jip - lambda * ji, a22 = -k * hkp;
        const cplx det = a11 * a22 - a12 * a21;
        c[size_t(n + M)] = (a11 * (k * jkp) - a21 * jk) / det;
    }
    FarFieldPattern p{angles, {}};
    const cplx pre = std::sqrt(2.0 / (pi * k)) * std::exp(-I * (pi / 4));
    for (double t : angles) {
        cplx s = 0.0;
        for (int n = -M; n <= M; ++n) s += c[size_t(n + M)] * std::exp(I * (double(n) * (t - theta_d)));
        p.values.push_back(pre * s);
    }
    return p;
}

}  // namespace

TEST_CASE("general recurrence reduces to the textbook disk") {
    const auto angles = uniform_directions(64);
    for (cplx q : {cplx(2.0), cplx(0.5), cplx(3.0, 0.4)}) {
        for (double k : {0.5, 1.0, 4.0}) {
            const IncidentField inc = IncidentField::plane_wave(polar_point(1.0, 0.7));
            const auto a = disk_series_oracle({1.0}, {q}, {0.0}, k, inc, 0, angles);
            const auto b = disk_series_textbook(1.0, q, k, inc, 0, angles);
            CAPTURE(q);
            CAPTURE(k);
            CHECK(farfield_diff(a, b) < 1e-12);
        }
    }
}

TEST_CASE("conductive single disk matches an independent mode solve") {
    const auto angles = uniform_directions(48);
    for (cplx lambda : {cplx(0.0, 0.5), cplx(0.7, 0.0), cplx(0.3, -0.2)}) {
        const IncidentField inc = IncidentField::plane_wave(polar_point(1.0, 1.1));
        const auto a = disk_series_oracle({0.8}, {2.5}, {lambda}, 1.5, inc, 0, angles);
        CAPTURE(lambda);
        CHECK(farfield_diff(a, one_disk(0.8, 2.5, lambda, 1.5, 1.1, angles)) < 1e-11);
    }
}

TEST_CASE("invisible inner layer") {
    const auto angles = uniform_directions(32);
    const IncidentField inc = IncidentField::plane_wave({1.0, 0.0});
    const auto two = disk_series_oracle({1.0, 0.4}, {2.0, 2.0}, {cplx(0, 0.5), 0.0}, 1.0, inc, 0, angles);
    const auto one = disk_series_oracle({1.0}, {2.0}, {cplx(0, 0.5)}, 1.0, inc, 0, angles);
    CHECK(farfield_diff(two, one) < 1e-12);
}

TEST_CASE("no contrast, no far field") {
    const auto p = disk_series_oracle({1.0, 0.5}, {1.0, 1.0}, {0.0, 0.0}, 1.0, IncidentField::plane_wave({0, 1}), 0,
                                      uniform_directions(32));
    for (const cplx& v : p.values) CHECK(std::abs(v) < 1e-14);
}

TEST_CASE("series truncation") {
    const auto angles = uniform_directions(64);
    const IncidentField inc = IncidentField::plane_wave({1.0, 0.0});
    const std::vector<double> radii{1.0, 0.5};
    const std::vector<cplx> q{2.0, 3.0}, lam{cplx(0, 0.5), 0.0};
    for (int m : {24, 40}) {
        const auto a = disk_series_oracle(radii, q, lam, 1.0, inc, m, angles);
        const auto b = disk_series_oracle(radii, q, lam, 1.0, inc, m + 10, angles);
        CHECK(farfield_diff(b, a) < 1e-12);
    }
}

TEST_CASE("input checks") {
    const auto angles = uniform_directions(8);
    const IncidentField inc = IncidentField::plane_wave({1.0, 0.0});
    CHECK_THROWS_AS(disk_series_oracle({0.5, 1.0}, {2.0, 3.0}, {0.0, 0.0}, 1.0, inc, 0, angles), InputError);
    CHECK_THROWS_AS(disk_series_oracle({1.0}, {2.0, 3.0}, {0.0}, 1.0, inc, 0, angles), InputError);
    CHECK_THROWS_AS(disk_series_oracle({1.0}, {2.0}, {0.0}, 1.0, IncidentField::point_source({3, 0}), 0, angles),
                    InputError);
    const auto poly = regular_polygon(6, 2.0, {1.0, 0.0});
    REQUIRE(poly.size() == 6);
    CHECK(std::abs(poly[0].x - 3.0) < 1e-15);
    for (const Vec2& v : poly) CHECK(norm(v - Vec2{1.0, 0.0}) == doctest::Approx(2.0));
}
