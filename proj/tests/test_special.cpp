#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "condscat/special.hpp"

using namespace condscat;
using boost::math::quadrature::gauss_kronrod;

namespace {

// J_n(z) = (1/pi) int_0^pi cos(n t - z sin t) dt, any complex z
cplx j_integral(int n, cplx z) {
    auto f = [&](double t) { return std::cos(double(n) * t - z * std::sin(t)); };
    return gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 15, 1e-14) / pi;
}

// Y_n(z) for Re z > 0
cplx y_integral(int n, cplx z) {
    auto f = [&](double t) { return std::sin(z * std::sin(t) - double(n) * t); };
    auto g = [&](double t) {
        return (std::exp(n * t) + (n % 2 ? -1.0 : 1.0) * std::exp(-n * t)) * std::exp(-z * std::sinh(t));
    };
    const cplx a = gauss_kronrod<double, 61>::integrate(f, 0.0, pi, 15, 1e-14);
    const cplx b = gauss_kronrod<double, 61>::integrate(g, 0.0, 12.0, 15, 1e-14);
    return (a - b) / pi;
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace

TEST_CASE("real arguments agree with the standard library") {
    for (int n : {0, 1, 2, 5}) {
        for (double x : {0.1, 1.0, 7.5, 20.0, 60.0}) {
            CHECK(rel(special::besselj(n, x), std::cyl_bessel_j(double(n), x)) < 1e-13);
            CHECK(rel(special::bessely(n, x), std::cyl_neumann(double(n), x)) < 1e-13);
        }
    }
}

TEST_CASE("complex arguments match integral representations") {
    const cplx zs[] = {{0.3, 0.2}, {1.5, 0.4}, {4.0, 1.0}, {9.0, 0.5}, {13.5, 2.0}, {15.0, 0.3}, {30.0, 1.5}};
    for (int n : {0, 1, 2, 4}) {
        for (cplx z : zs) {
            CAPTURE(n);
            CAPTURE(z);
            CHECK(rel(special::besselj(n, z), j_integral(n, z)) < 1e-10);
            CHECK(rel(special::bessely(n, z), y_integral(n, z)) < 1e-10);
        }
    }
}

TEST_CASE("Wronskian and Hankel identities") {
    for (cplx z : {cplx(0.7, 0.1), cplx(3.0, 2.0), cplx(13.9, 0.0), cplx(14.1, 0.2), cplx(25.0, 3.0)}) {
        for (int n : {0, 1, 3}) {
            const cplx j = special::besselj(n, z), y = special::bessely(n, z);
            const cplx jp = special::besselj_prime(n, z);
            const cplx yp = 0.5 * (special::bessely(n - 1, z) - special::bessely(n + 1, z));
            CHECK(std::abs((j * yp - jp * y) * pi * z / 2.0 - 1.0) < 1e-11);
            CHECK(rel(special::hankel1(n, z), j + I * y) < 1e-13);
            const cplx hp = special::hankel1_prime(n, z);
            CHECK(rel(hp, jp + I * yp) < 1e-11);
        }
        const auto k = special::kernel01(z);
        CHECK(rel(k.h0, special::hankel1(0, z)) < 1e-13);
        CHECK(rel(k.h1, special::hankel1(1, z)) < 1e-13);
        CHECK(rel(k.j0, special::besselj(0, z)) < 1e-13);
    }
}

TEST_CASE("negative orders follow the reflection rule") {
    const cplx z{2.0, 0.5};
    CHECK(rel(special::besselj(-3, z), -special::besselj(3, z)) < 1e-13);
    CHECK(rel(special::bessely(-2, z), special::bessely(2, z)) < 1e-13);
}
