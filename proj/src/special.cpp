#include "condscat/special.hpp"

#include <cmath>
#include <vector>

namespace condscat::special {
namespace {

constexpr double euler_gamma = 0.57721566490153286061;
constexpr double series_radius = 14.0;

bool is_positive_real(cplx z) { return z.imag() == 0.0 && z.real() > 0.0; }

double parity(int n) { return (n % 2 == 0) ? 1.0 : -1.0; }

cplx j_series(int n, cplx z) {
    cplx term = 1.0;
    for (int k = 1; k <= n; ++k) term *= z / (2.0 * k);
    const cplx q = -z * z / 4.0;
    cplx sum = term;
    for (int m = 0; m < 300; ++m) {
        term *= q / (double(m + 1) * double(m + 1 + n));
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum) && m > 2) break;
    }
    return sum;
}

// DLMF 10.8.1 for n = 0, 1
cplx y_series(int n, cplx z) {
    const cplx half = z / 2.0;
    cplx lead = 0.0;
    if (n == 1) lead = -1.0 / (pi * half);
    const cplx q = -z * z / 4.0;
    double psi_a = -euler_gamma;          // psi(k+1)
    double psi_b = -euler_gamma + (n == 1 ? 1.0 : 0.0);  // psi(n+k+1)
    cplx term = (n == 1) ? half : cplx(1.0);
    cplx sum = term * (psi_a + psi_b);
    for (int k = 1; k < 300; ++k) {
        term *= q / (double(k) * double(k + n));
        psi_a += 1.0 / k;
        psi_b += 1.0 / (k + n);
        const cplx t = term * (psi_a + psi_b);
        sum += t;
        if (std::abs(t) < 1e-17 * std::abs(sum) && k > 2) break;
    }
    return lead + (2.0 / pi) * std::log(half) * j_series(n, z) - sum / pi;
}

// Hankel asymptotic expansions, both kinds
void hankel_asymptotic(int n, cplx z, cplx& h1, cplx& h2) {
    const double nu2 = 4.0 * double(n) * double(n);
    const cplx w = z - pi * (0.5 * n + 0.25);
    const cplx pre = std::sqrt(2.0 / (pi * z));
    cplx s1 = 1.0, s2 = 1.0;
    cplx a = 1.0;
    double last = 1e300;
    for (int k = 1; k < 60; ++k) {
        a *= (nu2 - double(2 * k - 1) * double(2 * k - 1)) / (8.0 * k) / z;
        const double mag = std::abs(a);
        if (mag > last) break;
        cplx ik = std::pow(I, k);
        s1 += ik * a;
        s2 += std::conj(ik) * a;
        last = mag;
        if (mag < 1e-17) break;
    }
    h1 = pre * std::exp(I * w) * s1;
    h2 = pre * std::exp(-I * w) * s2;
}

void base01(cplx z, cplx& j0, cplx& j1, cplx& y0, cplx& y1) {
    if (std::abs(z) < series_radius) {
        j0 = j_series(0, z);
        j1 = j_series(1, z);
        y0 = y_series(0, z);
        y1 = y_series(1, z);
    } else {
        cplx a1, a2, b1, b2;
        hankel_asymptotic(0, z, a1, a2);
        hankel_asymptotic(1, z, b1, b2);
        j0 = 0.5 * (a1 + a2);
        j1 = 0.5 * (b1 + b2);
        y0 = (a1 - a2) / (2.0 * I);
        y1 = (b1 - b2) / (2.0 * I);
    }
}

// Miller backward recurrence for J_n, normalized against J0/J1
cplx j_backward(int n, cplx z, cplx j0, cplx j1) {
    const int start = n + 40 + int(std::abs(z));
    std::vector<cplx> f(start + 2, 0.0);
    f[start] = 1e-30;
    for (int m = start; m >= 1; --m) {
        f[m - 1] = (2.0 * m / z) * f[m] - f[m + 1];
        if (std::abs(f[m - 1]) > 1e250)
            for (int i = m - 1; i <= start; ++i) f[i] *= 1e-250;
    }
    if (std::abs(j0) >= std::abs(j1)) return f[n] * (j0 / f[0]);
    return f[n] * (j1 / f[1]);
}

}  // namespace

cplx besselj(int n, cplx z) {
    if (n < 0) return parity(n) * besselj(-n, z);
    if (is_positive_real(z)) return std::cyl_bessel_j(double(n), z.real());
    if (z == 0.0) return n == 0 ? 1.0 : 0.0;
    if (std::abs(z) < series_radius) return j_series(n, z);
    cplx j0, j1, y0, y1;
    base01(z, j0, j1, y0, y1);
    if (n == 0) return j0;
    if (n == 1) return j1;
    if (double(n) < std::abs(z)) {
        cplx a = j0, b = j1;
        for (int m = 1; m < n; ++m) {
            const cplx c = (2.0 * m / z) * b - a;
            a = b;
            b = c;
        }
        return b;
    }
    return j_backward(n, z, j0, j1);
}

cplx bessely(int n, cplx z) {
    if (n < 0) return parity(n) * bessely(-n, z);
    if (is_positive_real(z)) return std::cyl_neumann(double(n), z.real());
    cplx j0, j1, y0, y1;
    base01(z, j0, j1, y0, y1);
    if (n == 0) return y0;
    cplx a = y0, b = y1;
    for (int m = 1; m < n; ++m) {
        const cplx c = (2.0 * m / z) * b - a;
        a = b;
        b = c;
    }
    return b;
}

cplx hankel1(int n, cplx z) {
    if (n < 0) return parity(n) * hankel1(-n, z);
    if (is_positive_real(z) || std::abs(z) < series_radius) return besselj(n, z) + I * bessely(n, z);
    cplx a1, a2, b1, b2;
    hankel_asymptotic(0, z, a1, a2);
    if (n == 0) return a1;
    hankel_asymptotic(1, z, b1, b2);
    cplx a = a1, b = b1;
    for (int m = 1; m < n; ++m) {
        const cplx c = (2.0 * m / z) * b - a;
        a = b;
        b = c;
    }
    return b;
}

cplx besselj_prime(int n, cplx z) { return besselj(n - 1, z) - (double(n) / z) * besselj(n, z); }

cplx hankel1_prime(int n, cplx z) { return hankel1(n - 1, z) - (double(n) / z) * hankel1(n, z); }

Kernel01 kernel01(cplx z) {
    if (is_positive_real(z)) {
        const double x = z.real();
        const double j0 = std::cyl_bessel_j(0.0, x), j1 = std::cyl_bessel_j(1.0, x);
        const double y0 = std::cyl_neumann(0.0, x), y1 = std::cyl_neumann(1.0, x);
        return {cplx(j0, y0), cplx(j1, y1), cplx(j0)};
    }
    cplx j0, j1, y0, y1;
    if (std::abs(z) < series_radius) {
        base01(z, j0, j1, y0, y1);
        return {j0 + I * y0, j1 + I * y1, j0};
    }
    cplx a1, a2, b1, b2;
    hankel_asymptotic(0, z, a1, a2);
    hankel_asymptotic(1, z, b1, b2);
    return {a1, b1, 0.5 * (a1 + a2)};
}

}  // namespace condscat::special
