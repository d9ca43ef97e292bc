#include "condscat/cgo.hpp"

#include <cmath>

#include "condscat/quadrature.hpp"

namespace condscat::cgo {
namespace {

// tail of the radial integral: int_T^inf t^3 e^{-c t} dt
double gamma4_tail(double c, double T) {
    return std::exp(-c * T) * (T * T * T / c + 3 * T * T / (c * c) + 6 * T / (c * c * c) + 6 / (c * c * c * c));
}

// truncation point in t = sqrt(s r) beyond which e^{-c t} t^3 is negligible
double t_cutoff(double c, double from) { return from + (60.0 + 4.0 * std::log1p(from)) / c; }

}  // namespace

SectorSpec::SectorSpec(double theta_m, double theta_M) : tm_(theta_m), tM_(theta_M) {
    if (!(theta_m > -pi && theta_M < pi && theta_m < theta_M))
        throw InputError("sector angles must satisfy -pi < theta_m < theta_M < pi");
    if (std::abs(theta_M - theta_m - pi) < 1e-12) throw InputError("sector opening must differ from pi");
}

double SectorSpec::delta() const { return std::min(std::cos(0.5 * tm_), std::cos(0.5 * tM_)); }

cplx mu(double theta) { return std::exp(0.5 * I * theta); }

double omega_w(double theta) { return std::cos(0.5 * theta); }

cplx u0_polar(double r, double theta, double s) { return std::exp(-std::sqrt(s * r) * mu(theta)); }

cplx u0_eval(Vec2 x, double s) {
    const double r = norm(x);
    if (r == 0.0) throw InputError("u0 evaluated at the origin");
    const double t = std::atan2(x.y, x.x);
    if (pi - std::abs(t) < 1e-14) throw InputError("u0 evaluated on the branch cut");
    return u0_polar(r, t, s);
}

std::array<cplx, 2> u0_grad(Vec2 x, double s) {
    const double r = norm(x);
    const double t = std::atan2(x.y, x.x);
    const cplx m = mu(t);
    const cplx u = u0_polar(r, t, s);
    // d/dr and (1/r) d/dtheta of exp(-sqrt(s r) mu)
    const cplx dr = -std::sqrt(s) / (2.0 * std::sqrt(r)) * m * u;
    const cplx dt = -std::sqrt(s) / (2.0 * std::sqrt(r)) * I * m * u;
    const double c = std::cos(t), sn = std::sin(t);
    return {dr * c - dt * sn, dr * sn + dt * c};
}

cplx sector_integral_exact(const SectorSpec& sec, double s) {
    return 6.0 * I * (std::exp(-2.0 * I * sec.theta_M()) - std::exp(-2.0 * I * sec.theta_m())) / (s * s);
}

double weighted_bound(const SectorSpec& sec, double alpha, double s) {
    const double d = sec.delta();
    return 2.0 * sec.opening() * std::tgamma(2 * alpha + 4) / std::pow(d, 2 * alpha + 4) * std::pow(s, -alpha - 2);
}

double tail_bound(const SectorSpec& sec, double s, double h) {
    const double d = sec.delta();
    return 6.0 * sec.opening() / std::pow(d, 4) / (s * s) * std::exp(-0.5 * d * std::sqrt(h * s));
}

double tail_majorant(const SectorSpec& sec, double s, double h) {
    return 2.0 * sec.opening() / (s * s) * gamma4_tail(sec.delta(), std::sqrt(s * h));
}

double truncation_radius(const SectorSpec& sec, double s, double tol) {
    double hi = 1.0 / s;
    while (tail_majorant(sec, s, hi) > tol) hi *= 2.0;
    double lo = 0.0;
    for (int i = 0; i < 80; ++i) {
        const double mid = 0.5 * (lo + hi);
        (tail_majorant(sec, s, mid) > tol ? lo : hi) = mid;
    }
    return hi;
}

cplx edge_integral_exact(double theta, double s, double h) {
    const cplx m = mu(theta);
    const double T = std::sqrt(s * h);
    const cplx e = std::exp(-T * m);
    return 2.0 / s * (1.0 / (m * m) - e / (m * m) - T * e / m);
}

QuadResult sector_integral_quad(const SectorSpec& sec, double s, double rmax, double tol) {
    QuadResult q;
    q.rmax = rmax > 0 ? rmax : truncation_radius(sec, s, tol / 10);
    q.truncation = tail_majorant(sec, s, q.rmax);
    const double T = std::sqrt(s * q.rmax);
    double err_inner = 0.0;
    auto radial = [&](double th) {
        const cplx m = mu(th);
        const auto r = quad::adaptive([&](double t) { return std::exp(-t * m) * (2.0 * t * t * t / (s * s)); }, 0.0,
                                      T, 1e-14, 10);
        err_inner = std::max(err_inner, r.error);
        return r.value;
    };
    const auto outer = quad::adaptive(radial, sec.theta_m(), sec.theta_M(), 1e-13, 10);
    q.value = outer.value;
    q.error = outer.error + err_inner * sec.opening() + q.truncation;
    q.converged = q.error <= tol;
    return q;
}

double weighted_abs_integral(const SectorSpec& sec, double alpha, double s, double tol) {
    // int |u0(sx)| |x|^alpha dx, r = t^2/s
    auto radial = [&](double th) {
        const double c = omega_w(th);
        const double tend = t_cutoff(c, 0.0);
        return quad::adaptive_real(
            [&](double t) { return std::exp(-c * t) * std::pow(t * t / s, alpha) * 2.0 * t * t * t / (s * s); }, 0.0,
            tend, tol);
    };
    return quad::adaptive_real(radial, sec.theta_m(), sec.theta_M(), tol);
}

double tail_abs_integral(const SectorSpec& sec, double s, double h, double tol) {
    const double T = std::sqrt(s * h);
    auto radial = [&](double th) {
        const double c = omega_w(th);
        return quad::adaptive_real([&](double t) { return std::exp(-c * t) * 2.0 * t * t * t / (s * s); }, T,
                                   t_cutoff(c, T), tol);
    };
    return quad::adaptive_real(radial, sec.theta_m(), sec.theta_M(), tol);
}

cplx tail_integral(const SectorSpec& sec, double s, double h, double tol) {
    const double T = std::sqrt(s * h);
    auto radial = [&](double th) {
        const cplx m = mu(th);
        const double c = omega_w(th);
        return quad::adaptive([&](double t) { return std::exp(-t * m) * (2.0 * t * t * t / (s * s)); }, T,
                              t_cutoff(c, T), tol)
            .value;
    };
    return quad::adaptive(radial, sec.theta_m(), sec.theta_M(), tol).value;
}

cplx edge_integral_quad(double theta, double s, double h, double tol) {
    // direct in r with the substitution r = t^2 / s removing the sqrt cusp
    const cplx m = mu(theta);
    const double T = std::sqrt(s * h);
    return quad::adaptive([&](double t) { return std::exp(-t * m) * (2.0 * t / s); }, 0.0, T, tol).value;
}

}  // namespace condscat::cgo
