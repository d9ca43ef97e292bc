#include "condscat/manufactured.hpp"

#include <cmath>

namespace condscat::manufactured {
namespace {

struct Polar {
    double r, t;
    Vec2 er, et;
};

Polar polar(Vec2 x, Vec2 apex) {
    const Vec2 d = x - apex;
    const double t = std::atan2(d.y, d.x);
    return {norm(d), t, {std::cos(t), std::sin(t)}, {-std::sin(t), std::cos(t)}};
}

std::array<cplx, 2> combine(Vec2 er, cplx a, Vec2 et, cplx b) {
    return {a * er.x + b * et.x, a * er.y + b * et.y};
}

// quadratic angular profile vanishing on both edges with unit outward slope
struct Profile {
    double tm, tM, span;
    double g(double t) const { return (t - tm) * (t - tM) / span; }
    double dg(double t) const { return (2 * t - tm - tM) / span; }
    double d2g() const { return 2 / span; }
};

Profile profile(double tm, double tM) {
    if (!(tm > -pi && tm < tM && tM < pi)) throw InputError("sector must satisfy -pi < theta_m < theta_M < pi");
    return {tm, tM, tM - tm};
}

cplx helmholtz_root(cplx k2) {
    cplx z = std::sqrt(k2);
    if (z.imag() < 0) z = -z;
    return z;
}

Vec2 unit(Vec2 d) {
    const double n = norm(d);
    if (!(n > 0)) throw InputError("direction must be nonzero");
    return d / n;
}

// J_mu(kappa r) cos(mu (t - tc)) / cos(mu Theta / 2), equal to J_mu on both edges
struct BesselMode {
    double mu, kappa, tc, norm_;
    FieldSample eval(const Polar& p) const {
        const double x = kappa * p.r;
        const double jm = std::cyl_bessel_j(mu, x);
        const double a = std::cos(mu * (p.t - tc)) / norm_;
        if (p.r < 1e-300) return {jm * a, {}};
        const double djm = kappa * ((mu / x) * jm - std::cyl_bessel_j(mu + 1, x));
        const double da = -mu * std::sin(mu * (p.t - tc)) / norm_;
        return {jm * a, combine(p.er, djm * a, p.et, jm * da / p.r)};
    }
};

// J_nu(kappa r) sin(nu (t - t_m)), nu = pi / Theta, and the field equal to
// -(1/c) times its outward normal derivative on both edges
struct SectorPair {
    double tm, nu, kappa;
    BesselMode lo, hi;
};

SectorPair sector_pair(double tm, double tM, double kappa) {
    const double span = tM - tm;
    if (!(span < pi)) throw InputError("closed-form pair needs an opening below pi");
    if (!(kappa > 0)) throw InputError("closed-form pair needs a real positive wavenumber");
    const double nu = pi / span, tc = 0.5 * (tm + tM);
    return {tm, nu, kappa, {nu - 1, kappa, tc, std::cos((nu - 1) * span / 2)},
            {nu + 1, kappa, tc, std::cos((nu + 1) * span / 2)}};
}

FieldSample sine_mode(const SectorPair& sp, const Polar& p) {
    const double x = sp.kappa * p.r;
    const double jn = std::cyl_bessel_j(sp.nu, x);
    const double sn = std::sin(sp.nu * (p.t - sp.tm)), cn = std::cos(sp.nu * (p.t - sp.tm));
    if (p.r < 1e-300) return {jn * sn, {}};
    const double djn = sp.kappa * ((sp.nu / x) * jn - std::cyl_bessel_j(sp.nu + 1, x));
    return {jn * sn, combine(p.er, djn * sn, p.et, sp.nu * jn * cn / p.r)};
}

FieldSample edge_partner(const SectorPair& sp, const Polar& p, cplx c) {
    const FieldSample a = sp.lo.eval(p), b = sp.hi.eval(p);
    const cplx f = -sp.kappa / (2.0 * c);
    return {f * (a.value + b.value), {f * (a.grad[0] + b.grad[0]), f * (a.grad[1] + b.grad[1])}};
}

FieldSample sum(const FieldSample& a, const FieldSample& b) {
    return {a.value + b.value, {a.grad[0] + b.grad[0], a.grad[1] + b.grad[1]}};
}

}  // namespace

CornerSector local_sector(double theta_m, double theta_M, double h, Vec2 apex) {
    profile(theta_m, theta_M);
    if (!(h > 0)) throw InputError("h must be positive");
    CornerSector s;
    s.apex = apex;
    s.theta_m = theta_m;
    s.theta_M = theta_M;
    s.h = h;
    return s;
}

probe::ProbeScenario corner_scenario(const CornerSpec& c) {
    const Profile pr = profile(c.theta_m, c.theta_M);
    const cplx kap = helmholtz_root(c.k * c.k * c.omega2);
    const Vec2 d = unit(c.direction);
    const cplx deta = c.eta1 - c.eta2, dw = c.k * c.k * (c.omega2 - c.omega1);
    const Vec2 apex = c.apex;
    const cplx amp = c.amplitude;

    auto u2f = [=](Vec2 x) {
        const cplx u = amp * std::exp(I * kap * dot(d, x - apex));
        return FieldSample{u, {I * kap * d.x * u, I * kap * d.y * u}};
    };
    struct Rho {
        cplx val, dr, dt, lap;  // dt = (1/r) d/dtheta
    };
    auto rho = [=](const Polar& p) {
        const double g = pr.g(p.t), dg = pr.dg(p.t), r = p.r;
        Rho o;
        o.val = deta * r * g + dw * r * r * g * g;
        o.dr = deta * g + 2.0 * dw * r * g * g;
        o.dt = deta * dg + 2.0 * dw * r * g * dg;
        o.lap = (r > 0 ? deta * (g + pr.d2g()) / r : cplx(0.0)) + dw * (4 * g * g + 2 * (dg * dg + g * pr.d2g()));
        return o;
    };

    probe::ProbeScenario sc;
    sc.sector = local_sector(c.theta_m, c.theta_M, c.h, apex);
    sc.k = c.k;
    sc.omega1 = c.omega1;
    sc.omega2 = c.omega2;
    sc.eta1 = c.eta1;
    sc.eta2 = c.eta2;
    sc.u2.eval = u2f;
    sc.u1.eval = [=](Vec2 x) {
        const FieldSample u = u2f(x);
        const Polar p = polar(x, apex);
        const Rho q = rho(p);
        const auto gr = combine(p.er, q.dr, p.et, q.dt);
        return FieldSample{u.value * (1.0 + q.val),
                           {u.grad[0] * (1.0 + q.val) + gr[0] * u.value, u.grad[1] * (1.0 + q.val) + gr[1] * u.value}};
    };
    sc.u1.holder_const = sc.u2.holder_const = std::abs(amp) * (1.0 + std::abs(kap));
    sc.forcing = [=](Vec2 x) {
        const Polar p = polar(x, apex);
        if (p.r == 0.0) return cplx(0.0);
        const FieldSample u = u2f(x);
        const Rho q = rho(p);
        const auto gr = combine(p.er, q.dr, p.et, q.dt);
        return q.lap * u.value + 2.0 * (gr[0] * u.grad[0] + gr[1] * u.grad[1]) - dw * (q.val + 1.0) * u.value;
    };
    return sc;
}

probe::ProbeScenario exact_corner_pair(double theta_m, double theta_M, double h, double k, double omega,
                                       cplx eta_diff) {
    if (eta_diff == 0.0) throw InputError("closed-form pair needs a nonzero jump");
    if (!(omega > 0)) throw InputError("omega must be positive");
    const SectorPair sp = sector_pair(theta_m, theta_M, k * std::sqrt(omega));
    probe::ProbeScenario sc;
    sc.sector = local_sector(theta_m, theta_M, h);
    sc.k = k;
    sc.omega1 = sc.omega2 = omega;
    sc.eta1 = eta_diff;
    sc.eta2 = 0.0;
    sc.u2.eval = [sp, eta_diff](Vec2 x) { return edge_partner(sp, polar(x, {}), eta_diff); };
    sc.u1.eval = [sp, eta_diff](Vec2 x) {
        const Polar p = polar(x, {});
        return sum(edge_partner(sp, p, eta_diff), sine_mode(sp, p));
    };
    sc.u1.holder_alpha = sc.u2.holder_alpha = std::min(sp.nu - 1, 1.0);
    return sc;
}

probe::TransmissionPair exact_transmission_pair(double theta_m, double theta_M, double h, double k, cplx lambda) {
    if (lambda == 0.0) throw InputError("closed-form pair needs a nonzero lambda");
    const SectorPair sp = sector_pair(theta_m, theta_M, k);
    probe::TransmissionPair tp;
    tp.sector = local_sector(theta_m, theta_M, h);
    tp.k = k;
    tp.q = 1.0;
    tp.lambda = lambda;
    tp.v.eval = [sp, lambda](Vec2 x) { return edge_partner(sp, polar(x, {}), lambda); };
    tp.w.eval = [sp, lambda](Vec2 x) {
        const Polar p = polar(x, {});
        return sum(edge_partner(sp, p, lambda), sine_mode(sp, p));
    };
    tp.v.holder_alpha = tp.w.holder_alpha = std::min(sp.nu - 1, 1.0);
    return tp;
}

probe::TransmissionPair plateau_transmission_pair(double theta_m, double theta_M, double h, cplx k, cplx q,
                                                  cplx lambda, cplx v0, Vec2 direction) {
    const Profile pr = profile(theta_m, theta_M);
    const Vec2 d = unit(direction);
    auto vf = [=](Vec2 x) {
        const cplx u = v0 * std::exp(I * k * dot(d, x));
        return FieldSample{u, {I * k * d.x * u, I * k * d.y * u}};
    };
    probe::TransmissionPair tp;
    tp.sector = local_sector(theta_m, theta_M, h);
    tp.k = k;
    tp.q = q;
    tp.lambda = lambda;
    tp.v.eval = vf;
    tp.w.eval = [=](Vec2 x) {
        const FieldSample v = vf(x);
        const Polar p = polar(x, {});
        const double g = pr.g(p.t);
        const cplx rg = p.r * g;
        const auto gr = combine(p.er, lambda * g, p.et, lambda * pr.dg(p.t));
        return FieldSample{v.value * (1.0 + lambda * rg),
                           {v.grad[0] * (1.0 + lambda * rg) + gr[0] * v.value,
                            v.grad[1] * (1.0 + lambda * rg) + gr[1] * v.value}};
    };
    tp.forcing = [=](Vec2 x) {
        const Polar p = polar(x, {});
        if (p.r == 0.0) return cplx(0.0);
        const FieldSample v = vf(x);
        const double g = pr.g(p.t), dg = pr.dg(p.t);
        const cplx vr = v.grad[0] * p.er.x + v.grad[1] * p.er.y;
        const cplx vt = v.grad[0] * p.et.x + v.grad[1] * p.et.y;
        const cplx phi = lambda * p.r * g * v.value;
        const cplx lap_phi =
            lambda * ((g + pr.d2g()) / p.r * v.value + 2.0 * (g * vr + dg * vt) - k * k * p.r * g * v.value);
        return lap_phi + k * k * (q - 1.0) * v.value + k * k * q * phi;
    };
    return tp;
}

}  // namespace condscat::manufactured
