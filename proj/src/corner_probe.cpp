#include "condscat/corner_probe.hpp"

#include <algorithm>
#include <cmath>
#include <memory>

#include "condscat/quadrature.hpp"

namespace condscat::probe {
namespace {

// composite Gauss-Legendre in theta with panel doubling; g is evaluated at every node
cplx theta_integral(const std::function<cplx(double)>& g, double a, double b, const QuadOptions& q) {
    auto sum = [&](int panels) {
        const quad::Rule r = quad::gauss_legendre(a, b, panels);
        std::vector<cplx> vals(r.x.size());
        if (q.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (long i = 0; i < long(r.x.size()); ++i) vals[size_t(i)] = g(r.x[size_t(i)]);
        } else {
            for (size_t i = 0; i < r.x.size(); ++i) vals[i] = g(r.x[i]);
        }
        cplx s = 0.0;
        for (size_t i = 0; i < vals.size(); ++i) s += r.w[i] * vals[i];
        return s;
    };
    cplx prev = sum(1);
    for (int panels = 2; panels <= 64; panels *= 2) {
        const cplx cur = sum(panels);
        if (std::abs(cur - prev) <= q.tol * std::max(std::abs(cur), 1e-300)) return cur;
        prev = cur;
    }
    return prev;
}

double radial_tol(const QuadOptions& q) { return std::max(q.tol, 1e-15); }

// differences of sampled fields carry roundoff that no tolerance below it can
// resolve; the depth cap bounds the work spent chasing it
constexpr unsigned radial_depth = 10;

}  // namespace

FieldSampler difference(const FieldSampler& a, const FieldSampler& b) {
    FieldSampler d;
    d.eval = [a, b](Vec2 x) {
        const FieldSample p = a(x), q = b(x);
        return FieldSample{p.value - q.value, {p.grad[0] - q.grad[0], p.grad[1] - q.grad[1]}};
    };
    d.holder_alpha = std::min(a.holder_alpha, b.holder_alpha);
    d.holder_const = a.holder_const + b.holder_const;
    return d;
}

FieldSampler scaled(const FieldSampler& a, cplx c) {
    FieldSampler d;
    d.eval = [a, c](Vec2 x) {
        const FieldSample p = a(x);
        return FieldSample{c * p.value, {c * p.grad[0], c * p.grad[1]}};
    };
    d.holder_alpha = a.holder_alpha;
    d.holder_const = std::abs(c) * a.holder_const;
    return d;
}

FieldSampler minus_value_at(const FieldSampler& a, Vec2 x0) {
    const cplx v0 = a.value(x0);
    FieldSampler d = a;
    d.eval = [a, v0](Vec2 x) {
        FieldSample p = a(x);
        p.value -= v0;
        return p;
    };
    return d;
}

namespace {

std::vector<double> lobatto(int n) {
    std::vector<double> x(size_t(n) + 1);
    for (int j = 0; j <= n; ++j) x[size_t(j)] = 0.5 * (1.0 - std::cos(pi * j / n));
    return x;
}

// barycentric weights of the Lobatto points at y in [0, 1]; exact node hits return a unit vector
std::vector<double> bary(int n, const std::vector<double>& nodes, double y) {
    std::vector<double> w(size_t(n) + 1, 0.0);
    double sum = 0.0;
    for (int j = 0; j <= n; ++j) {
        const double d = y - nodes[size_t(j)];
        if (d == 0.0) {
            std::fill(w.begin(), w.end(), 0.0);
            w[size_t(j)] = 1.0;
            return w;
        }
        const double c = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == n) ? 0.5 : 1.0) / d;
        w[size_t(j)] = c;
        sum += c;
    }
    for (auto& v : w) v /= sum;
    return w;
}

}  // namespace

FieldSampler tabulated(const FieldSampler& a, const CornerSector& sec, int n_theta, int n_rho) {
    if (n_theta < 2 || n_rho < 2) throw InputError("tabulation needs at least 2 intervals per direction");
    struct Table {
        std::vector<double> tn, rn;
        std::vector<FieldSample> v;  // row-major, theta fastest
    };
    auto t = std::make_shared<Table>();
    t->tn = lobatto(n_theta);
    t->rn = lobatto(n_rho);
    t->v.resize(size_t((n_theta + 1) * (n_rho + 1)));
    const int total = int(t->v.size());
#pragma omp parallel for schedule(dynamic)
    for (int idx = 0; idx < total; ++idx) {
        const int i = idx % (n_theta + 1), j = idx / (n_theta + 1);
        const double th = sec.theta_m + sec.opening() * t->tn[size_t(i)];
        const double r = sec.h * t->rn[size_t(j)] * t->rn[size_t(j)];
        t->v[size_t(idx)] = a(sec.to_world(polar_point(r, th)));
    }
    FieldSampler f;
    f.holder_alpha = a.holder_alpha;
    f.holder_const = a.holder_const;
    f.eval = [t, sec, n_theta, n_rho](Vec2 x) {
        const Vec2 l = sec.to_local(x);
        const double r = norm(l);
        const double th = r > 0 ? std::atan2(l.y, l.x) : 0.5 * (sec.theta_m + sec.theta_M);
        const double yt = std::clamp((th - sec.theta_m) / sec.opening(), 0.0, 1.0);
        const double yr = std::clamp(std::sqrt(r / sec.h), 0.0, 1.0);
        const auto wt = bary(n_theta, t->tn, yt), wr = bary(n_rho, t->rn, yr);
        FieldSample out;
        for (int j = 0; j <= n_rho; ++j) {
            if (wr[size_t(j)] == 0.0) continue;
            for (int i = 0; i <= n_theta; ++i) {
                const double w = wr[size_t(j)] * wt[size_t(i)];
                if (w == 0.0) continue;
                const FieldSample& s = t->v[size_t(j * (n_theta + 1) + i)];
                out.value += w * s.value;
                out.grad[0] += w * s.grad[0];
                out.grad[1] += w * s.grad[1];
            }
        }
        return out;
    };
    return f;
}

cplx area_integral(const std::function<cplx(Vec2)>& f, const CornerSector& sec, double s, const QuadOptions& q) {
    const double T = std::sqrt(s * sec.h);
    auto inner = [&](double th) {
        const cplx m = cgo::mu(th);
        const Vec2 dir = sec.world_direction(th);
        auto g = [&](double t) {
            const double r = t * t / s;
            return f(sec.apex + dir * r) * std::exp(-t * m) * (2.0 * t * t * t / (s * s));
        };
        return quad::adaptive(g, 0.0, T, radial_tol(q), radial_depth).value;
    };
    return theta_integral(inner, sec.theta_m, sec.theta_M, q);
}

cplx edge_integral(const std::function<cplx(Vec2)>& f, const CornerSector& sec, double theta, double s,
                   const QuadOptions& q) {
    const double T = std::sqrt(s * sec.h);
    const cplx m = cgo::mu(theta);
    const Vec2 dir = sec.world_direction(theta);
    auto g = [&](double t) {
        const double r = t * t / s;
        return f(sec.apex + dir * r) * std::exp(-t * m) * (2.0 * t / s);
    };
    return quad::adaptive(g, 0.0, T, radial_tol(q), radial_depth).value;
}

cplx eval_I1(const FieldSampler& v, const CornerSector& sec, double s, const QuadOptions& q) {
    const double h = sec.h;
    auto g = [&](double th) {
        const Vec2 er = sec.world_direction(th);
        const FieldSample fs = v(sec.apex + er * h);
        const cplx dv = fs.grad[0] * er.x + fs.grad[1] * er.y;
        const cplx u0 = cgo::u0_polar(h, th, s);
        const cplx du0 = -std::sqrt(s) / (2.0 * std::sqrt(h)) * cgo::mu(th) * u0;
        return (dv * u0 - du0 * fs.value) * h;
    };
    return theta_integral(g, sec.theta_m, sec.theta_M, q);
}

cplx eval_I2(const FieldSampler& dv, const CornerSector& sec, double s, const QuadOptions& q) {
    return area_integral([&](Vec2 x) { return dv.value(x); }, sec, s, q);
}

I3Parts eval_I3(const FieldSampler& u2, const CornerSector& sec, double s, Side side, cplx eta_diff,
                const QuadOptions& q) {
    const double th = side == Side::plus ? sec.theta_M : sec.theta_m;
    const cplx u20 = u2.value(sec.apex);
    I3Parts p;
    p.I31 = cgo::edge_integral_exact(th, s, sec.h);
    p.I32 = edge_integral([&](Vec2 x) { return u2.value(x) - u20; }, sec, th, s, q);
    p.total = eta_diff * (u20 * p.I31 + p.I32);
    return p;
}

I4Report eval_I4(const CornerSector& sec, double s, bool with_quadrature) {
    const cgo::SectorSpec spec(sec.theta_m, sec.theta_M);
    I4Report r;
    r.bound = cgo::tail_bound(spec, s, sec.h);
    r.majorant = cgo::tail_majorant(spec, s, sec.h);
    if (with_quadrature) r.quadrature = cgo::tail_integral(spec, s, sec.h, 1e-13);
    return r;
}

I5Report eval_I5(const FieldSampler& du2, const CornerSector& sec, double s, const QuadOptions& q) {
    const cgo::SectorSpec spec(sec.theta_m, sec.theta_M);
    I5Report r;
    r.value = area_integral([&](Vec2 x) { return du2.value(x); }, sec, s, q);
    r.bound = cgo::weighted_bound(spec, du2.holder_alpha, s) * du2.holder_const;
    return r;
}

IdentityTerms identity_terms(const ProbeScenario& sc, double s, const QuadOptions& q) {
    const CornerSector& sec = sc.sector;
    const FieldSampler v = difference(sc.u1, sc.u2);
    IdentityTerms t;
    t.s = s;
    t.u2_0 = sc.u2.value(sec.apex);
    t.A = area_integral([&](Vec2 x) { return sc.u2.value(x); }, sec, s, q);
    t.I2 = eval_I2(v, sec, s, q);
    t.F = sc.forcing ? area_integral(sc.forcing, sec, s, q) : cplx(0.0);
    t.I1 = eval_I1(v, sec, s, q);
    const I3Parts p = eval_I3(sc.u2, sec, s, Side::plus, 1.0, q);
    const I3Parts m = eval_I3(sc.u2, sec, s, Side::minus, 1.0, q);
    t.I31_plus = p.I31;
    t.I31_minus = m.I31;
    t.I32_plus = p.I32;
    t.I32_minus = m.I32;
    t.B = p.total + m.total;
    t.I5 = area_integral([&](Vec2 x) { return sc.u2.value(x) - t.u2_0; }, sec, s, q);
    t.sector_u0 = area_integral([](Vec2) { return cplx(1.0); }, sec, s, q);
    return t;
}

double identity_residual(const IdentityTerms& t, const ProbeScenario& sc) {
    const cplx k2 = sc.k * sc.k;
    return std::abs(k2 * (sc.omega2 - sc.omega1) * t.A - k2 * sc.omega1 * t.I2 + t.F - (sc.eta1 - sc.eta2) * t.B -
                    t.I1);
}

namespace {

void check_vertex_field(const ProbeScenario& sc, const ProbeOptions& o) {
    const CornerSector& sec = sc.sector;
    if (sec.degenerate || !(sec.theta_m > -pi && sec.theta_m < sec.theta_M && sec.theta_M < pi && sec.h > 0))
        throw InputError("sector must satisfy -pi < theta_m < theta_M < pi and h > 0");
    if (sc.k == 0.0) throw InputError("k must be nonzero");
    if (!(sc.omega1.real() > 0 && sc.omega2.real() > 0)) throw InputError("Re omega must be positive");
    if (!sc.u1.eval || !sc.u2.eval) throw InputError("probe needs both fields");
    double scale = 0.0;
    for (int i = 0; i <= 8; ++i) {
        const double th = sec.theta_m + (sec.theta_M - sec.theta_m) * i / 8.0;
        scale = std::max(scale, std::abs(sc.u2.value(sec.apex + sec.world_direction(th) * sec.h)));
    }
    if (!(std::abs(sc.u2.value(sec.apex)) > o.min_field * std::max(scale, 1e-300)))
        throw InputError("field vanishes at the vertex: vertex not admissible");
}

cplx coefficient_B(const IdentityTerms& t, const CornerSector& sec, const ProbeOptions& o) {
    cplx lead;
    if (o.exponential_corrections) {
        lead = t.I31_plus + t.I31_minus;
    } else {
        const cplx a = cgo::mu(sec.theta_M), b = cgo::mu(sec.theta_m);
        lead = 2.0 / t.s * (1.0 / (a * a) + 1.0 / (b * b));
    }
    cplx c = t.u2_0 * lead;
    if (o.remainder_terms) c += t.I32_plus + t.I32_minus;
    return c;
}

cplx coefficient_A(const IdentityTerms& t, const CornerSector& sec, const ProbeOptions& o) {
    const cplx lead = o.exponential_corrections
                          ? t.sector_u0
                          : cgo::sector_integral_exact(cgo::SectorSpec(sec.theta_m, sec.theta_M), t.s);
    cplx c = t.u2_0 * lead;
    if (o.remainder_terms) c += t.I5;
    return c;
}

void finish(std::vector<ProbeEstimate>& est, cplx& extrapolated) {
    std::vector<double> xs;
    std::vector<cplx> ys;
    for (const auto& e : est) {
        xs.push_back(1.0 / e.s);
        ys.push_back(e.estimate);
    }
    extrapolated = quad::neville(xs, ys, 0.0);
    for (auto& e : est) e.residual = std::abs(e.estimate - extrapolated);
}

void check_grid(const std::vector<double>& g) {
    if (g.empty()) throw InputError("empty s grid");
    for (size_t i = 0; i < g.size(); ++i) {
        if (!(g[i] > 0)) throw InputError("s values must be positive");
        if (i > 0 && !(g[i] > g[i - 1])) throw InputError("s values must increase strictly");
    }
}

}  // namespace

ProbeResult extract_eta_diff(const ProbeScenario& sc, const ProbeOptions& o) {
    check_grid(o.s_grid);
    check_vertex_field(sc, o);
    ProbeResult r;
    const cplx k2 = sc.k * sc.k;
    for (double s : o.s_grid) {
        const IdentityTerms t = identity_terms(sc, s, o.quad);
        const cplx B = coefficient_B(t, sc.sector, o);
        if (!(std::abs(B) * s > 1e-12 * std::abs(t.u2_0)))
            throw NumericalError("edge coefficient vanishes");
        r.eta.push_back({s, (t.F - k2 * sc.omega1 * t.I2 - t.I1) / B, 0.0});
    }
    finish(r.eta, r.eta_extrapolated);
    return r;
}

ProbeResult extract_omega_diff(const ProbeScenario& sc, cplx eta_diff, const ProbeOptions& o) {
    check_grid(o.s_grid);
    check_vertex_field(sc, o);
    ProbeResult r;
    const cplx k2 = sc.k * sc.k;
    for (double s : o.s_grid) {
        const IdentityTerms t = identity_terms(sc, s, o.quad);
        const cplx A = coefficient_A(t, sc.sector, o);
        const cplx B = coefficient_B(t, sc.sector, o);
        if (!(std::abs(A) * s * s > 1e-12 * std::abs(t.u2_0))) throw NumericalError("sector coefficient vanishes");
        const cplx est = -(eta_diff * B + t.I1 + k2 * sc.omega1 * t.I2 - t.F) / (k2 * A);
        r.omega.push_back({s, est, 0.0});
    }
    finish(r.omega, r.omega_extrapolated);
    return r;
}

ProbeResult run_probe(const ProbeScenario& sc, const ProbeOptions& o) {
    ProbeResult r = extract_eta_diff(sc, o);
    const ProbeResult w = extract_omega_diff(sc, r.eta_extrapolated, o);
    r.omega = w.omega;
    r.omega_extrapolated = w.omega_extrapolated;
    return r;
}

cplx vertex_value(const std::function<cplx(Vec2)>& u, const CornerSector& sec, int levels) {
    const Vec2 dir = sec.midline();
    std::vector<double> ts;
    std::vector<cplx> vs;
    for (int j = 0; j < levels; ++j) {
        const double t = 0.5 * sec.h * std::pow(0.5, j);
        ts.push_back(t);
        vs.push_back(u(sec.apex + dir * t));
    }
    return quad::neville(ts, vs, 0.0);
}

bool AdmissibilityReport::all_admissible() const {
    return std::all_of(vertices.begin(), vertices.end(), [](const auto& v) { return v.admissible; });
}

AdmissibilityReport admissibility_check(const std::function<cplx(size_t)>& u_at_vertex,
                                        const std::vector<Vec2>& vertices, double tau) {
    AdmissibilityReport r;
    r.tau = tau;
    for (size_t i = 0; i < vertices.size(); ++i) {
        const cplx v = u_at_vertex(i);
        r.vertices.push_back({i, vertices[i], v, std::abs(v) > tau});
    }
    return r;
}

double default_admissibility_threshold(const std::function<cplx(Vec2)>& u, const Polygon& omega, int samples) {
    const Vec2 c = omega.centroid();
    const double R = 2.0 * omega.diameter();
    double mx = 0.0;
    for (int i = 0; i < samples; ++i) mx = std::max(mx, std::abs(u(c + polar_point(R, 2 * pi * i / samples))));
    return 1e-6 * mx;
}

VanishingReport vanishing_test(const TransmissionPair& p, const ProbeOptions& o) {
    check_grid(o.s_grid);
    const CornerSector& sec = p.sector;
    const FieldSampler phi = difference(p.w, p.v);
    const cplx k2 = p.k * p.k;
    VanishingReport r;
    std::vector<double> xs;
    for (double s : o.s_grid) {
        const cplx Pw = area_integral([&](Vec2 x) { return p.w.value(x); }, sec, s, o.quad);
        const cplx Pphi = area_integral([&](Vec2 x) { return phi.value(x); }, sec, s, o.quad);
        const cplx F = p.forcing ? area_integral(p.forcing, sec, s, o.quad) : cplx(0.0);
        const cplx I1 = eval_I1(phi, sec, s, o.quad);
        const cplx bracket = -k2 * Pphi - k2 * (p.q - 1.0) * Pw + F - I1;
        const cplx fun = s * bracket;
        cplx est = 0.0;
        if (p.lambda != 0.0) {
            const cplx e = cgo::edge_integral_exact(sec.theta_M, s, sec.h) + cgo::edge_integral_exact(sec.theta_m, s, sec.h);
            est = bracket / (p.lambda * e);
        } else if (p.q != 1.0) {
            const cplx su0 = area_integral([](Vec2) { return cplx(1.0); }, sec, s, o.quad);
            est = (k2 * Pphi - F + I1) / (-k2 * (p.q - 1.0) * su0);
        }
        r.s.push_back(s);
        r.functional.push_back(fun);
        r.v0_estimate.push_back(est);
        xs.push_back(1.0 / s);
    }
    r.v0_extrapolated = quad::neville(xs, r.v0_estimate, 0.0);
    std::vector<double> mags;
    bool positive = true;
    for (const auto& f : r.functional) {
        mags.push_back(std::abs(f));
        positive = positive && std::abs(f) > 0;
    }
    r.decay_slope = positive && r.s.size() >= 2 ? quad::loglog_slope(r.s, mags) : std::nan("");
    return r;
}

}  // namespace condscat::probe
