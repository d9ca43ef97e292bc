#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "condscat/corner_probe.hpp"
#include "condscat/manufactured.hpp"
#include "condscat/quadrature.hpp"

using namespace condscat;
using boost::math::quadrature::gauss_kronrod;

namespace {

const std::vector<double> kGrid{50, 100, 200, 400, 800};

probe::FieldSampler sampler(std::function<cplx(Vec2)> f, double alpha = 1.0, double c = 1.0) {
    probe::FieldSampler p;
    p.eval = [f](Vec2 x) {
        const double h = 1e-6;
        return FieldSample{f(x), {(f(x + Vec2{h, 0}) - f(x - Vec2{h, 0})) / (2 * h), (f(x + Vec2{0, h}) - f(x - Vec2{0, h})) / (2 * h)}};
    };
    p.holder_alpha = alpha;
    p.holder_const = c;
    return p;
}

// polar tensor oracle for int_{S_h} f u0(s x), radial variable t = sqrt(s r)
cplx area_oracle(const std::function<cplx(Vec2)>& f, const CornerSector& sec, double s) {
    const double T = std::sqrt(s * sec.h);
    auto radial = [&](double th) {
        const cplx m = cgo::mu(th);
        auto g = [&](double t) {
            const double r = t * t / s;
            return f(sec.to_world(polar_point(r, th))) * std::exp(-t * m) * (2.0 * t * t * t / (s * s));
        };
        return gauss_kronrod<double, 61>::integrate(g, 0.0, T, 12, 1e-12);
    };
    return gauss_kronrod<double, 61>::integrate(radial, sec.theta_m, sec.theta_M, 12, 1e-12);
}

}  // namespace

TEST_CASE("I1 vanishes for v = 0 and has a closed form for v = 1") {
    const CornerSector sec = manufactured::local_sector(0.0, pi / 2, 1.0);
    const auto zero = sampler([](Vec2) { return cplx(0.0); });
    const auto one = sampler([](Vec2) { return cplx(1.0); });
    for (double s : {1.0, 50.0, 800.0}) {
        CHECK(std::abs(probe::eval_I1(zero, sec, s)) == 0.0);
        // -d_r u0 integrated over the arc is a total theta-derivative
        const double T = std::sqrt(s);
        const cplx closed = I * (std::exp(-T * cgo::mu(sec.theta_M)) - std::exp(-T * cgo::mu(sec.theta_m)));
        auto g = [&](double th) { return 0.5 * T * cgo::mu(th) * std::exp(-T * cgo::mu(th)); };
        const cplx fine = gauss_kronrod<double, 61>::integrate(g, sec.theta_m, sec.theta_M, 12, 1e-14);
        CHECK(std::abs(closed - fine) < 1e-14 + 1e-12 * std::abs(closed));
        CHECK(std::abs(probe::eval_I1(one, sec, s) - closed) < 1e-10 * std::abs(closed) + 1e-300);
    }
}

TEST_CASE("I1 decays exponentially in sqrt s") {
    const CornerSector sec = manufactured::local_sector(0.0, pi / 2, 1.0);
    const auto v = sampler([](Vec2 x) { return std::exp(I * (0.6 * x.x + 0.8 * x.y)) * (1.0 + x.x); });
    std::vector<double> rt, logs;
    for (double s : kGrid) {
        rt.push_back(std::sqrt(s));
        logs.push_back(std::log(std::abs(probe::eval_I1(v, sec, s))));
    }
    // least squares line in sqrt s
    const double n = double(rt.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < rt.size(); ++i) {
        sx += rt[i];
        sy += logs[i];
        sxx += rt[i] * rt[i];
        sxy += rt[i] * logs[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    double worst = 0.0;
    for (size_t i = 0; i < rt.size(); ++i) {
        const double fit = (sy - slope * sx) / n + slope * rt[i];
        worst = std::max(worst, std::abs(fit - logs[i]));
    }
    MESSAGE("log|I1| slope in sqrt(s): " << slope);
    CHECK(slope < -0.5);
    CHECK(worst < 0.5);
}

TEST_CASE("I2 for a Holder remainder and a linear remainder") {
    const CornerSector sec = manufactured::local_sector(0.0, pi / 2, 1.0);
    const auto half = sampler([](Vec2 x) { return cplx(std::sqrt(norm(x))); }, 0.5, 1.0);
    const double bound = cgo::weighted_bound(cgo::SectorSpec(0.0, pi / 2), 0.5, 1.0);
    for (double s : kGrid) CHECK(std::abs(probe::eval_I2(half, sec, s)) * std::pow(s, 2.5) <= bound);
    const auto x1 = sampler([](Vec2 x) { return cplx(x.x); });
    const CornerSector tilted = manufactured::local_sector(-pi / 3, pi / 6, 0.7, {0.2, -0.1});
    for (double s : {1.0, 50.0, 800.0}) {
        const cplx a = probe::eval_I2(x1, tilted, s);
        const cplx b = area_oracle([&](Vec2 x) { return cplx(x.x); }, tilted, s);
        CHECK(std::abs(a - b) < 1e-9 * std::abs(b));
        CHECK(std::abs(probe::eval_I2(sampler([](Vec2) { return cplx(0.0); }), tilted, s)) == 0.0);
    }
}

TEST_CASE("I3 split") {
    const CornerSector sec = manufactured::local_sector(-pi / 4, pi / 3, 0.8);
    const cplx eta{0.3, -0.2};
    const auto one = sampler([](Vec2) { return cplx(1.0); });
    for (double s : kGrid) {
        for (auto side : {probe::Side::plus, probe::Side::minus}) {
            const double th = side == probe::Side::plus ? sec.theta_M : sec.theta_m;
            const auto p = probe::eval_I3(one, sec, s, side, eta);
            CHECK(std::abs(p.I32) < 1e-14);
            CHECK(std::abs(p.total - eta * p.I31) < 1e-15);
            CHECK(std::abs(p.I31 - cgo::edge_integral_exact(th, s, sec.h)) < 1e-15);
            const cplx quad = probe::edge_integral([](Vec2) { return cplx(1.0); }, sec, th, s);
            CHECK(std::abs(quad - p.I31) < 1e-10);
        }
    }
    // u2 = 1 + |x|^(1/2): I32 = (2 / s^(3/2)) int_0^T t^2 exp(-mu t) dt, tending to 4 / (mu^3 s^(3/2))
    const auto rough = sampler([](Vec2 x) { return 1.0 + std::sqrt(norm(x)); }, 0.5, 1.0);
    for (auto side : {probe::Side::plus, probe::Side::minus}) {
        const double th = side == probe::Side::plus ? sec.theta_M : sec.theta_m;
        const cplx m = cgo::mu(th);
        for (double s : kGrid) {
            const double T = std::sqrt(s * sec.h);
            const cplx inner = 2.0 / (m * m * m) - std::exp(-m * T) * (T * T / m + 2.0 * T / (m * m) + 2.0 / (m * m * m));
            const cplx exact = 2.0 / std::pow(s, 1.5) * inner;
            const cplx i32 = probe::eval_I3(rough, sec, s, side, 1.0).I32;
            CHECK(std::abs(i32 - exact) < 1e-9 * std::abs(exact));
        }
        const cplx lim = 4.0 / (m * m * m);
        CHECK(std::abs(probe::eval_I3(rough, sec, 800.0, side, 1.0).I32 * std::pow(800.0, 1.5) - lim) < 0.01 * std::abs(lim));
    }
}

TEST_CASE("I4 and I5") {
    const CornerSector sec = manufactured::local_sector(0.0, pi / 2, 1.0);
    for (double s : {10.0, 100.0}) {
        const auto r = probe::eval_I4(sec, s, true);
        CHECK(std::abs(r.quadrature) <= r.majorant);
        CHECK(r.bound == cgo::tail_bound(cgo::SectorSpec(0.0, pi / 2), s, 1.0));
    }
    for (auto [a, b] : {std::pair{0.0, pi / 2}, {-pi / 3, pi / 6}, {-2.0, 0.5}}) {
        const CornerSector w = manufactured::local_sector(a, b, 1.0);
        const auto du2 = sampler([](Vec2 x) { return cplx(std::sqrt(norm(x)), 0.5 * std::sqrt(norm(x))); }, 0.5,
                                 std::sqrt(1.25));
        for (double s : kGrid) {
            const auto r = probe::eval_I5(du2, w, s);
            CHECK(std::abs(r.value) <= r.bound);
            CHECK(r.bound == doctest::Approx(cgo::weighted_bound(cgo::SectorSpec(a, b), 0.5, s) * std::sqrt(1.25)));
        }
        CHECK(std::abs(probe::eval_I5(sampler([](Vec2) { return cplx(0.0); }), w, 100.0).value) == 0.0);
    }
}

TEST_CASE("stated tail bound on the probe sector") {
    const CornerSector sec = manufactured::local_sector(0.0, pi / 2, 1.0);
    for (double s : {10.0, 100.0}) {
        const auto r = probe::eval_I4(sec, s, true);
        CAPTURE(s);
        CHECK(std::abs(r.quadrature) <= r.bound);
    }
}

TEST_CASE("conductive jump recovery away from the origin") {
    manufactured::CornerSpec c;
    c.theta_m = -pi / 3;
    c.theta_M = pi / 6;
    c.h = 0.6;
    c.apex = {1.0, -0.5};
    c.k = 1.7;
    c.eta1 = {0.1, 0.4};
    c.eta2 = {-0.2, 0.1};
    c.direction = {0.0, 1.0};
    const auto r = probe::extract_eta_diff(manufactured::corner_scenario(c));
    const cplx truth = c.eta1 - c.eta2;
    CHECK(std::abs(r.eta_extrapolated - truth) < 0.01 * std::abs(truth));
    REQUIRE(r.eta.size() == 5);
    for (size_t i = 1; i < r.eta.size(); ++i) CHECK(r.eta[i].s > r.eta[i - 1].s);
}

TEST_CASE("extractions are invariant under scaling both fields") {
    manufactured::CornerSpec c;
    c.eta1 = {0.3, 0.1};
    c.omega1 = 1.5;
    c.direction = {0.6, 0.8};
    const probe::ProbeScenario base = manufactured::corner_scenario(c);
    for (cplx f : {cplx(2.0), cplx(0.3, 0.7)}) {
        probe::ProbeScenario sc = base;
        sc.u1 = probe::scaled(base.u1, f);
        sc.u2 = probe::scaled(base.u2, f);
        sc.forcing = [g = base.forcing, f](Vec2 x) { return f * g(x); };
        const auto a = probe::run_probe(base), b = probe::run_probe(sc);
        const double tol = f == 2.0 ? 0.0 : 1e-12;
        for (size_t i = 0; i < a.eta.size(); ++i) {
            CHECK(std::abs(a.eta[i].estimate - b.eta[i].estimate) <= tol * std::abs(a.eta[i].estimate));
            CHECK(std::abs(a.omega[i].estimate - b.omega[i].estimate) <= tol * std::abs(a.omega[i].estimate));
        }
    }
}

TEST_CASE("identity depends on k and omega only through k^2 omega") {
    manufactured::CornerSpec a;
    a.eta1 = {0.2, 0.0};
    a.omega1 = 1.5;
    a.omega2 = 1.0;
    manufactured::CornerSpec b = a;
    b.k = 2.0;
    b.omega1 = a.omega1 / 4.0;
    b.omega2 = a.omega2 / 4.0;
    const auto sa = manufactured::corner_scenario(a), sb = manufactured::corner_scenario(b);
    const auto ra = probe::extract_omega_diff(sa, a.eta1 - a.eta2), rb = probe::extract_omega_diff(sb, b.eta1 - b.eta2);
    for (size_t i = 0; i < ra.omega.size(); ++i)
        CHECK(std::abs(4.0 * rb.omega[i].estimate - ra.omega[i].estimate) < 1e-12 * std::abs(ra.omega[i].estimate));
    for (double s : {50.0, 800.0}) {
        const auto ta = probe::identity_terms(sa, s), tb = probe::identity_terms(sb, s);
        CHECK(probe::identity_residual(tb, sb) == doctest::Approx(probe::identity_residual(ta, sa)).epsilon(1e-6));
    }
}

TEST_CASE("equal potentials give vanishing potential estimates") {
    manufactured::CornerSpec c;
    c.eta1 = {0.3, 0.1};
    c.direction = {0.6, 0.8};
    const auto r = probe::extract_omega_diff(manufactured::corner_scenario(c), c.eta1 - c.eta2);
    for (size_t i = 1; i < r.omega.size(); ++i)
        CHECK(std::abs(r.omega[i].estimate) < std::abs(r.omega[i - 1].estimate) + 1e-14);
    CHECK(std::abs(r.omega.back().estimate) < 1e-3);
}

TEST_CASE("exponential corrections are not negligible at moderate s") {
    manufactured::CornerSpec c;
    c.eta1 = {0.3, 0.1};
    c.h = 0.3;
    c.direction = {0.6, 0.8};
    const auto sc = manufactured::corner_scenario(c);
    probe::ProbeOptions off;
    off.exponential_corrections = false;
    const auto with = probe::extract_eta_diff(sc), without = probe::extract_eta_diff(sc, off);
    const double change = std::abs(with.eta.front().estimate - without.eta.front().estimate);
    MESSAGE("s=50 change " << change << ", residual " << with.eta.front().residual);
    CHECK(change > with.eta.front().residual);
}

TEST_CASE("refusals") {
    manufactured::CornerSpec c;
    c.amplitude = 0.0;
    CHECK_THROWS_WITH_AS(probe::extract_eta_diff(manufactured::corner_scenario(c)),
                         "field vanishes at the vertex: vertex not admissible", InputError);
    const auto exact = manufactured::exact_corner_pair(0.0, pi / 2, 1.0, 1.5, 1.3, {0.3, 0.1});
    CHECK_THROWS_AS(probe::extract_eta_diff(exact), InputError);
    CHECK_THROWS_AS(probe::extract_omega_diff(exact, 0.0), InputError);
    manufactured::CornerSpec ok;
    probe::ProbeOptions bad;
    bad.s_grid = {100, 50};
    CHECK_THROWS_AS(probe::extract_eta_diff(manufactured::corner_scenario(ok), bad), InputError);
    ok.omega1 = -1.0;
    CHECK_THROWS_AS(probe::extract_eta_diff(manufactured::corner_scenario(ok)), InputError);
}

TEST_CASE("admissibility") {
    const Polygon sq({{-0.5, -0.5}, {0.5, -0.5}, {0.5, 0.5}, {-0.5, 0.5}});
    auto plane = [](Vec2 x) { return std::exp(I * (0.6 * x.x + 0.8 * x.y)); };
    const double tau = probe::default_admissibility_threshold(plane, sq);
    CHECK(tau == doctest::Approx(1e-6));
    const auto rep = probe::admissibility_check([&](size_t i) { return plane(sq.vertex(i)); }, sq.vertices(), tau);
    CHECK(rep.all_admissible());
    for (const auto& v : rep.vertices) CHECK(std::abs(v.value) == doctest::Approx(1.0));
    // field vanishing on the right edge
    auto bent = [&](Vec2 x) { return std::sin(0.5 * pi * (x.x - 0.5)) * plane(x); };
    const auto bad = probe::admissibility_check([&](size_t i) { return bent(sq.vertex(i)); }, sq.vertices(), tau);
    CHECK_FALSE(bad.all_admissible());
    CHECK(bad.vertices[1].admissible == false);
    CHECK(bad.vertices[2].admissible == false);
    CHECK(bad.vertices[0].admissible);
    // midline extrapolation recovers a smooth vertex value
    const CornerSector cs = corner_sector(sq, 2, 0.25);
    CHECK(std::abs(probe::vertex_value(plane, cs) - plane(sq.vertex(2))) < 1e-8);
}

TEST_CASE("vanishing test") {
    SUBCASE("pair vanishing at the vertex decays") {
        // leading edge terms cancel for this mode, the functional falls off like s^(-nu-1)
        probe::ProbeOptions far;
        far.s_grid = {1600, 3200, 6400, 12800};
        for (auto [a, b] : {std::pair{0.0, pi / 2}, {-pi / 3, pi / 3}}) {
            const auto p = manufactured::exact_transmission_pair(a, b, 1.0, 1.2, cplx(0.0, 0.5));
            const auto r = probe::vanishing_test(p, far);
            const double expected = -pi / (b - a) - 1.0;
            CAPTURE(a);
            CAPTURE(b);
            CHECK(std::abs(r.decay_slope - expected) < 0.02);
            CHECK(std::abs(r.v0_extrapolated) < 1e-6);
            const auto coarse = probe::vanishing_test(p);
            CHECK(std::abs(coarse.functional.back()) < 1e-2 * std::abs(coarse.functional.front()));
        }
    }
    SUBCASE("nonzero vertex value plateaus") {
        const cplx v0{0.8, -0.3}, lambda{0.2, 0.5};
        const auto p = manufactured::plateau_transmission_pair(-pi / 4, pi / 3, 0.8, 1.0, cplx(2.0, 0.1), lambda, v0,
                                                               {0.6, 0.8});
        const auto r = probe::vanishing_test(p);
        const cplx mm = cgo::mu(-pi / 4), mM = cgo::mu(pi / 3);
        const cplx plateau = 2.0 * lambda * v0 * (1.0 / (mm * mm) + 1.0 / (mM * mM));
        CHECK(std::abs(r.functional.back() - plateau) < 0.05 * std::abs(plateau));
        CHECK(std::abs(r.decay_slope) < 0.1);
        CHECK(std::abs(r.v0_extrapolated - v0) < 1e-2 * std::abs(v0));
    }
    SUBCASE("zero pair") {
        probe::TransmissionPair p;
        p.sector = manufactured::local_sector(0.0, pi / 2, 1.0);
        p.q = 2.0;
        p.lambda = cplx(0.0, 0.5);
        p.v = sampler([](Vec2) { return cplx(0.0); });
        p.w = p.v;
        const auto r = probe::vanishing_test(p);
        for (const cplx& f : r.functional) CHECK(f == cplx(0.0));
        CHECK(r.v0_extrapolated == cplx(0.0));
    }
}

TEST_CASE("identity closes on a tilted manufactured corner") {
    manufactured::CornerSpec c;
    c.theta_m = -2.0;
    c.theta_M = 0.5;
    c.h = 0.5;
    c.apex = {-0.3, 0.4};
    c.eta1 = {0.3, 0.1};
    c.omega1 = {1.2, 0.05};
    c.k = 1.3;
    const auto sc = manufactured::corner_scenario(c);
    for (double s : kGrid) {
        const auto t = probe::identity_terms(sc, s);
        const cplx k2 = sc.k * sc.k;
        const double scale = std::max({std::abs(k2 * (sc.omega2 - sc.omega1) * t.A), std::abs(k2 * sc.omega1 * t.I2),
                                       std::abs(t.F), std::abs((sc.eta1 - sc.eta2) * t.B), std::abs(t.I1)});
        CHECK(probe::identity_residual(t, sc) < 1e-10 * scale);
    }
}
