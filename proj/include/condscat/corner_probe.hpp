#pragma once

#include <functional>
#include <vector>

#include "condscat/cgo.hpp"
#include "condscat/geometry.hpp"

namespace condscat::probe {

struct FieldSampler {
    std::function<FieldSample(Vec2)> eval;  // world coordinates, defined on the closed sector
    double holder_alpha = 1.0;              // reporting only
    double holder_const = 1.0;

    FieldSample operator()(Vec2 x) const { return eval(x); }
    cplx value(Vec2 x) const { return eval(x).value; }
};

FieldSampler difference(const FieldSampler& a, const FieldSampler& b);
FieldSampler scaled(const FieldSampler& a, cplx c);
FieldSampler minus_value_at(const FieldSampler& a, Vec2 x0);  // a - a(x0)
// samples `a` once on a polar Chebyshev-Lobatto grid of the sector (radial variable sqrt(r/h))
// and interpolates; for samplers that are expensive to evaluate
FieldSampler tabulated(const FieldSampler& a, const CornerSector& sec, int n_theta = 24, int n_rho = 32);

struct QuadOptions {
    double tol = 1e-12;  // relative tolerance of each functional
    Exec exec = Exec::parallel;
};

// integral over S_h of f(x) u0(s x_local)
cplx area_integral(const std::function<cplx(Vec2)>& f, const CornerSector& sec, double s, const QuadOptions& q = {});
// integral over the edge at angle theta (local frame) of f(x) u0(s x_local), 0 < r < h
cplx edge_integral(const std::function<cplx(Vec2)>& f, const CornerSector& sec, double theta, double s,
                   const QuadOptions& q = {});

enum class Side { plus, minus };  // edge at theta_M / theta_m

cplx eval_I1(const FieldSampler& v, const CornerSector& sec, double s, const QuadOptions& q = {});
cplx eval_I2(const FieldSampler& dv, const CornerSector& sec, double s, const QuadOptions& q = {});

struct I3Parts {
    cplx total, I31, I32;
};
I3Parts eval_I3(const FieldSampler& u2, const CornerSector& sec, double s, Side side, cplx eta_diff,
                const QuadOptions& q = {});

struct I4Report {
    double bound = 0.0;     // stated tail bound
    double majorant = 0.0;  // closed-form majorant
    cplx quadrature{};
};
I4Report eval_I4(const CornerSector& sec, double s, bool with_quadrature = false);

struct I5Report {
    cplx value{};
    double bound = 0.0;
};
I5Report eval_I5(const FieldSampler& du2, const CornerSector& sec, double s, const QuadOptions& q = {});

// two interior fields near one corner. `forcing` is the known interior source
// f = Lap v + k^2 w1 v - k^2 (w2 - w1) u2 of a manufactured pair (zero for physical data)
struct ProbeScenario {
    CornerSector sector;
    cplx k{1.0};
    cplx omega1{1.0}, omega2{1.0};
    cplx eta1{0.0}, eta2{0.0};
    FieldSampler u1, u2;
    std::function<cplx(Vec2)> forcing;
};

struct ProbeOptions {
    std::vector<double> s_grid{50, 100, 200, 400, 800};
    bool exponential_corrections = true;  // exact edge and sector integrals instead of s -> inf limits
    bool remainder_terms = true;          // Holder remainders moved into the coefficient
    double min_field = 1e-10;             // refusal threshold on |u2(0)| relative to field scale
    QuadOptions quad;
};

struct ProbeEstimate {
    double s = 0.0;
    cplx estimate{};
    double residual = 0.0;  // |estimate - extrapolated|
};

// differences are index 1 minus index 2
struct ProbeResult {
    std::vector<ProbeEstimate> eta;    // eta1 - eta2
    std::vector<ProbeEstimate> omega;  // omega1 - omega2
    cplx eta_extrapolated{};
    cplx omega_extrapolated{};
};

// all functionals of the corner identity at one s
struct IdentityTerms {
    double s = 0.0;
    cplx u2_0{};
    cplx A{};       // int_{S_h} u2 u0
    cplx B{};       // int over both edges of u2 u0
    cplx I1{}, I2{}, F{};
    cplx I31_plus{}, I31_minus{}, I32_plus{}, I32_minus{};
    cplx I5{};
    cplx sector_u0{};  // int_{S_h} u0
};
IdentityTerms identity_terms(const ProbeScenario& sc, double s, const QuadOptions& q = {});
// |k^2 (w2-w1) A - k^2 w1 I2 + F - (eta1-eta2) B - I1| with the scenario's true parameters
double identity_residual(const IdentityTerms& t, const ProbeScenario& sc);

ProbeResult extract_eta_diff(const ProbeScenario& sc, const ProbeOptions& opts = {});
ProbeResult extract_omega_diff(const ProbeScenario& sc, cplx eta_diff, const ProbeOptions& opts = {});
ProbeResult run_probe(const ProbeScenario& sc, const ProbeOptions& opts = {});

// value at the apex by Richardson extrapolation along the sector midline
cplx vertex_value(const std::function<cplx(Vec2)>& u, const CornerSector& sec, int levels = 5);

struct VertexAdmissibility {
    size_t vertex = 0;
    Vec2 x;
    cplx value{};
    bool admissible = false;
};
struct AdmissibilityReport {
    double tau = 0.0;
    std::vector<VertexAdmissibility> vertices;
    bool all_admissible() const;
};
AdmissibilityReport admissibility_check(const std::function<cplx(size_t)>& u_at_vertex,
                                        const std::vector<Vec2>& vertices, double tau);
// 1e-6 x max |u| on the circle of radius 2 diam(omega) about its centroid
double default_admissibility_threshold(const std::function<cplx(Vec2)>& u, const Polygon& omega, int samples = 256);

// pair (v, w) with Lap v + k^2 v = 0, Lap w + k^2 q w = f, w = v and
// d_nu w - d_nu v = lambda v on both edges
struct TransmissionPair {
    CornerSector sector;
    cplx k{1.0};
    cplx q{1.0};
    cplx lambda{0.0};
    FieldSampler v, w;
    std::function<cplx(Vec2)> forcing;
};

struct VanishingReport {
    std::vector<double> s;
    std::vector<cplx> functional;   // s * lambda * int_edges v u0, assembled from interior data
    std::vector<cplx> v0_estimate;  // functional / (lambda s sum I31), or the potential-jump analogue
    cplx v0_extrapolated{};
    double decay_slope = 0.0;       // log-log slope of |functional| in s
};
VanishingReport vanishing_test(const TransmissionPair& p, const ProbeOptions& opts = {});

}  // namespace condscat::probe
