#pragma once

#include "condscat/corner_probe.hpp"

// closed-form corner fields used to exercise the probe; all live in a sector
// with apex at `apex` and no frame rotation
namespace condscat::manufactured {

CornerSector local_sector(double theta_m, double theta_M, double h, Vec2 apex = {});

// u2 = amplitude exp(i k sqrt(w2) d.x), u1 = u2 + v with
// v = (eta1-eta2) r g u2 + k^2 (w2-w1) r^2 g^2 u2, g = (t-t_m)(t-t_M)/(t_M-t_m).
// v vanishes on both edges with d_nu v = (eta1-eta2) u2 there; the interior
// mismatch is returned as the scenario forcing
struct CornerSpec {
    double theta_m = 0.0;
    double theta_M = pi / 2;
    double h = 1.0;
    Vec2 apex{};
    cplx k{1.0};
    cplx omega1{1.0}, omega2{1.0};
    cplx eta1{0.0}, eta2{0.0};
    cplx amplitude{1.0};
    Vec2 direction{1.0, 0.0};
};
probe::ProbeScenario corner_scenario(const CornerSpec& c);

// source-free pair with w1 = w2 = omega and jump eta_diff, built from
// Fourier-Bessel modes of order pi/Theta +- 1 (needs Theta < pi, real k sqrt(omega));
// u2(0) = 0, so it closes the identity but cannot drive an extraction
probe::ProbeScenario exact_corner_pair(double theta_m, double theta_M, double h, double k, double omega,
                                       cplx eta_diff);

// v(0) = 0 pair: q = 1, w - v = J_nu(k r) sin(nu (t - t_m))
probe::TransmissionPair exact_transmission_pair(double theta_m, double theta_M, double h, double k, cplx lambda);

// v = v0 exp(i k d.x), w = v + lambda r g v with forcing Lap w + k^2 q w
probe::TransmissionPair plateau_transmission_pair(double theta_m, double theta_M, double h, cplx k, cplx q,
                                                  cplx lambda, cplx v0, Vec2 direction = {1.0, 0.0});

}  // namespace condscat::manufactured
