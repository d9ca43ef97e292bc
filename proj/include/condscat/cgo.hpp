#pragma once

#include "condscat/types.hpp"

// u0(x) = exp(-sqrt(r) e^{i theta/2}), harmonic off the negative real axis
namespace condscat::cgo {

class SectorSpec {
  public:
    // requires -pi < theta_m < theta_M < pi and opening != pi; throws InputError
    SectorSpec(double theta_m, double theta_M);

    double theta_m() const { return tm_; }
    double theta_M() const { return tM_; }
    double opening() const { return tM_ - tm_; }
    double delta() const;  // min cos(theta/2) over the span

  private:
    double tm_, tM_;
};

cplx mu(double theta);
double omega_w(double theta);

cplx u0_eval(Vec2 x, double s);  // throws on the origin and the branch cut
cplx u0_polar(double r, double theta, double s);
// gradient of x -> u0(s x)
std::array<cplx, 2> u0_grad(Vec2 x, double s);

cplx sector_integral_exact(const SectorSpec& sec, double s);

struct QuadResult {
    cplx value{};
    double error = 0.0;       // quadrature estimate plus truncation
    double truncation = 0.0;  // tail majorant at rmax
    double rmax = 0.0;
    bool converged = false;
};
// rmax <= 0 picks the radius where the tail majorant drops below tol/10
QuadResult sector_integral_quad(const SectorSpec& sec, double s, double rmax, double tol);

double weighted_bound(const SectorSpec& sec, double alpha, double s);
double tail_bound(const SectorSpec& sec, double s, double h);
// closed-form majorant of the same tail with the exact radial integral
double tail_majorant(const SectorSpec& sec, double s, double h);
double truncation_radius(const SectorSpec& sec, double s, double tol);

cplx edge_integral_exact(double theta, double s, double h);

// quadrature left-hand sides for the bound checks
double weighted_abs_integral(const SectorSpec& sec, double alpha, double s, double tol);
double tail_abs_integral(const SectorSpec& sec, double s, double h, double tol);
cplx tail_integral(const SectorSpec& sec, double s, double h, double tol);
cplx edge_integral_quad(double theta, double s, double h, double tol);

}  // namespace condscat::cgo
