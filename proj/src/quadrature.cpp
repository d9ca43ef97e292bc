#include "condscat/quadrature.hpp"

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

namespace condscat::quad {

Result adaptive(const std::function<cplx(double)>& f, double a, double b, double tol, unsigned max_depth) {
    Result r;
    r.value = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &r.error);
    return r;
}

double adaptive_real(const std::function<double(double)>& f, double a, double b, double tol, double* err,
                     unsigned max_depth) {
    double e = 0.0;
    const double v = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(f, a, b, max_depth, tol, &e);
    if (err) *err = e;
    return v;
}

Rule gauss_legendre(double a, double b, int panels) {
    using G = boost::math::quadrature::gauss<double, 20>;
    const auto& xs = G::abscissa();
    const auto& ws = G::weights();
    Rule r;
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double c = a + (p + 0.5) * h, half = 0.5 * h;
        for (size_t i = 0; i < xs.size(); ++i) {
            if (xs[i] == 0.0) {
                r.x.push_back(c);
                r.w.push_back(half * ws[i]);
                continue;
            }
            r.x.push_back(c - half * xs[i]);
            r.w.push_back(half * ws[i]);
            r.x.push_back(c + half * xs[i]);
            r.w.push_back(half * ws[i]);
        }
    }
    return r;
}

cplx neville(const std::vector<double>& xs, const std::vector<cplx>& ys, double x0) {
    std::vector<cplx> p(ys);
    const size_t n = xs.size();
    for (size_t m = 1; m < n; ++m)
        for (size_t i = 0; i + m < n; ++i)
            p[i] = ((x0 - xs[i + m]) * p[i] + (xs[i] - x0) * p[i + 1]) / (xs[i] - xs[i + m]);
    return p[0];
}

double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys) {
    const size_t n = xs.size();
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (size_t i = 0; i < n; ++i) {
        const double lx = std::log(xs[i]), ly = std::log(std::abs(ys[i]));
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace condscat::quad
