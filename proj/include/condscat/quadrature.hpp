#pragma once

#include <functional>
#include <vector>

#include "condscat/types.hpp"

namespace condscat::quad {

struct Result {
    cplx value{};
    double error = 0.0;
};

// adaptive Gauss-Kronrod (15 point) on [a, b]
Result adaptive(const std::function<cplx(double)>& f, double a, double b, double tol, unsigned max_depth = 18);
double adaptive_real(const std::function<double(double)>& f, double a, double b, double tol, double* err = nullptr,
                     unsigned max_depth = 18);

struct Rule {
    std::vector<double> x;
    std::vector<double> w;
};

// composite 20-point Gauss-Legendre with `panels` equal panels
Rule gauss_legendre(double a, double b, int panels);

// value at x0 of the polynomial through (xs, ys) (Neville)
cplx neville(const std::vector<double>& xs, const std::vector<cplx>& ys, double x0 = 0.0);

// least-squares slope of log|y| against log x
double loglog_slope(const std::vector<double>& xs, const std::vector<double>& ys);

}  // namespace condscat::quad
