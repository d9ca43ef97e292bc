#pragma once

#include "condscat/types.hpp"

// Integer-order Bessel and Hankel functions of complex argument.
// Real positive arguments are forwarded to the standard library.
namespace condscat::special {

cplx besselj(int n, cplx z);
cplx bessely(int n, cplx z);
cplx hankel1(int n, cplx z);

// derivative with respect to z
cplx besselj_prime(int n, cplx z);
cplx hankel1_prime(int n, cplx z);

// H0, H1 and J0 together (the Nystrom kernels need all three)
struct Kernel01 {
    cplx h0, h1, j0;
};
Kernel01 kernel01(cplx z);

}  // namespace condscat::special
