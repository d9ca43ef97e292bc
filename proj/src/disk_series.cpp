#include "condscat/disk_series.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "condscat/special.hpp"

namespace condscat {
namespace {

void check_plane_wave(const IncidentField& inc) {
    if (inc.kind != IncidentField::Kind::plane_wave) throw InputError("disk series needs a plane-wave incidence");
}

int default_trunc(const std::vector<double>& radii, const std::vector<cplx>& q, double k) {
    double kmax = k;
    for (const auto& v : q) kmax = std::max(kmax, std::abs(region_wavenumber(k, v)));
    return int(std::ceil(kmax * radii.front())) + 20;
}

// far field from the exterior outgoing coefficients a_n of H_n(kr) e^{in(theta - theta_d)}
FarFieldPattern assemble(const std::vector<cplx>& a, int M, double k, const IncidentField& inc,
                         const std::vector<double>& angles) {
    const double td = std::atan2(inc.direction.y, inc.direction.x);
    const cplx pre = std::sqrt(2.0 / (pi * k)) * std::exp(-0.25 * pi * I);
    FarFieldPattern p;
    p.angles = angles;
    for (double t : angles) {
        cplx sum = 0.0;
        for (int n = -M; n <= M; ++n) sum += a[size_t(n + M)] * std::pow(-I, n) * std::exp(I * (double(n) * (t - td)));
        p.values.push_back(inc.amplitude * pre * sum);
    }
    return p;
}

}  // namespace

std::vector<Vec2> regular_polygon(int sides, double radius, Vec2 center) {
    std::vector<Vec2> v;
    for (int i = 0; i < sides; ++i) v.push_back(center + polar_point(radius, 2 * pi * i / sides));
    return v;
}

FarFieldPattern disk_series_oracle(const std::vector<double>& radii, const std::vector<cplx>& q,
                                   const std::vector<cplx>& lambda, double k, const IncidentField& inc, int m_trunc,
                                   const std::vector<double>& angles) {
    check_plane_wave(inc);
    const size_t L = radii.size();
    if (L == 0 || q.size() != L || lambda.size() != L) throw InputError("disk series: inconsistent layer data");
    for (size_t l = 0; l + 1 < L; ++l)
        if (!(radii[l] > radii[l + 1])) throw InputError("disk series: radii must decrease strictly");
    const int M = m_trunc > 0 ? m_trunc : default_trunc(radii, q, k);
    std::vector<cplx> kap(L + 1);
    kap[0] = k;
    for (size_t l = 0; l < L; ++l) kap[l + 1] = region_wavenumber(k, q[l]);

    std::vector<cplx> a(size_t(2 * M + 1));
    const int dim = int(2 * L);
    for (int n = -M; n <= M; ++n) {
        // unknown layout: region 0 -> [H], regions 1..L-1 -> [J, H], region L -> [J]
        auto col_of = [&](size_t region, int kind) {  // kind 0 = J, 1 = H
            if (region == 0) return 0;
            return int(2 * region - 1 + (kind == 1 ? 1 : 0));
        };
        Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(dim, dim);
        Eigen::VectorXcd b = Eigen::VectorXcd::Zero(dim);
        for (size_t l = 0; l < L; ++l) {
            const double R = radii[l];
            const size_t outer = l, inner = l + 1;
            const int rv = int(2 * l), rd = int(2 * l + 1);
            auto put = [&](size_t region, int kind, double sgn) {
                const cplx z = kap[region] * R;
                const cplx f = kind == 0 ? special::besselj(n, z) : special::hankel1(n, z);
                const cplx fp = kap[region] * (kind == 0 ? special::besselj_prime(n, z) : special::hankel1_prime(n, z));
                const int c = col_of(region, kind);
                A(rv, c) += sgn * f;
                A(rd, c) += sgn * (fp + (region == outer ? lambda[l] * f : cplx(0.0)));
            };
            if (outer == 0) {
                put(0, 1, 1.0);
                const cplx z = k * R;
                const cplx in = std::pow(I, n);
                b(rv) -= in * special::besselj(n, z);
                b(rd) -= in * (k * special::besselj_prime(n, z) + lambda[l] * special::besselj(n, z));
            } else {
                put(outer, 0, 1.0);
                put(outer, 1, 1.0);
            }
            put(inner, 0, -1.0);
            if (inner < L) put(inner, 1, -1.0);
        }
        // Ruiz equilibration: high modes mix entries spanning hundreds of decades
        Eigen::VectorXd cs = Eigen::VectorXd::Ones(dim);
        for (int it = 0; it < 40; ++it) {
            const Eigen::VectorXd r = A.rowwise().lpNorm<Eigen::Infinity>().cwiseSqrt();
            const Eigen::VectorXd c = A.colwise().lpNorm<Eigen::Infinity>().transpose().cwiseSqrt();
            for (int i = 0; i < dim; ++i)
                if (r(i) > 0) {
                    A.row(i) /= r(i);
                    b(i) /= r(i);
                }
            for (int j = 0; j < dim; ++j)
                if (c(j) > 0) {
                    A.col(j) /= c(j);
                    cs(j) *= c(j);
                }
        }
        Eigen::FullPivLU<Eigen::MatrixXcd> lu(A);
        if (!lu.isInvertible() || !(lu.rcond() > 1e-15))
            throw NumericalError("disk series: singular system for mode " + std::to_string(n));
        const Eigen::VectorXcd x = lu.solve(b);
        a[size_t(n + M)] = x(0) / cs(0);
    }
    return assemble(a, M, k, inc, angles);
}

FarFieldPattern disk_series_textbook(double radius, cplx q, double k, const IncidentField& inc, int m_trunc,
                                     const std::vector<double>& angles) {
    check_plane_wave(inc);
    const int M = m_trunc > 0 ? m_trunc : default_trunc({radius}, {q}, k);
    const cplx kap = region_wavenumber(k, q);
    std::vector<cplx> a(size_t(2 * M + 1));
    for (int n = -M; n <= M; ++n) {
        const cplx zk = k * radius, zq = kap * radius;
        const cplx J = special::besselj(n, zk), Jp = special::besselj_prime(n, zk);
        const cplx Jq = special::besselj(n, zq), Jqp = special::besselj_prime(n, zq);
        const cplx H = special::hankel1(n, zk), Hp = special::hankel1_prime(n, zk);
        a[size_t(n + M)] = -std::pow(I, n) * (kap * Jqp * J - k * Jq * Jp) / (kap * Jqp * H - k * Jq * Hp);
    }
    return assemble(a, M, k, inc, angles);
}

}  // namespace condscat
