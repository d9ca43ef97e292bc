#include "condscat/forward.hpp"

#include <cmath>

#include "condscat/special.hpp"

namespace condscat {
namespace {

constexpr double euler_gamma = 0.57721566490153286061;

struct KernelPair {
    cplx S;  // single layer acting on y = w * density (quadrature included)
    cplx K;  // normal derivative (in y) of the fundamental solution, without weight
};

KernelPair kernel_pair(const BoundaryMesh& m, const RegionBoundary& rb, cplx kappa, int a, int b) {
    const int g = rb.nodes[size_t(a)], h = rb.nodes[size_t(b)];
    const bool same_loop = rb.loop[size_t(a)] == rb.loop[size_t(b)];
    const RegionLoop& loop = rb.loops[size_t(rb.loop[size_t(a)])];
    const double N = double(loop.nodes.size());
    KernelPair kp{};
    if (g == h) {
        const double speed = m.w[size_t(g)] * N / (2 * pi);
        const cplx M2 = 0.25 * I - euler_gamma / (2 * pi) - std::log(kappa * speed / 2.0) / (2 * pi);
        kp.S = loop.log_weights[0] * (-1.0 / (4 * pi)) * N / (2 * pi) + M2;
        return kp;
    }
    const Vec2 d = m.x[size_t(g)] - m.x[size_t(h)];
    const double r = norm(d);
    const auto k01 = special::kernel01(kappa * r);
    const cplx Phi = 0.25 * I * k01.h0;
    if (m.edge_of[size_t(g)] != m.edge_of[size_t(h)])
        kp.K = 0.25 * I * kappa * k01.h1 * dot(d, m.normal[size_t(h)]) / r;
    if (!same_loop) {
        kp.S = Phi;
        return kp;
    }
    const int Ni = int(loop.nodes.size());
    const int off = ((rb.pos[size_t(a)] - rb.pos[size_t(b)]) % Ni + Ni) % Ni;
    const double sn = std::sin(pi * off / N);
    const cplx M1 = -k01.j0 / (4 * pi);
    const cplx M2 = Phi - M1 * std::log(4 * sn * sn);
    kp.S = loop.log_weights[size_t(off)] * M1 * N / (2 * pi) + M2;
    return kp;
}

void assemble_row(const BoundaryMesh& m, int row, Eigen::MatrixXcd& A, Eigen::MatrixXcd& G1, Eigen::MatrixXcd& G2,
                  Eigen::Index out) {
    const int g = row / 2, side = row % 2;
    const MeshEdge& edge = m.edges[size_t(m.edge_of[size_t(g)])];
    const int region = side == 0 ? edge.minus : edge.plus;
    const RegionBoundary& rb = m.regions[size_t(region)];
    const int a = side == 0 ? m.minus_slot[size_t(g)] : m.plus_slot[size_t(g)];
    const double k0 = m.wavenumber();
    for (size_t b = 0; b < rb.nodes.size(); ++b) {
        const int h = rb.nodes[b];
        const double s = rb.sign[b];
        const bool plus = rb.sign[b] < 0;
        const cplx lam = m.edges[size_t(m.edge_of[size_t(h)])].lambda;
        const double wh = m.w[size_t(h)];
        const KernelPair kr = kernel_pair(m, rb, rb.kappa, a, int(b));
        A(out, 2 * h) += s * kr.K * wh;
        A(out, 2 * h + 1) += -kr.S * s;
        if (plus && lam != 0.0) {
            A(out, 2 * h) += kr.S * s * lam * wh;
            G1(out, h) += -kr.S * s * lam * wh;
        }
        if (rb.bounded) {
            const KernelPair kk = kernel_pair(m, rb, k0, a, int(b));
            G1(out, h) += s * wh * (kk.K - kr.K);
            G2(out, h) += s * (kr.S - kk.S);
        }
    }
    A(out, 2 * g) += 0.5;
}

struct Traces {
    Eigen::VectorXcd ui, dui;  // incident trace, w * normal derivative
};

Traces incident_traces(const BoundaryMesh& m, const IncidentField& inc) {
    const Eigen::Index N = Eigen::Index(m.node_count());
    Traces t{Eigen::VectorXcd::Zero(N), Eigen::VectorXcd::Zero(N)};
    const double k = m.wavenumber();
    for (Eigen::Index h = 0; h < N; ++h) {
        const auto f = incident_eval(inc, k, m.x[size_t(h)]);
        const Vec2 n = m.normal[size_t(h)];
        t.ui(h) = f.value;
        t.dui(h) = m.w[size_t(h)] * (f.grad[0] * n.x + f.grad[1] * n.y);
    }
    return t;
}

}  // namespace

RowBlock assemble_rows(const BoundaryMesh& m, const std::vector<int>& rows, Exec exec) {
    const Eigen::Index N = Eigen::Index(m.node_count());
    const Eigen::Index R = Eigen::Index(rows.size());
    RowBlock rb{Eigen::MatrixXcd::Zero(R, 2 * N), Eigen::MatrixXcd::Zero(R, N), Eigen::MatrixXcd::Zero(R, N)};
    if (exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 4)
        for (Eigen::Index i = 0; i < R; ++i) assemble_row(m, rows[size_t(i)], rb.A, rb.G1, rb.G2, i);
    } else {
        for (Eigen::Index i = 0; i < R; ++i) assemble_row(m, rows[size_t(i)], rb.A, rb.G1, rb.G2, i);
    }
    return rb;
}

struct ScatteringSolver::Impl {
    bool circulant = false;
    // dense path
    Eigen::MatrixXcd A, G1, G2;
    Eigen::PartialPivLU<Eigen::MatrixXcd> lu;
    // circulant path, per Fourier index
    int m = 1;
    std::vector<int> local_to_node;  // sector-0 local index -> node
    std::vector<Eigen::MatrixXcd> Ahat, G1hat, G2hat;
    std::vector<Eigen::PartialPivLU<Eigen::MatrixXcd>> lus;
    double condition = 0.0;
};

ScatteringSolver::ScatteringSolver(std::shared_ptr<const BoundaryMesh> mesh, SolveOptions opts)
    : mesh_(std::move(mesh)), opts_(opts), impl_(std::make_shared<Impl>()) {
    const BoundaryMesh& M = *mesh_;
    const int N = int(M.node_count());
    Impl& im = *impl_;
    if (opts_.use_symmetry && M.symmetry > 1) {
        im.circulant = true;
        im.m = M.symmetry;
        const int Bn = M.nodes_per_sector;
        im.local_to_node.assign(size_t(Bn), -1);
        for (int g = 0; g < N; ++g)
            if (M.sector_of_node[size_t(g)] == 0) im.local_to_node[size_t(M.local_of_node[size_t(g)])] = g;
        std::vector<int> rows;
        for (int L = 0; L < Bn; ++L) {
            rows.push_back(2 * im.local_to_node[size_t(L)]);
            rows.push_back(2 * im.local_to_node[size_t(L)] + 1);
        }
        const RowBlock rb = assemble_rows(M, rows, opts_.exec);
        im.Ahat.assign(size_t(im.m), Eigen::MatrixXcd::Zero(2 * Bn, 2 * Bn));
        im.G1hat.assign(size_t(im.m), Eigen::MatrixXcd::Zero(2 * Bn, Bn));
        im.G2hat.assign(size_t(im.m), Eigen::MatrixXcd::Zero(2 * Bn, Bn));
        im.lus.resize(size_t(im.m));
        std::vector<double> rc(size_t(im.m), 0.0);
        auto build = [&](int f) {
            auto& Ah = im.Ahat[size_t(f)];
            auto& G1h = im.G1hat[size_t(f)];
            auto& G2h = im.G2hat[size_t(f)];
            for (int h = 0; h < N; ++h) {
                const int d = M.sector_of_node[size_t(h)], L = M.local_of_node[size_t(h)];
                const cplx ph = std::exp(2.0 * pi * I * double((f * d) % im.m) / double(im.m));
                Ah.col(2 * L) += ph * rb.A.col(2 * h);
                Ah.col(2 * L + 1) += ph * rb.A.col(2 * h + 1);
                G1h.col(L) += ph * rb.G1.col(h);
                G2h.col(L) += ph * rb.G2.col(h);
            }
            im.lus[size_t(f)].compute(Ah);
            rc[size_t(f)] = im.lus[size_t(f)].rcond();
        };
        if (opts_.exec == Exec::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
            for (int f = 0; f < im.m; ++f) build(f);
        } else {
            for (int f = 0; f < im.m; ++f) build(f);
        }
        double worst = 0.0;
        for (double r : rc) worst = std::max(worst, r > 0 ? 1.0 / r : INFINITY);
        im.condition = worst;
    } else {
        std::vector<int> rows(size_t(2 * N));
        for (int i = 0; i < 2 * N; ++i) rows[size_t(i)] = i;
        RowBlock rb = assemble_rows(M, rows, opts_.exec);
        im.A = std::move(rb.A);
        im.G1 = std::move(rb.G1);
        im.G2 = std::move(rb.G2);
        im.lu.compute(im.A);
        const double r = im.lu.rcond();
        im.condition = r > 0 ? 1.0 / r : INFINITY;
    }
}

SolveResult ScatteringSolver::solve(const IncidentField& inc) const {
    const BoundaryMesh& M = *mesh_;
    const Impl& im = *impl_;
    const int N = int(M.node_count());
    const Traces t = incident_traces(M, inc);
    SolveResult sr;
    sr.unknowns = size_t(2 * N);
    sr.condition = im.condition;
    sr.ill_conditioned = !(im.condition <= 1e12);
    sr.symmetry_order = im.circulant ? im.m : 1;
    Eigen::VectorXcd x(2 * N);
    double res2 = 0.0, rhs2 = 0.0;
    if (!im.circulant) {
        const Eigen::VectorXcd b = im.G1 * t.ui + im.G2 * t.dui;
        x = im.lu.solve(b);
        res2 = (im.A * x - b).squaredNorm();
        rhs2 = b.squaredNorm();
    } else {
        const int m = im.m, Bn = M.nodes_per_sector;
        std::vector<Eigen::VectorXcd> vh(size_t(m), Eigen::VectorXcd::Zero(Bn)), dvh(size_t(m), Eigen::VectorXcd::Zero(Bn));
        for (int h = 0; h < N; ++h) {
            const int d = M.sector_of_node[size_t(h)], L = M.local_of_node[size_t(h)];
            for (int f = 0; f < m; ++f) {
                const cplx ph = std::exp(-2.0 * pi * I * double((f * d) % m) / double(m));
                vh[size_t(f)](L) += ph * t.ui(h);
                dvh[size_t(f)](L) += ph * t.dui(h);
            }
        }
        std::vector<Eigen::VectorXcd> xh(static_cast<size_t>(m));
        for (int f = 0; f < m; ++f) {
            const Eigen::VectorXcd b = im.G1hat[size_t(f)] * vh[size_t(f)] + im.G2hat[size_t(f)] * dvh[size_t(f)];
            xh[size_t(f)] = im.lus[size_t(f)].solve(b);
            res2 += (im.Ahat[size_t(f)] * xh[size_t(f)] - b).squaredNorm();
            rhs2 += b.squaredNorm();
        }
        for (int h = 0; h < N; ++h) {
            const int d = M.sector_of_node[size_t(h)], L = M.local_of_node[size_t(h)];
            cplx p = 0.0, q = 0.0;
            for (int f = 0; f < m; ++f) {
                const cplx ph = std::exp(2.0 * pi * I * double((f * d) % m) / double(m));
                p += ph * xh[size_t(f)](2 * L);
                q += ph * xh[size_t(f)](2 * L + 1);
            }
            x(2 * h) = p / double(m);
            x(2 * h + 1) = q / double(m);
        }
    }
    sr.residual = rhs2 > 0 ? std::sqrt(res2 / rhs2) : std::sqrt(res2);
    sr.converged = sr.residual <= opts_.tol && x.allFinite();
    sr.phi.resize(size_t(N));
    sr.y.resize(size_t(N));
    for (int h = 0; h < N; ++h) {
        sr.phi[size_t(h)] = x(2 * h);
        sr.y[size_t(h)] = x(2 * h + 1);
    }
    return sr;
}

SolveResult solve_scatter(const BoundaryMesh& mesh, const IncidentField& inc, const SolveOptions& opts) {
    auto shared = std::make_shared<const BoundaryMesh>(mesh);
    return ScatteringSolver(shared, opts).solve(inc);
}

namespace {

// adds G_kappa[f, g](x) with g given as w * (normal derivative along the region normal)
void add_layer(FieldSample& out, cplx kappa, Vec2 x, Vec2 y, Vec2 nuR, cplx f_w, cplx gw) {
    const Vec2 d = x - y;
    const double r = norm(d);
    const auto k01 = special::kernel01(kappa * r);
    const cplx Phi = 0.25 * I * k01.h0;
    const cplx dn = dot(d, nuR);
    const cplx D = 0.25 * I * kappa * k01.h1 * dn / r;
    out.value += Phi * gw - D * f_w;
    const cplx gPhi = -0.25 * I * kappa * k01.h1 / r;
    const cplx c1 = 0.25 * I * kappa * k01.h1 / r;
    const cplx c2 = 0.25 * I * kappa * dn * (kappa * k01.h0 - 2.0 * k01.h1 / r) / (r * r);
    out.grad[0] += gPhi * d.x * gw - (c1 * nuR.x + c2 * d.x) * f_w;
    out.grad[1] += gPhi * d.y * gw - (c1 * nuR.y + c2 * d.y) * f_w;
}

}  // namespace

FieldSample total_field(const BoundaryMesh& m, const IncidentField& inc, const SolveResult& sr, Vec2 x) {
    const RegionLabel lab = locate(m.medium, x);
    if (lab.kind == RegionLabel::Kind::interface) throw InputError("total field requested on an interface");
    const int region = lab.kind == RegionLabel::Kind::exterior ? 0 : lab.index;
    const RegionBoundary& rb = m.regions[size_t(region)];
    const double k = m.wavenumber();
    FieldSample out = incident_eval(inc, k, x);
    for (size_t b = 0; b < rb.nodes.size(); ++b) {
        const int h = rb.nodes[b];
        const double s = rb.sign[b];
        const Vec2 nuR = m.normal[size_t(h)] * s;
        const double wh = m.w[size_t(h)];
        const cplx lam = m.edges[size_t(m.edge_of[size_t(h)])].lambda;
        const auto fi = incident_eval(inc, k, m.x[size_t(h)]);
        const cplx ui = fi.value;
        cplx psi_w = sr.y[size_t(h)];
        if (s < 0) psi_w -= lam * wh * (sr.phi[size_t(h)] + ui);
        add_layer(out, rb.kappa, x, m.x[size_t(h)], nuR, sr.phi[size_t(h)] * wh, s * psi_w);
        if (rb.bounded) {
            const cplx dui_w = wh * (fi.grad[0] * nuR.x + fi.grad[1] * nuR.y);
            add_layer(out, rb.kappa, x, m.x[size_t(h)], nuR, ui * wh, dui_w);
            FieldSample neg;
            add_layer(neg, k, x, m.x[size_t(h)], nuR, ui * wh, dui_w);
            out.value -= neg.value;
            out.grad[0] -= neg.grad[0];
            out.grad[1] -= neg.grad[1];
        }
    }
    return out;
}

cplx total_field_at(const BoundaryMesh& m, const IncidentField& inc, const SolveResult& sr, Vec2 x) {
    return total_field(m, inc, sr, x).value;
}

bool near_boundary(const BoundaryMesh& m, Vec2 x) {
    for (size_t h = 0; h < m.node_count(); ++h)
        if (norm(x - m.x[h]) < 2.0 * m.w[h]) return true;
    return false;
}

std::vector<double> uniform_directions(int M) {
    if (M < 2) throw InputError("far-field grid needs at least 2 directions");
    std::vector<double> a(static_cast<size_t>(M));
    for (int i = 0; i < M; ++i) a[size_t(i)] = 2 * pi * i / M;
    return a;
}

FarFieldPattern far_field(const BoundaryMesh& m, const IncidentField& inc, const SolveResult& sr,
                          const std::vector<double>& angles, Exec exec) {
    const RegionBoundary& rb = m.regions[0];
    const double k = m.wavenumber();
    const cplx gamma = std::exp(0.25 * pi * I) / std::sqrt(8 * pi * k);
    std::vector<cplx> psiR(rb.nodes.size()), phiw(rb.nodes.size());
    std::vector<Vec2> nuR(rb.nodes.size());
    for (size_t b = 0; b < rb.nodes.size(); ++b) {
        const int h = rb.nodes[b];
        const double s = rb.sign[b];
        const double wh = m.w[size_t(h)];
        const cplx lam = m.edges[size_t(m.edge_of[size_t(h)])].lambda;
        cplx psi_w = sr.y[size_t(h)];
        if (s < 0) psi_w -= lam * wh * (sr.phi[size_t(h)] + incident_eval(inc, k, m.x[size_t(h)]).value);
        psiR[b] = s * psi_w;
        phiw[b] = sr.phi[size_t(h)] * wh;
        nuR[b] = m.normal[size_t(h)] * s;
    }
    FarFieldPattern p;
    p.angles = angles;
    p.values.assign(angles.size(), 0.0);
    auto eval = [&](size_t i) {
        const Vec2 xh = polar_point(1.0, angles[i]);
        cplx sum = 0.0;
        for (size_t b = 0; b < rb.nodes.size(); ++b) {
            const Vec2 y = m.x[size_t(rb.nodes[b])];
            sum += (psiR[b] + I * k * dot(xh, nuR[b]) * phiw[b]) * std::exp(-I * (k * dot(xh, y)));
        }
        p.values[i] = gamma * sum;
    };
    if (exec == Exec::parallel) {
#pragma omp parallel for
        for (long i = 0; i < long(angles.size()); ++i) eval(size_t(i));
    } else {
        for (size_t i = 0; i < angles.size(); ++i) eval(i);
    }
    return p;
}

double farfield_diff(const FarFieldPattern& p1, const FarFieldPattern& p2) {
    if (p1.angles.size() != p2.angles.size()) throw InputError("far-field grids differ");
    for (size_t i = 0; i < p1.angles.size(); ++i)
        if (std::abs(p1.angles[i] - p2.angles[i]) > 1e-14) throw InputError("far-field grids differ");
    double num = 0.0, den = 0.0;
    for (size_t i = 0; i < p1.values.size(); ++i) {
        num += std::norm(p1.values[i] - p2.values[i]);
        den += std::norm(p1.values[i]);
    }
    return std::sqrt(num) / std::max(std::sqrt(den), 1e-300);
}

}  // namespace condscat
