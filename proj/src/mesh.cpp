#include "condscat/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

namespace condscat {
namespace {

struct LoopSpec {
    std::vector<std::pair<int, bool>> edges;  // edge id, reversed
};

void place_nodes(BoundaryMesh& m) {
    const int n = m.spec.nodes_per_edge;
    for (size_t e = 0; e < m.edges.size(); ++e) {
        const Vec2 a = m.edges[e].a, b = m.edges[e].b;
        const double L = norm(b - a);
        const Vec2 t = (b - a) / L;
        for (int j = 0; j < n; ++j) {
            double d = 0.0;
            const double xi = grading_map((j + 0.5) / n, m.spec.grading, &d);
            m.x.push_back(a + (b - a) * xi);
            m.normal.push_back({t.y, -t.x});
            m.w.push_back(std::max(d * L / n, 1e-300));
            m.edge_of.push_back(int(e));
        }
    }
}

void add_region(BoundaryMesh& m, int region, cplx kappa, bool bounded, const std::vector<LoopSpec>& loops) {
    const int n = m.spec.nodes_per_edge;
    RegionBoundary rb;
    rb.region = region;
    rb.kappa = kappa;
    rb.bounded = bounded;
    for (size_t l = 0; l < loops.size(); ++l) {
        RegionLoop loop;
        for (const auto& [e, rev] : loops[l].edges)
            for (int j = 0; j < n; ++j) loop.nodes.push_back(e * n + (rev ? n - 1 - j : j));
        loop.log_weights = log_split_weights(int(loop.nodes.size()));
        for (size_t p = 0; p < loop.nodes.size(); ++p) {
            const int g = loop.nodes[p];
            const MeshEdge& edge = m.edges[size_t(m.edge_of[size_t(g)])];
            const int slot = int(rb.nodes.size());
            rb.nodes.push_back(g);
            rb.loop.push_back(int(l));
            rb.pos.push_back(int(p));
            if (edge.minus == region) {
                rb.sign.push_back(1);
                m.minus_slot[size_t(g)] = slot;
            } else {
                rb.sign.push_back(-1);
                m.plus_slot[size_t(g)] = slot;
            }
        }
        rb.loops.push_back(std::move(loop));
    }
    if (m.regions.size() <= size_t(region)) m.regions.resize(size_t(region) + 1);
    m.regions[size_t(region)] = std::move(rb);
}

void build_nest(BoundaryMesh& m, const NestMedium& med) {
    const auto& layers = med.partition.layers;
    std::vector<LoopSpec> loops(layers.size());
    for (size_t l = 0; l < layers.size(); ++l) {
        const Polygon& p = layers[l];
        for (size_t i = 0; i < p.size(); ++i) {
            loops[l].edges.push_back({int(m.edges.size()), false});
            m.edges.push_back({p.edge_start(i), p.edge_end(i), int(l + 1), int(l), med.lambda[l], int(l + 1)});
        }
    }
    place_nodes(m);
    m.minus_slot.assign(m.x.size(), -1);
    m.plus_slot.assign(m.x.size(), -1);
    add_region(m, 0, med.k, false, {loops[0]});
    for (size_t l = 0; l < layers.size(); ++l) {
        std::vector<LoopSpec> own{loops[l]};
        if (l + 1 < layers.size()) own.push_back(loops[l + 1]);
        add_region(m, int(l + 1), region_wavenumber(med.k, med.q[l]), true, own);
    }
}

void build_cell(BoundaryMesh& m, const CellMedium& med) {
    const auto& cells = med.partition.cells;
    const Polygon& hull = med.partition.hull;
    const double tol = 1e3 * hull.tolerance();
    std::vector<Vec2> all_vertices;
    for (const auto& c : cells)
        for (const auto& v : c.vertices()) all_vertices.push_back(v);

    auto same = [&](Vec2 p, Vec2 q) { return norm(p - q) <= tol; };
    std::vector<LoopSpec> cell_loops(cells.size());
    for (size_t c = 0; c < cells.size(); ++c) {
        const Polygon& poly = cells[c];
        for (size_t i = 0; i < poly.size(); ++i) {
            const Vec2 a = poly.edge_start(i), b = poly.edge_end(i);
            const Vec2 d = b - a;
            const double L2 = dot(d, d);
            std::vector<double> cuts{0.0, 1.0};
            for (const auto& v : all_vertices) {
                if (segment_distance(v, a, b) > tol) continue;
                const double t = dot(v - a, d) / L2;
                if (t * std::sqrt(L2) > tol && (1 - t) * std::sqrt(L2) > tol) cuts.push_back(t);
            }
            std::sort(cuts.begin(), cuts.end());
            cuts.erase(std::unique(cuts.begin(), cuts.end(),
                                   [&](double u, double v) { return std::abs(u - v) * std::sqrt(L2) <= tol; }),
                       cuts.end());
            for (size_t k = 0; k + 1 < cuts.size(); ++k) {
                const Vec2 p = a + d * cuts[k], q = a + d * cuts[k + 1];
                int found = -1;
                bool rev = false;
                for (size_t e = 0; e < m.edges.size(); ++e) {
                    if (same(m.edges[e].a, q) && same(m.edges[e].b, p)) {
                        found = int(e);
                        rev = true;
                        break;
                    }
                }
                if (found >= 0) {
                    m.edges[size_t(found)].plus = int(c + 1);
                } else {
                    found = int(m.edges.size());
                    m.edges.push_back({p, q, int(c + 1), 0, med.lambda_star, int(c + 1)});
                }
                cell_loops[c].edges.push_back({found, rev});
            }
        }
    }
    // exterior loop: edges with the exterior on the plus side, chained head to tail
    LoopSpec outer;
    std::vector<int> free;
    for (size_t e = 0; e < m.edges.size(); ++e)
        if (m.edges[e].plus == 0) free.push_back(int(e));
    if (!free.empty()) {
        std::vector<bool> used(m.edges.size(), false);
        int cur = free.front();
        for (size_t step = 0; step < free.size(); ++step) {
            outer.edges.push_back({cur, false});
            used[size_t(cur)] = true;
            int next = -1;
            for (int e : free)
                if (!used[size_t(e)] && same(m.edges[size_t(e)].a, m.edges[size_t(cur)].b)) next = e;
            if (next < 0) break;
            cur = next;
        }
        if (outer.edges.size() != free.size()) throw InputError("cell partition boundary is not a single loop");
    }
    place_nodes(m);
    m.minus_slot.assign(m.x.size(), -1);
    m.plus_slot.assign(m.x.size(), -1);
    add_region(m, 0, med.k, false, {outer});
    for (size_t c = 0; c < cells.size(); ++c)
        add_region(m, int(c + 1), region_wavenumber(med.k, med.q[c]), true, {cell_loops[c]});
}

void detect_symmetry(BoundaryMesh& m, const NestMedium& med) {
    const auto& layers = med.partition.layers;
    int g = 0;
    for (const auto& p : layers) g = std::gcd(g, int(p.size()));
    const Vec2 c = layers.front().centroid();
    const double tol = 1e-9 * layers.front().bbox_diagonal();
    int order = 1;
    for (int cand = g; cand >= 2 && order == 1; --cand) {
        if (g % cand != 0) continue;
        bool ok = true;
        for (const auto& p : layers) {
            const size_t shift = p.size() / size_t(cand);
            for (size_t i = 0; i < p.size() && ok; ++i)
                ok = norm(c + rotate(p.vertex(i) - c, 2 * pi / cand) - p.vertex(i + shift)) <= tol;
        }
        if (ok) order = cand;
    }
    m.symmetry = order;
    m.center = c;
    const int n = m.spec.nodes_per_edge;
    m.sector_of_node.assign(m.x.size(), 0);
    m.local_of_node.assign(m.x.size(), 0);
    int offset = 0, edge_base = 0;
    for (const auto& p : layers) {
        const int E = int(p.size()), per = E / order;
        for (int i = 0; i < E; ++i)
            for (int j = 0; j < n; ++j) {
                const int gnode = (edge_base + i) * n + j;
                m.sector_of_node[size_t(gnode)] = i / per;
                m.local_of_node[size_t(gnode)] = offset + (i % per) * n + j;
            }
        offset += per * n;
        edge_base += E;
    }
    m.nodes_per_sector = offset;
}

}  // namespace

double BoundaryMesh::wavenumber() const { return condscat::wavenumber(medium); }

double grading_map(double sigma, int p, double* derivative) {
    const double s = 2 * pi * sigma;
    auto v = [p](double t) {
        const double u = (pi - t) / pi;
        return (1.0 / p - 0.5) * u * u * u + (1.0 / p) * (t - pi) / pi + 0.5;
    };
    auto dv = [p](double t) {
        const double u = (pi - t) / pi;
        return -(1.0 / p - 0.5) * 3 * u * u / pi + 1.0 / (p * pi);
    };
    const double va = v(s), vb = v(2 * pi - s);
    const double a = std::pow(va, p), b = std::pow(vb, p);
    if (derivative) {
        const double da = p * std::pow(va, p - 1) * dv(s);
        const double db = -p * std::pow(vb, p - 1) * dv(2 * pi - s);
        *derivative = (da * (a + b) - a * (da + db)) / ((a + b) * (a + b)) * 2 * pi;
    }
    return a / (a + b);
}

std::vector<double> log_split_weights(int N) {
    std::vector<double> R(size_t(N), 0.0);
    const bool even = N % 2 == 0;
    const int M = even ? N / 2 : (N - 1) / 2;
    const int top = even ? M - 1 : M;
    for (int d = 0; d < N; ++d) {
        double sum = 0.0;
        for (int k = 1; k <= top; ++k) sum += std::cos(2 * pi * double(k) * d / N) / k;
        double r = -(4 * pi / N) * sum;
        if (even) r -= (2 * pi / (double(N) * M)) * ((d % 2 == 0) ? 1.0 : -1.0);
        R[size_t(d)] = r;
    }
    return R;
}

BoundaryMesh build_mesh(const Medium& med, const MeshSpec& spec) {
    if (spec.nodes_per_edge < 2) throw InputError("mesh needs at least 2 nodes per edge");
    if (spec.grading < 2 || spec.grading > 8) throw InputError("grading order must lie in [2, 8]");
    BoundaryMesh m;
    m.medium = med;
    m.spec = spec;
    if (const auto* n = std::get_if<NestMedium>(&med)) {
        build_nest(m, *n);
        detect_symmetry(m, *n);
    } else {
        build_cell(m, std::get<CellMedium>(med));
        m.sector_of_node.assign(m.x.size(), 0);
        m.local_of_node.resize(m.x.size());
        std::iota(m.local_of_node.begin(), m.local_of_node.end(), 0);
        m.nodes_per_sector = int(m.x.size());
    }
    return m;
}

}  // namespace condscat
