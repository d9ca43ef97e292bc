#include "condscat/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace condscat {
namespace {

double orient(Vec2 a, Vec2 b, Vec2 c) { return cross(b - a, c - a); }

// closed-segment intersection with absolute tolerance
bool segments_touch(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    if (segment_distance(a, c, d) <= tol || segment_distance(b, c, d) <= tol) return true;
    if (segment_distance(c, a, b) <= tol || segment_distance(d, a, b) <= tol) return true;
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0)) && o1 != 0 && o2 != 0 && o3 != 0 && o4 != 0;
}

// crossing at a point interior to both segments, segments not parallel
bool segments_cross_properly(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    const double o1 = orient(a, b, c), o2 = orient(a, b, d), o3 = orient(c, d, a), o4 = orient(c, d, b);
    const double la = norm(b - a), lc = norm(d - c);
    if (std::abs(o1) <= tol * la || std::abs(o2) <= tol * la) return false;
    if (std::abs(o3) <= tol * lc || std::abs(o4) <= tol * lc) return false;
    return ((o1 > 0) != (o2 > 0)) && ((o3 > 0) != (o4 > 0));
}

// length of the collinear overlap of two segments (0 if not collinear)
double collinear_overlap(Vec2 a, Vec2 b, Vec2 c, Vec2 d, double tol) {
    if (segment_distance(c, a, b) > tol && segment_distance(d, a, b) > tol && segment_distance(a, c, d) > tol &&
        segment_distance(b, c, d) > tol)
        return 0.0;
    const Vec2 u = b - a;
    const double L = norm(u);
    const Vec2 e = u / L;
    if (std::abs(cross(e, c - a)) > tol || std::abs(cross(e, d - a)) > tol) return 0.0;
    double t0 = dot(c - a, e), t1 = dot(d - a, e);
    if (t0 > t1) std::swap(t0, t1);
    return std::max(0.0, std::min(L, t1) - std::max(0.0, t0));
}

std::string pair_label(size_t i, size_t j) {
    std::ostringstream os;
    os << "cells " << i + 1 << "," << j + 1;
    return os.str();
}

// points just inside the polygon next to every edge midpoint
std::vector<Vec2> interior_probes(const Polygon& p) {
    std::vector<Vec2> out;
    for (size_t i = 0; i < p.size(); ++i) {
        const Vec2 a = p.edge_start(i), b = p.edge_end(i);
        const Vec2 t = b - a;
        const Vec2 inward = Vec2{-t.y, t.x} / norm(t);
        out.push_back((a + b) * 0.5 + inward * (1e-6 * norm(t)));
    }
    return out;
}

bool edge_on_polygon_boundary(Vec2 a, Vec2 b, const Polygon& hull) {
    const double tol = hull.tolerance();
    for (size_t k = 0; k < hull.size(); ++k)
        if (segment_distance(a, hull.edge_start(k), hull.edge_end(k)) <= tol &&
            segment_distance(b, hull.edge_start(k), hull.edge_end(k)) <= tol)
            return true;
    return false;
}

}  // namespace

double segment_distance(Vec2 x, Vec2 a, Vec2 b) {
    const Vec2 d = b - a;
    const double L2 = dot(d, d);
    double t = L2 > 0 ? dot(x - a, d) / L2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return norm(x - (a + d * t));
}

Polygon::Polygon(std::vector<Vec2> vertices, VertexPolicy policy) : v_(std::move(vertices)) {
    const size_t n = v_.size();
    if (n < 3) throw InputError("polygon needs at least 3 vertices");
    for (const auto& p : v_)
        if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw InputError("polygon vertex is not finite");
    const double tol = tolerance();
    for (size_t i = 0; i < n; ++i)
        if (norm(vertex(i + 1) - vertex(i)) <= tol)
            throw InputError("polygon vertices " + std::to_string(i + 1) + " and " + std::to_string((i + 1) % n + 1) +
                             " coincide");
    double a = 0.0;
    for (size_t i = 0; i < n; ++i) a += cross(vertex(i), vertex(i + 1));
    if (std::abs(0.5 * a) <= tol * tol) throw InputError("polygon has zero area");
    if (a < 0) std::reverse(v_.begin(), v_.end());
    for (size_t i = 0; i < n; ++i) {
        const Vec2 p = vertex(i + n - 1), q = vertex(i), r = vertex(i + 1);
        const double c = cross(q - p, r - q);
        const bool straight = std::abs(c) <= 1e-12 * norm(q - p) * norm(r - q);
        if (straight && dot(q - p, r - q) < 0)
            throw InputError("polygon folds back at vertex " + std::to_string(i + 1));
        if (straight && policy == VertexPolicy::strict)
            throw InputError("polygon vertex " + std::to_string(i + 1) + " is collinear with its neighbours");
    }
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            if (j == i + 1 || (i == 0 && j == n - 1)) continue;
            if (segments_touch(vertex(i), vertex(i + 1), vertex(j), vertex(j + 1), tol))
                throw InputError("polygon is not simple: edges " + std::to_string(i + 1) + " and " +
                                 std::to_string(j + 1) + " intersect");
        }
}

double Polygon::area() const {
    double a = 0.0;
    for (size_t i = 0; i < v_.size(); ++i) a += cross(vertex(i), vertex(i + 1));
    return 0.5 * a;
}

bool Polygon::convex() const {
    for (size_t i = 0; i < v_.size(); ++i) {
        const Vec2 p = vertex(i + v_.size() - 1), q = vertex(i), r = vertex(i + 1);
        if (cross(q - p, r - q) < -1e-12 * norm(q - p) * norm(r - q)) return false;
    }
    return true;
}

Vec2 Polygon::centroid() const {
    double cx = 0, cy = 0;
    for (size_t i = 0; i < v_.size(); ++i) {
        const Vec2 p = vertex(i), q = vertex(i + 1);
        const double c = cross(p, q);
        cx += (p.x + q.x) * c;
        cy += (p.y + q.y) * c;
    }
    const double a6 = 6.0 * area();
    return {cx / a6, cy / a6};
}

double Polygon::bbox_diagonal() const {
    double x0 = v_[0].x, x1 = v_[0].x, y0 = v_[0].y, y1 = v_[0].y;
    for (const auto& p : v_) {
        x0 = std::min(x0, p.x);
        x1 = std::max(x1, p.x);
        y0 = std::min(y0, p.y);
        y1 = std::max(y1, p.y);
    }
    return std::hypot(x1 - x0, y1 - y0);
}

double Polygon::diameter() const {
    double d = 0.0;
    for (const auto& p : v_)
        for (const auto& q : v_) d = std::max(d, norm(p - q));
    return d;
}

double Polygon::perimeter() const {
    double L = 0.0;
    for (size_t i = 0; i < v_.size(); ++i) L += norm(edge_end(i) - edge_start(i));
    return L;
}

double Polygon::tolerance() const { return 1e-12 * bbox_diagonal(); }

double Polygon::boundary_distance(Vec2 x) const {
    double d = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < v_.size(); ++i) d = std::min(d, segment_distance(x, edge_start(i), edge_end(i)));
    return d;
}

bool Polygon::contains(Vec2 x) const {
    bool in = false;
    const size_t n = v_.size();
    for (size_t i = 0, j = n - 1; i < n; j = i++) {
        const Vec2 a = v_[i], b = v_[j];
        if ((a.y > x.y) != (b.y > x.y)) {
            const double xc = a.x + (x.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (x.x < xc) in = !in;
        }
    }
    return in;
}

ValidationReport validate_nest(const NestPartition& p) {
    ValidationReport r;
    if (p.layers.empty()) {
        r.violations.push_back("partition has no layers");
        return r;
    }
    for (size_t l = 0; l < p.layers.size(); ++l)
        if (!p.layers[l].convex()) r.violations.push_back("layer " + std::to_string(l + 1) + " not convex");
    for (size_t l = 0; l + 1 < p.layers.size(); ++l) {
        const Polygon& outer = p.layers[l];
        const Polygon& inner = p.layers[l + 1];
        bool inside = true;
        for (const auto& v : inner.vertices())
            if (!outer.strictly_inside(v)) inside = false;
        for (size_t i = 0; i < inner.size() && inside; ++i)
            for (size_t j = 0; j < outer.size(); ++j)
                if (segments_touch(inner.edge_start(i), inner.edge_end(i), outer.edge_start(j), outer.edge_end(j),
                                   outer.tolerance()))
                    inside = false;
        if (!inside)
            r.violations.push_back("layer " + std::to_string(l + 2) + " not inside layer " + std::to_string(l + 1));
    }
    return r;
}

ValidationReport validate_cell(const CellPartition& p) {
    ValidationReport r;
    const double tol = p.hull.tolerance();
    const size_t n = p.cells.size();
    if (n == 0) {
        r.violations.push_back("partition has no cells");
        return r;
    }
    std::vector<std::vector<Vec2>> probes;
    for (const auto& c : p.cells) probes.push_back(interior_probes(c));

    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j) {
            const Polygon &A = p.cells[i], &B = p.cells[j];
            bool overlap = false;
            for (size_t a = 0; a < A.size() && !overlap; ++a)
                for (size_t b = 0; b < B.size() && !overlap; ++b)
                    overlap = segments_cross_properly(A.edge_start(a), A.edge_end(a), B.edge_start(b), B.edge_end(b),
                                                      tol);
            for (const auto& v : A.vertices()) overlap = overlap || B.strictly_inside(v);
            for (const auto& v : B.vertices()) overlap = overlap || A.strictly_inside(v);
            for (const auto& v : probes[i]) overlap = overlap || B.strictly_inside(v);
            for (const auto& v : probes[j]) overlap = overlap || A.strictly_inside(v);
            if (overlap) {
                r.violations.push_back(pair_label(i, j) + " overlap");
                continue;
            }
            double shared = 0.0;
            bool touch = false;
            for (size_t a = 0; a < A.size(); ++a)
                for (size_t b = 0; b < B.size(); ++b) {
                    shared += collinear_overlap(A.edge_start(a), A.edge_end(a), B.edge_start(b), B.edge_end(b), tol);
                    touch = touch ||
                            segments_touch(A.edge_start(a), A.edge_end(a), B.edge_start(b), B.edge_end(b), tol);
                }
            if (touch && shared <= tol) r.notes.push_back(pair_label(i, j) + " touch at a single point");
        }

    double area = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const Polygon& c = p.cells[i];
        area += c.area();
        bool inside = true;
        for (const auto& v : c.vertices())
            if (!p.hull.contains(v) && p.hull.boundary_distance(v) > tol) inside = false;
        for (const auto& v : probes[i])
            if (!p.hull.strictly_inside(v)) inside = false;
        if (!inside) r.violations.push_back("cell " + std::to_string(i + 1) + " extends outside the hull");
    }
    if (std::abs(area - p.hull.area()) > 1e-9 * p.hull.area()) r.violations.push_back("cells do not cover the hull");

    for (size_t i = 0; i < n; ++i) {
        const Polygon& c = p.cells[i];
        bool found = false;
        for (size_t v = 0; v < c.size() && !found; ++v) {
            const Vec2 prev = c.vertex(v + c.size() - 1), cur = c.vertex(v), next = c.vertex(v + 1);
            found = edge_on_polygon_boundary(prev, cur, p.hull) && edge_on_polygon_boundary(cur, next, p.hull);
        }
        if (!found) r.violations.push_back("cell " + std::to_string(i + 1) + " has no hull vertex");
    }
    return r;
}

double max_sector_radius(const Polygon& poly, size_t vertex) {
    const size_t n = poly.size();
    const Vec2 x = poly.vertex(vertex);
    double d = std::numeric_limits<double>::infinity();
    for (size_t e = 0; e < n; ++e) {
        if (e == vertex % n || (e + 1) % n == vertex % n) continue;
        d = std::min(d, segment_distance(x, poly.edge_start(e), poly.edge_end(e)));
    }
    return 0.5 * d;
}

CornerSector corner_sector(const Polygon& poly, size_t vertex, double h) {
    if (!(h > 0)) throw InputError("sector radius must be positive");
    const size_t n = poly.size();
    const size_t i = vertex % n;
    if (h > max_sector_radius(poly, i))
        throw InputError("sector radius " + std::to_string(h) + " too large at vertex " + std::to_string(i + 1));
    const Vec2 x = poly.vertex(i);
    const Vec2 a = poly.vertex(i + 1) - x, b = poly.vertex(i + n - 1) - x;
    double opening = std::atan2(cross(a, b), dot(a, b));
    if (opening <= 0) opening += 2 * pi;
    CornerSector s;
    s.apex = x;
    s.h = h;
    s.vertex = i;
    s.degenerate = std::abs(opening - pi) < 1e-12;
    const double ta = std::atan2(a.y, a.x);
    if (ta > -pi && ta + opening < pi) {
        s.theta_m = ta;
        s.theta_M = ta + opening;
    } else {
        s.frame_rotation = ta + 0.5 * opening;
        s.theta_m = -0.5 * opening;
        s.theta_M = 0.5 * opening;
    }
    return s;
}

std::vector<CornerSector> corner_sectors(const Polygon& poly, double h) {
    std::vector<CornerSector> out;
    for (size_t i = 0; i < poly.size(); ++i) out.push_back(corner_sector(poly, i, h));
    return out;
}

RegionLabel locate(const NestPartition& p, Vec2 x) {
    const double tol = p.layers.front().tolerance();
    for (size_t l = 0; l < p.layers.size(); ++l)
        if (p.layers[l].boundary_distance(x) <= tol) return {RegionLabel::Kind::interface, int(l + 1)};
    for (size_t l = p.layers.size(); l-- > 0;)
        if (p.layers[l].contains(x)) return {RegionLabel::Kind::region, int(l + 1)};
    return {};
}

RegionLabel locate(const CellPartition& p, Vec2 x) {
    const double tol = p.hull.tolerance();
    for (size_t c = 0; c < p.cells.size(); ++c)
        if (p.cells[c].boundary_distance(x) <= tol) return {RegionLabel::Kind::interface, int(c + 1)};
    for (size_t c = 0; c < p.cells.size(); ++c)
        if (p.cells[c].contains(x)) return {RegionLabel::Kind::region, int(c + 1)};
    return {};
}

}  // namespace condscat
