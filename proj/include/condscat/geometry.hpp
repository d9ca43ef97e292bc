#pragma once

#include <string>
#include <vector>

#include "condscat/types.hpp"

namespace condscat {

enum class VertexPolicy {
    strict,          // three consecutive collinear vertices rejected
    allow_straight,  // straight vertices kept (degenerate corners)
};

class Polygon {
  public:
    // normalizes to counterclockwise; throws InputError on invalid input
    explicit Polygon(std::vector<Vec2> vertices, VertexPolicy policy = VertexPolicy::strict);

    const std::vector<Vec2>& vertices() const { return v_; }
    size_t size() const { return v_.size(); }
    const Vec2& vertex(size_t i) const { return v_[i % v_.size()]; }
    Vec2 edge_start(size_t i) const { return vertex(i); }
    Vec2 edge_end(size_t i) const { return vertex(i + 1); }

    double area() const;
    bool convex() const;
    Vec2 centroid() const;
    double bbox_diagonal() const;
    double diameter() const;
    double perimeter() const;
    double tolerance() const;  // 1e-12 x bounding-box diagonal

    double boundary_distance(Vec2 x) const;
    // winding test; meaningless for points within tolerance() of the boundary
    bool contains(Vec2 x) const;
    bool strictly_inside(Vec2 x) const { return contains(x) && boundary_distance(x) > tolerance(); }

  private:
    std::vector<Vec2> v_;
};

double segment_distance(Vec2 x, Vec2 a, Vec2 b);

struct ValidationReport {
    std::vector<std::string> violations;
    std::vector<std::string> notes;
    bool ok() const { return violations.empty(); }
};

struct NestPartition {
    std::vector<Polygon> layers;  // outermost first
};

struct CellPartition {
    Polygon hull;
    std::vector<Polygon> cells;
};

ValidationReport validate_nest(const NestPartition& p);
ValidationReport validate_cell(const CellPartition& p);

// truncated sector at a polygon vertex; angles are measured in the local frame
// obtained by translating the apex to the origin and rotating by -frame_rotation
struct CornerSector {
    Vec2 apex;
    double theta_m = 0.0;
    double theta_M = 0.0;
    double h = 0.0;
    double frame_rotation = 0.0;
    bool degenerate = false;
    size_t vertex = 0;

    double opening() const { return theta_M - theta_m; }
    Vec2 to_world(Vec2 local) const { return apex + rotate(local, frame_rotation); }
    Vec2 to_local(Vec2 world) const { return rotate(world - apex, -frame_rotation); }
    Vec2 world_direction(double theta) const { return rotate(polar_point(1.0, theta), frame_rotation); }
    Vec2 midline() const { return world_direction(0.5 * (theta_m + theta_M)); }
};

// one sector per vertex; throws InputError if h is not below half the distance
// from a vertex to its non-incident edges
std::vector<CornerSector> corner_sectors(const Polygon& poly, double h);
CornerSector corner_sector(const Polygon& poly, size_t vertex, double h);
double max_sector_radius(const Polygon& poly, size_t vertex);

struct RegionLabel {
    enum class Kind { exterior, region, interface };
    Kind kind = Kind::exterior;
    int index = 0;  // 1-based layer / cell / interface id, 0 for exterior

    bool operator==(const RegionLabel&) const = default;
};

RegionLabel locate(const NestPartition& p, Vec2 x);
RegionLabel locate(const CellPartition& p, Vec2 x);

}  // namespace condscat
