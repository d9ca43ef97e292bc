#pragma once

#include <vector>

#include "condscat/forward.hpp"

namespace condscat {

// concentric disks, radii strictly decreasing, q[l] inside ring l, lambda[l] on circle l;
// plane-wave incidence; m_trunc <= 0 picks k * max|sqrt q| * R + 20
FarFieldPattern disk_series_oracle(const std::vector<double>& radii, const std::vector<cplx>& q,
                                   const std::vector<cplx>& lambda, double k, const IncidentField& inc, int m_trunc,
                                   const std::vector<double>& angles);

// classical single transmission disk without conductive layer
FarFieldPattern disk_series_textbook(double radius, cplx q, double k, const IncidentField& inc, int m_trunc,
                                     const std::vector<double>& angles);

// regular polygon with `sides` vertices on the circle of the given radius, first vertex on +x
std::vector<Vec2> regular_polygon(int sides, double radius, Vec2 center = {});

}  // namespace condscat
