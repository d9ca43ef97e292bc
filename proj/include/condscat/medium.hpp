#pragma once

#include <variant>
#include <vector>

#include "condscat/geometry.hpp"

namespace condscat {

struct NestMedium {
    NestPartition partition;
    std::vector<cplx> q;       // per annular region U_l
    std::vector<cplx> lambda;  // per interface (boundary of layer l)
    double k = 1.0;
};

struct CellMedium {
    CellPartition partition;
    std::vector<cplx> q;  // per cell
    cplx lambda_star{};   // on every interface, shared edges counted once
    double k = 1.0;
};

using Medium = std::variant<NestMedium, CellMedium>;

// validating constructors; throw InputError
NestMedium make_nest_medium(NestPartition p, std::vector<cplx> q, std::vector<cplx> lambda, double k);
CellMedium make_cell_medium(CellPartition p, std::vector<cplx> q, cplx lambda_star, double k);

double wavenumber(const Medium& m);
const Polygon& outer_boundary(const Medium& m);
size_t region_count(const Medium& m);
cplx region_potential(const Medium& m, int region);  // 1-based, 0 = exterior
RegionLabel locate(const Medium& m, Vec2 x);

cplx potential_at(const Medium& m, Vec2 x);
cplx lambda_at(const Medium& m, int interface_id, double arclength = 0.0);

// principal square root with nonnegative imaginary part
cplx region_wavenumber(double k, cplx q);

struct IncidentField {
    enum class Kind { plane_wave, point_source, none };
    Kind kind = Kind::none;
    Vec2 direction{1.0, 0.0};
    Vec2 location{};
    cplx amplitude{1.0};

    static IncidentField plane_wave(Vec2 d, cplx amplitude = 1.0);
    static IncidentField point_source(Vec2 z0, cplx amplitude = 1.0);
    static IncidentField none() { return {}; }
};

// point source normalized so that (Laplacian + k^2) u = -delta
FieldSample incident_eval(const IncidentField& f, double k, Vec2 x);

// throws InputError if a point source touches the closure of the medium
void check_incident(const IncidentField& f, const Medium& m);

}  // namespace condscat
