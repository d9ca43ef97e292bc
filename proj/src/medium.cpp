#include "condscat/medium.hpp"

#include "condscat/special.hpp"

namespace condscat {
namespace {

void check_lambda(cplx l) {
    if (!(l.real() >= 0.0 || l.imag() >= 0.0))
        throw InputError("lambda must have nonnegative real or imaginary part");
}

void check_k(double k) {
    if (!(k > 0.0) || !std::isfinite(k)) throw InputError("wavenumber k must be real and positive");
}

}  // namespace

NestMedium make_nest_medium(NestPartition p, std::vector<cplx> q, std::vector<cplx> lambda, double k) {
    const auto rep = validate_nest(p);
    if (!rep.ok()) throw InputError(rep.violations.front());
    const size_t n = p.layers.size();
    if (q.size() != n) throw InputError("expected " + std::to_string(n) + " potentials, got " + std::to_string(q.size()));
    if (lambda.size() != n)
        throw InputError("expected " + std::to_string(n) + " conductive parameters, got " +
                         std::to_string(lambda.size()));
    for (const auto& v : q)
        if (!(v.real() > 0.0)) throw InputError("Re q must be positive");
    for (const auto& l : lambda) check_lambda(l);
    check_k(k);
    return {std::move(p), std::move(q), std::move(lambda), k};
}

CellMedium make_cell_medium(CellPartition p, std::vector<cplx> q, cplx lambda_star, double k) {
    const auto rep = validate_cell(p);
    if (!rep.ok()) throw InputError(rep.violations.front());
    if (q.size() != p.cells.size())
        throw InputError("expected " + std::to_string(p.cells.size()) + " potentials, got " + std::to_string(q.size()));
    for (const auto& v : q) {
        if (!(v.real() > 0.0)) throw InputError("Re q must be positive");
        if (v.imag() < 0.0) throw InputError("Im q must be nonnegative");
    }
    check_lambda(lambda_star);
    check_k(k);
    return {std::move(p), std::move(q), lambda_star, k};
}

double wavenumber(const Medium& m) {
    return std::visit([](const auto& x) { return x.k; }, m);
}

const Polygon& outer_boundary(const Medium& m) {
    if (const auto* n = std::get_if<NestMedium>(&m)) return n->partition.layers.front();
    return std::get<CellMedium>(m).partition.hull;
}

size_t region_count(const Medium& m) {
    return std::visit([](const auto& x) { return x.q.size(); }, m);
}

cplx region_potential(const Medium& m, int region) {
    if (region == 0) return 1.0;
    return std::visit([&](const auto& x) { return x.q.at(size_t(region - 1)); }, m);
}

RegionLabel locate(const Medium& m, Vec2 x) {
    return std::visit([&](const auto& med) { return locate(med.partition, x); }, m);
}

cplx potential_at(const Medium& m, Vec2 x) {
    const auto lab = locate(m, x);
    if (lab.kind == RegionLabel::Kind::interface) throw InputError("ambiguous interface point");
    if (lab.kind == RegionLabel::Kind::exterior) return 1.0;
    return region_potential(m, lab.index);
}

cplx lambda_at(const Medium& m, int interface_id, double) {
    if (const auto* n = std::get_if<NestMedium>(&m)) {
        if (interface_id < 1 || size_t(interface_id) > n->lambda.size())
            throw InputError("unknown interface id " + std::to_string(interface_id));
        return n->lambda[size_t(interface_id - 1)];
    }
    const auto& c = std::get<CellMedium>(m);
    if (interface_id < 1 || size_t(interface_id) > c.q.size())
        throw InputError("unknown interface id " + std::to_string(interface_id));
    return c.lambda_star;
}

cplx region_wavenumber(double k, cplx q) {
    cplx r = std::sqrt(q);
    if (r.imag() < 0) r = -r;
    return k * r;
}

IncidentField IncidentField::plane_wave(Vec2 d, cplx amplitude) {
    if (std::abs(norm(d) - 1.0) > 1e-12) throw InputError("plane-wave direction must have unit norm");
    IncidentField f;
    f.kind = Kind::plane_wave;
    f.direction = d;
    f.amplitude = amplitude;
    return f;
}

IncidentField IncidentField::point_source(Vec2 z0, cplx amplitude) {
    IncidentField f;
    f.kind = Kind::point_source;
    f.location = z0;
    f.amplitude = amplitude;
    return f;
}

FieldSample incident_eval(const IncidentField& f, double k, Vec2 x) {
    FieldSample s;
    switch (f.kind) {
        case IncidentField::Kind::plane_wave: {
            s.value = f.amplitude * std::exp(I * (k * dot(f.direction, x)));
            s.grad = {I * k * f.direction.x * s.value, I * k * f.direction.y * s.value};
            break;
        }
        case IncidentField::Kind::point_source: {
            const Vec2 d = x - f.location;
            const double r = norm(d);
            if (r == 0.0) throw InputError("incident field evaluated at the source point");
            s.value = f.amplitude * 0.25 * I * special::hankel1(0, k * r);
            const cplx dr = -f.amplitude * 0.25 * I * k * special::hankel1(1, k * r);
            s.grad = {dr * d.x / r, dr * d.y / r};
            break;
        }
        case IncidentField::Kind::none:
            break;
    }
    return s;
}

void check_incident(const IncidentField& f, const Medium& m) {
    if (f.kind != IncidentField::Kind::point_source) return;
    const Polygon& hull = outer_boundary(m);
    if (hull.contains(f.location) || hull.boundary_distance(f.location) <= hull.tolerance())
        throw InputError("point source must lie strictly outside the closure of the medium");
}

}  // namespace condscat
