#pragma once

#include <Eigen/Dense>
#include <memory>
#include <vector>

#include "condscat/mesh.hpp"

namespace condscat {

struct SolveOptions {
    double tol = 1e-8;          // relative residual required for `converged`
    bool use_symmetry = true;   // block-circulant path when the layout is rotationally symmetric
    Exec exec = Exec::parallel;
};

// per node: scattered trace phi and y = w * (normal derivative of the scattered
// field on the minus side of the node's edge)
struct SolveResult {
    std::vector<cplx> phi;
    std::vector<cplx> y;
    double residual = 0.0;
    double condition = 0.0;
    bool converged = false;
    bool ill_conditioned = false;  // condition estimate above 1e12
    int symmetry_order = 1;
    size_t unknowns = 0;
};

// rows of the system matrix A (2N columns) and of the right-hand-side maps
// G1 (on incident traces) and G2 (on w * incident normal derivatives)
struct RowBlock {
    Eigen::MatrixXcd A, G1, G2;
};
RowBlock assemble_rows(const BoundaryMesh& mesh, const std::vector<int>& rows, Exec exec);

class ScatteringSolver {
  public:
    explicit ScatteringSolver(std::shared_ptr<const BoundaryMesh> mesh, SolveOptions opts = {});
    SolveResult solve(const IncidentField& inc) const;
    const BoundaryMesh& mesh() const { return *mesh_; }

  private:
    struct Impl;
    std::shared_ptr<const BoundaryMesh> mesh_;
    SolveOptions opts_;
    std::shared_ptr<Impl> impl_;
};

SolveResult solve_scatter(const BoundaryMesh& mesh, const IncidentField& inc, const SolveOptions& opts = {});

// total field and gradient; throws InputError on an interface
FieldSample total_field(const BoundaryMesh& mesh, const IncidentField& inc, const SolveResult& sr, Vec2 x);
cplx total_field_at(const BoundaryMesh& mesh, const IncidentField& inc, const SolveResult& sr, Vec2 x);
// closer to the boundary than the local node spacing: trapezoidal evaluation is approximate
bool near_boundary(const BoundaryMesh& mesh, Vec2 x);

struct FarFieldPattern {
    std::vector<double> angles;
    std::vector<cplx> values;
};

std::vector<double> uniform_directions(int M);
FarFieldPattern far_field(const BoundaryMesh& mesh, const IncidentField& inc, const SolveResult& sr,
                          const std::vector<double>& angles, Exec exec = Exec::parallel);
double farfield_diff(const FarFieldPattern& p1, const FarFieldPattern& p2);

}  // namespace condscat
