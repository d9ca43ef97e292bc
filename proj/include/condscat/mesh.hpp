#pragma once

#include <vector>

#include "condscat/medium.hpp"

namespace condscat {

struct MeshSpec {
    int nodes_per_edge = 32;
    int grading = 6;  // sigmoidal grading order toward every vertex
};

// straight boundary segment; the normal points from region `minus` into region `plus`
struct MeshEdge {
    Vec2 a, b;
    int minus = 0;  // region ids: 0 exterior, l >= 1 layer / cell
    int plus = 0;
    cplx lambda{};
    int interface_id = 0;
};

// one closed loop of a region boundary, as seen by that region
struct RegionLoop {
    std::vector<int> nodes;  // global node ids in loop order
    std::vector<double> log_weights;  // periodic log-split weights by index offset
};

struct RegionBoundary {
    int region = 0;
    cplx kappa{};
    bool bounded = false;
    std::vector<RegionLoop> loops;
    // flattened over loops
    std::vector<int> nodes;
    std::vector<int> sign;  // +1 where this region is the minus side
    std::vector<int> loop;
    std::vector<int> pos;
};

class BoundaryMesh {
  public:
    Medium medium;
    MeshSpec spec;
    std::vector<MeshEdge> edges;

    // per node
    std::vector<Vec2> x;
    std::vector<Vec2> normal;
    std::vector<double> w;  // arclength weight
    std::vector<int> edge_of;
    // slot of the node inside regions[minus] / regions[plus]
    std::vector<int> minus_slot;
    std::vector<int> plus_slot;

    std::vector<RegionBoundary> regions;  // indexed by region id

    // rotational symmetry of the whole layout (order 1 = none)
    int symmetry = 1;
    Vec2 center{};
    std::vector<int> sector_of_node;
    std::vector<int> local_of_node;
    int nodes_per_sector = 0;

    size_t node_count() const { return x.size(); }
    double wavenumber() const;
};

BoundaryMesh build_mesh(const Medium& m, const MeshSpec& spec);

// graded parameter map on [0, 1] and its derivative
double grading_map(double sigma, int p, double* derivative = nullptr);

// periodic log-split quadrature weights R_d, d = 0..N-1
std::vector<double> log_split_weights(int N);

}  // namespace condscat
