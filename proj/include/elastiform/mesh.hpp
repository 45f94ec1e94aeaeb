#pragma once

#include "elastiform/types.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace ef {

enum class BoundaryLabel : char { Dirichlet = 'D', Neumann = 'N', Free = 'F' };

struct BoundaryEdge {
    int a = -1; // oriented so the adjacent triangle lies left of a->b (outward normal = rot-90 of a->b)
    int b = -1;
    BoundaryLabel label = BoundaryLabel::Free;
};

// One record per undirected edge. Interior edges are oriented a < b; boundary
// edges follow the CCW cycle of their unique triangle, so the global normal
// n = rot-90((b-a)/|b-a|) points outward on the boundary. tri_plus is the
// triangle whose CCW cycle contains the directed edge a->b.
struct EdgeRec {
    int a = -1;
    int b = -1;
    int tri_plus = -1;
    int tri_minus = -1; // -1 on the boundary
    int boundary_index = -1; // index into boundary_edges, -1 if interior
};

// Immutable conforming triangulation. All triangles are CCW with positive
// area; deform() returns a new mesh. Safe to share read-only across threads.
struct Mesh {
    std::vector<Vec2> vertices;
    std::vector<std::array<int, 3>> triangles;
    std::vector<BoundaryEdge> boundary_edges;

    // Derived connectivity, built by finalize().
    std::vector<EdgeRec> edges;
    std::vector<std::array<int, 3>> tri_edges; // local edge k is opposite local vertex k
    std::vector<double> ref_area;              // baseline areas for min_jacobian

    int n_vertices() const { return static_cast<int>(vertices.size()); }
    int n_triangles() const { return static_cast<int>(triangles.size()); }
    int n_edges() const { return static_cast<int>(edges.size()); }

    // Orients triangles CCW, builds the edge table, and validates:
    // positive areas, boundary edges exactly tile the topological boundary,
    // labels known. Throws IoError on violation. require_dirichlet enforces
    // a nonempty Gamma_D (disabled for test fixtures with pure traction).
    void finalize(bool require_dirichlet = true);

    double triangle_area(int t) const;
    Vec2 centroid(int t) const;
    Vec2 outward_normal(const BoundaryEdge& e) const; // unit
    double edge_length(int a, int b) const { return (vertices[b] - vertices[a]).norm(); }

    bool vertex_on_label(int v, BoundaryLabel l) const; // true if v lies on an edge with label l
};

double volume(const Mesh& mesh);

// Moves vertices by step*field; connectivity, labels, edge table and the
// ref_area baseline are kept, so min_jacobian of a deformed mesh measures
// distortion relative to the originally constructed shape.
Mesh deform(const Mesh& mesh, const std::vector<Vec2>& field, double step);

// min over triangles of signed_area / ref_area; <= 0 flags inversion.
double min_jacobian(const Mesh& mesh);

// Red refinement: every triangle split in four via edge midpoints. Boundary
// labels are inherited; the polygonal domain is preserved exactly.
Mesh uniform_refine(const Mesh& mesh);

struct Hole {
    double cx = 0.0;
    double cy = 0.0;
    double r = 0.0;
};

struct GeometryConfig {
    double width = 10.0;
    double height = 4.5;
    double h = 0.5;              // target element size
    double load_fraction = 0.1;  // Gamma_N strip length as a fraction of height, centered
    std::vector<Hole> holes;
    bool exact_hole_area = true; // compensate polygonization so hole areas match pi r^2
    std::uint64_t seed = 42;

    void validate() const; // throws ConfigError
};

// Rectangle cantilever: left edge Gamma_D, centered strip of the right edge
// Gamma_N, the rest Gamma.
Mesh build_bulky_cantilever(const GeometryConfig& cfg);

// Same with circular holes removed; hole boundaries labeled Gamma.
Mesh build_holed_cantilever(const GeometryConfig& cfg);

// Default six-hole layout for the given rectangle: two rows of three holes,
// one shared radius sized so the initial area equals target_volume.
std::vector<Hole> six_hole_layout(double width, double height, double target_volume);

// Native text format (see README). Bit-exact coordinate roundtrip.
Mesh read_mesh(const std::string& path);
void write_mesh(const Mesh& mesh, const std::string& path);

struct VtkField {
    enum class Kind { PointScalar, PointVector, CellScalar };
    Kind kind = Kind::PointScalar;
    std::string name;
    std::vector<double> data; // vectors interleaved (x0,y0,x1,y1,...)
};

void write_vtk(const Mesh& mesh, const std::vector<VtkField>& fields, const std::string& path);

} // namespace ef
