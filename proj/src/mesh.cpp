#include "elastiform/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

namespace ef {

namespace {

double signed_area(const Vec2& p0, const Vec2& p1, const Vec2& p2) {
    return 0.5 * ((p1.x() - p0.x()) * (p2.y() - p0.y()) - (p2.x() - p0.x()) * (p1.y() - p0.y()));
}

} // namespace

double Mesh::triangle_area(int t) const {
    const auto& tri = triangles[t];
    return signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
}

Vec2 Mesh::centroid(int t) const {
    const auto& tri = triangles[t];
    return (vertices[tri[0]] + vertices[tri[1]] + vertices[tri[2]]) / 3.0;
}

Vec2 Mesh::outward_normal(const BoundaryEdge& e) const {
    Vec2 t = (vertices[e.b] - vertices[e.a]).normalized();
    return Vec2(t.y(), -t.x());
}

bool Mesh::vertex_on_label(int v, BoundaryLabel l) const {
    for (const auto& be : boundary_edges)
        if (be.label == l && (be.a == v || be.b == v))
            return true;
    return false;
}

void Mesh::finalize(bool require_dirichlet) {
    if (vertices.empty() || triangles.empty())
        throw IoError("mesh: empty vertex or triangle list");

    for (auto& tri : triangles) {
        for (int v : tri)
            if (v < 0 || v >= n_vertices())
                throw IoError("mesh: triangle index out of range");
        double a = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
        if (a < 0.0) {
            std::swap(tri[1], tri[2]);
            a = -a;
        }
        if (!(a > 0.0))
            throw IoError("mesh: degenerate (zero-area) triangle");
    }

    // Edge table keyed by the undirected vertex pair. Directed occurrence in a
    // CCW cycle determines the plus side.
    std::map<std::pair<int, int>, int> index;
    edges.clear();
    tri_edges.assign(triangles.size(), {-1, -1, -1});
    for (int t = 0; t < n_triangles(); ++t) {
        const auto& tri = triangles[t];
        for (int k = 0; k < 3; ++k) {
            const int a = tri[(k + 1) % 3];
            const int b = tri[(k + 2) % 3];
            const auto key = std::minmax(a, b);
            auto it = index.find(key);
            if (it == index.end()) {
                EdgeRec rec;
                rec.a = a; // tentative orientation from the first CCW occurrence
                rec.b = b;
                rec.tri_plus = t;
                index.emplace(key, static_cast<int>(edges.size()));
                tri_edges[t][k] = static_cast<int>(edges.size());
                edges.push_back(rec);
            } else {
                EdgeRec& rec = edges[it->second];
                if (rec.tri_minus != -1)
                    throw IoError("mesh: edge shared by more than two triangles");
                rec.tri_minus = t;
                tri_edges[t][k] = it->second;
            }
        }
    }

    // Interior edges get the canonical a < b orientation.
    for (auto& rec : edges) {
        if (rec.tri_minus != -1 && rec.a > rec.b) {
            std::swap(rec.a, rec.b);
            std::swap(rec.tri_plus, rec.tri_minus);
        }
    }

    // Boundary edges must exactly tile the set of single-sided edges.
    std::map<std::pair<int, int>, int> boundary_index;
    for (int i = 0; i < static_cast<int>(boundary_edges.size()); ++i) {
        auto& be = boundary_edges[i];
        if (be.a < 0 || be.a >= n_vertices() || be.b < 0 || be.b >= n_vertices())
            throw IoError("mesh: boundary edge index out of range");
        if (!boundary_index.emplace(std::minmax(be.a, be.b), i).second)
            throw IoError("mesh: duplicate boundary edge");
    }
    int n_topological = 0;
    for (int e = 0; e < n_edges(); ++e) {
        EdgeRec& rec = edges[e];
        const auto key = std::minmax(rec.a, rec.b);
        auto it = boundary_index.find(key);
        if (rec.tri_minus == -1) {
            ++n_topological;
            if (it == boundary_index.end())
                throw IoError("mesh: unlabeled boundary edge");
            rec.boundary_index = it->second;
            // Align the stored boundary edge with the CCW cycle of its
            // triangle so the global normal points outward.
            BoundaryEdge& be = boundary_edges[it->second];
            be.a = rec.a;
            be.b = rec.b;
        } else {
            if (it != boundary_index.end())
                throw IoError("mesh: interior edge carries a boundary label");
        }
    }
    if (n_topological != static_cast<int>(boundary_edges.size()))
        throw IoError("mesh: boundary edge list does not tile the boundary");

    if (require_dirichlet) {
        bool has_d = false;
        for (const auto& be : boundary_edges)
            if (be.label == BoundaryLabel::Dirichlet)
                has_d = true;
        if (!has_d)
            throw IoError("mesh: Gamma_D is empty");
    }

    ref_area.resize(triangles.size());
    for (int t = 0; t < n_triangles(); ++t)
        ref_area[t] = triangle_area(t);
}

double volume(const Mesh& mesh) {
    // Neumaier summation: the 1e-12 relative bar on large meshes is tighter
    // than naive accumulation guarantees.
    double sum = 0.0, comp = 0.0;
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const double a = mesh.triangle_area(t);
        const double s = sum + a;
        if (std::abs(sum) >= std::abs(a))
            comp += (sum - s) + a;
        else
            comp += (a - s) + sum;
        sum = s;
    }
    return sum + comp;
}

Mesh deform(const Mesh& mesh, const std::vector<Vec2>& field, double step) {
    if (field.size() != mesh.vertices.size())
        throw ConfigError("deform: field size does not match vertex count");
    // ref_area persists from construction, so chained deformations are
    // measured against the original element sizes and cannot shrink an
    // element gradually past the validity threshold.
    Mesh out = mesh;
    for (int v = 0; v < mesh.n_vertices(); ++v)
        out.vertices[v] += step * field[v];
    return out;
}

double min_jacobian(const Mesh& mesh) {
    double mj = std::numeric_limits<double>::infinity();
    for (int t = 0; t < mesh.n_triangles(); ++t)
        mj = std::min(mj, mesh.triangle_area(t) / mesh.ref_area[t]);
    return mj;
}

Mesh uniform_refine(const Mesh& mesh) {
    Mesh out;
    out.vertices = mesh.vertices;
    std::vector<int> midpoint(mesh.edges.size());
    for (int e = 0; e < mesh.n_edges(); ++e) {
        const auto& rec = mesh.edges[e];
        midpoint[e] = static_cast<int>(out.vertices.size());
        out.vertices.push_back(0.5 * (mesh.vertices[rec.a] + mesh.vertices[rec.b]));
    }
    out.triangles.reserve(mesh.triangles.size() * 4);
    for (int t = 0; t < mesh.n_triangles(); ++t) {
        const auto& tri = mesh.triangles[t];
        const int m0 = midpoint[mesh.tri_edges[t][0]]; // opposite vertex 0: midpoint of (1,2)
        const int m1 = midpoint[mesh.tri_edges[t][1]];
        const int m2 = midpoint[mesh.tri_edges[t][2]];
        out.triangles.push_back({tri[0], m2, m1});
        out.triangles.push_back({tri[1], m0, m2});
        out.triangles.push_back({tri[2], m1, m0});
        out.triangles.push_back({m0, m1, m2});
    }
    std::map<std::pair<int, int>, int> edge_of;
    for (int e = 0; e < mesh.n_edges(); ++e)
        edge_of[std::minmax(mesh.edges[e].a, mesh.edges[e].b)] = e;
    out.boundary_edges.reserve(mesh.boundary_edges.size() * 2);
    for (const auto& be : mesh.boundary_edges) {
        const int m = midpoint[edge_of.at(std::minmax(be.a, be.b))];
        out.boundary_edges.push_back({be.a, m, be.label});
        out.boundary_edges.push_back({m, be.b, be.label});
    }
    out.finalize(false);
    return out;
}

void GeometryConfig::validate() const {
    if (!(width > 0.0) || !(height > 0.0))
        throw ConfigError("geometry: width and height must be positive");
    if (!(h > 0.0))
        throw ConfigError("geometry: target element size h must be positive");
    if (!(load_fraction > 0.0) || !(load_fraction < 1.0))
        throw ConfigError("geometry: load_fraction must lie in (0,1)");
    for (const auto& hole : holes) {
        if (!(hole.r > 0.0))
            throw ConfigError("geometry: hole radius must be positive");
        if (hole.cx - hole.r <= 0.0 || hole.cx + hole.r >= width ||
            hole.cy - hole.r <= 0.0 || hole.cy + hole.r >= height)
            throw ConfigError("geometry: hole not strictly inside the rectangle");
    }
    for (size_t i = 0; i < holes.size(); ++i)
        for (size_t j = i + 1; j < holes.size(); ++j) {
            const double dx = holes[i].cx - holes[j].cx;
            const double dy = holes[i].cy - holes[j].cy;
            if (std::sqrt(dx * dx + dy * dy) <= holes[i].r + holes[j].r)
                throw ConfigError("geometry: overlapping holes");
        }
}

std::vector<Hole> six_hole_layout(double width, double height, double target_volume) {
    const double hole_area = (width * height - target_volume) / 6.0;
    if (!(hole_area > 0.0))
        throw ConfigError("geometry: target volume leaves no hole area");
    const double r = std::sqrt(hole_area / M_PI);
    std::vector<Hole> holes;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 2; ++j)
            holes.push_back({width * (i + 1) / 4.0, height * (j + 1) / 3.0, r});
    return holes;
}

} // namespace ef
