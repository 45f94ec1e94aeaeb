#include "elastiform/mesh.hpp"

#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ef {

namespace {

std::string fmt_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

void write_mesh(const Mesh& mesh, const std::string& path) {
    std::ofstream out(path);
    if (!out)
        throw IoError("write_mesh: cannot open " + path);
    out << mesh.n_vertices() << ' ' << mesh.n_triangles() << ' '
        << mesh.boundary_edges.size() << '\n';
    for (const auto& v : mesh.vertices)
        out << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << '\n';
    for (const auto& t : mesh.triangles)
        out << t[0] + 1 << ' ' << t[1] + 1 << ' ' << t[2] + 1 << '\n';
    for (const auto& be : mesh.boundary_edges)
        out << be.a + 1 << ' ' << be.b + 1 << ' ' << static_cast<char>(be.label) << '\n';
    if (!out)
        throw IoError("write_mesh: write failed for " + path);
}

Mesh read_mesh(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw IoError("read_mesh: cannot open " + path);
    long nv = 0, nt = 0, nb = 0;
    if (!(in >> nv >> nt >> nb) || nv <= 0 || nt <= 0 || nb < 0)
        throw IoError("read_mesh: malformed counts in " + path);
    Mesh mesh;
    mesh.vertices.resize(nv);
    for (auto& v : mesh.vertices) {
        double x, y;
        if (!(in >> x >> y))
            throw IoError("read_mesh: truncated vertex list");
        v = Vec2(x, y);
    }
    mesh.triangles.resize(nt);
    for (auto& t : mesh.triangles) {
        long i, j, k;
        if (!(in >> i >> j >> k))
            throw IoError("read_mesh: truncated triangle list");
        if (i < 1 || i > nv || j < 1 || j > nv || k < 1 || k > nv)
            throw IoError("read_mesh: triangle index out of range");
        t = {static_cast<int>(i) - 1, static_cast<int>(j) - 1, static_cast<int>(k) - 1};
    }
    mesh.boundary_edges.resize(nb);
    for (auto& be : mesh.boundary_edges) {
        long a, b;
        std::string lab;
        if (!(in >> a >> b >> lab))
            throw IoError("read_mesh: truncated boundary list");
        if (a < 1 || a > nv || b < 1 || b > nv)
            throw IoError("read_mesh: boundary index out of range");
        if (lab.size() != 1 || (lab[0] != 'D' && lab[0] != 'N' && lab[0] != 'F'))
            throw IoError("read_mesh: unknown boundary label '" + lab + "'");
        be.a = static_cast<int>(a) - 1;
        be.b = static_cast<int>(b) - 1;
        be.label = static_cast<BoundaryLabel>(lab[0]);
    }
    mesh.finalize();
    return mesh;
}

void write_vtk(const Mesh& mesh, const std::vector<VtkField>& fields, const std::string& path) {
    for (const auto& f : fields) {
        size_t expect = 0;
        switch (f.kind) {
        case VtkField::Kind::PointScalar: expect = mesh.vertices.size(); break;
        case VtkField::Kind::PointVector: expect = 2 * mesh.vertices.size(); break;
        case VtkField::Kind::CellScalar: expect = mesh.triangles.size(); break;
        }
        if (f.data.size() != expect)
            throw ConfigError("write_vtk: field '" + f.name + "' has wrong length");
    }

    std::ofstream out(path);
    if (!out)
        throw IoError("write_vtk: cannot open " + path);
    out << "# vtk DataFile Version 2.0\n";
    out << "elastiform snapshot\n";
    out << "ASCII\n";
    out << "DATASET UNSTRUCTURED_GRID\n";
    out << "POINTS " << mesh.n_vertices() << " double\n";
    for (const auto& v : mesh.vertices)
        out << fmt_double(v.x()) << ' ' << fmt_double(v.y()) << " 0\n";
    out << "CELLS " << mesh.n_triangles() << ' ' << 4 * mesh.n_triangles() << '\n';
    for (const auto& t : mesh.triangles)
        out << "3 " << t[0] << ' ' << t[1] << ' ' << t[2] << '\n';
    out << "CELL_TYPES " << mesh.n_triangles() << '\n';
    for (int t = 0; t < mesh.n_triangles(); ++t)
        out << "5\n";

    bool point_header = false, cell_header = false;
    for (const auto& f : fields) {
        if (f.kind == VtkField::Kind::CellScalar)
            continue;
        if (!point_header) {
            out << "POINT_DATA " << mesh.n_vertices() << '\n';
            point_header = true;
        }
        if (f.kind == VtkField::Kind::PointScalar) {
            out << "SCALARS " << f.name << " double 1\n";
            out << "LOOKUP_TABLE default\n";
            for (double v : f.data)
                out << fmt_double(v) << '\n';
        } else {
            out << "VECTORS " << f.name << " double\n";
            for (size_t i = 0; i < f.data.size(); i += 2)
                out << fmt_double(f.data[i]) << ' ' << fmt_double(f.data[i + 1]) << " 0\n";
        }
    }
    for (const auto& f : fields) {
        if (f.kind != VtkField::Kind::CellScalar)
            continue;
        if (!cell_header) {
            out << "CELL_DATA " << mesh.n_triangles() << '\n';
            cell_header = true;
        }
        out << "SCALARS " << f.name << " double 1\n";
        out << "LOOKUP_TABLE default\n";
        for (double v : f.data)
            out << fmt_double(v) << '\n';
    }
    if (!out)
        throw IoError("write_vtk: write failed for " + path);
}

} // namespace ef
