#include "elastiform/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <random>
#include <vector>

namespace ef {

namespace {

double orient2d(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (c.x() - a.x()) * (b.y() - a.y());
}

// > 0 iff d lies strictly inside the circumcircle of CCW triangle abc.
// Near-zero determinants count as outside, which keeps cavities minimal.
bool in_circle(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    const double adx = a.x() - d.x(), ady = a.y() - d.y();
    const double bdx = b.x() - d.x(), bdy = b.y() - d.y();
    const double cdx = c.x() - d.x(), cdy = c.y() - d.y();
    const double ad = adx * adx + ady * ady;
    const double bd = bdx * bdx + bdy * bdy;
    const double cd = cdx * cdx + cdy * cdy;
    const double det = adx * (bdy * cd - bd * cdy) - ady * (bdx * cd - bd * cdx) +
                       ad * (bdx * cdy - bdy * cdx);
    const double mag = std::abs(adx * bdy * cd) + std::abs(adx * bd * cdy) +
                       std::abs(ady * bdx * cd) + std::abs(ady * bd * cdx) +
                       std::abs(ad * bdx * cdy) + std::abs(ad * bdy * cdx);
    return det > 1e-12 * mag;
}

// Incremental Bowyer-Watson with a super-triangle and neighbor walking.
class Delaunay {
public:
    explicit Delaunay(const std::vector<Vec2>& points) : pts_(points) {
        Vec2 lo = pts_[0], hi = pts_[0];
        for (const auto& p : pts_) {
            lo = lo.cwiseMin(p);
            hi = hi.cwiseMax(p);
        }
        const Vec2 c = 0.5 * (lo + hi);
        const double r = std::max((hi - lo).norm(), 1.0) * 20.0;
        super_ = static_cast<int>(pts_.size());
        pts_.push_back(c + Vec2(-2.0 * r, -r));
        pts_.push_back(c + Vec2(2.0 * r, -r));
        pts_.push_back(c + Vec2(0.0, 2.0 * r));
        add_tri(super_, super_ + 1, super_ + 2, {-1, -1, -1});
        for (int i = 0; i < super_; ++i)
            insert(i);
    }

    std::vector<std::array<int, 3>> triangles() const {
        std::vector<std::array<int, 3>> out;
        for (const auto& t : tris_) {
            if (!t.alive)
                continue;
            if (t.v[0] >= super_ || t.v[1] >= super_ || t.v[2] >= super_)
                continue;
            out.push_back({t.v[0], t.v[1], t.v[2]});
        }
        return out;
    }

private:
    struct Tri {
        int v[3];
        int adj[3]; // neighbor across the edge opposite v[k]
        bool alive = true;
    };

    int add_tri(int a, int b, int c, std::array<int, 3> adj) {
        tris_.push_back({{a, b, c}, {adj[0], adj[1], adj[2]}, true});
        return static_cast<int>(tris_.size()) - 1;
    }

    int locate(const Vec2& p, int hint) const {
        int t = hint;
        for (int step = 0; step < static_cast<int>(tris_.size()) + 4; ++step) {
            const Tri& tr = tris_[t];
            int next = -1;
            for (int k = 0; k < 3; ++k) {
                const Vec2& a = pts_[tr.v[(k + 1) % 3]];
                const Vec2& b = pts_[tr.v[(k + 2) % 3]];
                if (orient2d(a, b, p) < 0.0) {
                    next = tr.adj[k];
                    break;
                }
            }
            if (next < 0)
                return t;
            t = next;
        }
        // Walk cycled (degenerate geometry); fall back to a scan.
        for (int i = 0; i < static_cast<int>(tris_.size()); ++i) {
            const Tri& tr = tris_[i];
            if (!tr.alive)
                continue;
            bool inside = true;
            for (int k = 0; k < 3 && inside; ++k)
                inside = orient2d(pts_[tr.v[(k + 1) % 3]], pts_[tr.v[(k + 2) % 3]], p) >= 0.0;
            if (inside)
                return i;
        }
        throw IoError("mesh generation: point location failed");
    }

    void insert(int pi) {
        const Vec2& p = pts_[pi];
        const int t0 = locate(p, last_alive_);

        // Grow the cavity of circumcircle-violating triangles.
        std::vector<int> bad;
        std::vector<int> stack{t0};
        std::vector<char> mark(tris_.size(), 0);
        mark[t0] = 1;
        while (!stack.empty()) {
            const int t = stack.back();
            stack.pop_back();
            bad.push_back(t);
            for (int k = 0; k < 3; ++k) {
                const int n = tris_[t].adj[k];
                if (n < 0 || mark[n])
                    continue;
                const Tri& tn = tris_[n];
                if (in_circle(pts_[tn.v[0]], pts_[tn.v[1]], pts_[tn.v[2]], p)) {
                    mark[n] = 1;
                    stack.push_back(n);
                }
            }
        }

        // Cavity boundary: edges of bad triangles whose neighbor is not bad.
        struct Rim {
            int a, b, outside;
        };
        std::vector<Rim> rim;
        for (int t : bad) {
            tris_[t].alive = false;
            for (int k = 0; k < 3; ++k) {
                const int n = tris_[t].adj[k];
                if (n >= 0 && mark[n])
                    continue;
                rim.push_back({tris_[t].v[(k + 1) % 3], tris_[t].v[(k + 2) % 3], n});
            }
        }

        // Fan the cavity from p; stitch adjacency via the shared spokes.
        std::map<std::pair<int, int>, int> spoke; // directed edge (p? no: (a,p)) -> new tri
        std::vector<int> created;
        for (const auto& r : rim) {
            const int nt = add_tri(pi, r.a, r.b, {r.outside, -1, -1});
            mark.push_back(0);
            created.push_back(nt);
            if (r.outside >= 0) {
                Tri& o = tris_[r.outside];
                for (int k = 0; k < 3; ++k) {
                    const int oa = o.v[(k + 1) % 3], ob = o.v[(k + 2) % 3];
                    if ((oa == r.b && ob == r.a) || (oa == r.a && ob == r.b))
                        o.adj[k] = nt;
                }
            }
            spoke[{r.a, r.b}] = nt;
        }
        for (const auto& r : rim) {
            const int nt = spoke[{r.a, r.b}];
            // neighbor across edge opposite v[1]=r.a is the fan triangle on edge (r.b, p)
            for (const auto& [key, other] : spoke) {
                if (key.second == r.a)
                    tris_[nt].adj[2] = other; // edge (p, r.a) shared with tri ending at r.a
                if (key.first == r.b)
                    tris_[nt].adj[1] = other; // edge (r.b, p)
            }
        }
        last_alive_ = created.empty() ? last_alive_ : created.back();
    }

    std::vector<Vec2> pts_;
    std::vector<Tri> tris_;
    int super_ = 0;
    int last_alive_ = 0;
};

struct Chain {
    std::vector<int> points;   // indices into the point list, closed or open polyline
    BoundaryLabel label = BoundaryLabel::Free;
    bool closed = false;
};

double polygon_area(const std::vector<Vec2>& poly) {
    double a = 0.0;
    for (size_t i = 0; i < poly.size(); ++i) {
        const Vec2& p = poly[i];
        const Vec2& q = poly[(i + 1) % poly.size()];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

bool point_in_polygon(const std::vector<Vec2>& poly, const Vec2& p) {
    bool in = false;
    for (size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
        if ((poly[i].y() > p.y()) != (poly[j].y() > p.y())) {
            const double x = poly[j].x() + (p.y() - poly[j].y()) / (poly[i].y() - poly[j].y()) *
                                               (poly[i].x() - poly[j].x());
            if (p.x() < x)
                in = !in;
        }
    }
    return in;
}

double dist_to_segment(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 ab = b - a;
    const double t = std::clamp(ab.dot(p - a) / ab.squaredNorm(), 0.0, 1.0);
    return (p - (a + t * ab)).norm();
}

struct Builder {
    const GeometryConfig& cfg;
    std::mt19937_64 rng;
    std::vector<Vec2> points;
    std::vector<Chain> chains;
    std::vector<std::vector<Vec2>> hole_polys;

    explicit Builder(const GeometryConfig& c) : cfg(c), rng(c.seed) {}

    double jitter(double amount) {
        return std::uniform_real_distribution<double>(-amount, amount)(rng);
    }

    // Straight boundary segment subdivided at spacing ~h; interior chain
    // points are jittered along the segment so the lattice never lines up
    // with the boundary. Endpoints stay exact.
    std::vector<int> add_segment(const Vec2& a, const Vec2& b, int ia, int ib) {
        const double len = (b - a).norm();
        const int n = std::max(1, static_cast<int>(std::round(len / cfg.h)));
        std::vector<int> idx{ia};
        for (int k = 1; k < n; ++k) {
            double t = (k + 0.25 * jitter(1.0)) / n;
            points.push_back(a + t * (b - a));
            idx.push_back(static_cast<int>(points.size()) - 1);
        }
        idx.push_back(ib);
        return idx;
    }

    void add_rectangle_chains() {
        const double W = cfg.width, H = cfg.height;
        const double y1 = 0.5 * H * (1.0 - cfg.load_fraction);
        const double y2 = 0.5 * H * (1.0 + cfg.load_fraction);
        const Vec2 c00(0, 0), c10(W, 0), c11(W, H), c01(0, H);
        const Vec2 n1(W, y1), n2(W, y2);
        const int i00 = push(c00), i10 = push(c10), i11 = push(c11), i01 = push(c01);
        const int in1 = push(n1), in2 = push(n2);
        chains.push_back({add_segment(c00, c10, i00, i10), BoundaryLabel::Free, false});
        chains.push_back({add_segment(c10, n1, i10, in1), BoundaryLabel::Free, false});
        chains.push_back({add_segment(n1, n2, in1, in2), BoundaryLabel::Neumann, false});
        chains.push_back({add_segment(n2, c11, in2, i11), BoundaryLabel::Free, false});
        chains.push_back({add_segment(c11, c01, i11, i01), BoundaryLabel::Free, false});
        chains.push_back({add_segment(c01, c00, i01, i00), BoundaryLabel::Dirichlet, false});
    }

    int push(const Vec2& p) {
        points.push_back(p);
        return static_cast<int>(points.size()) - 1;
    }

    void add_hole_chain(const Hole& hole) {
        const int m = std::max(12, static_cast<int>(std::ceil(2.0 * M_PI * hole.r / cfg.h)));
        std::vector<Vec2> poly(m);
        for (int k = 0; k < m; ++k) {
            // Tiny radial jitter removes exact cocircularity; the scale below
            // restores the requested area.
            const double ang = 2.0 * M_PI * k / m + 0.1 * (2.0 * M_PI / m) * jitter(1.0);
            const double r = hole.r * (1.0 + 1e-3 * jitter(1.0));
            poly[k] = Vec2(hole.cx + r * std::cos(ang), hole.cy + r * std::sin(ang));
        }
        const double area_now = -polygon_area(poly); // CCW polygon, positive area
        const double target = cfg.exact_hole_area
                                  ? M_PI * hole.r * hole.r
                                  : 0.5 * m * hole.r * hole.r * std::sin(2.0 * M_PI / m);
        const double s = std::sqrt(target / std::abs(area_now));
        for (auto& p : poly)
            p = Vec2(hole.cx, hole.cy) + s * (p - Vec2(hole.cx, hole.cy));

        Chain ch;
        ch.label = BoundaryLabel::Free;
        ch.closed = true;
        for (const auto& p : poly)
            ch.points.push_back(push(p));
        chains.push_back(ch);
        hole_polys.push_back(poly);
    }

    void add_interior_points() {
        const double W = cfg.width, H = cfg.height, h = cfg.h;
        const double row_h = h * std::sqrt(3.0) / 2.0;
        const int ny = std::max(1, static_cast<int>(std::round(H / row_h)));
        std::vector<Vec2> segs_a, segs_b;
        for (const auto& ch : chains) {
            const size_t n = ch.points.size();
            const size_t last = ch.closed ? n : n - 1;
            for (size_t i = 0; i < last; ++i) {
                segs_a.push_back(points[ch.points[i]]);
                segs_b.push_back(points[ch.points[(i + 1) % n]]);
            }
        }
        for (int j = 1; j < ny; ++j) {
            const double y = H * j / ny;
            const double x0 = (j % 2 == 0) ? 0.0 : 0.5 * h;
            for (double x = x0; x <= W; x += h) {
                Vec2 p(x + 0.3 * h * jitter(1.0), y + 0.3 * h * jitter(1.0));
                if (p.x() <= 0.0 || p.x() >= W || p.y() <= 0.0 || p.y() >= H)
                    continue;
                bool keep = true;
                for (size_t s = 0; s < segs_a.size() && keep; ++s)
                    keep = dist_to_segment(p, segs_a[s], segs_b[s]) > 0.62 * h;
                for (const auto& poly : hole_polys)
                    if (keep && point_in_polygon(poly, p))
                        keep = false;
                if (keep)
                    points.push_back(p);
            }
        }
    }

    Mesh build() {
        add_rectangle_chains();
        for (const auto& hole : cfg.holes)
            add_hole_chain(hole);
        add_interior_points();

        Delaunay dt(points);
        auto tris = dt.triangles();

        Mesh mesh;
        mesh.vertices = points;
        for (const auto& t : tris) {
            const Vec2 c = (points[t[0]] + points[t[1]] + points[t[2]]) / 3.0;
            bool keep = true;
            for (const auto& poly : hole_polys)
                if (point_in_polygon(poly, c))
                    keep = false;
            if (keep)
                mesh.triangles.push_back(t);
        }
        for (const auto& ch : chains) {
            const size_t n = ch.points.size();
            const size_t last = ch.closed ? n : n - 1;
            for (size_t i = 0; i < last; ++i)
                mesh.boundary_edges.push_back(
                    {ch.points[i], ch.points[(i + 1) % n], ch.label});
        }

        compact(mesh);
        mesh.finalize();
        return mesh;
    }

    static void compact(Mesh& mesh) {
        std::vector<int> remap(mesh.vertices.size(), -1);
        int next = 0;
        for (const auto& t : mesh.triangles)
            for (int v : t)
                if (remap[v] < 0)
                    remap[v] = next++;
        std::vector<Vec2> verts(next);
        for (size_t v = 0; v < mesh.vertices.size(); ++v)
            if (remap[v] >= 0)
                verts[remap[v]] = mesh.vertices[v];
        mesh.vertices = std::move(verts);
        for (auto& t : mesh.triangles)
            for (int& v : t)
                v = remap[v];
        for (auto& be : mesh.boundary_edges) {
            if (remap[be.a] < 0 || remap[be.b] < 0)
                throw IoError("mesh generation: boundary point lost during carving");
            be.a = remap[be.a];
            be.b = remap[be.b];
        }
    }
};

} // namespace

Mesh build_bulky_cantilever(const GeometryConfig& cfg) {
    cfg.validate();
    GeometryConfig c = cfg;
    c.holes.clear();
    Builder b(c);
    return b.build();
}

Mesh build_holed_cantilever(const GeometryConfig& cfg) {
    cfg.validate();
    if (cfg.holes.empty())
        throw ConfigError("geometry: holed cantilever requires holes");
    Builder b(cfg);
    return b.build();
}

} // namespace ef
