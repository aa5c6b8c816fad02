#include "elastep/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <unordered_map>

namespace elastep {

Domain parse_domain(std::string_view name)
{
    if (name == "square" || name == "unit-square") return Domain::UnitSquare;
    if (name == "right-triangle" || name == "triangle") return Domain::RightTriangle;
    if (name == "equilateral" || name == "equilateral-triangle") return Domain::EquilateralTriangle;
    if (name == "lshape" || name == "l-shape" || name == "L") return Domain::LShape;
    throw std::invalid_argument("unknown domain '" + std::string(name) + "'");
}

std::string_view domain_name(Domain domain)
{
    switch (domain) {
    case Domain::UnitSquare: return "square";
    case Domain::RightTriangle: return "right-triangle";
    case Domain::EquilateralTriangle: return "equilateral";
    case Domain::LShape: return "lshape";
    }
    return "unknown";
}

double domain_area(Domain domain)
{
    switch (domain) {
    case Domain::UnitSquare: return 1.0;
    case Domain::RightTriangle: return 0.5;
    case Domain::EquilateralTriangle: return std::sqrt(3.0) / 4.0;
    case Domain::LShape: return 0.75;
    }
    return 0.0;
}

TriMesh::TriMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
                 double h, int level, Domain domain)
    : vertices_(std::move(vertices)), triangles_(std::move(triangles)), h_(h), level_(level),
      domain_(domain)
{
    const int nv = num_vertices();
    for (int t = 0; t < num_triangles(); ++t) {
        for (int v : triangles_[t]) {
            if (v < 0 || v >= nv) throw std::invalid_argument("triangle references missing vertex");
        }
        if (!(signed_area(t) > 0.0))
            throw std::invalid_argument("triangle " + std::to_string(t) + " is degenerate or clockwise");
    }
    build_topology();
}

void TriMesh::build_topology()
{
    const int nv = num_vertices();
    const int nt = num_triangles();
    std::unordered_map<long long, int> lookup;
    lookup.reserve(static_cast<size_t>(3 * nt));
    triangle_edges_.assign(nt, {-1, -1, -1});
    for (int t = 0; t < nt; ++t) {
        const auto& tri = triangles_[t];
        for (int k = 0; k < 3; ++k) {
            int a = tri[(k + 1) % 3];
            int b = tri[(k + 2) % 3];
            if (a > b) std::swap(a, b);
            const long long key = static_cast<long long>(a) * nv + b;
            auto [it, inserted] = lookup.try_emplace(key, num_edges());
            if (inserted) {
                edges_.push_back({a, b});
                edge_triangles_.push_back({t, -1});
            } else {
                auto& adj = edge_triangles_[it->second];
                if (adj[1] != -1) throw std::invalid_argument("edge shared by more than two triangles");
                adj[1] = t;
            }
            triangle_edges_[t][k] = it->second;
        }
    }

    const int ne = num_edges();
    boundary_edge_.assign(ne, 0);
    boundary_vertex_.assign(nv, 0);
    vertex_triangles_.assign(nv, {});
    vertex_edges_.assign(nv, {});
    for (int e = 0; e < ne; ++e) {
        if (edge_length(e) <= 0.0) throw std::invalid_argument("zero-length edge");
        if (edge_triangles_[e][1] == -1) {
            boundary_edge_[e] = 1;
            boundary_vertex_[edges_[e][0]] = 1;
            boundary_vertex_[edges_[e][1]] = 1;
        }
        vertex_edges_[edges_[e][0]].push_back(e);
        vertex_edges_[edges_[e][1]].push_back(e);
    }
    for (int t = 0; t < nt; ++t)
        for (int v : triangles_[t]) vertex_triangles_[v].push_back(t);

    num_interior_vertices_ = static_cast<int>(std::count(boundary_vertex_.begin(), boundary_vertex_.end(), 0));
    num_interior_edges_ = static_cast<int>(std::count(boundary_edge_.begin(), boundary_edge_.end(), 0));
}

double TriMesh::signed_area(int t) const
{
    const auto& tri = triangles_[t];
    const Point u = vertices_[tri[1]] - vertices_[tri[0]];
    const Point v = vertices_[tri[2]] - vertices_[tri[0]];
    return 0.5 * (u.x() * v.y() - u.y() * v.x());
}

double TriMesh::edge_length(int e) const
{
    return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).norm();
}

Point TriMesh::edge_tangent(int e) const
{
    return (vertices_[edges_[e][1]] - vertices_[edges_[e][0]]).normalized();
}

Point TriMesh::edge_normal(int e) const
{
    const Point t = edge_tangent(e);
    return {t.y(), -t.x()};
}

Point TriMesh::edge_midpoint(int e) const
{
    return 0.5 * (vertices_[edges_[e][0]] + vertices_[edges_[e][1]]);
}

Point TriMesh::centroid(int t) const
{
    const auto& tri = triangles_[t];
    return (vertices_[tri[0]] + vertices_[tri[1]] + vertices_[tri[2]]) / 3.0;
}

double TriMesh::total_area() const
{
    double sum = 0.0;
    for (int t = 0; t < num_triangles(); ++t) sum += signed_area(t);
    return sum;
}

double TriMesh::max_edge_length() const
{
    double hmax = 0.0;
    for (int e = 0; e < num_edges(); ++e) hmax = std::max(hmax, edge_length(e));
    return hmax;
}

double TriMesh::min_angle() const
{
    double amin = std::numbers::pi;
    for (const auto& tri : triangles_) {
        for (int k = 0; k < 3; ++k) {
            const Point u = vertices_[tri[(k + 1) % 3]] - vertices_[tri[k]];
            const Point v = vertices_[tri[(k + 2) % 3]] - vertices_[tri[k]];
            amin = std::min(amin, std::acos(std::clamp(u.dot(v) / (u.norm() * v.norm()), -1.0, 1.0)));
        }
    }
    return amin;
}

namespace {

TriMesh coarse_mesh(Domain domain)
{
    switch (domain) {
    case Domain::UnitSquare:
    case Domain::LShape: {
        std::vector<Point> verts;
        std::vector<int> id(9, -1);
        for (int j = 0; j <= 2; ++j) {
            for (int i = 0; i <= 2; ++i) {
                if (domain == Domain::LShape && i == 2 && j == 2) continue;
                id[3 * j + i] = static_cast<int>(verts.size());
                verts.emplace_back(0.5 * i, 0.5 * j);
            }
        }
        std::vector<std::array<int, 3>> tris;
        for (int j = 0; j < 2; ++j) {
            for (int i = 0; i < 2; ++i) {
                if (domain == Domain::LShape && i == 1 && j == 1) continue;
                const int a = id[3 * j + i], b = id[3 * j + i + 1];
                const int c = id[3 * (j + 1) + i + 1], d = id[3 * (j + 1) + i];
                tris.push_back({a, b, d});
                tris.push_back({b, c, d});
            }
        }
        return TriMesh(std::move(verts), std::move(tris), 0.5, 0, domain);
    }
    case Domain::RightTriangle: {
        TriMesh single({{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}}, {{0, 1, 2}}, 1.0, -1, domain);
        return refine_uniform(single);
    }
    case Domain::EquilateralTriangle: {
        TriMesh single({{0.0, 0.0}, {1.0, 0.0}, {0.5, std::sqrt(3.0) / 2.0}}, {{0, 1, 2}}, 1.0, -2, domain);
        return refine_uniform(refine_uniform(single));
    }
    }
    throw std::invalid_argument("unknown domain");
}

}  // namespace

TriMesh generate_domain(Domain domain, int level, int max_level)
{
    if (level < 0) throw std::invalid_argument("level must be nonnegative");
    if (level > max_level)
        throw std::invalid_argument("level " + std::to_string(level) + " exceeds the cap " +
                                    std::to_string(max_level));
    TriMesh mesh = coarse_mesh(domain);
    for (int l = 0; l < level; ++l) mesh = refine_uniform(mesh);
    return mesh;
}

TriMesh refine_uniform(const TriMesh& mesh)
{
    std::vector<Point> verts = mesh.vertices();
    const int nv = mesh.num_vertices();
    verts.reserve(nv + mesh.num_edges());
    for (int e = 0; e < mesh.num_edges(); ++e) verts.push_back(mesh.edge_midpoint(e));

    std::vector<std::array<int, 3>> tris;
    tris.reserve(4 * static_cast<size_t>(mesh.num_triangles()));
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const auto& [a, b, c] = mesh.triangle(t);
        const auto& te = mesh.triangle_edges(t);
        const int bc = nv + te[0], ca = nv + te[1], ab = nv + te[2];
        tris.push_back({a, ab, ca});
        tris.push_back({ab, b, bc});
        tris.push_back({ca, bc, c});
        tris.push_back({ab, bc, ca});
    }
    return TriMesh(std::move(verts), std::move(tris), 0.5 * mesh.h(), mesh.level() + 1, mesh.domain());
}

void write_mesh(std::ostream& out, const TriMesh& mesh)
{
    const auto old_flags = out.flags();
    const auto old_prec = out.precision();
    out << std::setprecision(17);
    out << "# domain " << domain_name(mesh.domain()) << " level " << mesh.level() << " h " << mesh.h() << '\n';
    out << "vertices " << mesh.num_vertices() << '\n';
    for (int v = 0; v < mesh.num_vertices(); ++v)
        out << mesh.vertex(v).x() << ' ' << mesh.vertex(v).y() << ' ' << (mesh.boundary_vertex(v) ? 1 : 0) << '\n';
    out << "triangles " << mesh.num_triangles() << '\n';
    for (const auto& [a, b, c] : mesh.triangles()) out << a << ' ' << b << ' ' << c << '\n';
    out << "edges " << mesh.num_edges() << '\n';
    for (int e = 0; e < mesh.num_edges(); ++e) {
        const auto& [a, b] = mesh.edge(e);
        const auto& [t0, t1] = mesh.edge_triangles(e);
        out << a << ' ' << b << ' ' << t0 << ' ' << t1 << '\n';
    }
    out.flags(old_flags);
    out.precision(old_prec);
}

}  // namespace elastep
