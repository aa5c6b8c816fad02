#pragma once

#include <Eigen/Core>

#include <array>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace elastep {

using Point = Eigen::Vector2d;

enum class Domain {
    UnitSquare,           // [0,1]^2
    RightTriangle,        // (0,0), (1,0), (0,1)
    EquilateralTriangle,  // (0,0), (1,0), (1/2, sqrt(3)/2)
    LShape,               // (0,1)^2 minus [1/2,1]^2
};

Domain parse_domain(std::string_view name);
std::string_view domain_name(Domain domain);
double domain_area(Domain domain);

/// Largest refinement level accepted by generate_domain unless the caller raises it.
inline constexpr int kDefaultMaxLevel = 6;

/**
 * Conforming triangulation of a polygonal 2D domain with full edge topology.
 *
 * Triangles are counterclockwise. Edges are stored with their lower vertex
 * index first; the edge tangent points from edges[e][0] to edges[e][1] and the
 * edge normal is that tangent rotated 90 degrees clockwise. Local edge k of a
 * triangle is the edge opposite its local vertex k.
 *
 * Instances are immutable after construction and safe to share between
 * threads.
 */
class TriMesh {
public:
    TriMesh(std::vector<Point> vertices, std::vector<std::array<int, 3>> triangles,
            double h, int level, Domain domain);

    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_triangles() const { return static_cast<int>(triangles_.size()); }
    int num_edges() const { return static_cast<int>(edges_.size()); }
    int num_interior_vertices() const { return num_interior_vertices_; }
    int num_interior_edges() const { return num_interior_edges_; }

    const std::vector<Point>& vertices() const { return vertices_; }
    const std::vector<std::array<int, 3>>& triangles() const { return triangles_; }
    const std::vector<std::array<int, 2>>& edges() const { return edges_; }

    const Point& vertex(int v) const { return vertices_[v]; }
    const std::array<int, 3>& triangle(int t) const { return triangles_[t]; }
    const std::array<int, 2>& edge(int e) const { return edges_[e]; }

    /// Adjacent triangles of an edge; the second entry is -1 on the boundary.
    const std::array<int, 2>& edge_triangles(int e) const { return edge_triangles_[e]; }
    /// Global edge index of local edge k (opposite local vertex k).
    const std::array<int, 3>& triangle_edges(int t) const { return triangle_edges_[t]; }
    /// Triangles incident to a vertex, in increasing index order.
    const std::vector<int>& vertex_triangles(int v) const { return vertex_triangles_[v]; }
    /// Edges incident to a vertex, in increasing index order.
    const std::vector<int>& vertex_edges(int v) const { return vertex_edges_[v]; }

    bool boundary_vertex(int v) const { return boundary_vertex_[v] != 0; }
    bool boundary_edge(int e) const { return boundary_edge_[e] != 0; }

    double h() const { return h_; }
    int level() const { return level_; }
    Domain domain() const { return domain_; }

    double signed_area(int t) const;
    double area(int t) const { return signed_area(t); }
    double edge_length(int e) const;
    Point edge_tangent(int e) const;
    Point edge_normal(int e) const;
    Point edge_midpoint(int e) const;
    Point centroid(int t) const;

    double total_area() const;
    double max_edge_length() const;
    double min_angle() const;

private:
    void build_topology();

    std::vector<Point> vertices_;
    std::vector<std::array<int, 3>> triangles_;
    std::vector<std::array<int, 2>> edges_;
    std::vector<std::array<int, 2>> edge_triangles_;
    std::vector<std::array<int, 3>> triangle_edges_;
    std::vector<std::vector<int>> vertex_triangles_;
    std::vector<std::vector<int>> vertex_edges_;
    std::vector<char> boundary_vertex_;
    std::vector<char> boundary_edge_;
    int num_interior_vertices_ = 0;
    int num_interior_edges_ = 0;
    double h_ = 0.0;
    int level_ = 0;
    Domain domain_ = Domain::UnitSquare;
};

/**
 * Uniformly refined mesh of one of the built-in domains.
 *
 * Level 0 has nominal size h = 1/2 on the square, L-shape and right triangle
 * and h = 1/4 on the equilateral triangle; every level halves h.
 */
TriMesh generate_domain(Domain domain, int level, int max_level = kDefaultMaxLevel);

/// Red refinement: every triangle is split into four through its edge midpoints.
TriMesh refine_uniform(const TriMesh& mesh);

/// Plain-text dump with `vertices`, `triangles` and `edges` sections.
void write_mesh(std::ostream& out, const TriMesh& mesh);

}  // namespace elastep
