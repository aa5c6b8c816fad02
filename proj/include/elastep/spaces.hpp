#pragma once

#include "elastep/mesh.hpp"

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include <cmath>
#include <memory>
#include <string_view>
#include <vector>

namespace elastep {

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

/// Number of broken P3 coefficients per triangle and scalar component.
inline constexpr int kP3Local = 10;

enum class ConstraintKind {
    VertexContinuity,
    EdgeJumpMean,
    EdgeNormalMoment0,
    EdgeNormalMoment1,
    BoundaryVertexZero,
    BoundaryEdgeMean,
    BoundaryNormalMoment0,
    BoundaryNormalMoment1,
};

/**
 * Linear constraints defining the scalar B3_h0 space inside broken P3.
 * Column 10 t + i is the Lagrange coefficient of node i on triangle t.
 * Edge moment rows test against the orthonormal Legendre pair {1, sqrt(3) s}
 * in the edge parameter s in [-1, 1] and are scaled to be length independent.
 */
struct ConstraintSystem {
    SparseMatrix matrix;
    std::vector<ConstraintKind> kinds;
    std::vector<int> entity;  // vertex or edge index of each row

    int rows() const { return static_cast<int>(matrix.rows()); }
};

ConstraintSystem build_b3_constraints(const TriMesh& mesh);

/**
 * Full-column-rank sparse basis of the kernel of the B3_h0 constraints.
 *
 * Columns are built patch by patch: one function per interior edge (the
 * kernel of its two-triangle patch) followed by three functions per
 * interior vertex (the kernel of its vertex patch with the incident edge
 * functions projected out). Columns are ordered vertex functions first.
 */
struct ConformingBasis {
    SparseMatrix transform;      // broken scalar dim x conforming scalar dim
    int dim = 0;
    double constraint_residual = 0.0;  // max |C N|
    double min_pivot = 0.0;            // smallest LDLT pivot of N^T N relative to the largest
};

ConformingBasis build_nullspace(const TriMesh& mesh, const ConstraintSystem& constraints);

enum class ElementType { B3, Morley };

ElementType parse_element(std::string_view name);
std::string_view element_name(ElementType type);

/**
 * Local Morley element on triangle t: the 6 quadratic shape functions dual to
 * the vertex values and the edge means of the normal derivative along the
 * global edge normals, expressed through their 10 P3 Lagrange coefficients.
 */
Eigen::Matrix<double, 10, 6> morley_local_p3(const TriMesh& mesh, int t);

/**
 * Morley degrees of freedom of a function on triangle t given its value
 * and gradient callbacks: the three vertex values then the three edge means
 * of the normal derivative (edge k opposite vertex k, global normal).
 */
template <class Value, class Grad>
Eigen::Matrix<double, 6, 1> morley_dofs(const TriMesh& mesh, int t, Value&& value, Grad&& grad);

/// Scalar Morley space with homogeneous clamped boundary conditions embedded into broken P3.
struct MorleyBasis {
    SparseMatrix transform;  // broken scalar dim x (interior vertices + interior edges)
    int dim = 0;
    std::vector<int> vertex_dof;  // -1 on boundary
    std::vector<int> edge_dof;    // -1 on boundary
};

MorleyBasis build_morley(const TriMesh& mesh);

/**
 * Vector-valued discrete space over a mesh. Broken coefficients are laid out
 * component-major: index c * 10 T + 10 t + i.
 */
class DiscreteSpace {
public:
    static DiscreteSpace b3(std::shared_ptr<const TriMesh> mesh);
    static DiscreteSpace morley(std::shared_ptr<const TriMesh> mesh);
    static DiscreteSpace make(std::shared_ptr<const TriMesh> mesh, ElementType type);

    const TriMesh& mesh() const { return *mesh_; }
    std::shared_ptr<const TriMesh> mesh_ptr() const { return mesh_; }
    ElementType type() const { return type_; }

    int scalar_dim() const { return static_cast<int>(scalar_.cols()); }
    int dim() const { return 2 * scalar_dim(); }
    int broken_dim() const { return 2 * kP3Local * mesh_->num_triangles(); }

    const SparseMatrix& scalar_transform() const { return scalar_; }
    /// Block diagonal transform for both components.
    const SparseMatrix& transform() const { return vector_; }

    /// N^T A N for a broken vector-space matrix A.
    SparseMatrix restrict(const SparseMatrix& broken) const;
    Eigen::VectorXd restrict(const Eigen::VectorXd& broken) const;
    /// Broken coefficients N x of a conforming coordinate vector.
    Eigen::VectorXd expand(const Eigen::VectorXd& coords) const;

private:
    DiscreteSpace(std::shared_ptr<const TriMesh> mesh, ElementType type, SparseMatrix scalar);

    std::shared_ptr<const TriMesh> mesh_;
    ElementType type_;
    SparseMatrix scalar_;
    SparseMatrix vector_;
};

// ---------------------------------------------------------------------------

template <class Value, class Grad>
Eigen::Matrix<double, 6, 1> morley_dofs(const TriMesh& mesh, int t, Value&& value, Grad&& grad)
{
    Eigen::Matrix<double, 6, 1> d;
    const auto& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k) d[k] = value(mesh.vertex(tri[k]));
    const double g = 0.5 / std::sqrt(3.0);
    for (int k = 0; k < 3; ++k) {
        const int e = mesh.triangle_edges(t)[k];
        const Point& a = mesh.vertex(mesh.edge(e)[0]);
        const Point& b = mesh.vertex(mesh.edge(e)[1]);
        const Point n = mesh.edge_normal(e);
        double acc = 0.0;
        for (double s : {0.5 - g, 0.5 + g}) acc += 0.5 * Point(grad(a + s * (b - a))).dot(n);
        d[3 + k] = acc;
    }
    return d;
}

}  // namespace elastep
