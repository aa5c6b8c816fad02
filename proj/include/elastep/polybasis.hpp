#pragma once

#include "elastep/mesh.hpp"

#include <Eigen/Core>

#include <vector>

namespace elastep {

/// Isotropic Lamé constants; both must be positive.
struct Lame {
    double lambda = 0.0;
    double mu = 0.0;

    void validate() const;
};

/// Quadrature on the reference triangle (0,0),(1,0),(0,1) or on the unit interval [0,1].
struct QuadratureRule {
    std::vector<Point> points;    // reference coordinates; second entry unused for intervals
    std::vector<double> weights;  // positive
    int degree = 0;               // exactness degree

    int size() const { return static_cast<int>(weights.size()); }
};

/// Gauss-Legendre rule with n points mapped to [0,1] (weights sum to 1).
QuadratureRule gauss_interval(int n);

/**
 * Triangle rule exact for polynomials of total degree `exactness`.
 * Supported degrees are 2, 4, 6, 8, 10 and 12; weights sum to 1/2.
 */
QuadratureRule triangle_quadrature(int exactness);

/**
 * Lagrange basis values and derivatives on the reference triangle.
 * Row q of each matrix belongs to evaluation point q, column i to basis
 * function i. Hessians are stored as the three components (d11, d12, d22).
 */
struct ShapeTable {
    int degree = 0;
    Eigen::MatrixXd values;
    Eigen::MatrixXd dx;
    Eigen::MatrixXd dy;
    Eigen::MatrixXd dxx;
    Eigen::MatrixXd dxy;
    Eigen::MatrixXd dyy;

    int num_points() const { return static_cast<int>(values.rows()); }
    int num_basis() const { return static_cast<int>(values.cols()); }
};

/**
 * P3 nodes: the three vertices, two points on each edge (edge k opposite
 * vertex k, ordered from vertex k+1 towards vertex k+2), then the centroid.
 */
const std::vector<Point>& p3_nodes();
/// P2 nodes: the three vertices, then the midpoint of edge k for k = 0,1,2.
const std::vector<Point>& p2_nodes();

ShapeTable p3_tabulate(const std::vector<Point>& points);
ShapeTable p2_tabulate(const std::vector<Point>& points);

/// Affine map x = origin + J * xi from the reference triangle onto a mesh triangle.
struct AffineMap {
    Point origin;
    Eigen::Matrix2d jac;
    Eigen::Matrix2d jac_inv;
    double det = 0.0;

    AffineMap(const Point& p0, const Point& p1, const Point& p2);
    static AffineMap of(const TriMesh& mesh, int t);

    Point to_physical(const Point& xi) const { return origin + jac * xi; }
    Point to_reference(const Point& x) const { return jac_inv * (x - origin); }
};

/**
 * Physical-space derivatives of all basis functions at one point:
 * grad is nbasis x 2, hess is nbasis x 3 in (d11, d12, d22) order.
 */
struct PhysicalShapes {
    Eigen::VectorXd values;
    Eigen::MatrixXd grad;
    Eigen::MatrixXd hess;
};

/// Push the reference table row q forward through the affine map.
void push_forward(const ShapeTable& table, int q, const AffineMap& map, PhysicalShapes& out);

/// div sigma(w) from the second derivatives (d11, d12, d22) of the two components of w.
Eigen::Vector2d divsigma_from_hessians(const Lame& lame, const Eigen::Vector3d& h1, const Eigen::Vector3d& h2);

/**
 * Pointwise div sigma(w) for a local P3 vector field whose Lagrange
 * coefficients are given per component on the triangle described by `map`.
 */
Eigen::Vector2d divsigma_eval(const Lame& lame, const Eigen::Matrix<double, 10, 2>& coeffs,
                              const AffineMap& map, const Point& x);

}  // namespace elastep
