#include "elastep/polybasis.hpp"

#include <Eigen/LU>

#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>
#include <utility>

namespace elastep {

void Lame::validate() const
{
    if (!(lambda > 0.0) || !(mu > 0.0))
        throw std::invalid_argument("Lame constants must be positive (lambda=" + std::to_string(lambda) +
                                    ", mu=" + std::to_string(mu) + ")");
}

QuadratureRule gauss_interval(int n)
{
    if (n < 1) throw std::invalid_argument("gauss_interval needs at least one point");
    QuadratureRule rule;
    rule.degree = 2 * n - 1;
    rule.points.resize(n);
    rule.weights.resize(n);
    // P_n(x) and its derivative by the three-term recurrence
    auto legendre = [n](double x) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        return std::pair{p1, n * (x * p1 - p0) / (x * x - 1.0)};
    };
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        for (int it = 0; it < 100; ++it) {
            const auto [p, dp] = legendre(x);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        const double dp = legendre(x).second;
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        rule.points[n - 1 - i] = Point(0.5 * (x + 1.0), 0.0);
        rule.weights[n - 1 - i] = 0.5 * w;
    }
    return rule;
}

QuadratureRule triangle_quadrature(int exactness)
{
    switch (exactness) {
    case 2: case 4: case 6: case 8: case 10: case 12: break;
    default:
        throw std::invalid_argument("unsupported triangle quadrature degree " + std::to_string(exactness));
    }
    // Collapsed tensor Gauss rule: x = u, y = (1-u) v with Jacobian (1-u),
    // so the u-direction integrand has one extra degree.
    const int n = (exactness + 2 + 1) / 2;
    const QuadratureRule g = gauss_interval(n);
    QuadratureRule rule;
    rule.degree = exactness;
    for (int i = 0; i < n; ++i) {
        const double u = g.points[i].x();
        for (int j = 0; j < n; ++j) {
            const double v = g.points[j].x();
            rule.points.emplace_back(u, (1.0 - u) * v);
            rule.weights.push_back(g.weights[i] * g.weights[j] * (1.0 - u));
        }
    }
    return rule;
}

namespace {

std::vector<Point> make_p3_nodes()
{
    const Point v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<Point> nodes(v, v + 3);
    for (int k = 0; k < 3; ++k) {
        const Point& a = v[(k + 1) % 3];
        const Point& b = v[(k + 2) % 3];
        nodes.push_back((2.0 * a + b) / 3.0);
        nodes.push_back((a + 2.0 * b) / 3.0);
    }
    nodes.emplace_back(1.0 / 3.0, 1.0 / 3.0);
    return nodes;
}

std::vector<Point> make_p2_nodes()
{
    const Point v[3] = {{0.0, 0.0}, {1.0, 0.0}, {0.0, 1.0}};
    std::vector<Point> nodes(v, v + 3);
    for (int k = 0; k < 3; ++k) nodes.push_back(0.5 * (v[(k + 1) % 3] + v[(k + 2) % 3]));
    return nodes;
}

// Monomials x^i y^j with i + j <= degree, graded order.
struct Monomials {
    int degree;
    std::vector<std::array<int, 2>> exps;

    explicit Monomials(int d) : degree(d)
    {
        for (int s = 0; s <= d; ++s)
            for (int j = 0; j <= s; ++j) exps.push_back({s - j, j});
    }

    static double dpow(double x, int e, int d)
    {
        if (d > e) return 0.0;
        double c = 1.0;
        for (int k = 0; k < d; ++k) c *= e - k;
        return c * std::pow(x, e - d);
    }

    double eval(int m, const Point& p, int dx, int dy) const
    {
        return dpow(p.x(), exps[m][0], dx) * dpow(p.y(), exps[m][1], dy);
    }
};

// Columns of the returned matrix are the monomial coefficients of the Lagrange functions.
Eigen::MatrixXd lagrange_coefficients(const Monomials& mono, const std::vector<Point>& nodes)
{
    const int n = static_cast<int>(nodes.size());
    Eigen::MatrixXd vand(n, n);
    for (int i = 0; i < n; ++i)
        for (int m = 0; m < n; ++m) vand(i, m) = mono.eval(m, nodes[i], 0, 0);
    return vand.fullPivLu().inverse();
}

ShapeTable tabulate(int degree, const Eigen::MatrixXd& coef, const std::vector<Point>& points)
{
    for (const Point& p : points) {
        if (p.x() < -1e-12 || p.y() < -1e-12 || p.x() + p.y() > 1.0 + 1e-12)
            throw std::invalid_argument("evaluation point outside the reference triangle");
    }
    const Monomials mono(degree);
    const int np = static_cast<int>(points.size());
    const int nb = static_cast<int>(coef.cols());
    auto table_of = [&](int dx, int dy) {
        Eigen::MatrixXd raw(np, nb);
        for (int q = 0; q < np; ++q)
            for (int m = 0; m < nb; ++m) raw(q, m) = mono.eval(m, points[q], dx, dy);
        return Eigen::MatrixXd(raw * coef);
    };
    ShapeTable t;
    t.degree = degree;
    t.values = table_of(0, 0);
    t.dx = table_of(1, 0);
    t.dy = table_of(0, 1);
    t.dxx = table_of(2, 0);
    t.dxy = table_of(1, 1);
    t.dyy = table_of(0, 2);
    return t;
}

}  // namespace

const std::vector<Point>& p3_nodes()
{
    static const std::vector<Point> nodes = make_p3_nodes();
    return nodes;
}

const std::vector<Point>& p2_nodes()
{
    static const std::vector<Point> nodes = make_p2_nodes();
    return nodes;
}

ShapeTable p3_tabulate(const std::vector<Point>& points)
{
    static const Eigen::MatrixXd coef = lagrange_coefficients(Monomials(3), p3_nodes());
    return tabulate(3, coef, points);
}

ShapeTable p2_tabulate(const std::vector<Point>& points)
{
    static const Eigen::MatrixXd coef = lagrange_coefficients(Monomials(2), p2_nodes());
    return tabulate(2, coef, points);
}

AffineMap::AffineMap(const Point& p0, const Point& p1, const Point& p2) : origin(p0)
{
    jac.col(0) = p1 - p0;
    jac.col(1) = p2 - p0;
    det = jac.determinant();
    if (!(std::abs(det) > 0.0)) throw std::invalid_argument("degenerate triangle");
    jac_inv = jac.inverse();
}

AffineMap AffineMap::of(const TriMesh& mesh, int t)
{
    const auto& tri = mesh.triangle(t);
    return AffineMap(mesh.vertex(tri[0]), mesh.vertex(tri[1]), mesh.vertex(tri[2]));
}

void push_forward(const ShapeTable& table, int q, const AffineMap& map, PhysicalShapes& out)
{
    const int nb = table.num_basis();
    out.values = table.values.row(q).transpose();
    out.grad.resize(nb, 2);
    out.hess.resize(nb, 3);
    const Eigen::Matrix2d& g = map.jac_inv;  // d(xi_a)/d(x_i) = g(a, i)
    for (int i = 0; i < nb; ++i) {
        const double rx = table.dx(q, i), ry = table.dy(q, i);
        out.grad(i, 0) = g(0, 0) * rx + g(1, 0) * ry;
        out.grad(i, 1) = g(0, 1) * rx + g(1, 1) * ry;
        Eigen::Matrix2d hr;
        hr << table.dxx(q, i), table.dxy(q, i), table.dxy(q, i), table.dyy(q, i);
        const Eigen::Matrix2d hp = g.transpose() * hr * g;
        out.hess(i, 0) = hp(0, 0);
        out.hess(i, 1) = hp(0, 1);
        out.hess(i, 2) = hp(1, 1);
    }
}

Eigen::Vector2d divsigma_from_hessians(const Lame& lame, const Eigen::Vector3d& h1, const Eigen::Vector3d& h2)
{
    const double l = lame.lambda, m = lame.mu;
    return {(l + 2.0 * m) * h1[0] + m * h1[2] + (l + m) * h2[1],
            (l + m) * h1[1] + m * h2[0] + (l + 2.0 * m) * h2[2]};
}

Eigen::Vector2d divsigma_eval(const Lame& lame, const Eigen::Matrix<double, 10, 2>& coeffs,
                              const AffineMap& map, const Point& x)
{
    const ShapeTable table = p3_tabulate({map.to_reference(x)});
    PhysicalShapes s;
    push_forward(table, 0, map, s);
    const Eigen::Vector3d h1 = s.hess.transpose() * coeffs.col(0);
    const Eigen::Vector3d h2 = s.hess.transpose() * coeffs.col(1);
    return divsigma_from_hessians(lame, h1, h2);
}

}  // namespace elastep
