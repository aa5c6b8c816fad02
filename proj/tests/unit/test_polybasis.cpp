#include "elastep/polybasis.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace elastep;

namespace {

double factorial(int n) { return n <= 1 ? 1.0 : n * factorial(n - 1); }

// integral of x^i y^j over the reference triangle
double monomial_integral(int i, int j) { return factorial(i) * factorial(j) / factorial(i + j + 2); }

std::vector<Point> random_reference_points(int n, unsigned seed)
{
    std::mt19937 gen(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    std::vector<Point> pts;
    while (static_cast<int>(pts.size()) < n) {
        const double a = u(gen), b = u(gen);
        if (a + b < 1.0) pts.emplace_back(a, b);
    }
    return pts;
}

}  // namespace

TEST(Quadrature, GaussIntervalIsExact)
{
    for (int n = 1; n <= 8; ++n) {
        const QuadratureRule r = gauss_interval(n);
        for (int p = 0; p <= 2 * n - 1; ++p) {
            double s = 0.0;
            for (int q = 0; q < r.size(); ++q) s += r.weights[q] * std::pow(r.points[q].x(), p);
            EXPECT_NEAR(s, 1.0 / (p + 1), 1e-14) << n << ' ' << p;
        }
    }
    EXPECT_THROW(gauss_interval(0), std::invalid_argument);
}

TEST(Quadrature, TriangleRulesAreExact)
{
    for (int deg : {2, 4, 6, 8, 10, 12}) {
        const QuadratureRule r = triangle_quadrature(deg);
        EXPECT_GE(r.degree, deg);
        for (int q = 0; q < r.size(); ++q) {
            EXPECT_GT(r.weights[q], 0.0);
            EXPECT_GT(r.points[q].x(), 0.0);
            EXPECT_GT(r.points[q].y(), 0.0);
            EXPECT_LT(r.points[q].x() + r.points[q].y(), 1.0);
        }
        for (int i = 0; i <= deg; ++i)
            for (int j = 0; i + j <= deg; ++j) {
                double s = 0.0;
                for (int q = 0; q < r.size(); ++q)
                    s += r.weights[q] * std::pow(r.points[q].x(), i) * std::pow(r.points[q].y(), j);
                EXPECT_NEAR(s, monomial_integral(i, j), 1e-15) << deg << ' ' << i << ' ' << j;
            }
    }
    EXPECT_THROW(triangle_quadrature(13), std::invalid_argument);
}

TEST(Shapes, KroneckerAtNodes)
{
    const ShapeTable t3 = p3_tabulate(p3_nodes());
    EXPECT_LT((t3.values - Eigen::MatrixXd::Identity(10, 10)).cwiseAbs().maxCoeff(), 1e-13);
    const ShapeTable t2 = p2_tabulate(p2_nodes());
    EXPECT_LT((t2.values - Eigen::MatrixXd::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-13);
}

TEST(Shapes, NodeLayout)
{
    const auto& n = p3_nodes();
    ASSERT_EQ(n.size(), 10u);
    EXPECT_TRUE(n[0].isApprox(Point(0, 0)));
    EXPECT_TRUE(n[1].isApprox(Point(1, 0)));
    EXPECT_TRUE(n[2].isApprox(Point(0, 1)));
    // edge 0 runs from vertex 1 to vertex 2
    EXPECT_TRUE(n[3].isApprox(Point(2.0 / 3, 1.0 / 3)));
    EXPECT_TRUE(n[4].isApprox(Point(1.0 / 3, 2.0 / 3)));
    EXPECT_TRUE(n[9].isApprox(Point(1.0 / 3, 1.0 / 3)));
}

TEST(Shapes, PartitionOfUnityAndDerivativeSums)
{
    const auto pts = random_reference_points(20, 7);
    for (const ShapeTable& t : {p3_tabulate(pts), p2_tabulate(pts)}) {
        for (int q = 0; q < t.num_points(); ++q) {
            EXPECT_NEAR(t.values.row(q).sum(), 1.0, 1e-13);
            EXPECT_NEAR(t.dx.row(q).sum(), 0.0, 1e-12);
            EXPECT_NEAR(t.dy.row(q).sum(), 0.0, 1e-12);
            EXPECT_NEAR(t.dxx.row(q).sum(), 0.0, 1e-11);
            EXPECT_NEAR(t.dxy.row(q).sum(), 0.0, 1e-11);
            EXPECT_NEAR(t.dyy.row(q).sum(), 0.0, 1e-11);
        }
    }
}

TEST(Shapes, DerivativesMatchFiniteDifferences)
{
    const auto pts = random_reference_points(6, 11);
    const double d = 1e-5;
    for (const Point& p : pts) {
        if (p.x() < 2 * d || p.y() < 2 * d || p.x() + p.y() > 1 - 4 * d) continue;
        const ShapeTable c = p3_tabulate({p});
        const ShapeTable xp = p3_tabulate({p + Point(d, 0)}), xm = p3_tabulate({p - Point(d, 0)});
        const ShapeTable yp = p3_tabulate({p + Point(0, d)}), ym = p3_tabulate({p - Point(0, d)});
        for (int i = 0; i < 10; ++i) {
            EXPECT_NEAR(c.dx(0, i), (xp.values(0, i) - xm.values(0, i)) / (2 * d), 1e-8);
            EXPECT_NEAR(c.dy(0, i), (yp.values(0, i) - ym.values(0, i)) / (2 * d), 1e-8);
            EXPECT_NEAR(c.dxx(0, i), (xp.dx(0, i) - xm.dx(0, i)) / (2 * d), 1e-7);
            EXPECT_NEAR(c.dxy(0, i), (yp.dx(0, i) - ym.dx(0, i)) / (2 * d), 1e-7);
            EXPECT_NEAR(c.dyy(0, i), (yp.dy(0, i) - ym.dy(0, i)) / (2 * d), 1e-7);
        }
    }
}

TEST(Shapes, OutsidePointsRejected)
{
    EXPECT_THROW(p3_tabulate({Point(0.8, 0.8)}), std::invalid_argument);
}

TEST(PushForward, ReproducesPhysicalCubic)
{
    const AffineMap map(Point(0.1, 0.2), Point(1.3, 0.4), Point(0.5, 1.1));
    auto f = [](const Point& x) { return 1 + x.x() - 2 * x.y() + x.x() * x.x() * x.y() - 0.5 * std::pow(x.y(), 3); };
    auto fx = [](const Point& x) { return 1 + 2 * x.x() * x.y(); };
    auto fy = [](const Point& x) { return -2 + x.x() * x.x() - 1.5 * x.y() * x.y(); };
    Eigen::VectorXd coef(10);
    for (int i = 0; i < 10; ++i) coef[i] = f(map.to_physical(p3_nodes()[i]));
    const auto pts = random_reference_points(8, 3);
    const ShapeTable t = p3_tabulate(pts);
    PhysicalShapes ps;
    for (int q = 0; q < t.num_points(); ++q) {
        push_forward(t, q, map, ps);
        const Point x = map.to_physical(pts[q]);
        EXPECT_NEAR(ps.values.dot(coef), f(x), 1e-12);
        EXPECT_NEAR(ps.grad.col(0).dot(coef), fx(x), 1e-11);
        EXPECT_NEAR(ps.grad.col(1).dot(coef), fy(x), 1e-11);
        EXPECT_NEAR(ps.hess.col(0).dot(coef), 2 * x.y(), 1e-10);
        EXPECT_NEAR(ps.hess.col(1).dot(coef), 2 * x.x(), 1e-10);
        EXPECT_NEAR(ps.hess.col(2).dot(coef), -3 * x.y(), 1e-10);
    }
    EXPECT_NEAR(map.to_reference(map.to_physical(Point(0.2, 0.3))).x(), 0.2, 1e-15);
    EXPECT_NEAR(std::abs(map.det), 2 * 0.5 * std::abs(1.2 * 0.9 - 0.2 * 0.4), 1e-14);
    EXPECT_THROW(AffineMap(Point(0, 0), Point(1, 1), Point(2, 2)), std::invalid_argument);
}

TEST(DivSigma, KnownFields)
{
    const Lame lame{0.25, 0.0625};
    const double l = lame.lambda, m = lame.mu;
    // w = (x^2, 0)
    Eigen::Vector2d r = divsigma_from_hessians(lame, Eigen::Vector3d(2, 0, 0), Eigen::Vector3d::Zero());
    EXPECT_NEAR(r.x(), 2 * (l + 2 * m), 1e-15);
    EXPECT_NEAR(r.y(), 0.0, 1e-15);
    // w = (xy, 0)
    r = divsigma_from_hessians(lame, Eigen::Vector3d(0, 1, 0), Eigen::Vector3d::Zero());
    EXPECT_NEAR(r.x(), 0.0, 1e-15);
    EXPECT_NEAR(r.y(), l + m, 1e-15);
    // w = (0, y^2)
    r = divsigma_from_hessians(lame, Eigen::Vector3d::Zero(), Eigen::Vector3d(0, 0, 2));
    EXPECT_NEAR(r.y(), 2 * (l + 2 * m), 1e-15);
}

TEST(DivSigma, EvaluationOnATriangle)
{
    const Lame lame{0.25, 0.0625};
    const AffineMap map(Point(0.1, 0.2), Point(1.3, 0.4), Point(0.5, 1.1));
    // w = (x^2 y, x y^2): d11 w1 = 2y, d12 w1 = 2x, d22 w2 = 2x, d12 w2 = 2y
    Eigen::Matrix<double, 10, 2> c;
    for (int i = 0; i < 10; ++i) {
        const Point x = map.to_physical(p3_nodes()[i]);
        c(i, 0) = x.x() * x.x() * x.y();
        c(i, 1) = x.x() * x.y() * x.y();
    }
    const Point x(0.6, 0.5);
    const Eigen::Vector2d r = divsigma_eval(lame, c, map, x);
    const Eigen::Vector2d expect =
        divsigma_from_hessians(lame, Eigen::Vector3d(2 * x.y(), 2 * x.x(), 0), Eigen::Vector3d(0, 2 * x.y(), 2 * x.x()));
    EXPECT_NEAR((r - expect).norm(), 0.0, 1e-12);
}

TEST(Lame, Validation)
{
    EXPECT_NO_THROW((Lame{0.25, 0.0625}.validate()));
    EXPECT_THROW((Lame{0.0, 1.0}.validate()), std::invalid_argument);
    EXPECT_THROW((Lame{1.0, -1.0}.validate()), std::invalid_argument);
}
