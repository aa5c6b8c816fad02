#include "elastep/assembly.hpp"
#include "elastep/harness.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>

#include "oracle_bielastic_kernel.inc"

using namespace elastep;

namespace {

const Lame kLame{0.25, 0.0625};

Eigen::MatrixXd dense(const SparseMatrix& s) { return Eigen::MatrixXd(s); }

double rel_diff(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b)
{
    return (a - b).cwiseAbs().maxCoeff() / std::max(a.cwiseAbs().maxCoeff(), b.cwiseAbs().maxCoeff());
}

double min_eig(const Eigen::MatrixXd& a)
{
    return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(a, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

// broken coefficients interpolating a vector field at the P3 nodes
template <class F>
Eigen::VectorXd interpolate(const TriMesh& m, F&& f)
{
    const int nt = m.num_triangles();
    Eigen::VectorXd c(20 * nt);
    for (int t = 0; t < nt; ++t) {
        const AffineMap map = AffineMap::of(m, t);
        for (int i = 0; i < 10; ++i) {
            const Eigen::Vector2d v = f(map.to_physical(p3_nodes()[i]));
            c[10 * t + i] = v.x();
            c[10 * nt + 10 * t + i] = v.y();
        }
    }
    return c;
}

std::shared_ptr<const TriMesh> square(int level)
{
    return std::make_shared<const TriMesh>(generate_domain(Domain::UnitSquare, level));
}

}  // namespace

TEST(Assembly, MatchesExactElementKernel)
{
    std::vector<Point> v;
    for (const auto& p : kOracleVertices) v.emplace_back(p[0], p[1]);
    const TriMesh one(v, {{0, 1, 2}}, 1.0, 0, Domain::UnitSquare);
    const Eigen::MatrixXd k = dense(assemble(one, FormKind::BiElastic, 1.0, kLame).matrix);
    ASSERT_EQ(k.rows(), 20);
    double scale = 0.0, err = 0.0;
    for (int i = 0; i < 20; ++i)
        for (int j = 0; j < 20; ++j) {
            scale = std::max(scale, std::abs(kOracleKernel[i][j]));
            err = std::max(err, std::abs(k(i, j) - kOracleKernel[i][j]));
        }
    EXPECT_LT(err, 1e-12 * scale);
}

TEST(Assembly, SymmetricKindsAreSymmetric)
{
    const TriMesh m = generate_domain(Domain::LShape, 1);
    const Coefficient c = Coefficient::radial_quadratic(4);
    for (FormKind k : {FormKind::Mass, FormKind::BiElastic, FormKind::ElasticEnergy, FormKind::HessianFull,
                       FormKind::GradDiv, FormKind::LaplacePair, FormKind::CurlRot}) {
        const FormMatrix f = assemble(m, k, c, kLame);
        EXPECT_TRUE(f.symmetric);
        EXPECT_TRUE(form_is_symmetric(k));
        const Eigen::MatrixXd d = dense(f.matrix);
        EXPECT_LT((d - d.transpose()).cwiseAbs().maxCoeff(), 1e-12 * d.cwiseAbs().maxCoeff()) << form_name(k);
    }
    EXPECT_FALSE(form_is_symmetric(FormKind::MixedDivSigmaMass));
    EXPECT_FALSE(form_is_symmetric(FormKind::GradDivCurlRot));
}

TEST(Assembly, MassAndLoadSums)
{
    for (Domain d : {Domain::UnitSquare, Domain::EquilateralTriangle}) {
        const TriMesh m = generate_domain(d, 1);
        const Eigen::MatrixXd mass = dense(assemble(m, FormKind::Mass, 1.0, kLame).matrix);
        EXPECT_NEAR(mass.sum(), 2 * domain_area(d), 1e-13);
        const Eigen::VectorXd f = assemble_rhs(m, 1.0, 3.0);
        const int half = static_cast<int>(f.size()) / 2;
        EXPECT_NEAR(f.head(half).sum(), domain_area(d), 1e-13);
        EXPECT_NEAR(f.tail(half).sum(), 3 * domain_area(d), 1e-13);
    }
}

TEST(Assembly, RigidMotionsAreInTheEnergyKernel)
{
    const TriMesh m = generate_domain(Domain::RightTriangle, 1);
    const SparseMatrix b = assemble(m, FormKind::ElasticEnergy, 1.0, kLame).matrix;
    const SparseMatrix k = assemble(m, FormKind::BiElastic, 1.0, kLame).matrix;
    const double bs = dense(b).cwiseAbs().maxCoeff(), ks = dense(k).cwiseAbs().maxCoeff();
    for (const auto& f : {std::function<Eigen::Vector2d(const Point&)>([](const Point&) { return Eigen::Vector2d(1, 0); }),
                          std::function<Eigen::Vector2d(const Point&)>([](const Point&) { return Eigen::Vector2d(0, 1); }),
                          std::function<Eigen::Vector2d(const Point&)>([](const Point& x) { return Eigen::Vector2d(-x.y(), x.x()); })}) {
        const Eigen::VectorXd c = interpolate(m, f);
        EXPECT_LT((b * c).cwiseAbs().maxCoeff(), 1e-13 * bs);
        EXPECT_LT((k * c).cwiseAbs().maxCoeff(), 1e-13 * ks);
    }
    // affine strain fields only leave the fourth-order kernel
    const Eigen::VectorXd s = interpolate(m, [](const Point& x) { return Eigen::Vector2d(x.x() + 2 * x.y(), x.x()); });
    EXPECT_LT((k * s).cwiseAbs().maxCoeff(), 1e-13 * ks);
    EXPECT_GT((b * s).cwiseAbs().maxCoeff(), 1e-3 * bs);
}

TEST(Assembly, SecondOrderIdentitiesOnTheConformingSpace)
{
    const DiscreteSpace s = DiscreteSpace::b3(square(1));
    auto on = [&](FormKind k) { return dense(assemble_on(s, k, 1.0, kLame)); };
    const Eigen::MatrixXd lap = on(FormKind::LaplacePair), hess = on(FormKind::HessianFull);
    const Eigen::MatrixXd gd = on(FormKind::GradDiv), cr = on(FormKind::CurlRot);
    const Eigen::MatrixXd mixed = on(FormKind::GradDivCurlRot), be = on(FormKind::BiElastic);
    const double scale = lap.cwiseAbs().maxCoeff();
    EXPECT_LT(rel_diff(lap, hess), 1e-12);
    EXPECT_LT(mixed.cwiseAbs().maxCoeff(), 1e-12 * scale);
    EXPECT_LT(rel_diff(lap, gd + cr), 1e-12);

    const double l = kLame.lambda, m = kLame.mu;
    EXPECT_LT(rel_diff(be, m * m * lap + ((l + 2 * m) * (l + 2 * m) - m * m) * gd), 1e-12);
    EXPECT_LT(rel_diff(be, (l + 2 * m) * (l + 2 * m) * gd + m * m * cr), 1e-12);
    const double bscale = be.cwiseAbs().maxCoeff();
    EXPECT_GT(min_eig(be - m * m * lap), -1e-9 * bscale);
    EXPECT_GT(min_eig((l + 2 * m) * (l + 2 * m) * lap - be), -1e-9 * bscale);
}

TEST(Assembly, ElasticEnergyIsPositiveDefiniteOnBothSpaces)
{
    for (ElementType e : {ElementType::B3, ElementType::Morley}) {
        const DiscreteSpace s = DiscreteSpace::make(square(1), e);
        const Eigen::MatrixXd b = dense(assemble_on(s, FormKind::ElasticEnergy, 1.0, kLame));
        EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(b).info(), Eigen::Success);
        EXPECT_GT(min_eig(b), 0.0);
    }
}

TEST(Assembly, BiElasticIsPositiveDefiniteOnB3)
{
    const DiscreteSpace s = DiscreteSpace::b3(square(1));
    const Eigen::MatrixXd be = dense(assemble_on(s, FormKind::BiElastic, Coefficient::radial_quadratic(4), kLame));
    EXPECT_GT(min_eig(be), 1e-8 * be.cwiseAbs().maxCoeff());
}

TEST(ErrorNorms, ExactFieldNormAndCubicInterpolation)
{
    const TriMesh m = generate_domain(Domain::UnitSquare, 2);
    const ErrorNorms z = error_norms(m, Eigen::VectorXd::Zero(20 * m.num_triangles()), trig_exact_field());
    EXPECT_NEAR(z.l2, std::sqrt(15.0) / 8.0, 1e-9);

    ExactField cubic;
    cubic.value = [](const Point& x) { return Eigen::Vector2d(x.x() * x.x() * x.y(), 1 - std::pow(x.y(), 3)); };
    cubic.grad = [](const Point& x) {
        Eigen::Matrix2d g;
        g << 2 * x.x() * x.y(), x.x() * x.x(), 0, -3 * x.y() * x.y();
        return g;
    };
    cubic.hessian = [](const Point& x) {
        Eigen::Matrix<double, 2, 3> h;
        h << 2 * x.y(), 2 * x.x(), 0, 0, 0, -6 * x.y();
        return h;
    };
    const ErrorNorms e = error_norms(m, interpolate(m, cubic.value), cubic);
    EXPECT_LT(e.l2, 1e-13);
    EXPECT_LT(e.h1, 1e-12);
    EXPECT_LT(e.h2, 1e-11);
    EXPECT_THROW(error_norms(m, Eigen::VectorXd::Zero(3), cubic), std::invalid_argument);
}

TEST(Assembly, RequirePositive)
{
    const TriMesh m = generate_domain(Domain::UnitSquare, 0);
    AssemblyOptions o;
    o.require_positive = true;
    EXPECT_THROW(assemble(m, FormKind::Mass, Coefficient::parse("x1 - 0.5"), kLame, o), std::invalid_argument);
    EXPECT_THROW(assemble(m, FormKind::Mass, -1.0, kLame, o), std::invalid_argument);
    EXPECT_NO_THROW(assemble(m, FormKind::Mass, Coefficient::parse("x1 + 0.5"), kLame, o));
}

TEST(Assembly, Deterministic)
{
    const TriMesh m = generate_domain(Domain::LShape, 1);
    const Coefficient c = Coefficient::parse("1 + x1*x2");
    const Eigen::MatrixXd a = dense(assemble(m, FormKind::MixedDivSigmaMass, c, kLame).matrix);
    const Eigen::MatrixXd b = dense(assemble(m, FormKind::MixedDivSigmaMass, c, kLame).matrix);
    EXPECT_EQ((a - b).cwiseAbs().maxCoeff(), 0.0);
}
