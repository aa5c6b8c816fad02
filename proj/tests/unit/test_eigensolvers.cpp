#include "elastep/assembly.hpp"
#include "elastep/eigensolvers.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

using namespace elastep;

namespace {

SparseMatrix laplace_1d(int n)
{
    std::vector<Eigen::Triplet<double>> t;
    for (int i = 0; i < n; ++i) {
        t.emplace_back(i, i, 2.0);
        if (i + 1 < n) {
            t.emplace_back(i, i + 1, -1.0);
            t.emplace_back(i + 1, i, -1.0);
        }
    }
    SparseMatrix a(n, n);
    a.setFromTriplets(t.begin(), t.end());
    return a;
}

SparseMatrix identity(int n)
{
    SparseMatrix i(n, n);
    i.setIdentity();
    return i;
}

struct Pencil {
    SparseMatrix a, b;
};

Pencil plate_pencil(int level)
{
    const DiscreteSpace s = DiscreteSpace::b3(std::make_shared<const TriMesh>(generate_domain(Domain::UnitSquare, level)));
    const Lame lame{0.25, 0.0625};
    return {assemble_on(s, FormKind::BiElastic, 1.0, lame), assemble_on(s, FormKind::Mass, 1.0, lame)};
}

}  // namespace

TEST(SymFactor, SolvesAndRejectsIndefinite)
{
    const SparseMatrix a = laplace_1d(50);
    const Eigen::VectorXd b = Eigen::VectorXd::LinSpaced(50, -1, 1);
    const Eigen::VectorXd x = solve_sym(a, b);
    EXPECT_LT((a * x - b).norm(), 1e-12 * b.norm());
    SparseMatrix bad = a;
    bad.coeffRef(10, 10) = -5.0;
    EXPECT_THROW(SymFactor{bad}, SolverError);
}

TEST(EigSym, OneDimensionalLaplacian)
{
    const int n = 600;
    EigOptions o;
    o.method = EigMethod::Krylov;
    const EigResult r = eig_sym_gen(laplace_1d(n), identity(n), 5, o);
    ASSERT_EQ(r.size(), 5);
    for (int j = 0; j < 5; ++j) {
        const double exact = 2 - 2 * std::cos((j + 1) * std::numbers::pi / (n + 1));
        EXPECT_NEAR(r.values[j].real(), exact, 1e-12);
        EXPECT_LT(r.residuals[j], 1e-8);
    }
}

TEST(EigSym, KrylovMatchesDense)
{
    const Pencil p = plate_pencil(1);
    ASSERT_LE(p.a.rows(), 500);
    EigOptions dense, krylov;
    dense.method = EigMethod::Dense;
    krylov.method = EigMethod::Krylov;
    const EigResult d = eig_sym_gen(p.a, p.b, 8, dense);
    const EigResult k = eig_sym_gen(p.a, p.b, 8, krylov);
    for (int j = 0; j < 8; ++j) {
        EXPECT_NEAR(k.values[j].real(), d.values[j].real(), 1e-9 * d.values[j].real());
        EXPECT_EQ(d.values[j].imag(), 0.0);
    }
    // B-normalized eigenvectors
    const Eigen::VectorXd v = k.vectors.col(0).real();
    EXPECT_NEAR(v.dot(p.b * v), 1.0, 1e-9);
    EXPECT_NEAR(v.dot(p.a * v), k.values[0].real(), 1e-8 * k.values[0].real());
}

TEST(EigSym, InvalidRequests)
{
    EXPECT_THROW(eig_sym_gen(laplace_1d(5), identity(5), 0), std::invalid_argument);
    EXPECT_THROW(eig_sym_gen(laplace_1d(5), identity(6), 2), std::invalid_argument);
}

TEST(EigQuadratic, SmallestModulusRootsAreSingular)
{
    const Pencil p = plate_pencil(1);
    const int n = static_cast<int>(p.a.rows());
    const SparseMatrix c = SparseMatrix(-2.0 * 30.0 * p.b);
    for (EigMethod m : {EigMethod::Dense, EigMethod::Krylov}) {
        QuadOptions o;
        o.method = m;
        const EigResult r = eig_quadratic(p.b, c, p.a, 6, o);
        ASSERT_EQ(r.size(), 6);
        for (int j = 0; j < r.size(); ++j) {
            const std::complex<double> t = r.values[j];
            const Eigen::MatrixXcd q = Eigen::MatrixXd(p.a).cast<std::complex<double>>() +
                                       t * Eigen::MatrixXd(c).cast<std::complex<double>>() +
                                       t * t * Eigen::MatrixXd(p.b).cast<std::complex<double>>();
            const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(q);
            EXPECT_LT(svd.singularValues()[n - 1], 1e-8 * svd.singularValues()[0]) << t;
            EXPECT_LT(r.residuals[j], 1e-8);
            if (j > 0) {
                EXPECT_GE(std::abs(r.values[j]), std::abs(r.values[j - 1]) - 1e-9);
            }
        }
    }
}

TEST(EigQuadratic, DenseAndKrylovAgree)
{
    const Pencil p = plate_pencil(1);
    const SparseMatrix c = SparseMatrix(-0.5 * p.b);
    QuadOptions dense, krylov;
    dense.method = EigMethod::Dense;
    krylov.method = EigMethod::Krylov;
    const EigResult d = eig_quadratic(p.b, c, p.a, 6, dense);
    const EigResult k = eig_quadratic(p.b, c, p.a, 6, krylov);
    for (int j = 0; j < 6; ++j) EXPECT_LT(std::abs(d.values[j] - k.values[j]), 1e-8 * std::abs(d.values[j]));
}

TEST(EigQuadratic, SortByModulusPutsPositiveImaginaryFirst)
{
    EigResult r;
    r.values.resize(4);
    r.values << std::complex<double>(3, -4), std::complex<double>(1, 0), std::complex<double>(3, 4),
        std::complex<double>(-2, 0);
    r.vectors = Eigen::MatrixXcd::Identity(4, 4);
    r.residuals = Eigen::VectorXd::LinSpaced(4, 0, 3);
    sort_by_modulus(r);
    EXPECT_EQ(r.values[0], std::complex<double>(1, 0));
    EXPECT_EQ(r.values[1], std::complex<double>(-2, 0));
    EXPECT_EQ(r.values[2], std::complex<double>(3, 4));
    EXPECT_EQ(r.values[3], std::complex<double>(3, -4));
    EXPECT_EQ(r.residuals[2], 2.0);
    EXPECT_EQ(r.vectors(2, 2), 1.0);
}
