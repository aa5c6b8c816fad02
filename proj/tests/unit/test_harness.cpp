#include "elastep/harness.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

using namespace elastep;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::string strip_seconds(const std::string& csv)
{
    std::istringstream in(csv);
    std::string line, out;
    while (std::getline(in, line)) {
        if (line[0] != '#' && line.find("level") != 0) line = line.substr(0, line.rfind(','));
        out += line + '\n';
    }
    return out;
}

void check_derivatives(const ExactField& f, const Point& x)
{
    const double d = 1e-5;
    const Point ex(d, 0), ey(0, d);
    const Eigen::Matrix2d g = f.grad(x);
    const Eigen::Matrix<double, 2, 3> h = f.hessian(x);
    for (int c = 0; c < 2; ++c) {
        EXPECT_NEAR(g(c, 0), (f.value(x + ex)[c] - f.value(x - ex)[c]) / (2 * d), 1e-7);
        EXPECT_NEAR(g(c, 1), (f.value(x + ey)[c] - f.value(x - ey)[c]) / (2 * d), 1e-7);
        EXPECT_NEAR(h(c, 0), (f.grad(x + ex)(c, 0) - f.grad(x - ex)(c, 0)) / (2 * d), 1e-6);
        EXPECT_NEAR(h(c, 1), (f.grad(x + ey)(c, 0) - f.grad(x - ey)(c, 0)) / (2 * d), 1e-6);
        EXPECT_NEAR(h(c, 2), (f.grad(x + ey)(c, 1) - f.grad(x - ey)(c, 1)) / (2 * d), 1e-6);
    }
}

}  // namespace

TEST(Orders, SourceOrder)
{
    const auto o = source_order({1.0, 0.25, 1.0 / 64});
    EXPECT_TRUE(std::isnan(o[0]));
    EXPECT_DOUBLE_EQ(o[1], 2.0);
    EXPECT_DOUBLE_EQ(o[2], 4.0);
    EXPECT_EQ(source_order({1.0, 0.0})[1], kInf);
}

TEST(Orders, EigenOrderFromSuccessiveDifferences)
{
    // geometric convergence with ratio 1/16
    std::vector<double> v;
    for (int l = 0; l < 5; ++l) v.push_back(10.0 + std::pow(1.0 / 16.0, l));
    const auto o = eig_order(v);
    EXPECT_TRUE(std::isnan(o[0]));
    EXPECT_TRUE(std::isnan(o[1]));
    for (int l = 2; l < 5; ++l) EXPECT_NEAR(o[l], 4.0, 1e-9);
    EXPECT_EQ(eig_order({1.0, 1.0, 1.0})[2], kInf);
}

TEST(Orders, ReferenceOrder)
{
    std::vector<double> v;
    for (int l = 0; l < 4; ++l) v.push_back(3.0 + std::pow(0.25, l));
    const auto o = eig_order_reference(v);
    EXPECT_TRUE(std::isnan(o[0]));
    EXPECT_TRUE(std::isnan(o[3]));
    // the finest level is only an approximation of the limit, so the first entry is biased
    EXPECT_NEAR(o[1], std::log2((1 - 1.0 / 64) / (0.25 - 1.0 / 64)), 1e-12);
}

TEST(Orders, PublishedTableOrder)
{
    const auto o = eig_order(example(3).table[0]);
    EXPECT_NEAR(o.back(), 3.856, 0.015);
}

TEST(Examples, Catalogue)
{
    EXPECT_EQ(examples().size(), 9u);
    for (int id = 1; id <= 9; ++id) EXPECT_EQ(example(id).id, id);
    EXPECT_THROW(example(10), std::invalid_argument);
    EXPECT_EQ(example(6).k, 10);
    EXPECT_EQ(example(9).finest.size(), 10u);
    EXPECT_EQ(default_levels(example(1)), (std::vector<int>{1, 2, 3, 4}));
    EXPECT_EQ(default_levels(example(3)), (std::vector<int>{1, 2, 3}));
    EXPECT_EQ(level_cap(false), 4);
    EXPECT_EQ(level_cap(true), 5);
}

TEST(Examples, SpecConflicts)
{
    RunOptions o;
    o.method = TepMethod::Quadratic;
    EXPECT_THROW(example_spec(example(3), 1, o), std::invalid_argument);
    o = {};
    o.tau_range = std::make_pair(1.0, 2.0);
    EXPECT_THROW(example_spec(example(1), 1, o), std::invalid_argument);
    o = {};
    o.k = 3;
    EXPECT_THROW(example_spec(example(2), 1, o), std::invalid_argument);
    EXPECT_EQ(example_spec(example(3), 1, o).k, 3);
    o = {};
    EXPECT_THROW(example_spec(example(3), 5, o), std::invalid_argument);
    o.big = true;
    EXPECT_NO_THROW(example_spec(example(3), 5, o));
    o.alpha = 1.0;
    EXPECT_THROW(example_spec(example(3), 1, o), std::invalid_argument);
}

TEST(Examples, ExactFieldDerivatives)
{
    for (const Point& x : {Point(0.3, 0.6), Point(0.71, 0.12)}) {
        check_derivatives(trig_exact_field(), x);
        check_derivatives(polynomial_exact_field(), Point(0.5 * x.x(), 0.5 * x.y()));
    }
}

TEST(Examples, PolynomialFieldIsClampedOnTheTriangle)
{
    const ExactField f = polynomial_exact_field();
    for (double s : {0.1, 0.37, 0.8}) {
        for (const Point& p : {Point(s, 0), Point(0, s), Point(s, 1 - s)}) {
            EXPECT_NEAR(f.value(p).norm(), 0.0, 1e-13);
            EXPECT_NEAR(f.grad(p).norm(), 0.0, 1e-12);
        }
    }
    EXPECT_GT(f.value(Point(0.25, 0.25)).norm(), 1e-4);
}

TEST(Reports, CsvRoundTrip)
{
    ExperimentReport r;
    r.kind = ProblemKind::Tep;
    r.metadata["domain"] = "square";
    for (int l = 1; l <= 3; ++l) {
        EigenRow e;
        e.level = l;
        e.h = std::ldexp(1.0, -l);
        e.dofs = 10 * l;
        e.branch = 1;
        e.value = {8.0 + 1.0 / (l * 7.0), l == 2 ? 0.25 : 0.0};
        e.residual = 1e-13;
        e.seconds = 0.5;
        r.eigen.push_back(e);
    }
    r.eigen[2].order = kInf;
    std::stringstream ss;
    write_csv(r, ss);
    const ExperimentReport back = read_csv(ss);
    EXPECT_EQ(back.kind, ProblemKind::Tep);
    EXPECT_EQ(back.metadata.at("domain"), "square");
    ASSERT_EQ(back.eigen.size(), 3u);
    for (int i = 0; i < 3; ++i) {
        EXPECT_NEAR(back.eigen[i].value.real(), r.eigen[i].value.real(), 1e-9 * r.eigen[i].value.real());
        EXPECT_EQ(back.eigen[i].value.imag(), r.eigen[i].value.imag());
        EXPECT_EQ(back.eigen[i].dofs, r.eigen[i].dofs);
    }
    EXPECT_TRUE(std::isnan(back.eigen[0].order));
    EXPECT_EQ(back.eigen[2].order, kInf);
    std::istringstream bad("# kind=tep\nlevel,h\n");
    EXPECT_THROW(read_csv(bad), std::invalid_argument);
}

TEST(Reports, JsonRoundTripKeepsFullPrecision)
{
    ExperimentReport r;
    r.kind = ProblemKind::Source;
    SourceRow s;
    s.level = 2;
    s.h = 0.25;
    s.dofs = 42;
    s.l2 = 1.0 / 3.0;
    s.h1 = 0.1;
    s.h2 = 0.7;
    s.order_l2 = kInf;
    r.source.push_back(s);
    std::stringstream ss;
    write_json(r, ss);
    const ExperimentReport back = read_json(ss);
    ASSERT_EQ(back.source.size(), 1u);
    EXPECT_EQ(back.source[0].l2, s.l2);
    EXPECT_EQ(back.source[0].order_l2, kInf);
    EXPECT_TRUE(std::isnan(back.source[0].order_h1));
}

TEST(Runs, BiElasticRunIsDeterministic)
{
    RunOptions o;
    o.levels = {1};
    o.k = 3;
    std::ostringstream a, b;
    write_csv(run_example(3, o), a);
    write_csv(run_example(3, o), b);
    EXPECT_EQ(strip_seconds(a.str()), strip_seconds(b.str()));
    const ExperimentReport r = run_example(3, o);
    ASSERT_EQ(r.eigen.size(), 3u);
    EXPECT_NEAR(r.eigen[0].value.real(), 25.35774, 1e-4);
    EXPECT_EQ(r.metadata.at("element"), "b3");
}

TEST(Runs, SourceRunHasOrders)
{
    RunOptions o;
    o.levels = {1, 2};
    const ExperimentReport r = run_example(2, o);
    ASSERT_EQ(r.source.size(), 2u);
    EXPECT_TRUE(std::isnan(r.source[0].order_l2));
    EXPECT_GT(r.source[1].order_l2, 2.5);
    EXPECT_GT(r.source[1].order_h2, 1.0);
}

TEST(Runs, PlotFiles)
{
    RunOptions o;
    o.levels = {1};
    o.k = 2;
    const ExperimentReport r = run_example(3, o);
    const auto dir = std::filesystem::temp_directory_path() / "elastep_plot_test";
    std::filesystem::create_directories(dir);
    const auto files = write_plot_data(r, (dir / "ex3").string());
    ASSERT_EQ(files.size(), 2u);
    for (const auto& f : files) {
        std::ifstream in(f);
        std::string header, row;
        std::getline(in, header);
        std::getline(in, row);
        EXPECT_EQ(header[0], '#');
        EXPECT_FALSE(row.empty());
    }
    std::filesystem::remove_all(dir);
}
