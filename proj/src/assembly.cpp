#include "elastep/assembly.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace elastep {

std::string_view form_name(FormKind kind)
{
    switch (kind) {
    case FormKind::Mass: return "mass";
    case FormKind::BiElastic: return "bielastic";
    case FormKind::ElasticEnergy: return "elastic-energy";
    case FormKind::HessianFull: return "hessian";
    case FormKind::GradDiv: return "grad-div";
    case FormKind::LaplacePair: return "laplace";
    case FormKind::CurlRot: return "curl-rot";
    case FormKind::MixedDivSigmaMass: return "mixed-divsigma-mass";
    case FormKind::GradDivCurlRot: return "graddiv-curlrot";
    }
    return "unknown";
}

bool form_is_symmetric(FormKind kind)
{
    return kind != FormKind::MixedDivSigmaMass && kind != FormKind::GradDivCurlRot;
}

int default_quadrature(FormKind kind)
{
    switch (kind) {
    case FormKind::Mass:
    case FormKind::MixedDivSigmaMass: return 8;
    default: return 6;
    }
}

namespace {

using Triplet = Eigen::Triplet<double>;
using Row20 = Eigen::Matrix<double, 1, 20>;
using Local = Eigen::Matrix<double, 20, 20>;

// Per-point quantities of the 20 local vector basis functions (component c, node i -> 10 c + i).
struct VectorShapes {
    Eigen::Matrix<double, 2, 20> value = Eigen::Matrix<double, 2, 20>::Zero();
    Eigen::Matrix<double, 2, 20> divsigma;
    Eigen::Matrix<double, 2, 20> graddiv;
    Eigen::Matrix<double, 2, 20> laplace;
    Eigen::Matrix<double, 2, 20> curlrot;
    Eigen::Matrix<double, 6, 20> hessian;  // (d11, sqrt2 d12, d22) per component
    Eigen::Matrix<double, 3, 20> strain;   // (e11, e22, sqrt2 e12)
    Row20 div;

    void fill(const PhysicalShapes& s, const Lame& lame)
    {
        const double r2 = std::numbers::sqrt2;
        value.setZero();
        hessian.setZero();
        for (int i = 0; i < 10; ++i) {
            const double gx = s.grad(i, 0), gy = s.grad(i, 1);
            const double h11 = s.hess(i, 0), h12 = s.hess(i, 1), h22 = s.hess(i, 2);
            const Eigen::Vector3d h(h11, h12, h22), z = Eigen::Vector3d::Zero();
            // first component
            value(0, i) = s.values[i];
            divsigma.col(i) = divsigma_from_hessians(lame, h, z);
            graddiv.col(i) << h11, h12;
            laplace.col(i) << h11 + h22, 0.0;
            curlrot.col(i) << -h22, h12;
            hessian.block<3, 1>(0, i) << h11, r2 * h12, h22;
            strain.col(i) << gx, 0.0, gy / r2;
            div[i] = gx;
            // second component
            const int j = 10 + i;
            value(1, j) = s.values[i];
            divsigma.col(j) = divsigma_from_hessians(lame, z, h);
            graddiv.col(j) << h12, h22;
            laplace.col(j) << 0.0, h11 + h22;
            curlrot.col(j) << h12, -h11;
            hessian.block<3, 1>(3, j) << h11, r2 * h12, h22;
            strain.col(j) << 0.0, gy, gx / r2;
            div[j] = gy;
        }
    }
};

void add_kernel(FormKind kind, const VectorShapes& v, const Lame& lame, double wc, double w, Local& loc)
{
    switch (kind) {
    case FormKind::Mass: loc.noalias() += wc * v.value.transpose() * v.value; break;
    case FormKind::BiElastic: loc.noalias() += wc * v.divsigma.transpose() * v.divsigma; break;
    case FormKind::ElasticEnergy:
        loc.noalias() += w * (2.0 * lame.mu * v.strain.transpose() * v.strain + lame.lambda * v.div.transpose() * v.div);
        break;
    case FormKind::HessianFull: loc.noalias() += wc * v.hessian.transpose() * v.hessian; break;
    case FormKind::GradDiv: loc.noalias() += wc * v.graddiv.transpose() * v.graddiv; break;
    case FormKind::LaplacePair: loc.noalias() += wc * v.laplace.transpose() * v.laplace; break;
    case FormKind::CurlRot: loc.noalias() += wc * v.curlrot.transpose() * v.curlrot; break;
    // row = test, column = trial
    case FormKind::MixedDivSigmaMass: loc.noalias() += wc * v.divsigma.transpose() * v.value; break;
    case FormKind::GradDivCurlRot: loc.noalias() += wc * v.curlrot.transpose() * v.graddiv; break;
    }
}

bool uses_coefficient(FormKind kind) { return kind != FormKind::ElasticEnergy; }

}  // namespace

FormMatrix assemble(const TriMesh& mesh, FormKind kind, const Coefficient& coef, const Lame& lame,
                    const AssemblyOptions& options)
{
    lame.validate();
    const int degree = options.quad_degree > 0 ? options.quad_degree : default_quadrature(kind);
    const QuadratureRule rule = triangle_quadrature(degree);
    const ShapeTable table = p3_tabulate(rule.points);
    const int nt = mesh.num_triangles();
    const bool constant = coef.is_constant();
    const double cval = constant ? coef.constant_value() : 0.0;
    if (options.require_positive && constant && !(cval > 0.0)) {
        std::ostringstream os;
        os << "coefficient of " << form_name(kind) << " form is not positive (" << cval << ")";
        throw std::invalid_argument(os.str());
    }

    std::vector<Triplet> trip;
    trip.reserve(400 * static_cast<size_t>(nt));
    PhysicalShapes ps;
    VectorShapes vs;
    Local loc;
    for (int t = 0; t < nt; ++t) {
        const AffineMap map = AffineMap::of(mesh, t);
        const double area = std::abs(map.det);
        loc.setZero();
        for (int q = 0; q < rule.size(); ++q) {
            double c = cval;
            if (!constant && uses_coefficient(kind)) {
                const Point x = map.to_physical(rule.points[q]);
                c = coef(x);
                if (options.require_positive && !(c > 0.0)) {
                    std::ostringstream os;
                    os << "coefficient of " << form_name(kind) << " form is not positive at (" << x.x() << ", "
                       << x.y() << "): " << c;
                    throw std::invalid_argument(os.str());
                }
            }
            push_forward(table, q, map, ps);
            vs.fill(ps, lame);
            const double w = rule.weights[q] * area;
            add_kernel(kind, vs, lame, w * c, w, loc);
        }
        for (int a = 0; a < 20; ++a) {
            const int ga = (a / 10) * 10 * nt + 10 * t + a % 10;
            for (int b = 0; b < 20; ++b) {
                if (loc(a, b) == 0.0) continue;
                const int gb = (b / 10) * 10 * nt + 10 * t + b % 10;
                trip.emplace_back(ga, gb, loc(a, b));
            }
        }
    }
    FormMatrix fm;
    fm.kind = kind;
    fm.symmetric = form_is_symmetric(kind);
    fm.matrix.resize(20 * nt, 20 * nt);
    fm.matrix.setFromTriplets(trip.begin(), trip.end());
    return fm;
}

SparseMatrix assemble_on(const DiscreteSpace& space, FormKind kind, const Coefficient& coef, const Lame& lame,
                         const AssemblyOptions& options)
{
    return space.restrict(assemble(space.mesh(), kind, coef, lame, options).matrix);
}

Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const Coefficient& f1, const Coefficient& f2, int quad_degree)
{
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    const ShapeTable table = p3_tabulate(rule.points);
    const int nt = mesh.num_triangles();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(20 * nt);
    for (int t = 0; t < nt; ++t) {
        const AffineMap map = AffineMap::of(mesh, t);
        const double area = std::abs(map.det);
        for (int q = 0; q < rule.size(); ++q) {
            const Point x = map.to_physical(rule.points[q]);
            const double w = rule.weights[q] * area;
            const double v1 = w * f1(x), v2 = w * f2(x);
            for (int i = 0; i < 10; ++i) {
                b[10 * t + i] += v1 * table.values(q, i);
                b[10 * nt + 10 * t + i] += v2 * table.values(q, i);
            }
        }
    }
    return b;
}

ExactField zero_field()
{
    return {[](const Point&) { return Eigen::Vector2d::Zero().eval(); },
            [](const Point&) { return Eigen::Matrix2d::Zero().eval(); },
            [](const Point&) { return Eigen::Matrix<double, 2, 3>::Zero().eval(); }};
}

ErrorNorms error_norms(const TriMesh& mesh, const Eigen::VectorXd& broken_coeffs, const ExactField& exact,
                       int quad_degree)
{
    const int nt = mesh.num_triangles();
    if (broken_coeffs.size() != 20 * nt) throw std::invalid_argument("coefficient vector does not match mesh");
    const QuadratureRule rule = triangle_quadrature(quad_degree);
    const ShapeTable table = p3_tabulate(rule.points);
    PhysicalShapes ps;
    double l2 = 0.0, h1 = 0.0, h2 = 0.0;
    for (int t = 0; t < nt; ++t) {
        const AffineMap map = AffineMap::of(mesh, t);
        const double area = std::abs(map.det);
        Eigen::Matrix<double, 10, 2> c;
        c.col(0) = broken_coeffs.segment(10 * t, 10);
        c.col(1) = broken_coeffs.segment(10 * nt + 10 * t, 10);
        for (int q = 0; q < rule.size(); ++q) {
            push_forward(table, q, map, ps);
            const Point x = map.to_physical(rule.points[q]);
            const double w = rule.weights[q] * area;
            const Eigen::Vector2d ev = exact.value(x) - c.transpose() * ps.values;
            const Eigen::Matrix2d eg = exact.grad(x) - c.transpose() * ps.grad;
            const Eigen::Matrix<double, 2, 3> eh = exact.hessian(x) - c.transpose() * ps.hess;
            l2 += w * ev.squaredNorm();
            h1 += w * eg.squaredNorm();
            h2 += w * (eh.col(0).squaredNorm() + 2.0 * eh.col(1).squaredNorm() + eh.col(2).squaredNorm());
        }
    }
    return {std::sqrt(l2), std::sqrt(h1), std::sqrt(h2)};
}

}  // namespace elastep
