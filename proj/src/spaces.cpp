#include "elastep/spaces.hpp"

#include "elastep/polybasis.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace elastep {

namespace {

using Triplet = Eigen::Triplet<double>;

constexpr double kDropTol = 1e-9;

int local_vertex(const TriMesh& mesh, int t, int v)
{
    const auto& tri = mesh.triangle(t);
    for (int k = 0; k < 3; ++k)
        if (tri[k] == v) return k;
    throw std::logic_error("vertex not in triangle");
}

// Values and normal derivatives of the 10 P3 functions of triangle t at the two
// Gauss points of edge e (ordered along the global edge orientation).
struct EdgeTrace {
    Eigen::Matrix<double, 2, 10> value;
    Eigen::Matrix<double, 2, 10> dnormal;
};

EdgeTrace edge_trace(const TriMesh& mesh, int e, int t)
{
    static const double g = 1.0 / std::sqrt(3.0);
    const AffineMap map = AffineMap::of(mesh, t);
    const Point& a = mesh.vertex(mesh.edge(e)[0]);
    const Point& b = mesh.vertex(mesh.edge(e)[1]);
    const Point n = mesh.edge_normal(e);
    std::vector<Point> ref;
    for (double s : {-g, g}) {
        Point xi = map.to_reference(a + 0.5 * (s + 1.0) * (b - a));
        xi = xi.cwiseMax(0.0);
        ref.push_back(xi);
    }
    const ShapeTable table = p3_tabulate(ref);
    EdgeTrace tr;
    PhysicalShapes ps;
    for (int q = 0; q < 2; ++q) {
        push_forward(table, q, map, ps);
        tr.value.row(q) = ps.values.transpose();
        tr.dnormal.row(q) = (ps.grad * n).transpose();
    }
    return tr;
}

void flip_sign(Eigen::Ref<Eigen::VectorXd> v)
{
    Eigen::Index imax = 0;
    v.cwiseAbs().maxCoeff(&imax);
    if (v[imax] < 0.0) v = -v;
}

Eigen::MatrixXd kernel_of(const Eigen::MatrixXd& a)
{
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv.size() > 0 ? sv[0] : 0.0;
    int rank = 0;
    for (Eigen::Index i = 0; i < sv.size(); ++i)
        if (sv[i] > kDropTol * smax) ++rank;
    return svd.matrixV().rightCols(a.cols() - rank);
}

}  // namespace

ConstraintSystem build_b3_constraints(const TriMesh& mesh)
{
    ConstraintSystem cs;
    std::vector<Triplet> trip;
    int row = 0;
    auto add_row = [&](ConstraintKind kind, int entity) {
        cs.kinds.push_back(kind);
        cs.entity.push_back(entity);
        return row++;
    };

    for (int v = 0; v < mesh.num_vertices(); ++v) {
        const auto& ts = mesh.vertex_triangles(v);
        if (mesh.boundary_vertex(v)) {
            for (int t : ts) {
                const int r = add_row(ConstraintKind::BoundaryVertexZero, v);
                trip.emplace_back(r, kP3Local * t + local_vertex(mesh, t, v), 1.0);
            }
        } else {
            const int c0 = kP3Local * ts[0] + local_vertex(mesh, ts[0], v);
            for (size_t k = 1; k < ts.size(); ++k) {
                const int r = add_row(ConstraintKind::VertexContinuity, v);
                trip.emplace_back(r, kP3Local * ts[k] + local_vertex(mesh, ts[k], v), 1.0);
                trip.emplace_back(r, c0, -1.0);
            }
        }
    }

    for (int e = 0; e < mesh.num_edges(); ++e) {
        const double len = mesh.edge_length(e);
        const bool bnd = mesh.boundary_edge(e);
        const int rmean = add_row(bnd ? ConstraintKind::BoundaryEdgeMean : ConstraintKind::EdgeJumpMean, e);
        const int rm0 = add_row(bnd ? ConstraintKind::BoundaryNormalMoment0 : ConstraintKind::EdgeNormalMoment0, e);
        const int rm1 = add_row(bnd ? ConstraintKind::BoundaryNormalMoment1 : ConstraintKind::EdgeNormalMoment1, e);
        const auto& adj = mesh.edge_triangles(e);
        for (int side = 0; side < (bnd ? 1 : 2); ++side) {
            const int t = adj[side];
            const double sign = side == 0 ? 1.0 : -1.0;
            const EdgeTrace tr = edge_trace(mesh, e, t);
            // sqrt(3) s is -1 and +1 at the two Gauss points
            for (int i = 0; i < kP3Local; ++i) {
                const int col = kP3Local * t + i;
                trip.emplace_back(rmean, col, sign * 0.5 * (tr.value(0, i) + tr.value(1, i)));
                trip.emplace_back(rm0, col, sign * len * 0.5 * (tr.dnormal(0, i) + tr.dnormal(1, i)));
                trip.emplace_back(rm1, col, sign * len * 0.5 * (tr.dnormal(1, i) - tr.dnormal(0, i)));
            }
        }
    }

    cs.matrix.resize(row, kP3Local * mesh.num_triangles());
    cs.matrix.setFromTriplets(trip.begin(), trip.end());
    cs.matrix.prune(0.0);
    return cs;
}

ConformingBasis build_nullspace(const TriMesh& mesh, const ConstraintSystem& constraints)
{
    const int nt = mesh.num_triangles();
    const int nbroken = kP3Local * nt;
    if (constraints.matrix.cols() != nbroken) throw std::invalid_argument("constraint system does not match mesh");

    // rows touching each triangle
    const Eigen::SparseMatrix<double, Eigen::RowMajor> crow = constraints.matrix;
    std::vector<std::vector<int>> tri_rows(nt);
    for (int r = 0; r < crow.rows(); ++r) {
        int last = -1;
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(crow, r); it; ++it) {
            const int t = static_cast<int>(it.col()) / kP3Local;
            if (t != last) tri_rows[t].push_back(r);
            last = t;
        }
    }

    // dense restriction of the constraints to a patch of triangles
    auto patch_matrix = [&](const std::vector<int>& tris) {
        std::vector<int> rows;
        for (int t : tris) rows.insert(rows.end(), tri_rows[t].begin(), tri_rows[t].end());
        std::sort(rows.begin(), rows.end());
        rows.erase(std::unique(rows.begin(), rows.end()), rows.end());
        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows.size()),
                                                   kP3Local * static_cast<Eigen::Index>(tris.size()));
        for (size_t i = 0; i < rows.size(); ++i) {
            for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(crow, rows[i]); it; ++it) {
                const int t = static_cast<int>(it.col()) / kP3Local;
                const auto pos = std::find(tris.begin(), tris.end(), t);
                if (pos != tris.end())
                    a(static_cast<Eigen::Index>(i), kP3Local * (pos - tris.begin()) + it.col() % kP3Local) = it.value();
            }
        }
        return a;
    };

    const int nvi = mesh.num_interior_vertices();
    std::vector<int> edge_col(mesh.num_edges(), -1);
    std::vector<Eigen::Matrix<double, 20, 1>> edge_fun(mesh.num_edges());
    int ncol = 3 * nvi;
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (mesh.boundary_edge(e)) continue;
        const auto& adj = mesh.edge_triangles(e);
        Eigen::MatrixXd k = kernel_of(patch_matrix({adj[0], adj[1]}));
        if (k.cols() != 1)
            throw std::runtime_error("edge patch " + std::to_string(e) + " has kernel dimension " +
                                     std::to_string(k.cols()) + ", expected 1");
        flip_sign(k.col(0));
        edge_fun[e] = k.col(0);
        edge_col[e] = ncol++;
    }

    std::vector<Triplet> trip;
    int vcol = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v) {
        if (mesh.boundary_vertex(v)) continue;
        const auto& tris = mesh.vertex_triangles(v);
        const auto& edges = mesh.vertex_edges(v);
        const Eigen::MatrixXd k = kernel_of(patch_matrix(tris));
        const auto m = static_cast<Eigen::Index>(edges.size());
        if (k.cols() != 3 + m)
            throw std::runtime_error("vertex patch " + std::to_string(v) + " has kernel dimension " +
                                     std::to_string(k.cols()) + ", expected " + std::to_string(3 + m));
        Eigen::MatrixXd ef = Eigen::MatrixXd::Zero(k.rows(), m);
        for (Eigen::Index j = 0; j < m; ++j) {
            const int e = edges[j];
            const auto& adj = mesh.edge_triangles(e);
            for (int side = 0; side < 2; ++side) {
                const auto pos = std::find(tris.begin(), tris.end(), adj[side]) - tris.begin();
                ef.block(kP3Local * pos, j, kP3Local, 1) = edge_fun[e].segment(kP3Local * side, kP3Local);
            }
        }
        const Eigen::HouseholderQR<Eigen::MatrixXd> qr(ef);
        const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(k.rows(), m);
        const Eigen::MatrixXd rest = k - q * (q.transpose() * k);
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(rest, Eigen::ComputeThinU);
        const auto& sv = svd.singularValues();
        if (sv[2] < 1e-6 || (sv.size() > 3 && sv[3] > kDropTol * sv[0]))
            throw std::runtime_error("vertex patch " + std::to_string(v) + " does not split into 3 vertex functions");
        for (int j = 0; j < 3; ++j) {
            Eigen::VectorXd col = svd.matrixU().col(j);
            flip_sign(col);
            for (size_t p = 0; p < tris.size(); ++p)
                for (int i = 0; i < kP3Local; ++i) {
                    const double val = col[kP3Local * static_cast<Eigen::Index>(p) + i];
                    if (std::abs(val) > 1e-15) trip.emplace_back(kP3Local * tris[p] + i, vcol, val);
                }
            ++vcol;
        }
    }
    for (int e = 0; e < mesh.num_edges(); ++e) {
        if (edge_col[e] < 0) continue;
        const auto& adj = mesh.edge_triangles(e);
        for (int side = 0; side < 2; ++side)
            for (int i = 0; i < kP3Local; ++i) {
                const double val = edge_fun[e][kP3Local * side + i];
                if (std::abs(val) > 1e-15) trip.emplace_back(kP3Local * adj[side] + i, edge_col[e], val);
            }
    }

    ConformingBasis basis;
    basis.dim = ncol;
    basis.transform.resize(nbroken, ncol);
    basis.transform.setFromTriplets(trip.begin(), trip.end());

    const SparseMatrix cn = constraints.matrix * basis.transform;
    for (int k = 0; k < cn.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(cn, k); it; ++it)
            basis.constraint_residual = std::max(basis.constraint_residual, std::abs(it.value()));
    if (basis.constraint_residual > 1e-10)
        throw std::runtime_error("null-space basis violates constraints by " + std::to_string(basis.constraint_residual));

    const SparseMatrix gram = SparseMatrix(basis.transform.transpose()) * basis.transform;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt(gram);
    if (ldlt.info() != Eigen::Success) throw std::runtime_error("null-space basis is rank deficient");
    const Eigen::VectorXd d = ldlt.vectorD();
    basis.min_pivot = d.minCoeff() / d.maxCoeff();
    if (!(basis.min_pivot > 1e-10))
        throw std::runtime_error("null-space basis is rank deficient (relative pivot " +
                                 std::to_string(basis.min_pivot) + ")");
    return basis;
}

ElementType parse_element(std::string_view name)
{
    if (name == "b3") return ElementType::B3;
    if (name == "morley") return ElementType::Morley;
    throw std::invalid_argument("unknown element '" + std::string(name) + "' (expected b3 or morley)");
}

std::string_view element_name(ElementType type) { return type == ElementType::B3 ? "b3" : "morley"; }

Eigen::Matrix<double, 10, 6> morley_local_p3(const TriMesh& mesh, int t)
{
    const AffineMap map = AffineMap::of(mesh, t);
    // functionals applied to the P2 Lagrange basis
    Eigen::Matrix<double, 6, 6> g = Eigen::Matrix<double, 6, 6>::Zero();
    for (int k = 0; k < 3; ++k) g(k, k) = 1.0;
    static const double gp = 0.5 / std::sqrt(3.0);
    PhysicalShapes ps;
    for (int k = 0; k < 3; ++k) {
        const int e = mesh.triangle_edges(t)[k];
        const Point& a = mesh.vertex(mesh.edge(e)[0]);
        const Point& b = mesh.vertex(mesh.edge(e)[1]);
        const Point n = mesh.edge_normal(e);
        std::vector<Point> ref;
        for (double s : {0.5 - gp, 0.5 + gp}) ref.push_back(map.to_reference(a + s * (b - a)).cwiseMax(0.0));
        const ShapeTable table = p2_tabulate(ref);
        for (int q = 0; q < 2; ++q) {
            push_forward(table, q, map, ps);
            g.row(3 + k) += 0.5 * (ps.grad * n).transpose();
        }
    }
    static const ShapeTable at_p3 = p2_tabulate(p3_nodes());
    return at_p3.values * g.inverse();
}

MorleyBasis build_morley(const TriMesh& mesh)
{
    MorleyBasis mb;
    mb.vertex_dof.assign(mesh.num_vertices(), -1);
    mb.edge_dof.assign(mesh.num_edges(), -1);
    int n = 0;
    for (int v = 0; v < mesh.num_vertices(); ++v)
        if (!mesh.boundary_vertex(v)) mb.vertex_dof[v] = n++;
    for (int e = 0; e < mesh.num_edges(); ++e)
        if (!mesh.boundary_edge(e)) mb.edge_dof[e] = n++;
    mb.dim = n;

    std::vector<Triplet> trip;
    for (int t = 0; t < mesh.num_triangles(); ++t) {
        const Eigen::Matrix<double, 10, 6> loc = morley_local_p3(mesh, t);
        std::array<int, 6> dof{};
        for (int k = 0; k < 3; ++k) {
            dof[k] = mb.vertex_dof[mesh.triangle(t)[k]];
            dof[3 + k] = mb.edge_dof[mesh.triangle_edges(t)[k]];
        }
        for (int d = 0; d < 6; ++d) {
            if (dof[d] < 0) continue;
            for (int i = 0; i < kP3Local; ++i)
                if (std::abs(loc(i, d)) > 1e-15) trip.emplace_back(kP3Local * t + i, dof[d], loc(i, d));
        }
    }
    mb.transform.resize(kP3Local * mesh.num_triangles(), n);
    mb.transform.setFromTriplets(trip.begin(), trip.end());
    return mb;
}

namespace {

SparseMatrix block_diag2(const SparseMatrix& s)
{
    std::vector<Triplet> trip;
    trip.reserve(2 * static_cast<size_t>(s.nonZeros()));
    for (int k = 0; k < s.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(s, k); it; ++it) {
            trip.emplace_back(it.row(), it.col(), it.value());
            trip.emplace_back(it.row() + s.rows(), it.col() + s.cols(), it.value());
        }
    SparseMatrix v(2 * s.rows(), 2 * s.cols());
    v.setFromTriplets(trip.begin(), trip.end());
    return v;
}

}  // namespace

DiscreteSpace::DiscreteSpace(std::shared_ptr<const TriMesh> mesh, ElementType type, SparseMatrix scalar)
    : mesh_(std::move(mesh)), type_(type), scalar_(std::move(scalar)), vector_(block_diag2(scalar_))
{
}

DiscreteSpace DiscreteSpace::b3(std::shared_ptr<const TriMesh> mesh)
{
    ConformingBasis basis = build_nullspace(*mesh, build_b3_constraints(*mesh));
    return DiscreteSpace(std::move(mesh), ElementType::B3, std::move(basis.transform));
}

DiscreteSpace DiscreteSpace::morley(std::shared_ptr<const TriMesh> mesh)
{
    MorleyBasis basis = build_morley(*mesh);
    return DiscreteSpace(std::move(mesh), ElementType::Morley, std::move(basis.transform));
}

DiscreteSpace DiscreteSpace::make(std::shared_ptr<const TriMesh> mesh, ElementType type)
{
    return type == ElementType::B3 ? b3(std::move(mesh)) : morley(std::move(mesh));
}

SparseMatrix DiscreteSpace::restrict(const SparseMatrix& broken) const
{
    if (broken.rows() != broken_dim() || broken.cols() != broken_dim())
        throw std::invalid_argument("matrix does not match the broken space");
    const SparseMatrix an = broken * vector_;
    return SparseMatrix(vector_.transpose()) * an;
}

Eigen::VectorXd DiscreteSpace::restrict(const Eigen::VectorXd& broken) const
{
    return vector_.transpose() * broken;
}

Eigen::VectorXd DiscreteSpace::expand(const Eigen::VectorXd& coords) const { return vector_ * coords; }

}  // namespace elastep
