#pragma once

#include "elastep/coefficient.hpp"
#include "elastep/polybasis.hpp"
#include "elastep/spaces.hpp"

#include <Eigen/Core>

#include <functional>
#include <string_view>

namespace elastep {

/**
 * Bilinear forms over broken vector P3. Entry (i, j) is the form applied to
 * trial function j and test function i; all derivatives are elementwise.
 */
enum class FormKind {
    Mass,               // (c u, v)
    BiElastic,          // (c div sigma u, div sigma v)
    ElasticEnergy,      // (sigma(u), grad v)
    HessianFull,        // c (hess u, hess v), both components
    GradDiv,            // c (grad div u, grad div v)
    LaplacePair,        // c (lap u, lap v)
    CurlRot,            // c (curl rot u, curl rot v)
    MixedDivSigmaMass,  // (c u, div sigma v), not symmetric
    GradDivCurlRot,     // (grad div u, curl rot v), not symmetric
};

std::string_view form_name(FormKind kind);
bool form_is_symmetric(FormKind kind);
/// Default quadrature exactness used for a kind.
int default_quadrature(FormKind kind);

struct FormMatrix {
    SparseMatrix matrix;
    FormKind kind = FormKind::Mass;
    bool symmetric = true;
};

struct AssemblyOptions {
    int quad_degree = 0;         // 0 selects default_quadrature(kind)
    bool require_positive = false;  // reject c <= 0 at a quadrature point
};

/// Assemble over broken vector P3 on the mesh (dimension 20 T).
FormMatrix assemble(const TriMesh& mesh, FormKind kind, const Coefficient& coef, const Lame& lame,
                    const AssemblyOptions& options = {});

/// Assemble and restrict to the conforming coordinates of `space`.
SparseMatrix assemble_on(const DiscreteSpace& space, FormKind kind, const Coefficient& coef, const Lame& lame,
                         const AssemblyOptions& options = {});

/// Broken load vector (f, phi) for f = (f1, f2).
Eigen::VectorXd assemble_rhs(const TriMesh& mesh, const Coefficient& f1, const Coefficient& f2, int quad_degree = 10);

/// Closed-form vector field with derivatives up to second order.
struct ExactField {
    std::function<Eigen::Vector2d(const Point&)> value;
    std::function<Eigen::Matrix2d(const Point&)> grad;                 // row c is grad of component c
    std::function<Eigen::Matrix<double, 2, 3>(const Point&)> hessian;  // row c is (d11, d12, d22) of component c
};

/// The zero field.
ExactField zero_field();

struct ErrorNorms {
    double l2 = 0.0;
    double h1 = 0.0;  // broken seminorm
    double h2 = 0.0;  // broken seminorm
};

/// Broken L2, H1 and H2 norms of exact - uh, where uh is given by broken coefficients.
ErrorNorms error_norms(const TriMesh& mesh, const Eigen::VectorXd& broken_coeffs, const ExactField& exact,
                       int quad_degree = 10);

}  // namespace elastep
