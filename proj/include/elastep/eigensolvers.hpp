#pragma once

#include "elastep/spaces.hpp"

#include <Eigen/Core>

#include <memory>
#include <stdexcept>
#include <string>

namespace elastep {

/// Raised when a factorization or an eigen-iteration fails.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * Sparse Cholesky factorization of a symmetric positive definite matrix
 * (CHOLMOD), with iterative refinement in solve().
 */
class SymFactor {
public:
    explicit SymFactor(const SparseMatrix& a);
    ~SymFactor();
    SymFactor(SymFactor&&) noexcept;
    SymFactor& operator=(SymFactor&&) noexcept;

    /// Solution with relative residual <= tol, or the best reached after a few refinement steps.
    Eigen::VectorXd solve(const Eigen::VectorXd& b, double tol = 1e-12) const;
    int size() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd solve_sym(const SparseMatrix& a, const Eigen::VectorXd& b, double tol = 1e-12);

enum class EigMethod { Auto, Dense, Krylov };

struct EigOptions {
    EigMethod method = EigMethod::Auto;
    double tol = 1e-10;
    int max_iter = 500;
    int dense_cap = 3000;     // largest dimension the dense path accepts
    int dense_switch = 400;   // Auto uses the dense path up to this dimension
    int ncv = 0;              // Krylov subspace size, 0 = automatic
};

/**
 * Eigenpairs with eigenvectors as columns. Symmetric problems fill only the
 * real parts and B-normalize the vectors; quadratic problems may return
 * complex pairs. residuals[j] is the explicit relative residual of pair j.
 */
struct EigResult {
    Eigen::VectorXcd values;
    Eigen::MatrixXcd vectors;
    Eigen::VectorXd residuals;
    std::string method;
    int iterations = 0;

    int size() const { return static_cast<int>(values.size()); }
    Eigen::VectorXd real_values() const { return values.real(); }
};

/**
 * The k algebraically smallest eigenvalues of A x = lambda B x with A
 * symmetric positive definite and B symmetric positive definite. The Krylov
 * path is shift-invert Lanczos at shift 0 in the B inner product.
 */
EigResult eig_sym_gen(const SparseMatrix& a, const SparseMatrix& b, int k, const EigOptions& options = {});

struct QuadOptions {
    EigMethod method = EigMethod::Auto;
    double tol = 1e-12;
    int max_iter = 1000;
    int dense_cap = 6000;     // companion rows
    int dense_switch = 1200;  // Auto uses the dense path up to this many companion rows
    int ncv = 0;
};

/**
 * The k eigenvalues of smallest modulus of (K + tau C + tau^2 M) x = 0 with
 * K symmetric positive definite and M nonsingular. Values are sorted by
 * modulus; each conjugate pair lists the positive imaginary part first.
 */
EigResult eig_quadratic(const SparseMatrix& m, const SparseMatrix& c, const SparseMatrix& k, int count,
                        const QuadOptions& options = {});

/// Order of appearance used for quadratic results: modulus, then conjugate pairs with +imag first.
void sort_by_modulus(EigResult& result);

}  // namespace elastep
