#pragma once

#include "elastep/assembly.hpp"
#include "elastep/eigensolvers.hpp"

#include <memory>
#include <optional>
#include <string_view>
#include <vector>

namespace elastep {

enum class ProblemKind { Source, BiElasticEig, Tep };
enum class TepMethod { Secant, Quadratic };
TepMethod parse_method(std::string_view name);
std::string_view method_name(TepMethod method);

/// Which of the two non-intersecting density orderings a transmission problem uses.
enum class DensityCase {
    Auto,
    Standard,  // rho0 <= 1 <= rho1, weight 1 / (rho1 - rho0)
    Swapped,   // rho1 <= 1 <= rho0, roles of rho0 and rho1 exchanged
};

/**
 * How the Morley element splits the fourth-order form.
 * Literal: (w - a) BiElastic + a mu^2 Hessian + a (lambda^2 + 2 lambda mu) GradDiv.
 * Consistent: the same with (lambda + 2 mu)^2 - mu^2 in place of lambda^2 + 2 lambda mu,
 * which equals the unsplit form on smooth clamped fields.
 */
enum class MorleySplit { Literal, Consistent };

/// Linear coefficient of the quadratic transmission pencil.
enum class QuadraticForm {
    Consistent,  // F0 + F0^T - B: same discrete roots as the secant path
    Expanded,    // (rho0 w u, div sigma v) + (rho1 w div sigma u, v) taken elementwise
};

struct ProblemSpec {
    ProblemKind kind = ProblemKind::BiElasticEig;
    Domain domain = Domain::UnitSquare;
    int level = 1;
    int max_level = kDefaultMaxLevel;
    ElementType element = ElementType::B3;
    Lame lame{0.25, 0.0625};

    // source and bi-elastic eigenvalue problems
    Coefficient beta = 1.0;
    Coefficient f1 = 0.0;
    Coefficient f2 = 0.0;
    std::optional<ExactField> exact;

    // transmission problem
    Coefficient rho0 = 0.5;
    Coefficient rho1 = 2.0;
    TepMethod method = TepMethod::Secant;
    DensityCase density_case = DensityCase::Auto;
    QuadraticForm quadratic_form = QuadraticForm::Consistent;

    int k = 6;
    std::optional<double> alpha;  // Morley only
    MorleySplit split = MorleySplit::Literal;

    /// Throws std::invalid_argument describing the first violated requirement.
    void validate() const;
};

std::shared_ptr<const DiscreteSpace> make_space(const ProblemSpec& spec);

/// Fourth-order block with weight w: plain (w div sigma, div sigma) on B3, the alpha split on Morley.
SparseMatrix fourth_order_block(const DiscreteSpace& space, const Coefficient& weight, const Lame& lame,
                                std::optional<double> alpha, MorleySplit split);

/// Admissible Morley alpha bound: the minimum of the weight over the mesh.
double alpha_bound(const TriMesh& mesh, const Coefficient& weight);

struct SourceResult {
    Eigen::VectorXd coords;
    Eigen::VectorXd broken;
    int dofs = 0;
    double residual = 0.0;
    std::optional<ErrorNorms> errors;
};

SourceResult solve_source(const ProblemSpec& spec);
SourceResult solve_source(const ProblemSpec& spec, const DiscreteSpace& space);

EigResult solve_bielastic_eigs(const ProblemSpec& spec);
EigResult solve_bielastic_eigs(const ProblemSpec& spec, const DiscreteSpace& space);

/// Resolve DensityCase::Auto from the density ranges on the mesh; throws if neither ordering holds.
DensityCase resolve_density_case(const ProblemSpec& spec, const TriMesh& mesh);

/**
 * Cached blocks of the transmission problem on one space:
 * A(tau) = D + tau (F + F^T) + tau^2 M and the elastic energy matrix B.
 */
class TepOperator {
public:
    TepOperator(const ProblemSpec& spec, std::shared_ptr<const DiscreteSpace> space);

    const DiscreteSpace& space() const { return *space_; }
    DensityCase density_case() const { return case_; }
    std::optional<double> alpha() const { return alpha_; }

    const SparseMatrix& fourth_order() const { return d_; }
    const SparseMatrix& mixed() const { return f_; }
    const SparseMatrix& mass() const { return m_; }
    const SparseMatrix& energy() const { return b_; }

    SparseMatrix a_tau(double tau) const;
    /// The k smallest eigenvalues of A(tau) x = lambda B x.
    EigResult lambda_of_tau(double tau, int k) const;
    /// K, C and M of the quadratic pencil.
    SparseMatrix quadratic_linear(QuadraticForm form) const;

private:
    std::shared_ptr<const DiscreteSpace> space_;
    DensityCase case_;
    std::optional<double> alpha_;
    SparseMatrix d_, f_, m_, b_;
    Coefficient weight_, inner_, outer_;
    Lame lame_;
};

struct TauScan {
    double lo = 0.25;
    double hi = 0.0;   // 0 selects 1.5 lambda_k(0)
    int points = 60;
    int branches = 12;
    double tol = 1e-10;
    int max_iter = 50;
};

struct TepRoot {
    double tau = 0.0;
    int branch = 0;
    double certificate = 0.0;     // min_j |lambda_j(tau) - tau| / (1 + tau) on re-evaluation
    bool crossing = false;         // adjacent branches within 1e-8 at a bracket end
    int iterations = 0;
    Eigen::VectorXd eigenvector;
};

struct SecantReport {
    std::vector<TepRoot> roots;
    std::vector<double> grid;
    Eigen::MatrixXd samples;  // f_j(tau_i) = lambda_j(tau_i) - tau_i, rows = grid points
    double hi = 0.0;
};

SecantReport find_teps_secant(const TepOperator& op, const TauScan& scan = {});
EigResult find_teps_quadratic(const TepOperator& op, int k, QuadraticForm form = QuadraticForm::Consistent,
                              const QuadOptions& options = {});

/// Morley transmission path: the secant pipeline on a Morley space with the alpha split.
SecantReport solve_tep_morley(const ProblemSpec& spec, const TauScan& scan = {});

}  // namespace elastep
