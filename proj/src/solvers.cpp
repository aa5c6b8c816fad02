#include "elastep/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace elastep {

TepMethod parse_method(std::string_view name)
{
    if (name == "secant") return TepMethod::Secant;
    if (name == "quadratic") return TepMethod::Quadratic;
    throw std::invalid_argument("unknown method '" + std::string(name) + "' (expected secant or quadratic)");
}

std::string_view method_name(TepMethod method) { return method == TepMethod::Secant ? "secant" : "quadratic"; }

void ProblemSpec::validate() const
{
    lame.validate();
    if (level < 0) throw std::invalid_argument("level must be non-negative");
    if (level > max_level) {
        std::ostringstream os;
        os << "level " << level << " exceeds the cap " << max_level;
        throw std::invalid_argument(os.str());
    }
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    if (alpha && element != ElementType::Morley)
        throw std::invalid_argument("alpha applies to the morley element only");
    if (alpha && !(*alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
}

std::shared_ptr<const DiscreteSpace> make_space(const ProblemSpec& spec)
{
    spec.validate();
    auto mesh = std::make_shared<const TriMesh>(generate_domain(spec.domain, spec.level, spec.max_level));
    return std::make_shared<const DiscreteSpace>(DiscreteSpace::make(mesh, spec.element));
}

double alpha_bound(const TriMesh& mesh, const Coefficient& weight) { return weight.min_on(mesh); }

SparseMatrix fourth_order_block(const DiscreteSpace& space, const Coefficient& weight, const Lame& lame,
                                std::optional<double> alpha, MorleySplit split)
{
    if (space.type() == ElementType::B3 || !alpha) return assemble_on(space, FormKind::BiElastic, weight, lame);
    const double a = *alpha;
    const double l = lame.lambda, m = lame.mu;
    const double gd = split == MorleySplit::Literal ? l * l + 2.0 * l * m : (l + 2.0 * m) * (l + 2.0 * m) - m * m;
    const TriMesh& mesh = space.mesh();
    SparseMatrix broken = assemble(mesh, FormKind::BiElastic, weight - a, lame).matrix;
    broken += assemble(mesh, FormKind::HessianFull, a * m * m, lame).matrix;
    broken += assemble(mesh, FormKind::GradDiv, a * gd, lame).matrix;
    return space.restrict(broken);
}

namespace {

// Default or validated alpha for a Morley run; nullopt on B3.
std::optional<double> resolve_alpha(const ProblemSpec& spec, const TriMesh& mesh, const Coefficient& weight,
                                    bool closed_upper)
{
    if (spec.element != ElementType::Morley) return std::nullopt;
    const double bound = alpha_bound(mesh, weight);
    if (!(bound > 0.0)) throw std::invalid_argument("fourth-order weight is not positive on the mesh");
    const double a = spec.alpha.value_or(0.5 * bound);
    const bool ok = a > 0.0 && (closed_upper ? a <= bound : a < bound);
    if (!ok) {
        std::ostringstream os;
        os << "alpha " << a << " outside the admissible range (0, " << bound << (closed_upper ? "]" : ")");
        throw std::invalid_argument(os.str());
    }
    return a;
}

void check_beta(const ProblemSpec& spec, const TriMesh& mesh)
{
    if (!(spec.beta.min_on(mesh) > 0.0)) throw std::invalid_argument("beta must be positive on the domain");
}

}  // namespace

SourceResult solve_source(const ProblemSpec& spec) { return solve_source(spec, *make_space(spec)); }

SourceResult solve_source(const ProblemSpec& spec, const DiscreteSpace& space)
{
    spec.validate();
    const TriMesh& mesh = space.mesh();
    check_beta(spec, mesh);
    const auto alpha = resolve_alpha(spec, mesh, spec.beta, false);
    const SparseMatrix a = fourth_order_block(space, spec.beta, spec.lame, alpha, spec.split);
    const Eigen::VectorXd b = space.restrict(assemble_rhs(mesh, spec.f1, spec.f2));

    SourceResult out;
    out.dofs = space.dim();
    out.coords = solve_sym(a, b);
    const double bn = b.norm();
    out.residual = (a * out.coords - b).norm() / (bn > 0.0 ? bn : 1.0);
    out.broken = space.expand(out.coords);
    if (spec.exact) out.errors = error_norms(mesh, out.broken, *spec.exact);
    return out;
}

EigResult solve_bielastic_eigs(const ProblemSpec& spec) { return solve_bielastic_eigs(spec, *make_space(spec)); }

EigResult solve_bielastic_eigs(const ProblemSpec& spec, const DiscreteSpace& space)
{
    spec.validate();
    const TriMesh& mesh = space.mesh();
    check_beta(spec, mesh);
    const auto alpha = resolve_alpha(spec, mesh, spec.beta, false);
    const SparseMatrix a = fourth_order_block(space, spec.beta, spec.lame, alpha, spec.split);
    const SparseMatrix m = assemble_on(space, FormKind::Mass, 1.0, spec.lame);
    if (spec.k >= space.dim()) throw std::invalid_argument("k must be smaller than the space dimension");
    return eig_sym_gen(a, m, spec.k);
}

DensityCase resolve_density_case(const ProblemSpec& spec, const TriMesh& mesh)
{
    const double gap_lo = (spec.rho1 - spec.rho0).min_on(mesh);
    const double gap_hi = (spec.rho1 - spec.rho0).max_on(mesh);
    if (!(gap_lo > 0.0) && !(gap_hi < 0.0))
        throw std::invalid_argument("rho1 - rho0 vanishes or changes sign on the domain");
    const double q0 = spec.rho0.min_on(mesh), Q0 = spec.rho0.max_on(mesh);
    const double q1 = spec.rho1.min_on(mesh), Q1 = spec.rho1.max_on(mesh);
    if (!(q0 > 0.0) || !(q1 > 0.0)) throw std::invalid_argument("densities must be positive");
    const bool standard = Q0 <= 1.0 && 1.0 <= q1;
    const bool swapped = Q1 <= 1.0 && 1.0 <= q0;
    switch (spec.density_case) {
    case DensityCase::Standard:
        if (!standard) throw std::invalid_argument("densities do not satisfy rho0 <= 1 <= rho1");
        return DensityCase::Standard;
    case DensityCase::Swapped:
        if (!swapped) throw std::invalid_argument("densities do not satisfy rho1 <= 1 <= rho0");
        return DensityCase::Swapped;
    case DensityCase::Auto: break;
    }
    if (standard) return DensityCase::Standard;
    if (swapped) return DensityCase::Swapped;
    throw std::invalid_argument("densities are not separated by 1 on the domain");
}

TepOperator::TepOperator(const ProblemSpec& spec, std::shared_ptr<const DiscreteSpace> space)
    : space_(std::move(space)), lame_(spec.lame)
{
    spec.validate();
    const TriMesh& mesh = space_->mesh();
    case_ = resolve_density_case(spec, mesh);
    // inner is the density next to the weight in the mixed term, outer the other one
    inner_ = case_ == DensityCase::Standard ? spec.rho0 : spec.rho1;
    outer_ = case_ == DensityCase::Standard ? spec.rho1 : spec.rho0;
    weight_ = 1.0 / (outer_ - inner_);
    alpha_ = resolve_alpha(spec, mesh, weight_, true);
    d_ = fourth_order_block(*space_, weight_, lame_, alpha_, spec.split);
    f_ = assemble_on(*space_, FormKind::MixedDivSigmaMass, inner_ * weight_, lame_);
    m_ = assemble_on(*space_, FormKind::Mass, inner_ * outer_ * weight_, lame_);
    b_ = assemble_on(*space_, FormKind::ElasticEnergy, 1.0, lame_);
}

SparseMatrix TepOperator::a_tau(double tau) const
{
    SparseMatrix ft = f_.transpose();
    SparseMatrix a = d_ + tau * (f_ + ft) + (tau * tau) * m_;
    return a;
}

EigResult TepOperator::lambda_of_tau(double tau, int k) const
{
    if (k < 1 || k >= space_->dim()) throw std::invalid_argument("branch count out of range");
    try {
        return eig_sym_gen(a_tau(tau), b_, k);
    } catch (const SolverError& e) {
        std::ostringstream os;
        os << "A(tau) is not positive definite at tau = " << tau << ": " << e.what();
        throw SolverError(os.str());
    }
}

SparseMatrix TepOperator::quadratic_linear(QuadraticForm form) const
{
    if (form == QuadraticForm::Consistent) {
        SparseMatrix ft = f_.transpose();
        SparseMatrix c = f_ + ft - b_;
        return c;
    }
    SparseMatrix e1 = assemble_on(*space_, FormKind::MixedDivSigmaMass, outer_ * weight_, lame_).transpose();
    SparseMatrix c = f_ + e1;
    return c;
}

namespace {

struct BranchEval {
    double f = 0.0;
    EigResult eig;
};

BranchEval eval_branch(const TepOperator& op, double tau, int branch)
{
    BranchEval out;
    out.eig = op.lambda_of_tau(tau, branch + 1);
    out.f = out.eig.values[branch].real() - tau;
    return out;
}

bool near_crossing(const EigResult& eig, int branch)
{
    const int n = eig.size();
    const double lam = eig.values[branch].real();
    const double tol = 1e-8 * (1.0 + std::abs(lam));
    if (branch > 0 && std::abs(lam - eig.values[branch - 1].real()) < tol) return true;
    if (branch + 1 < n && std::abs(eig.values[branch + 1].real() - lam) < tol) return true;
    return false;
}

}  // namespace

SecantReport find_teps_secant(const TepOperator& op, const TauScan& scan)
{
    const int nb = std::min(scan.branches, op.space().dim() - 1);
    if (nb < 1) throw std::invalid_argument("space too small for a transmission scan");
    if (scan.points < 2) throw std::invalid_argument("scan needs at least two points");
    SecantReport rep;
    rep.hi = scan.hi > 0.0 ? scan.hi : 1.5 * op.lambda_of_tau(0.0, nb).values[nb - 1].real();
    if (!(rep.hi > scan.lo)) throw std::invalid_argument("empty tau range");

    rep.grid.resize(scan.points);
    rep.samples.resize(scan.points, nb);
    std::vector<EigResult> evals(scan.points);
    for (int i = 0; i < scan.points; ++i) {
        const double tau = scan.lo + (rep.hi - scan.lo) * i / (scan.points - 1);
        rep.grid[i] = tau;
        evals[i] = op.lambda_of_tau(tau, nb);
        for (int j = 0; j < nb; ++j) rep.samples(i, j) = evals[i].values[j].real() - tau;
    }

    for (int j = 0; j < nb; ++j) {
        for (int i = 0; i + 1 < scan.points; ++i) {
            double a = rep.grid[i], b = rep.grid[i + 1];
            double fa = rep.samples(i, j), fb = rep.samples(i + 1, j);
            TepRoot root;
            root.branch = j;
            root.crossing = near_crossing(evals[i], j) || near_crossing(evals[i + 1], j);
            EigResult last;
            double tau = 0.0;
            if (fa == 0.0 || fb == 0.0) {
                if (fb == 0.0 && i + 2 < scan.points) continue;  // picked up by the next bracket
                tau = fa == 0.0 ? a : b;
                last = fa == 0.0 ? evals[i] : evals[i + 1];
            } else if ((fa > 0.0) == (fb > 0.0)) {
                continue;
            } else {
                // Illinois regula falsi with a bisection guard
                int side = 0;
                bool done = false;
                for (int it = 0; it < scan.max_iter && !done; ++it) {
                    double c = b - fb * (b - a) / (fb - fa);
                    const double width = b - a;
                    if (!(c > a && c < b) || it % 8 == 7) c = 0.5 * (a + b);
                    BranchEval ev = eval_branch(op, c, j);
                    root.iterations = it + 1;
                    tau = c;
                    last = std::move(ev.eig);
                    const double fc = ev.f;
                    if (std::abs(fc) <= scan.tol * (1.0 + c) || width < 1e-15 * (1.0 + c)) {
                        done = true;
                    } else if ((fc > 0.0) == (fa > 0.0)) {
                        a = c;
                        fa = fc;
                        if (side == -1) fb *= 0.5;
                        side = -1;
                    } else {
                        b = c;
                        fb = fc;
                        if (side == 1) fa *= 0.5;
                        side = 1;
                    }
                }
            }
            root.tau = tau;
            root.eigenvector = last.vectors.col(j).real();
            root.crossing = root.crossing || near_crossing(last, j);
            // certificate against the nearest branch at the converged tau
            double best = std::numeric_limits<double>::infinity();
            for (int m = 0; m < last.size(); ++m) best = std::min(best, std::abs(last.values[m].real() - tau));
            root.certificate = best / (1.0 + tau);
            rep.roots.push_back(std::move(root));
        }
    }

    std::sort(rep.roots.begin(), rep.roots.end(), [](const TepRoot& x, const TepRoot& y) {
        return x.tau != y.tau ? x.tau < y.tau : x.branch < y.branch;
    });
    std::vector<TepRoot> kept;
    for (auto& r : rep.roots) {
        const bool dup = std::any_of(kept.begin(), kept.end(), [&](const TepRoot& q) {
            return q.branch == r.branch && std::abs(q.tau - r.tau) <= 1e-8 * (1.0 + r.tau);
        });
        if (!dup) kept.push_back(std::move(r));
    }
    rep.roots = std::move(kept);
    return rep;
}

EigResult find_teps_quadratic(const TepOperator& op, int k, QuadraticForm form, const QuadOptions& options)
{
    if (k < 1) throw std::invalid_argument("k must be at least 1");
    return eig_quadratic(op.mass(), op.quadratic_linear(form), op.fourth_order(), k, options);
}

SecantReport solve_tep_morley(const ProblemSpec& spec, const TauScan& scan)
{
    if (spec.element != ElementType::Morley) throw std::invalid_argument("solve_tep_morley needs the morley element");
    TepOperator op(spec, make_space(spec));
    return find_teps_secant(op, scan);
}

}  // namespace elastep
