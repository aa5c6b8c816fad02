#include "elastep/eigensolvers.hpp"

#include <Eigen/CholmodSupport>
#include <Eigen/Dense>
#include <arpack/arpack.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>
#include <random>
#include <vector>

namespace elastep {

struct SymFactor::Impl {
    SparseMatrix a;
    Eigen::CholmodSupernodalLLT<SparseMatrix, Eigen::Lower> llt;
};

SymFactor::SymFactor(const SparseMatrix& a) : impl_(std::make_unique<Impl>())
{
    if (a.rows() != a.cols()) throw std::invalid_argument("SymFactor needs a square matrix");
    impl_->a = a;
    impl_->a.makeCompressed();
    impl_->llt.compute(impl_->a);
    if (impl_->llt.info() != Eigen::Success)
        throw SolverError("sparse Cholesky factorization failed: matrix is not positive definite");
}

SymFactor::~SymFactor() = default;
SymFactor::SymFactor(SymFactor&&) noexcept = default;
SymFactor& SymFactor::operator=(SymFactor&&) noexcept = default;

int SymFactor::size() const { return static_cast<int>(impl_->a.rows()); }

Eigen::VectorXd SymFactor::solve(const Eigen::VectorXd& b, double tol) const
{
    Eigen::VectorXd x = impl_->llt.solve(b);
    const double bnorm = b.norm();
    if (bnorm == 0.0) return Eigen::VectorXd::Zero(b.size());
    for (int it = 0; it < 4; ++it) {
        const Eigen::VectorXd r = b - impl_->a * x;
        if (r.norm() <= tol * bnorm) break;
        x += impl_->llt.solve(r);
    }
    if (!x.allFinite()) throw SolverError("sparse Cholesky solve produced non-finite values");
    return x;
}

Eigen::VectorXd solve_sym(const SparseMatrix& a, const Eigen::VectorXd& b, double tol)
{
    return SymFactor(a).solve(b, tol);
}

namespace {

// fixed-seed start vector so that runs are reproducible and no symmetry class is missed
std::vector<double> start_vector(a_int n)
{
    std::mt19937_64 gen(20240611);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(gen);
    return v;
}

double norm1(const SparseMatrix& a)
{
    double m = 0.0;
    for (int k = 0; k < a.outerSize(); ++k) {
        double s = 0.0;
        for (SparseMatrix::InnerIterator it(a, k); it; ++it) s += std::abs(it.value());
        m = std::max(m, s);
    }
    return m;
}

void normalize_sign(Eigen::Ref<Eigen::VectorXd> x)
{
    const double cut = 1e-8 * x.cwiseAbs().maxCoeff();
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if (std::abs(x[i]) > cut) {
            if (x[i] < 0.0) x = -x;
            return;
        }
    }
}

void finish_symmetric(const SparseMatrix& a, const SparseMatrix& b, const Eigen::VectorXd& lambda,
                      Eigen::MatrixXd vecs, EigResult& out)
{
    const int k = static_cast<int>(lambda.size());
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return lambda[i] < lambda[j]; });
    const double na = norm1(a), nb = norm1(b);
    out.values.resize(k);
    out.vectors.resize(a.rows(), k);
    out.residuals.resize(k);
    for (int j = 0; j < k; ++j) {
        Eigen::VectorXd x = vecs.col(order[j]);
        const double lam = lambda[order[j]];
        x /= std::sqrt(x.dot(b * x));
        normalize_sign(x);
        const Eigen::VectorXd r = a * x - lam * (b * x);
        out.values[j] = lam;
        out.vectors.col(j) = x.cast<std::complex<double>>();
        out.residuals[j] = r.norm() / (x.norm() * (na + std::abs(lam) * nb));
    }
}

EigResult sym_dense(const SparseMatrix& a, const SparseMatrix& b, int k)
{
    const Eigen::MatrixXd ad = Eigen::MatrixXd(a);
    const Eigen::MatrixXd bd = Eigen::MatrixXd(b);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(ad, bd, Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
    if (es.info() != Eigen::Success) throw SolverError("dense generalized symmetric eigensolver failed");
    EigResult out;
    out.method = "dense";
    finish_symmetric(a, b, es.eigenvalues().head(k), es.eigenvectors().leftCols(k), out);
    return out;
}

EigResult sym_krylov(const SparseMatrix& a, const SparseMatrix& b, int k, const EigOptions& opt)
{
    const SymFactor op(a);
    const a_int n = a.rows();
    const a_int nev = k;
    const a_int ncv = opt.ncv > 0 ? std::min<a_int>(opt.ncv, n) : std::min<a_int>(n, std::max<a_int>(2 * nev + 1, 20));
    const a_int lworkl = ncv * (ncv + 8);
    std::vector<double> resid = start_vector(n), v(n * ncv), workd(3 * n), workl(lworkl);
    a_int iparam[11] = {1, 0, opt.max_iter, 1, 0, 0, 3, 0, 0, 0, 0};
    a_int ipntr[14] = {};
    a_int ido = 0, info = 1;  // nonzero info: start from resid
    const auto bm = arpack::bmat::generalized;
    const auto wh = arpack::which::largest_magnitude;
    for (;;) {
        arpack::saupd(ido, bm, n, wh, nev, opt.tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(),
                      workl.data(), lworkl, info);
        if (ido == -1 || ido == 1) {
            Eigen::Map<Eigen::VectorXd> y(&workd[ipntr[1] - 1], n);
            if (ido == -1) {
                Eigen::Map<const Eigen::VectorXd> x(&workd[ipntr[0] - 1], n);
                y = op.solve(b * x);
            } else {
                Eigen::Map<const Eigen::VectorXd> bx(&workd[ipntr[2] - 1], n);
                y = op.solve(bx);
            }
        } else if (ido == 2) {
            Eigen::Map<const Eigen::VectorXd> x(&workd[ipntr[0] - 1], n);
            Eigen::Map<Eigen::VectorXd>(&workd[ipntr[1] - 1], n) = b * x;
        } else {
            break;
        }
    }
    if (info == 1) throw SolverError("Lanczos iteration did not converge within " + std::to_string(opt.max_iter) + " restarts");
    if (info < 0) throw SolverError("Lanczos iteration failed (ARPACK info " + std::to_string(info) + ")");
    std::vector<a_int> select(ncv);
    std::vector<double> d(nev), z(n * nev);
    arpack::seupd(1, arpack::howmny::ritz_vectors, select.data(), d.data(), z.data(), n, 0.0, bm, n, wh, nev, opt.tol,
                  resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(), workl.data(), lworkl, info);
    if (info != 0) throw SolverError("Lanczos eigenvector extraction failed (ARPACK info " + std::to_string(info) + ")");
    EigResult out;
    out.method = "lanczos";
    out.iterations = static_cast<int>(iparam[2]);
    finish_symmetric(a, b, Eigen::Map<Eigen::VectorXd>(d.data(), nev), Eigen::Map<Eigen::MatrixXd>(z.data(), n, nev),
                     out);
    return out;
}

}  // namespace

EigResult eig_sym_gen(const SparseMatrix& a, const SparseMatrix& b, int k, const EigOptions& options)
{
    const int n = static_cast<int>(a.rows());
    if (a.cols() != n || b.rows() != n || b.cols() != n) throw std::invalid_argument("eig_sym_gen: size mismatch");
    if (k < 1 || k > n) throw std::invalid_argument("eig_sym_gen: k must lie in [1, n]");
    EigMethod method = options.method;
    if (method == EigMethod::Auto) method = (n <= options.dense_switch || k >= n - 1) ? EigMethod::Dense : EigMethod::Krylov;
    if (method == EigMethod::Krylov && k >= n - 1) method = EigMethod::Dense;
    if (method == EigMethod::Dense) {
        if (n > options.dense_cap)
            throw std::invalid_argument("dimension " + std::to_string(n) + " exceeds the dense cap " +
                                        std::to_string(options.dense_cap));
        return sym_dense(a, b, k);
    }
    return sym_krylov(a, b, k, options);
}

void sort_by_modulus(EigResult& r)
{
    const int k = r.size();
    std::vector<int> order(k);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int i, int j) { return std::abs(r.values[i]) < std::abs(r.values[j]); });
    // conjugate partners end up adjacent; list the positive imaginary part first
    for (int j = 0; j + 1 < k; ++j) {
        const std::complex<double> a = r.values[order[j]], b = r.values[order[j + 1]];
        if (a.imag() < 0.0 && std::abs(a - std::conj(b)) <= 1e-8 * std::abs(a)) {
            std::swap(order[j], order[j + 1]);
            ++j;
        }
    }
    EigResult s = r;
    for (int j = 0; j < k; ++j) {
        s.values[j] = r.values[order[j]];
        s.vectors.col(j) = r.vectors.col(order[j]);
        s.residuals[j] = r.residuals[order[j]];
    }
    r = std::move(s);
}

namespace {

using CVec = Eigen::VectorXcd;

void finish_quadratic(const SparseMatrix& m, const SparseMatrix& c, const SparseMatrix& k,
                      const std::vector<std::complex<double>>& mu, const std::vector<CVec>& xs, int count,
                      EigResult& out)
{
    const double nm = norm1(m), nc = norm1(c), nk = norm1(k);
    const int total = static_cast<int>(mu.size());
    out.values.resize(total);
    out.vectors.resize(k.rows(), total);
    out.residuals.resize(total);
    const Eigen::SparseMatrix<std::complex<double>> mc = m.cast<std::complex<double>>();
    const Eigen::SparseMatrix<std::complex<double>> cc = c.cast<std::complex<double>>();
    const Eigen::SparseMatrix<std::complex<double>> kc = k.cast<std::complex<double>>();
    for (int j = 0; j < total; ++j) {
        const std::complex<double> tau = 1.0 / mu[j];
        CVec x = xs[j];
        Eigen::Index imax = 0;
        x.cwiseAbs().maxCoeff(&imax);
        x *= std::abs(x[imax]) / x[imax];
        x /= x.norm();
        const CVec r = kc * x + tau * (cc * x) + tau * tau * (mc * x);
        const double at = std::abs(tau);
        out.values[j] = tau;
        out.vectors.col(j) = x;
        out.residuals[j] = r.norm() / (nk + at * nc + at * at * nm);
    }
    sort_by_modulus(out);
    int keep = std::min(count, total);
    if (keep < total && keep > 0) {
        const auto last = out.values[keep - 1];
        if (std::abs(last.imag()) > 1e-12 * std::abs(last) && std::abs(out.values[keep] - std::conj(last)) <= 1e-8 * std::abs(last))
            ++keep;
    }
    out.values.conservativeResize(keep);
    out.vectors.conservativeResize(Eigen::NoChange, keep);
    out.residuals.conservativeResize(keep);
}

EigResult quad_dense(const SparseMatrix& m, const SparseMatrix& c, const SparseMatrix& k, int count)
{
    const Eigen::Index n = k.rows();
    const Eigen::LLT<Eigen::MatrixXd> kf{Eigen::MatrixXd(k)};
    if (kf.info() != Eigen::Success) throw SolverError("quadratic pencil: K is not positive definite");
    // reversed pencil in mu = 1 / tau acting on [mu x; x]
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    s.topLeftCorner(n, n) = -kf.solve(Eigen::MatrixXd(c));
    s.topRightCorner(n, n) = -kf.solve(Eigen::MatrixXd(m));
    s.bottomLeftCorner(n, n).setIdentity();
    Eigen::EigenSolver<Eigen::MatrixXd> es(s, true);
    if (es.info() != Eigen::Success) throw SolverError("dense companion eigensolver failed");
    const Eigen::VectorXcd ev = es.eigenvalues();
    std::vector<int> order(2 * n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int i, int j) { return std::abs(ev[i]) > std::abs(ev[j]); });
    const int take = std::min<int>(static_cast<int>(2 * n), count + 2);
    std::vector<std::complex<double>> mu;
    std::vector<CVec> xs;
    for (int j = 0; j < take; ++j) {
        if (std::abs(ev[order[j]]) == 0.0) continue;
        mu.push_back(ev[order[j]]);
        xs.push_back(es.eigenvectors().col(order[j]).tail(n));
    }
    EigResult out;
    out.method = "dense-companion";
    finish_quadratic(m, c, k, mu, xs, count, out);
    return out;
}

EigResult quad_krylov(const SparseMatrix& m, const SparseMatrix& c, const SparseMatrix& k, int count,
                      const QuadOptions& opt)
{
    const SymFactor kf(k);
    const a_int n1 = k.rows();
    const a_int n = 2 * n1;
    const a_int nev = count + 1;
    const a_int ncv = opt.ncv > 0 ? std::min<a_int>(opt.ncv, n) : std::min<a_int>(n, std::max<a_int>(2 * nev + 1, 40));
    const a_int lworkl = 3 * ncv * ncv + 6 * ncv;
    std::vector<double> resid = start_vector(n), v(n * ncv), workd(3 * n), workl(lworkl);
    a_int iparam[11] = {1, 0, opt.max_iter, 1, 0, 0, 1, 0, 0, 0, 0};
    a_int ipntr[14] = {};
    a_int ido = 0, info = 1;
    const auto bm = arpack::bmat::identity;
    const auto wh = arpack::which::largest_magnitude;
    for (;;) {
        arpack::naupd(ido, bm, n, wh, nev, opt.tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(),
                      workl.data(), lworkl, info);
        if (ido != -1 && ido != 1) break;
        Eigen::Map<const Eigen::VectorXd> x1(&workd[ipntr[0] - 1], n1);
        Eigen::Map<const Eigen::VectorXd> x2(&workd[ipntr[0] - 1 + n1], n1);
        Eigen::Map<Eigen::VectorXd> y1(&workd[ipntr[1] - 1], n1);
        Eigen::Map<Eigen::VectorXd> y2(&workd[ipntr[1] - 1 + n1], n1);
        const Eigen::VectorXd rhs = c * x1 + m * x2;
        y2 = x1;
        y1 = -kf.solve(rhs);
    }
    if (info == 1) throw SolverError("Arnoldi iteration did not converge within " + std::to_string(opt.max_iter) + " restarts");
    if (info < 0) throw SolverError("Arnoldi iteration failed (ARPACK info " + std::to_string(info) + ")");
    std::vector<a_int> select(ncv);
    std::vector<double> dr(nev + 1), di(nev + 1), z(n * (nev + 1)), workev(3 * ncv);
    arpack::neupd(1, arpack::howmny::ritz_vectors, select.data(), dr.data(), di.data(), z.data(), n, 0.0, 0.0,
                  workev.data(), bm, n, wh, nev, opt.tol, resid.data(), ncv, v.data(), n, iparam, ipntr, workd.data(),
                  workl.data(), lworkl, info);
    if (info != 0) throw SolverError("Arnoldi eigenvector extraction failed (ARPACK info " + std::to_string(info) + ")");
    const int nconv = static_cast<int>(iparam[4]);
    Eigen::Map<const Eigen::MatrixXd> zz(z.data(), n, nev + 1);
    std::vector<std::complex<double>> mu;
    std::vector<CVec> xs;
    for (int j = 0; j < nconv; ++j) {
        const std::complex<double> val(dr[j], di[j]);
        if (di[j] == 0.0) {
            mu.push_back(val);
            xs.push_back(zz.col(j).tail(n1).cast<std::complex<double>>());
        } else if (j + 1 <= nev) {
            const CVec zc = zz.col(j).tail(n1).cast<std::complex<double>>() +
                            std::complex<double>(0.0, 1.0) * zz.col(j + 1).tail(n1).cast<std::complex<double>>();
            mu.push_back(val);
            xs.push_back(zc);
            mu.push_back(std::conj(val));
            xs.push_back(zc.conjugate());
            ++j;
        }
    }
    EigResult out;
    out.method = "arnoldi";
    out.iterations = static_cast<int>(iparam[2]);
    finish_quadratic(m, c, k, mu, xs, count, out);
    return out;
}

}  // namespace

EigResult eig_quadratic(const SparseMatrix& m, const SparseMatrix& c, const SparseMatrix& k, int count,
                        const QuadOptions& options)
{
    const int n = static_cast<int>(k.rows());
    if (k.cols() != n || m.rows() != n || m.cols() != n || c.rows() != n || c.cols() != n)
        throw std::invalid_argument("eig_quadratic: size mismatch");
    if (count < 1 || count > 2 * n) throw std::invalid_argument("eig_quadratic: count must lie in [1, 2n]");
    EigMethod method = options.method;
    if (method == EigMethod::Auto) method = 2 * n <= options.dense_switch ? EigMethod::Dense : EigMethod::Krylov;
    if (method == EigMethod::Krylov && count + 3 >= 2 * n) method = EigMethod::Dense;
    if (method == EigMethod::Dense) {
        if (2 * n > options.dense_cap)
            throw std::invalid_argument("companion dimension " + std::to_string(2 * n) + " exceeds the dense cap " +
                                        std::to_string(options.dense_cap));
        return quad_dense(m, c, k, count);
    }
    return quad_krylov(m, c, k, count, options);
}

}  // namespace elastep
