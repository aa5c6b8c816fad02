#include "elastep/harness.hpp"

#include <nlohmann/json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>
#include <stdexcept>

#ifndef ELASTEP_VERSION
#define ELASTEP_VERSION "0.0.0"
#endif

namespace elastep {

std::string_view version() { return ELASTEP_VERSION; }

namespace {

// phi(d . x + shift) with phi and its first two derivatives.
struct Ridge {
    Eigen::Vector2d d;
    double shift = 0.0;
    std::function<Eigen::Vector3d(double)> phi;
};

Ridge sin_power(int n, int axis)
{
    const double pi = std::numbers::pi;
    Ridge r{Eigen::Vector2d::Unit(axis), 0.0, nullptr};
    r.phi = [n, pi](double t) {
        const double s = std::sin(pi * t), c = std::cos(pi * t);
        const double sn2 = n >= 2 ? std::pow(s, n - 2) : 0.0;
        return Eigen::Vector3d(std::pow(s, n), n * pi * std::pow(s, n - 1) * c,
                               n * pi * pi * ((n - 1) * sn2 * c * c - std::pow(s, n)));
    };
    return r;
}

Ridge monomial(int n, Eigen::Vector2d d, double shift = 0.0)
{
    Ridge r{d, shift, nullptr};
    r.phi = [n](double t) {
        return Eigen::Vector3d(std::pow(t, n), n * std::pow(t, n - 1), n >= 2 ? n * (n - 1) * std::pow(t, n - 2) : 0.0);
    };
    return r;
}

struct RidgeProduct {
    std::vector<Ridge> factors;

    void eval(const Point& x, double& v, Eigen::Vector2d& g, Eigen::Matrix2d& h) const
    {
        const int n = static_cast<int>(factors.size());
        std::vector<Eigen::Vector3d> p(n);
        for (int i = 0; i < n; ++i) p[i] = factors[i].phi(factors[i].d.dot(x) + factors[i].shift);
        auto others = [&](int a, int b) {
            double r = 1.0;
            for (int m = 0; m < n; ++m)
                if (m != a && m != b) r *= p[m][0];
            return r;
        };
        v = others(-1, -1);
        g.setZero();
        h.setZero();
        for (int i = 0; i < n; ++i) {
            const Eigen::Vector2d& di = factors[i].d;
            g += p[i][1] * others(i, -1) * di;
            h += p[i][2] * others(i, -1) * di * di.transpose();
            for (int j = 0; j < n; ++j)
                if (j != i) h += p[i][1] * p[j][1] * others(i, j) * di * factors[j].d.transpose();
        }
    }
};

ExactField field_of(RidgeProduct c1, RidgeProduct c2)
{
    auto comps = std::make_shared<std::array<RidgeProduct, 2>>(std::array<RidgeProduct, 2>{std::move(c1), std::move(c2)});
    ExactField f;
    f.value = [comps](const Point& x) {
        Eigen::Vector2d out;
        double v;
        Eigen::Vector2d g;
        Eigen::Matrix2d h;
        for (int c = 0; c < 2; ++c) {
            (*comps)[c].eval(x, v, g, h);
            out[c] = v;
        }
        return out;
    };
    f.grad = [comps](const Point& x) {
        Eigen::Matrix2d out;
        double v;
        Eigen::Vector2d g;
        Eigen::Matrix2d h;
        for (int c = 0; c < 2; ++c) {
            (*comps)[c].eval(x, v, g, h);
            out.row(c) = g.transpose();
        }
        return out;
    };
    f.hessian = [comps](const Point& x) {
        Eigen::Matrix<double, 2, 3> out;
        double v;
        Eigen::Vector2d g;
        Eigen::Matrix2d h;
        for (int c = 0; c < 2; ++c) {
            (*comps)[c].eval(x, v, g, h);
            out.row(c) << h(0, 0), h(0, 1), h(1, 1);
        }
        return out;
    };
    return f;
}

std::vector<Example> build_examples()
{
    const Coefficient tilt = Coefficient::affine(8.0, 1.0, -1.0);
    std::vector<Example> all;

    Example e1;
    e1.id = 1;
    e1.title = "source, unit square, trigonometric solution";
    e1.kind = ProblemKind::Source;
    e1.lame = {0.25, 1.0 / 16.0};
    e1.f1 = Coefficient::parse(
        "3*pi^4*sin(pi*x2)/256*(663*cos(pi*x1)^2*cos(pi*x2)^2 - 770*cos(pi*x1)*cos(pi*x2)"
        " + 910*cos(pi*x1)^3*cos(pi*x2) - 347*cos(pi*x1)^2 - 345*cos(pi*x2)^2 + 177)");
    e1.f2 = Coefficient::parse(
        "3*pi^4*sin(pi*x1)/256*(663*cos(pi*x1)^2*cos(pi*x2)^2 - 770*cos(pi*x1)*cos(pi*x2)"
        " + 910*cos(pi*x1)*cos(pi*x2)^3 - 345*cos(pi*x1)^2 - 347*cos(pi*x2)^2 + 177)");
    e1.exact = trig_exact_field();
    all.push_back(e1);

    Example e2;
    e2.id = 2;
    e2.title = "source, right triangle, polynomial solution";
    e2.kind = ProblemKind::Source;
    e2.domain = Domain::RightTriangle;
    e2.lame = {0.25, 0.25};
    e2.beta = tilt;
    e2.f1 = Coefficient::parse(
        "49*x1^4/2 + 289*x1^3*x2/2 + 202*x1^3 + 123*x1^2*x2^2/2 + 1080*x1^2*x2 - 345*x1^2/2"
        " - 149*x1*x2^3/2 + 1308*x1*x2^2 - 1425*x1*x2/2 - 44*x2^4 + 450*x2^3 - 402*x2^2 + 108*x2");
    e2.f2 = Coefficient::parse(
        "44*x1^4 + 149*x1^3*x2/2 + 358*x1^3 - 123*x1^2*x2^2/2 + 1284*x1^2*x2 - 366*x1^2"
        " - 289*x1*x2^3/2 + 1296*x1*x2^2 - 1551*x1*x2/2 + 108*x1 - 49*x2^4/2 + 230*x2^3 - 327*x2^2/2");
    e2.exact = polynomial_exact_field();
    all.push_back(e2);

    Example e3;
    e3.id = 3;
    e3.title = "bi-elastic eigenvalues, unit square, constant coefficient";
    e3.kind = ProblemKind::BiElasticEig;
    e3.lame = {0.25, 1.0 / 16.0};
    e3.table = {{25.35774, 23.39262, 23.18043, 23.16308, 23.16188},
                {53.59356, 50.42141, 50.004164, 49.968005, 49.965453},
                {61.04122, 51.06578, 50.058280, 49.972201, 49.965760},
                {109.18534, 105.40772, 103.491568, 103.206973, 103.186660},
                {120.81714, 106.74271, 105.122452, 105.092762, 105.090460},
                {130.19532, 106.74793, 105.253200, 105.104451, 105.091409}};
    all.push_back(e3);

    Example e4 = e3;
    e4.id = 4;
    e4.title = "bi-elastic eigenvalues, unit square, affine coefficient";
    e4.beta = tilt;
    e4.table = {{202.60084, 186.85880, 185.15778, 185.01868, 185.00907},
                {428.15681, 402.73873, 399.39743, 399.10787, 399.08743},
                {487.85256, 407.93399, 399.86251, 399.17279, 399.12120},
                {871.47709, 841.01287, 824.91149, 822.72993, 822.57169},
                {965.09121, 847.47324, 838.68117, 838.43824, 838.41936},
                {1041.68270, 858.25905, 842.82598, 841.53746, 841.42863}};
    all.push_back(e4);

    Example e5;
    e5.id = 5;
    e5.title = "bi-elastic eigenvalues, equilateral triangle, radial coefficient";
    e5.kind = ProblemKind::BiElasticEig;
    e5.domain = Domain::EquilateralTriangle;
    e5.lame = {0.25, 0.25};
    e5.beta = Coefficient::radial_quadratic(4.0);
    e5.table = {{9158.98871, 9080.38967, 9074.44378, 9074.03982, 9074.01382},
                {9397.12583, 9317.45937, 9311.35816, 9310.94206, 9310.91526},
                {12853.77410, 12686.55168, 12669.66102, 12668.40917, 12668.32704},
                {32158.86909, 31378.08662, 31295.61981, 31289.24927, 31288.82506},
                {32498.29559, 31743.16901, 31664.35473, 31658.28934, 31657.88586},
                {40925.18544, 39991.62636, 39921.29040, 39916.42396, 39916.10683}};
    all.push_back(e5);

    auto tep = [](int id, std::string title, Domain d, Lame lame, Coefficient r0, Coefficient r1,
                  std::vector<std::complex<double>> finest) {
        Example e;
        e.id = id;
        e.title = std::move(title);
        e.kind = ProblemKind::Tep;
        e.domain = d;
        e.lame = lame;
        e.rho0 = std::move(r0);
        e.rho1 = std::move(r1);
        e.k = 10;
        e.finest = std::move(finest);
        return e;
    };
    using C = std::complex<double>;
    all.push_back(tep(6, "transmission eigenvalues, unit square, constant densities", Domain::UnitSquare, {0.25, 0.25},
                      1.0 / 20.0, 3.0,
                      {8.064689, 9.561642, 9.561852, 14.001823, 14.002024, 14.256426, 15.125605, 20.589411, 20.590683,
                       20.762326}));
    all.push_back(tep(7, "transmission eigenvalues, unit square, affine density", Domain::UnitSquare,
                      {0.25, 1.0 / 12.0}, 0.5, Coefficient::affine(4.0, 1.0, -1.0),
                      {2.172958, 3.122101, 3.125644, 4.052862, 4.574646, 5.469985, 5.558520, 6.065146, 6.918999,
                       7.124076}));
    all.push_back(tep(8, "transmission eigenvalues, equilateral triangle, radial density",
                      Domain::EquilateralTriangle, {0.25, 1.0 / 16.0}, 1.0 / 8.0, Coefficient::radial_quadratic(4.0),
                      {3.992401, 5.491747, 5.586717, 7.522283, 7.619984, 8.202532, 9.379437, 9.436227, 10.469256,
                       11.046607}));
    all.push_back(tep(9, "transmission eigenvalues, L-shaped domain, constant densities", Domain::LShape,
                      {0.25, 1.0 / 16.0}, 1.0, 4.0,
                      {C(3.612558, 3.041481), C(3.612558, -3.041481), 4.870908, 5.284471, 6.293109, 6.654243,
                       7.394237, C(5.835047, 4.720085), C(5.835047, -4.720085), 8.020355}));
    return all;
}

const char* kind_name(ProblemKind k)
{
    switch (k) {
    case ProblemKind::Source: return "source";
    case ProblemKind::BiElasticEig: return "bielastic";
    case ProblemKind::Tep: return "tep";
    }
    return "unknown";
}

ProblemKind parse_kind(const std::string& s)
{
    if (s == "source") return ProblemKind::Source;
    if (s == "bielastic") return ProblemKind::BiElasticEig;
    if (s == "tep") return ProblemKind::Tep;
    throw std::invalid_argument("unknown problem kind '" + s + "'");
}

double log2_ratio(double num, double den)
{
    if (!(den > 0.0)) return std::numeric_limits<double>::infinity();
    if (!(num > 0.0)) return std::numeric_limits<double>::quiet_NaN();
    return std::log2(num / den);
}

std::vector<double> eig_order_abs(const std::vector<std::complex<double>>& v)
{
    const int n = static_cast<int>(v.size());
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (int l = 0; l + 2 < n; ++l) out[l + 2] = log2_ratio(std::abs(v[l] - v[l + 1]), std::abs(v[l + 1] - v[l + 2]));
    return out;
}

std::string fmt_num(double v)
{
    if (std::isnan(v)) return "";
    if (std::isinf(v)) return "exact";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

double parse_num(const std::string& s)
{
    if (s.empty()) return std::numeric_limits<double>::quiet_NaN();
    if (s == "exact") return std::numeric_limits<double>::infinity();
    size_t pos = 0;
    const double v = std::stod(s, &pos);
    if (pos != s.size()) throw std::invalid_argument("bad number '" + s + "' in report");
    return v;
}

nlohmann::json num_json(double v)
{
    if (std::isnan(v)) return nullptr;
    if (std::isinf(v)) return "exact";
    return v;
}

double json_num(const nlohmann::json& j)
{
    if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
    if (j.is_string()) return parse_num(j.get<std::string>());
    return j.get<double>();
}

const char* kEigenHeader = "level,h,dofs,branch,value_re,value_im,order,residual,seconds";
const char* kSourceHeader = "level,h,dofs,l2,h1,h2,order_l2,order_h1,order_h2,residual,seconds";

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cur;
    std::istringstream is(line);
    while (std::getline(is, cur, ',')) out.push_back(cur);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

}  // namespace

ExactField trig_exact_field()
{
    return field_of(RidgeProduct{{sin_power(2, 0), sin_power(3, 1)}}, RidgeProduct{{sin_power(3, 0), sin_power(2, 1)}});
}

ExactField polynomial_exact_field()
{
    const Eigen::Vector2d e1 = Eigen::Vector2d::UnitX(), e2 = Eigen::Vector2d::UnitY(), ones(1.0, 1.0);
    return field_of(RidgeProduct{{monomial(2, e1), monomial(3, e2), monomial(2, ones, -1.0)}},
                     RidgeProduct{{monomial(3, e1), monomial(2, e2), monomial(2, ones, -1.0)}});
}

const std::vector<Example>& examples()
{
    static const std::vector<Example> all = build_examples();
    return all;
}

const Example& example(int id)
{
    for (const Example& e : examples())
        if (e.id == id) return e;
    throw std::invalid_argument("no example " + std::to_string(id) + " (expected 1..9)");
}

int level_cap(bool big) { return big ? 5 : 4; }

std::vector<int> default_levels(const Example& ex)
{
    if (ex.kind == ProblemKind::Source) return {1, 2, 3, 4};
    return {1, 2, 3};
}

ProblemSpec example_spec(const Example& ex, int level, const RunOptions& options)
{
    if (ex.kind != ProblemKind::Tep && options.method)
        throw std::invalid_argument("method applies to transmission examples only");
    if (ex.kind != ProblemKind::Tep && options.tau_range)
        throw std::invalid_argument("tau range applies to transmission examples only");
    if (ex.kind == ProblemKind::Source && options.k) throw std::invalid_argument("k does not apply to source examples");
    ProblemSpec s;
    s.kind = ex.kind;
    s.domain = ex.domain;
    s.level = level;
    s.max_level = level_cap(options.big);
    s.element = options.element.value_or(ElementType::B3);
    s.lame = ex.lame;
    s.beta = ex.beta;
    s.f1 = ex.f1;
    s.f2 = ex.f2;
    s.exact = ex.exact;
    s.rho0 = ex.rho0;
    s.rho1 = ex.rho1;
    s.method = options.method.value_or(TepMethod::Secant);
    s.k = options.k.value_or(ex.k);
    s.alpha = options.alpha;
    s.split = options.split;
    s.validate();
    return s;
}

std::vector<double> source_order(const std::vector<double>& errors)
{
    const int n = static_cast<int>(errors.size());
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    for (int k = 1; k < n; ++k) out[k] = log2_ratio(errors[k - 1], errors[k]);
    return out;
}

std::vector<double> eig_order(const std::vector<double>& values)
{
    std::vector<std::complex<double>> v(values.begin(), values.end());
    return eig_order_abs(v);
}

std::vector<double> eig_order_reference(const std::vector<double>& values)
{
    const int n = static_cast<int>(values.size());
    std::vector<double> out(n, std::numeric_limits<double>::quiet_NaN());
    if (n < 3) return out;
    const double ref = values[n - 1];
    for (int l = 0; l + 2 < n; ++l)
        out[l + 1] = log2_ratio(std::abs(values[l] - ref), std::abs(values[l + 1] - ref));
    return out;
}

std::vector<std::complex<double>> ExperimentReport::branch_values(int branch) const
{
    std::vector<std::complex<double>> v;
    for (const EigenRow& r : eigen)
        if (r.branch == branch) v.push_back(r.value);
    return v;
}

void compute_orders(ExperimentReport& report)
{
    if (report.kind == ProblemKind::Source) {
        std::vector<double> l2, h1, h2;
        for (const auto& r : report.source) {
            l2.push_back(r.l2);
            h1.push_back(r.h1);
            h2.push_back(r.h2);
        }
        const auto o1 = source_order(l2), o2 = source_order(h1), o3 = source_order(h2);
        for (size_t i = 0; i < report.source.size(); ++i) {
            report.source[i].order_l2 = o1[i];
            report.source[i].order_h1 = o2[i];
            report.source[i].order_h2 = o3[i];
        }
        return;
    }
    int nb = 0;
    for (const auto& r : report.eigen) nb = std::max(nb, r.branch);
    for (int b = 1; b <= nb; ++b) {
        const auto ord = eig_order_abs(report.branch_values(b));
        size_t i = 0;
        for (auto& r : report.eigen)
            if (r.branch == b) r.order = ord[i++];
    }
}

ExperimentReport run_spec(const ProblemSpec& base, const std::vector<int>& levels,
                          const std::optional<std::pair<double, double>>& tau_range)
{
    if (levels.empty()) throw std::invalid_argument("no levels requested");
    ExperimentReport rep;
    rep.kind = base.kind;
    rep.metadata["domain"] = std::string(domain_name(base.domain));
    rep.metadata["element"] = std::string(element_name(base.element));
    rep.metadata["lambda"] = fmt_num(base.lame.lambda);
    rep.metadata["mu"] = fmt_num(base.lame.mu);
    rep.metadata["version"] = std::string(version());
    rep.metadata["quadrature"] = "stiffness 6, mass 8, load and errors 10";
    if (base.kind == ProblemKind::Tep) {
        rep.metadata["method"] = std::string(method_name(base.method));
        rep.metadata["rho0"] = base.rho0.text();
        rep.metadata["rho1"] = base.rho1.text();
        rep.metadata["tolerance"] = base.method == TepMethod::Secant ? "root 1e-10(1+tau)" : "arnoldi 1e-12";
    } else {
        rep.metadata["beta"] = base.beta.text();
        rep.metadata["tolerance"] = base.kind == ProblemKind::Source ? "cholesky refinement 1e-12" : "lanczos 1e-10";
    }
    if (base.element == ElementType::Morley && base.split == MorleySplit::Consistent)
        rep.metadata["split"] = "consistent";

    for (int level : levels) {
        ProblemSpec spec = base;
        spec.level = level;
        const auto t0 = std::chrono::steady_clock::now();
        auto space = make_space(spec);
        const TriMesh& mesh = space->mesh();
        auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(); };
        if (spec.element == ElementType::Morley && spec.kind != ProblemKind::Tep)
            rep.metadata["alpha"] = fmt_num(spec.alpha.value_or(0.5 * alpha_bound(mesh, spec.beta)));

        if (spec.kind == ProblemKind::Source) {
            const SourceResult res = solve_source(spec, *space);
            SourceRow row;
            row.level = level;
            row.h = mesh.h();
            row.dofs = res.dofs;
            if (res.errors) {
                row.l2 = res.errors->l2;
                row.h1 = res.errors->h1;
                row.h2 = res.errors->h2;
            }
            row.residual = res.residual;
            row.seconds = elapsed();
            rep.source.push_back(row);
        } else if (spec.kind == ProblemKind::BiElasticEig) {
            const EigResult res = solve_bielastic_eigs(spec, *space);
            const double sec = elapsed();
            for (int j = 0; j < res.size(); ++j)
                rep.eigen.push_back({level, mesh.h(), space->dim(), j + 1, res.values[j], 0.0, res.residuals[j], sec});
        } else {
            TepOperator op(spec, space);
            if (op.alpha()) rep.metadata["alpha"] = fmt_num(*op.alpha());
            rep.metadata["density_case"] = op.density_case() == DensityCase::Standard ? "standard" : "swapped";
            if (spec.method == TepMethod::Quadratic) {
                const EigResult res = find_teps_quadratic(op, spec.k, spec.quadratic_form);
                const double sec = elapsed();
                for (int j = 0; j < res.size(); ++j)
                    rep.eigen.push_back(
                        {level, mesh.h(), space->dim(), j + 1, res.values[j], 0.0, res.residuals[j], sec});
            } else {
                TauScan scan;
                scan.branches = std::max(scan.branches, spec.k + 2);
                if (tau_range) {
                    scan.lo = tau_range->first;
                    scan.hi = tau_range->second;
                }
                const SecantReport sr = find_teps_secant(op, scan);
                const double sec = elapsed();
                const int n = std::min<int>(spec.k, static_cast<int>(sr.roots.size()));
                for (int j = 0; j < n; ++j)
                    rep.eigen.push_back(
                        {level, mesh.h(), space->dim(), j + 1, sr.roots[j].tau, 0.0, sr.roots[j].certificate, sec});
            }
        }
    }
    compute_orders(rep);
    return rep;
}

ExperimentReport run_example(int id, const RunOptions& options)
{
    const Example& ex = example(id);
    std::vector<int> levels = options.levels.empty() ? default_levels(ex) : options.levels;
    for (int l : levels)
        if (l < 0 || l > level_cap(options.big)) {
            std::ostringstream os;
            os << "level " << l << " exceeds the cap " << level_cap(options.big)
               << (options.big ? "" : " (use --big for level 5)");
            throw std::invalid_argument(os.str());
        }
    const ProblemSpec spec = example_spec(ex, levels.front(), options);
    ExperimentReport rep = run_spec(spec, levels, options.tau_range);
    rep.metadata["example"] = std::to_string(id);
    rep.metadata["title"] = ex.title;
    return rep;
}

void write_csv(const ExperimentReport& report, std::ostream& out)
{
    out << "# kind=" << kind_name(report.kind) << '\n';
    for (const auto& [k, v] : report.metadata) out << "# " << k << '=' << v << '\n';
    if (report.kind == ProblemKind::Source) {
        out << kSourceHeader << '\n';
        for (const auto& r : report.source)
            out << r.level << ',' << fmt_num(r.h) << ',' << r.dofs << ',' << fmt_num(r.l2) << ',' << fmt_num(r.h1)
                << ',' << fmt_num(r.h2) << ',' << fmt_num(r.order_l2) << ',' << fmt_num(r.order_h1) << ','
                << fmt_num(r.order_h2) << ',' << fmt_num(r.residual) << ',' << fmt_num(r.seconds) << '\n';
        return;
    }
    out << kEigenHeader << '\n';
    for (const auto& r : report.eigen)
        out << r.level << ',' << fmt_num(r.h) << ',' << r.dofs << ',' << r.branch << ',' << fmt_num(r.value.real())
            << ',' << fmt_num(r.value.imag()) << ',' << fmt_num(r.order) << ',' << fmt_num(r.residual) << ','
            << fmt_num(r.seconds) << '\n';
}

ExperimentReport read_csv(std::istream& in)
{
    ExperimentReport rep;
    std::string line;
    bool header = false;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        if (line.rfind("# ", 0) == 0) {
            const auto eq = line.find('=');
            if (eq == std::string::npos) continue;
            const std::string key = line.substr(2, eq - 2), val = line.substr(eq + 1);
            if (key == "kind")
                rep.kind = parse_kind(val);
            else
                rep.metadata[key] = val;
            continue;
        }
        if (!header) {
            const std::string want = rep.kind == ProblemKind::Source ? kSourceHeader : kEigenHeader;
            if (line != want) throw std::invalid_argument("unexpected CSV header: " + line);
            header = true;
            continue;
        }
        const auto f = split_csv(line);
        if (rep.kind == ProblemKind::Source) {
            if (f.size() != 11) throw std::invalid_argument("bad source row: " + line);
            SourceRow r;
            r.level = std::stoi(f[0]);
            r.h = parse_num(f[1]);
            r.dofs = std::stoi(f[2]);
            r.l2 = parse_num(f[3]);
            r.h1 = parse_num(f[4]);
            r.h2 = parse_num(f[5]);
            r.order_l2 = parse_num(f[6]);
            r.order_h1 = parse_num(f[7]);
            r.order_h2 = parse_num(f[8]);
            r.residual = parse_num(f[9]);
            r.seconds = parse_num(f[10]);
            rep.source.push_back(r);
        } else {
            if (f.size() != 9) throw std::invalid_argument("bad eigen row: " + line);
            EigenRow r;
            r.level = std::stoi(f[0]);
            r.h = parse_num(f[1]);
            r.dofs = std::stoi(f[2]);
            r.branch = std::stoi(f[3]);
            r.value = {parse_num(f[4]), parse_num(f[5])};
            r.order = parse_num(f[6]);
            r.residual = parse_num(f[7]);
            r.seconds = parse_num(f[8]);
            rep.eigen.push_back(r);
        }
    }
    if (!header) throw std::invalid_argument("CSV report has no header");
    return rep;
}

void write_json(const ExperimentReport& report, std::ostream& out)
{
    nlohmann::json j;
    j["kind"] = kind_name(report.kind);
    j["metadata"] = report.metadata;
    auto& rows = j["rows"] = nlohmann::json::array();
    if (report.kind == ProblemKind::Source) {
        for (const auto& r : report.source)
            rows.push_back({{"level", r.level}, {"h", r.h}, {"dofs", r.dofs}, {"l2", num_json(r.l2)},
                            {"h1", num_json(r.h1)}, {"h2", num_json(r.h2)}, {"order_l2", num_json(r.order_l2)},
                            {"order_h1", num_json(r.order_h1)}, {"order_h2", num_json(r.order_h2)},
                            {"residual", num_json(r.residual)}, {"seconds", r.seconds}});
    } else {
        for (const auto& r : report.eigen)
            rows.push_back({{"level", r.level}, {"h", r.h}, {"dofs", r.dofs}, {"branch", r.branch},
                            {"value_re", r.value.real()}, {"value_im", r.value.imag()},
                            {"order", num_json(r.order)}, {"residual", num_json(r.residual)},
                            {"seconds", r.seconds}});
    }
    out << std::setprecision(17) << j.dump(2) << '\n';
}

ExperimentReport read_json(std::istream& in)
{
    const nlohmann::json j = nlohmann::json::parse(in);
    ExperimentReport rep;
    rep.kind = parse_kind(j.at("kind").get<std::string>());
    rep.metadata = j.at("metadata").get<std::map<std::string, std::string>>();
    for (const auto& r : j.at("rows")) {
        if (rep.kind == ProblemKind::Source) {
            SourceRow s;
            s.level = r.at("level");
            s.h = r.at("h");
            s.dofs = r.at("dofs");
            s.l2 = json_num(r.at("l2"));
            s.h1 = json_num(r.at("h1"));
            s.h2 = json_num(r.at("h2"));
            s.order_l2 = json_num(r.at("order_l2"));
            s.order_h1 = json_num(r.at("order_h1"));
            s.order_h2 = json_num(r.at("order_h2"));
            s.residual = json_num(r.at("residual"));
            s.seconds = r.at("seconds");
            rep.source.push_back(s);
        } else {
            EigenRow e;
            e.level = r.at("level");
            e.h = r.at("h");
            e.dofs = r.at("dofs");
            e.branch = r.at("branch");
            e.value = {r.at("value_re").get<double>(), r.at("value_im").get<double>()};
            e.order = json_num(r.at("order"));
            e.residual = json_num(r.at("residual"));
            e.seconds = r.at("seconds");
            rep.eigen.push_back(e);
        }
    }
    return rep;
}

std::vector<std::string> write_plot_data(const ExperimentReport& report, const std::string& stem)
{
    std::vector<std::string> files;
    auto open = [&](const std::string& column) {
        files.push_back(stem + "." + column + ".dat");
        std::ofstream f(files.back());
        if (!f) throw std::runtime_error("cannot write " + files.back());
        f << std::setprecision(12);
        return f;
    };
    if (report.kind == ProblemKind::Source) {
        const std::pair<const char*, double SourceRow::*> cols[] = {
            {"l2", &SourceRow::l2}, {"h1", &SourceRow::h1}, {"h2", &SourceRow::h2}};
        for (const auto& [name, member] : cols) {
            auto f = open(name);
            f << "# h " << name << '\n';
            for (const auto& r : report.source) f << r.h << ' ' << r.*member << '\n';
        }
        return files;
    }
    int nb = 0;
    for (const auto& r : report.eigen) nb = std::max(nb, r.branch);
    for (int b = 1; b <= nb; ++b) {
        auto f = open("branch" + std::to_string(b));
        f << "# h value_re value_im\n";
        for (const auto& r : report.eigen)
            if (r.branch == b) f << r.h << ' ' << r.value.real() << ' ' << r.value.imag() << '\n';
    }
    return files;
}

}  // namespace elastep
