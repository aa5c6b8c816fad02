#include "elastep/harness.hpp"

#include <pybind11/complex.h>
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

namespace py = pybind11;
using namespace elastep;

namespace {

ElementType element_of(const std::string& s) { return parse_element(s); }

ProblemSpec base_spec(ProblemKind kind, const std::string& domain, int level, double lambda, double mu,
                      const std::string& element, std::optional<double> alpha, int k)
{
    ProblemSpec s;
    s.kind = kind;
    s.domain = parse_domain(domain);
    s.level = level;
    s.lame = {lambda, mu};
    s.element = element_of(element);
    s.alpha = alpha;
    s.k = k;
    return s;
}

py::dict mesh_dict(const std::string& domain, int level)
{
    const TriMesh m = generate_domain(parse_domain(domain), level);
    Eigen::MatrixX2d v(m.num_vertices(), 2);
    for (int i = 0; i < m.num_vertices(); ++i) v.row(i) = m.vertex(i).transpose();
    Eigen::MatrixX3i t(m.num_triangles(), 3);
    for (int i = 0; i < m.num_triangles(); ++i)
        for (int c = 0; c < 3; ++c) t(i, c) = m.triangle(i)[c];
    py::dict d;
    d["vertices"] = v;
    d["triangles"] = t;
    d["h"] = m.h();
    d["num_edges"] = m.num_edges();
    d["interior_vertices"] = m.num_interior_vertices();
    d["interior_edges"] = m.num_interior_edges();
    return d;
}

std::string run_example_json(int id, std::optional<std::vector<int>> levels, std::optional<std::string> element,
                             std::optional<double> alpha, std::optional<std::string> method, std::optional<int> k,
                             std::optional<std::pair<double, double>> tau_range, bool big)
{
    RunOptions o;
    if (levels) o.levels = *levels;
    if (element) o.element = element_of(*element);
    o.alpha = alpha;
    if (method) o.method = parse_method(*method);
    o.k = k;
    o.tau_range = tau_range;
    o.big = big;
    ExperimentReport r;
    {
        py::gil_scoped_release release;
        r = run_example(id, o);
    }
    std::ostringstream os;
    write_json(r, os);
    return os.str();
}

}  // namespace

PYBIND11_MODULE(_elastep, m)
{
    m.doc() = "Nonconforming finite elements for bi-elastic and elastic transmission eigenvalue problems";

    py::register_exception<SolverError>(m, "SolverError", PyExc_RuntimeError);

    m.def("version", [] { return std::string(version()); });
    m.def("mesh", &mesh_dict, py::arg("domain"), py::arg("level"));
    m.def(
        "space_dim",
        [](const std::string& domain, int level, const std::string& element) {
            auto mesh = std::make_shared<const TriMesh>(generate_domain(parse_domain(domain), level));
            return DiscreteSpace::make(mesh, element_of(element)).dim();
        },
        py::arg("domain"), py::arg("level"), py::arg("element") = "b3");

    m.def(
        "bielastic_eigenvalues",
        [](const std::string& domain, int level, double lambda, double mu, const std::string& beta, int k,
           const std::string& element, std::optional<double> alpha) {
            ProblemSpec s = base_spec(ProblemKind::BiElasticEig, domain, level, lambda, mu, element, alpha, k);
            s.beta = Coefficient::parse(beta);
            s.validate();
            py::gil_scoped_release release;
            return Eigen::VectorXd(solve_bielastic_eigs(s).real_values());
        },
        py::arg("domain"), py::arg("level"), py::arg("lam"), py::arg("mu"), py::arg("beta") = "1", py::arg("k") = 6,
        py::arg("element") = "b3", py::arg("alpha") = py::none());

    m.def(
        "transmission_eigenvalues",
        [](const std::string& domain, int level, double lambda, double mu, const std::string& rho0,
           const std::string& rho1, int k, const std::string& method) {
            ProblemSpec s = base_spec(ProblemKind::Tep, domain, level, lambda, mu, "b3", std::nullopt, k);
            s.rho0 = Coefficient::parse(rho0);
            s.rho1 = Coefficient::parse(rho1);
            s.method = parse_method(method);
            s.validate();
            py::gil_scoped_release release;
            const TepOperator op(s, make_space(s));
            if (s.method == TepMethod::Quadratic) return Eigen::VectorXcd(find_teps_quadratic(op, k).values);
            TauScan scan;
            scan.branches = std::max(scan.branches, k + 2);
            const SecantReport r = find_teps_secant(op, scan);
            const int n = std::min<int>(k, static_cast<int>(r.roots.size()));
            Eigen::VectorXcd v(n);
            for (int j = 0; j < n; ++j) v[j] = r.roots[j].tau;
            return v;
        },
        py::arg("domain"), py::arg("level"), py::arg("lam"), py::arg("mu"), py::arg("rho0"), py::arg("rho1"),
        py::arg("k") = 6, py::arg("method") = "secant");

    m.def("run_example_json", &run_example_json, py::arg("id"), py::arg("levels") = py::none(),
          py::arg("element") = py::none(), py::arg("alpha") = py::none(), py::arg("method") = py::none(),
          py::arg("k") = py::none(), py::arg("tau_range") = py::none(), py::arg("big") = false);

    m.def("eig_order", &eig_order, py::arg("values"));
    m.def("source_order", &source_order, py::arg("errors"));
}
