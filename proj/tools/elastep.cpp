#include "elastep/harness.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>

using namespace elastep;

namespace {

constexpr int kOk = 0;
constexpr int kInvalid = 2;
constexpr int kSolverFailure = 3;
constexpr int kSelfTestFailure = 4;

struct Args {
    std::string domain = "square";
    int level = -1;
    std::string levels;
    std::string element = "b3";
    std::optional<double> alpha;
    std::string method;
    std::optional<int> k;
    std::string tau_range;
    std::string out;
    std::string format = "csv";
    std::string plot;
    bool big = false;
    double lambda = 0.25, mu = 1.0 / 16.0;
    std::string beta = "1", f1 = "0", f2 = "0";
    std::string rho0 = "0.5", rho1 = "2", density_case = "auto";
    int example = 0;
};

std::vector<int> parse_levels(const std::string& text)
{
    std::vector<int> out;
    const auto colon = text.find(':');
    if (colon != std::string::npos) {
        const int a = std::stoi(text.substr(0, colon)), b = std::stoi(text.substr(colon + 1));
        if (b < a) throw std::invalid_argument("empty level range " + text);
        for (int l = a; l <= b; ++l) out.push_back(l);
        return out;
    }
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(std::stoi(item));
    if (out.empty()) throw std::invalid_argument("no levels in '" + text + "'");
    return out;
}

std::vector<int> levels_of(const Args& a, std::vector<int> fallback)
{
    if (!a.levels.empty()) return parse_levels(a.levels);
    if (a.level >= 0) return {a.level};
    return fallback;
}

std::optional<std::pair<double, double>> tau_range_of(const Args& a)
{
    if (a.tau_range.empty()) return std::nullopt;
    const auto colon = a.tau_range.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("tau range must be lo:hi");
    const double lo = std::stod(a.tau_range.substr(0, colon)), hi = std::stod(a.tau_range.substr(colon + 1));
    if (!(hi > lo) || !(lo >= 0.0)) throw std::invalid_argument("tau range must satisfy 0 <= lo < hi");
    return std::make_pair(lo, hi);
}

void check_levels(const std::vector<int>& levels, bool big)
{
    for (int l : levels)
        if (l < 0 || l > level_cap(big))
            throw std::invalid_argument("level " + std::to_string(l) + " exceeds the cap " +
                                        std::to_string(level_cap(big)) + (big ? "" : " (use --big for level 5)"));
}

void emit(const ExperimentReport& rep, const Args& a)
{
    if (a.format != "csv" && a.format != "json") throw std::invalid_argument("format must be csv or json");
    auto write = [&](std::ostream& os) {
        if (a.format == "json")
            write_json(rep, os);
        else
            write_csv(rep, os);
    };
    if (a.out.empty()) {
        write(std::cout);
    } else {
        std::ofstream f(a.out);
        if (!f) throw std::runtime_error("cannot write " + a.out);
        write(f);
    }
    if (!a.plot.empty())
        for (const auto& file : write_plot_data(rep, a.plot)) std::cerr << "wrote " << file << '\n';
}

ProblemSpec base_spec(const Args& a, ProblemKind kind)
{
    ProblemSpec s;
    s.kind = kind;
    s.domain = parse_domain(a.domain);
    s.element = parse_element(a.element);
    s.lame = {a.lambda, a.mu};
    s.max_level = level_cap(a.big);
    s.alpha = a.alpha;
    if (a.k) s.k = *a.k;
    s.beta = Coefficient::parse(a.beta);
    s.f1 = Coefficient::parse(a.f1);
    s.f2 = Coefficient::parse(a.f2);
    s.rho0 = Coefficient::parse(a.rho0);
    s.rho1 = Coefficient::parse(a.rho1);
    if (!a.method.empty()) s.method = parse_method(a.method);
    if (a.density_case == "standard")
        s.density_case = DensityCase::Standard;
    else if (a.density_case == "swapped")
        s.density_case = DensityCase::Swapped;
    else if (a.density_case != "auto")
        throw std::invalid_argument("density case must be auto, standard or swapped");
    return s;
}

// Spot checks of the built-in example data and a few solver invariants.
int self_test()
{
    int failures = 0;
    auto report = [&](bool ok, const std::string& what) {
        std::cout << (ok ? "PASS " : "FAIL ") << what << '\n';
        if (!ok) ++failures;
    };
    const double pi = std::numbers::pi;
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    auto close = [](double a, double b) { return std::abs(a - b) <= 1e-12 * (1.0 + std::abs(b)); };

    bool ok = true;
    for (int n = 0; n < 5; ++n) {
        const double x = u(rng), y = u(rng) * (1.0 - x);
        const double c1 = std::cos(pi * x), c2 = std::cos(pi * y);
        const double f1 = 3 * std::pow(pi, 4) * std::sin(pi * y) / 256 *
                          (663 * c1 * c1 * c2 * c2 - 770 * c1 * c2 + 910 * c1 * c1 * c1 * c2 - 347 * c1 * c1 -
                           345 * c2 * c2 + 177);
        const double f2 = 3 * std::pow(pi, 4) * std::sin(pi * x) / 256 *
                          (663 * c1 * c1 * c2 * c2 - 770 * c1 * c2 + 910 * c1 * c2 * c2 * c2 - 345 * c1 * c1 -
                           347 * c2 * c2 + 177);
        ok = ok && close(example(1).f1(x, y), f1) && close(example(1).f2(x, y), f2);
        const double g1 = 49 * std::pow(x, 4) / 2 + 289 * std::pow(x, 3) * y / 2 + 202 * std::pow(x, 3) +
                          123 * x * x * y * y / 2 + 1080 * x * x * y - 345 * x * x / 2 - 149 * x * std::pow(y, 3) / 2 +
                          1308 * x * y * y - 1425 * x * y / 2 - 44 * std::pow(y, 4) + 450 * std::pow(y, 3) -
                          402 * y * y + 108 * y;
        const double g2 = 44 * std::pow(x, 4) + 149 * std::pow(x, 3) * y / 2 + 358 * std::pow(x, 3) -
                          123 * x * x * y * y / 2 + 1284 * x * x * y - 366 * x * x - 289 * x * std::pow(y, 3) / 2 +
                          1296 * x * y * y - 1551 * x * y / 2 + 108 * x - 49 * std::pow(y, 4) / 2 +
                          230 * std::pow(y, 3) - 327 * y * y / 2;
        ok = ok && close(example(2).f1(x, y), g1) && close(example(2).f2(x, y), g2);
        ok = ok && close(example(2).beta(x, y), 8 + x - y) && close(example(4).beta(x, y), 8 + x - y);
        ok = ok && close(example(5).beta(x, y), 4 + x * x + y * y);
        ok = ok && close(example(7).rho1(x, y), 4 + x - y) && close(example(8).rho1(x, y), 4 + x * x + y * y);
        ok = ok && close(example(6).rho0(x, y), 1.0 / 20) && close(example(6).rho1(x, y), 3.0);
        ok = ok && close(example(9).rho0(x, y), 1.0) && close(example(9).rho1(x, y), 4.0);
    }
    report(ok, "example coefficients match the printed formulas at 5 random points");

    try {
        RunOptions o;
        o.levels = {1};
        const auto rep = run_example(3, o);
        bool good = rep.eigen.size() == 6;
        for (const auto& r : rep.eigen)
            good = good && std::abs(r.value.real() / example(3).table[r.branch - 1][0] - 1.0) <= 5e-4;
        report(good, "example 3 level 1 eigenvalues match the reference column");

        ProblemSpec s = example_spec(example(6), 1, {});
        TepOperator op(s, make_space(s));
        TauScan scan;
        scan.hi = 12.0;
        scan.points = 30;
        const auto sec = find_teps_secant(op, scan);
        const auto quad = find_teps_quadratic(op, 2);
        const bool agree = !sec.roots.empty() &&
                           std::abs(sec.roots[0].tau - quad.values[0].real()) <= 1e-8 * sec.roots[0].tau &&
                           quad.values[0].imag() == 0.0;
        report(agree, "example 6 level 1 secant and quadratic roots agree");

        std::stringstream ss;
        write_csv(rep, ss);
        const std::string first = ss.str();
        std::stringstream back(first);
        std::stringstream again;
        write_csv(read_csv(back), again);
        report(again.str() == first, "CSV report round-trips");
    } catch (const std::exception& e) {
        report(false, std::string("solver checks raised: ") + e.what());
    }
    return failures == 0 ? kOk : kSelfTestFailure;
}

// Turn a JSON config into command-line tokens placed before the user's own, so the user's win.
std::vector<std::string> config_tokens(const std::string& path)
{
    std::ifstream f(path);
    if (!f) throw std::invalid_argument("cannot read config " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(f);
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument("config " + path + ": " + e.what());
    }
    if (!j.is_object()) throw std::invalid_argument("config must be a JSON object");
    std::vector<std::string> out;
    for (const auto& [key, value] : j.items()) {
        std::string flag = "--" + key;
        for (char& c : flag)
            if (c == '_') c = '-';
        if (value.is_boolean()) {
            if (value.get<bool>()) out.push_back(flag);
        } else if (value.is_array()) {
            std::string joined;
            for (const auto& v : value) joined += (joined.empty() ? "" : ",") + (v.is_string() ? v.get<std::string>() : v.dump());
            out.push_back(flag);
            out.push_back(joined);
        } else {
            out.push_back(flag);
            out.push_back(value.is_string() ? value.get<std::string>() : value.dump());
        }
    }
    return out;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Nonconforming finite elements for bi-elastic and elastic transmission eigenvalue problems", "elastep"};
    app.option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(version()));
    Args a;
    std::string config;

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", config, "JSON file with the same keys as the flags");
        sub->add_option("--out", a.out, "output file (default stdout)");
        sub->add_option("--format", a.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
        sub->add_option("--plot", a.plot, "also write plot data files with this stem");
        sub->add_flag("--big", a.big, "allow level 5");
    };
    auto mesh_opts = [&](CLI::App* sub) {
        sub->add_option("--domain", a.domain, "square, right-triangle, equilateral or lshape");
        sub->add_option("--level", a.level, "single mesh level");
        sub->add_option("--levels", a.levels, "levels as a:b or a,b,c");
    };
    auto element_opts = [&](CLI::App* sub) {
        sub->add_option("--element", a.element, "b3 or morley");
        sub->add_option("--alpha", a.alpha, "Morley stabilization parameter");
        sub->add_option("--lambda", a.lambda, "Lame lambda");
        sub->add_option("--mu", a.mu, "Lame mu");
    };

    auto* src = app.add_subcommand("solve-source", "bi-elastic source problem");
    mesh_opts(src);
    element_opts(src);
    src->add_option("--beta", a.beta, "coefficient expression in x1, x2");
    src->add_option("--f1", a.f1, "load, first component");
    src->add_option("--f2", a.f2, "load, second component");
    common(src);

    auto* bie = app.add_subcommand("solve-bielastic", "bi-elastic eigenvalue problem");
    mesh_opts(bie);
    element_opts(bie);
    bie->add_option("--beta", a.beta, "coefficient expression in x1, x2");
    bie->add_option("--k", a.k, "number of eigenvalues");
    common(bie);

    auto* tep = app.add_subcommand("solve-tep", "elastic transmission eigenvalue problem");
    mesh_opts(tep);
    element_opts(tep);
    tep->add_option("--rho0", a.rho0, "inner density expression");
    tep->add_option("--rho1", a.rho1, "outer density expression");
    tep->add_option("--case", a.density_case, "auto, standard or swapped");
    tep->add_option("--method", a.method, "secant or quadratic");
    tep->add_option("--k", a.k, "number of eigenvalues");
    tep->add_option("--tau-range", a.tau_range, "secant scan interval lo:hi");
    common(tep);

    auto* run = app.add_subcommand("run-example", "run a built-in example over mesh levels");
    run->add_option("example", a.example, "example number 1-9")->required();
    run->add_option("--level", a.level, "single mesh level");
    run->add_option("--levels", a.levels, "levels as a:b or a,b,c");
    run->add_option("--element", a.element, "b3 or morley");
    run->add_option("--alpha", a.alpha, "Morley stabilization parameter");
    run->add_option("--method", a.method, "secant or quadratic");
    run->add_option("--k", a.k, "number of eigenvalues");
    run->add_option("--tau-range", a.tau_range, "secant scan interval lo:hi");
    common(run);

    auto* dump = app.add_subcommand("dump-mesh", "write a generated mesh");
    mesh_opts(dump);
    dump->add_option("--out", a.out, "output file (default stdout)");
    dump->add_flag("--big", a.big, "allow level 5");

    auto* self = app.add_subcommand("self-test", "quick consistency checks");

    // splice config tokens in front of the user's own flags
    std::vector<std::string> args(argv + 1, argv + argc);
    for (size_t i = 0; i + 1 < args.size(); ++i) {
        if (args[i] != "--config") continue;
        try {
            const auto extra = config_tokens(args[i + 1]);
            args.insert(args.begin() + 1, extra.begin(), extra.end());
        } catch (const std::exception& e) {
            std::cerr << "error: " << e.what() << '\n';
            return kInvalid;
        }
        break;
    }
    std::reverse(args.begin(), args.end());

    try {
        app.parse(args);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kInvalid;
    }

    try {
        if (*self) return self_test();
        if (*dump) {
            const auto levels = levels_of(a, {1});
            check_levels(levels, a.big);
            const TriMesh mesh = generate_domain(parse_domain(a.domain), levels.front(), level_cap(a.big));
            if (a.out.empty()) {
                write_mesh(std::cout, mesh);
            } else {
                std::ofstream f(a.out);
                if (!f) throw std::runtime_error("cannot write " + a.out);
                write_mesh(f, mesh);
            }
            return kOk;
        }
        if (*run) {
            RunOptions o;
            if (!a.levels.empty() || a.level >= 0) o.levels = levels_of(a, {});
            if (run->count("--element")) o.element = parse_element(a.element);
            o.alpha = a.alpha;
            if (!a.method.empty()) o.method = parse_method(a.method);
            o.k = a.k;
            o.tau_range = tau_range_of(a);
            o.big = a.big;
            emit(run_example(a.example, o), a);
            return kOk;
        }
        const ProblemKind kind = *src ? ProblemKind::Source : *bie ? ProblemKind::BiElasticEig : ProblemKind::Tep;
        const auto levels = levels_of(a, {1});
        check_levels(levels, a.big);
        if (kind != ProblemKind::Tep && !a.tau_range.empty())
            throw std::invalid_argument("tau range applies to solve-tep only");
        const ProblemSpec spec = base_spec(a, kind);
        emit(run_spec(spec, levels, tau_range_of(a)), a);
        return kOk;
    } catch (const std::invalid_argument& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const std::out_of_range& e) {
        std::cerr << "invalid input: " << e.what() << '\n';
        return kInvalid;
    } catch (const SolverError& e) {
        std::cerr << "solver failure: " << e.what() << '\n';
        return kSolverFailure;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return kSolverFailure;
    }
}
