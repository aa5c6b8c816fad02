#pragma once

#include "elastep/solvers.hpp"

#include <complex>
#include <iosfwd>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace elastep {

/// Built-in numerical example. Eigen examples carry their published reference values.
struct Example {
    int id = 0;
    std::string title;
    ProblemKind kind = ProblemKind::Source;
    Domain domain = Domain::UnitSquare;
    Lame lame;
    Coefficient beta = 1.0;
    Coefficient f1 = 0.0, f2 = 0.0;
    std::optional<ExactField> exact;
    Coefficient rho0 = 0.0, rho1 = 0.0;
    int k = 6;
    // bi-elastic: table[branch][level - 1] for levels 1..5
    std::vector<std::vector<double>> table;
    // transmission: finest-mesh values in table order
    std::vector<std::complex<double>> finest;
};

const std::vector<Example>& examples();
const Example& example(int id);

/// Closed-form exact solution of the first source example.
ExactField trig_exact_field();
/// Closed-form exact solution of the second source example.
ExactField polynomial_exact_field();

struct RunOptions {
    std::vector<int> levels;  // empty selects the defaults
    std::optional<ElementType> element;
    std::optional<double> alpha;
    std::optional<TepMethod> method;
    std::optional<int> k;
    std::optional<std::pair<double, double>> tau_range;
    MorleySplit split = MorleySplit::Literal;
    bool big = false;
};

/// Levels 1-4 for source examples and 1-3 for eigen examples; the cap is 5 with big, 4 otherwise.
std::vector<int> default_levels(const Example& ex);
int level_cap(bool big);

/// ProblemSpec of an example at one level with overrides applied; throws std::invalid_argument on conflicts.
ProblemSpec example_spec(const Example& ex, int level, const RunOptions& options);

// Orders. NaN marks an undefined entry, +infinity an exactly reproduced value.

/// log2(e[k-1] / e[k]) for each consecutive pair; entry 0 is NaN.
std::vector<double> source_order(const std::vector<double>& errors);
/// log2(|v[l] - v[l+1]| / |v[l+1] - v[l+2]|), reported at l + 2; the last entry is the table's order.
std::vector<double> eig_order(const std::vector<double>& values);
/// log2(|v[l] - v[n-1]| / |v[l+1] - v[n-1]|), reported at l + 1 for l + 1 < n - 1.
std::vector<double> eig_order_reference(const std::vector<double>& values);

struct EigenRow {
    int level = 0;
    double h = 0.0;
    int dofs = 0;
    int branch = 0;  // 1-based
    std::complex<double> value;
    double order = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    double seconds = 0.0;
};

struct SourceRow {
    int level = 0;
    double h = 0.0;
    int dofs = 0;
    double l2 = 0.0, h1 = 0.0, h2 = 0.0;
    double order_l2 = std::numeric_limits<double>::quiet_NaN();
    double order_h1 = std::numeric_limits<double>::quiet_NaN();
    double order_h2 = std::numeric_limits<double>::quiet_NaN();
    double residual = 0.0;
    double seconds = 0.0;
};

struct ExperimentReport {
    ProblemKind kind = ProblemKind::BiElasticEig;
    std::vector<EigenRow> eigen;
    std::vector<SourceRow> source;
    std::map<std::string, std::string> metadata;

    /// Values of one branch ordered by level.
    std::vector<std::complex<double>> branch_values(int branch) const;
};

/// Fill the order columns from the value columns (successive differences for eigen rows).
void compute_orders(ExperimentReport& report);

ExperimentReport run_example(int id, const RunOptions& options = {});
/// Run an arbitrary spec over a list of levels (the spec's level is replaced).
ExperimentReport run_spec(const ProblemSpec& spec, const std::vector<int>& levels,
                          const std::optional<std::pair<double, double>>& tau_range = std::nullopt);

void write_csv(const ExperimentReport& report, std::ostream& out);
ExperimentReport read_csv(std::istream& in);
void write_json(const ExperimentReport& report, std::ostream& out);
ExperimentReport read_json(std::istream& in);
/// One "h value" column file per norm (source) or per branch (eigen), named stem.<column>.dat.
std::vector<std::string> write_plot_data(const ExperimentReport& report, const std::string& stem);

std::string_view version();

}  // namespace elastep
