#pragma once

#include "petrovkit/franke.hpp"
#include "petrovkit/solver.hpp"

#include <optional>
#include <string>
#include <vector>

namespace petrovkit {

// Knobs shared by the benchmark runners. Zero/empty entries fall back to the
// per-degree defaults that mirror the reference study: c0 = 0.6, delta0 = 2m
// and ball subdomains for m <= 3; c0 = 0.8, delta0 = 2m and squares for
// m >= 4.
struct BenchParams {
    double c0 = 0.0;
    double delta0 = 0.0;
    double sigma0 = 0.0;
    std::optional<SubdomainShape> shape;
    QuadratureSettings quadrature;
    int workers = 0;
    bool oversample = false;
    bool probe_error = false;    // measure on a 4x finer probe grid
    bool parallel_cases = false; // run grid levels concurrently; blanks timings
};

double default_c0(int degree);
double default_delta0(int degree);
SubdomainShape default_shape(int degree);

// A manufactured Poisson problem: the exact solution plus matching data.
struct TestCase {
    std::function<double(const Vec&)> exact;
    ProblemFields fields;
};

TestCase franke_case();

struct CaseResult {
    std::string method;
    int degree = 0;
    double h = 0.0;
    int n_nodes = 0;
    double max_error = 0.0;
    bool has_ratio = false;
    double ratio = 0.0; // log2(e(2h) / e(h)) against the previous grid level
    double assembly_seconds = 0.0;
    double solve_seconds = 0.0;
    double c0 = 0.0, delta0 = 0.0, sigma0 = 0.0;
    std::string shape; // "ball", "square", or "none" for collocation
};

struct ConvergenceReport {
    std::vector<CaseResult> cases;

    // Least-squares slope of log2(error) against log2(h).
    double observed_order() const;
    double final_ratio() const;
};

struct CompareReport {
    ConvergenceReport reference; // classical mlpg5
    ConvergenceReport direct;    // dmlpg5
    std::vector<double> speedup; // reference assembly time / direct assembly time
};

// Fully resolved problem for one grid level: unset tuning parameters are
// replaced with the degree-dependent defaults.
DiscreteProblem make_problem(Method method, int degree, double h, const Rectangle& domain,
                             const BenchParams& params, const TestCase& test);

// Solve one grid level and measure the max nodal error against the exact
// solution (or the error on a 4x finer probe grid when requested).
CaseResult run_case(Method method, int degree, double h, const Rectangle& domain,
                    const BenchParams& params, const TestCase& test);

// A sequence of strictly halving grid spacings; fills the ratio column.
ConvergenceReport convergence_study(Method method, int degree, const std::vector<double>& h_list,
                                    const Rectangle& domain, const BenchParams& params,
                                    const TestCase& test);

// Paired study of the classical reference against the direct method on the
// same grids and quadrature, with the assembly-time ratio per level.
CompareReport compare_methods(int degree, const std::vector<double>& h_list,
                              const Rectangle& domain, const BenchParams& params,
                              const TestCase& test);

// Recovery order of d/dx at interior grid nodes for the Franke surface.
ConvergenceReport derivative_study(int degree, const std::vector<double>& h_list,
                                   const Rectangle& domain, const BenchParams& params);

// CSV with the exact header
//   method,m,h,N,max_error,ratio,assembly_s,solve_s,c0,delta0,sigma0,shape
// plus a companion "<stem>.plot" file of (log10 h, log10 error) pairs.
void write_csv(const ConvergenceReport& report, const std::string& path);
void write_compare_csv(const CompareReport& report, const std::string& path);
void write_plot_data(const ConvergenceReport& report, const std::string& path);
std::string plot_path_for(const std::string& csv_path);

// One-line human-readable summary of a finished case.
std::string case_log_line(const CaseResult& result);

void validate_halving(const std::vector<double>& h_list);

} // namespace petrovkit
