#include "petrovkit/bench.hpp"
#include "petrovkit/errors.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace petrovkit {

double default_c0(int degree) { return degree <= 3 ? 0.6 : 0.8; }
double default_delta0(int degree) { return 2.0 * degree; }
SubdomainShape default_shape(int degree) {
    return degree <= 3 ? SubdomainShape::Ball : SubdomainShape::Square;
}

TestCase franke_case() {
    return TestCase{[](const Vec& x) { return franke(x); }, franke_fields()};
}

double ConvergenceReport::observed_order() const {
    // Least-squares slope of log2(e) vs log2(h); at least two levels needed.
    if (cases.size() < 2) return 0.0;
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const CaseResult& c : cases) {
        const double x = std::log2(c.h), y = std::log2(c.max_error);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(cases.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

double ConvergenceReport::final_ratio() const {
    if (cases.empty() || !cases.back().has_ratio) return 0.0;
    return cases.back().ratio;
}

DiscreteProblem make_problem(Method method, int degree, double h, const Rectangle& domain,
                             const BenchParams& params, const TestCase& test) {
    DiscreteProblem p{domain,
                      generate_grid(domain, h),
                      method,
                      degree,
                      params.c0 > 0.0 ? params.c0 : default_c0(degree),
                      params.delta0 > 0.0 ? params.delta0 : default_delta0(degree),
                      params.sigma0,
                      params.shape.value_or(default_shape(degree)),
                      params.quadrature,
                      test.fields,
                      params.oversample,
                      params.workers};
    return p;
}

namespace {

double measure_error(const DiscreteProblem& p, const TestCase& test, const Solution& sol,
                     bool probe_error) {
    double err = 0.0;
    if (!probe_error) {
        for (int i = 0; i < p.nodes.size(); ++i) {
            err = std::max(err, std::abs(sol.values[i] - test.exact(p.nodes.point(i))));
        }
        return err;
    }
    const NodeSet probe = generate_grid(p.domain, p.nodes.spacing_hint() / 4.0);
    const WeightFunction weight =
        WeightFunction::scaled(p.c0, p.delta0, p.nodes.spacing_hint());
    for (int i = 0; i < probe.size(); ++i) {
        const Vec x = probe.point(i);
        const double uh = evaluate_solution(p.nodes, sol.values, x, p.degree, weight);
        err = std::max(err, std::abs(uh - test.exact(x)));
    }
    return err;
}

void fill_ratios(ConvergenceReport& report) {
    for (size_t i = 1; i < report.cases.size(); ++i) {
        const double prev = report.cases[i - 1].max_error;
        const double cur = report.cases[i].max_error;
        if (prev > 0.0 && cur > 0.0) {
            report.cases[i].has_ratio = true;
            report.cases[i].ratio = std::log2(prev / cur);
        }
    }
}

std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

void write_row(std::ofstream& out, const CaseResult& c, bool blank_timing,
               const char* extra = nullptr) {
    out << c.method << ',' << c.degree << ',' << format_double("%.10g", c.h) << ','
        << c.n_nodes << ',' << format_double("%.6e", c.max_error) << ','
        << (c.has_ratio ? format_double("%.4f", c.ratio) : std::string()) << ','
        << (blank_timing ? std::string() : format_double("%.6f", c.assembly_seconds)) << ','
        << (blank_timing ? std::string() : format_double("%.6f", c.solve_seconds)) << ','
        << format_double("%.10g", c.c0) << ',' << format_double("%.10g", c.delta0) << ','
        << format_double("%.10g", c.sigma0) << ',' << c.shape;
    if (extra) out << ',' << extra;
    out << '\n';
}

constexpr const char* kCsvHeader =
    "method,m,h,N,max_error,ratio,assembly_s,solve_s,c0,delta0,sigma0,shape";

} // namespace

void validate_halving(const std::vector<double>& h_list) {
    if (h_list.empty()) throw config_error("empty grid spacing list");
    for (double h : h_list) {
        if (!(h > 0.0)) throw config_error("grid spacings must be positive");
    }
    for (size_t i = 1; i < h_list.size(); ++i) {
        if (std::abs(h_list[i] - 0.5 * h_list[i - 1]) > 1e-9 * h_list[i - 1]) {
            std::ostringstream msg;
            msg << "grid spacing list must halve strictly: " << h_list[i]
                << " does not follow " << h_list[i - 1];
            throw config_error(msg.str());
        }
    }
}

CaseResult run_case(Method method, int degree, double h, const Rectangle& domain,
                    const BenchParams& params, const TestCase& test) {
    const DiscreteProblem p = make_problem(method, degree, h, domain, params, test);
    const Solution sol = solve_problem(p);

    CaseResult result;
    result.method = method_name(method);
    result.degree = degree;
    result.h = h;
    result.n_nodes = p.nodes.size();
    result.max_error = measure_error(p, test, sol, params.probe_error);
    result.assembly_seconds = sol.assembly_seconds;
    result.solve_seconds = sol.solve_seconds;
    result.c0 = p.c0;
    result.delta0 = p.delta0;
    const bool uses_subdomain = method != Method::DMLPG2;
    result.sigma0 = uses_subdomain ? p.effective_sigma0() : 0.0;
    result.shape = uses_subdomain
                       ? (p.shape == SubdomainShape::Ball ? "ball" : "square")
                       : "none";
    return result;
}

ConvergenceReport convergence_study(Method method, int degree, const std::vector<double>& h_list,
                                    const Rectangle& domain, const BenchParams& params,
                                    const TestCase& test) {
    validate_halving(h_list);
    ConvergenceReport report;
    report.cases.resize(h_list.size());
    if (params.parallel_cases) {
        // Concurrent levels poison wall-clock timing, so timings are dropped.
        std::vector<std::future<CaseResult>> futures;
        for (double h : h_list) {
            futures.push_back(std::async(std::launch::async, [&, h] {
                return run_case(method, degree, h, domain, params, test);
            }));
        }
        for (size_t i = 0; i < futures.size(); ++i) {
            report.cases[i] = futures[i].get();
            report.cases[i].assembly_seconds = 0.0;
            report.cases[i].solve_seconds = 0.0;
        }
    } else {
        for (size_t i = 0; i < h_list.size(); ++i) {
            report.cases[i] = run_case(method, degree, h_list[i], domain, params, test);
        }
    }
    fill_ratios(report);
    return report;
}

CompareReport compare_methods(int degree, const std::vector<double>& h_list,
                              const Rectangle& domain, const BenchParams& params,
                              const TestCase& test) {
    validate_halving(h_list);
    CompareReport report;
    for (double h : h_list) {
        report.reference.cases.push_back(run_case(Method::MLPG5, degree, h, domain, params, test));
        report.direct.cases.push_back(run_case(Method::DMLPG5, degree, h, domain, params, test));
        const double ref = report.reference.cases.back().assembly_seconds;
        const double dir = report.direct.cases.back().assembly_seconds;
        report.speedup.push_back(dir > 0.0 ? ref / dir : 0.0);
    }
    fill_ratios(report.reference);
    fill_ratios(report.direct);
    return report;
}

ConvergenceReport derivative_study(int degree, const std::vector<double>& h_list,
                                   const Rectangle& domain, const BenchParams& params) {
    validate_halving(h_list);
    ConvergenceReport report;
    for (double h : h_list) {
        const NodeSet nodes = generate_grid(domain, h);
        const WeightFunction weight = WeightFunction::scaled(
            params.c0 > 0.0 ? params.c0 : default_c0(degree),
            params.delta0 > 0.0 ? params.delta0 : default_delta0(degree), h);
        Eigen::VectorXd data(nodes.size());
        for (int i = 0; i < nodes.size(); ++i) data[i] = franke(nodes.point(i));

        const auto t0 = std::chrono::steady_clock::now();
        double err = 0.0;
        MultiIndex dx(static_cast<size_t>(nodes.dim()), 0);
        dx[0] = 1;
        for (int i = 0; i < nodes.size(); ++i) {
            if (!nodes.is_interior(i)) continue;
            const Vec y = nodes.point(i);
            const MonomialBasis basis(degree, nodes.dim(), y, h);
            const CoefficientRow row = gmls_derivative_row(nodes, y, dx, basis, weight);
            err = std::max(err, std::abs(row.apply(data) - franke_dx(y)));
        }
        const auto t1 = std::chrono::steady_clock::now();

        CaseResult result;
        result.method = "gmls-ddx";
        result.degree = degree;
        result.h = h;
        result.n_nodes = nodes.size();
        result.max_error = err;
        result.assembly_seconds = std::chrono::duration<double>(t1 - t0).count();
        result.c0 = params.c0 > 0.0 ? params.c0 : default_c0(degree);
        result.delta0 = params.delta0 > 0.0 ? params.delta0 : default_delta0(degree);
        result.shape = "none";
        report.cases.push_back(result);
    }
    fill_ratios(report);
    return report;
}

void write_csv(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("write_csv: cannot open " + path);
    out << kCsvHeader << '\n';
    const bool blank_timing =
        std::all_of(report.cases.begin(), report.cases.end(), [](const CaseResult& c) {
            return c.assembly_seconds == 0.0 && c.solve_seconds == 0.0;
        });
    for (const CaseResult& c : report.cases) write_row(out, c, blank_timing);
    if (!out) throw config_error("write_csv: write failed for " + path);
    write_plot_data(report, plot_path_for(path));
}

void write_compare_csv(const CompareReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("write_compare_csv: cannot open " + path);
    out << kCsvHeader << ",speedup\n";
    for (size_t i = 0; i < report.speedup.size(); ++i) {
        const std::string speedup = format_double("%.3f", report.speedup[i]);
        write_row(out, report.reference.cases[i], false, speedup.c_str());
        write_row(out, report.direct.cases[i], false, speedup.c_str());
    }
    if (!out) throw config_error("write_compare_csv: write failed for " + path);
}

void write_plot_data(const ConvergenceReport& report, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw config_error("write_plot_data: cannot open " + path);
    for (const CaseResult& c : report.cases) {
        out << c.method << ' ' << format_double("%.12g", std::log10(c.h)) << ' '
            << format_double("%.12g", std::log10(c.max_error)) << '\n';
    }
    if (!out) throw config_error("write_plot_data: write failed for " + path);
}

std::string plot_path_for(const std::string& csv_path) {
    const size_t dot = csv_path.find_last_of('.');
    const size_t slash = csv_path.find_last_of("/\\");
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return csv_path + ".plot";
    }
    return csv_path.substr(0, dot) + ".plot";
}

std::string case_log_line(const CaseResult& result) {
    std::ostringstream out;
    out << "method=" << result.method << " m=" << result.degree << " h="
        << format_double("%.10g", result.h) << " N=" << result.n_nodes
        << " max_error=" << format_double("%.6e", result.max_error);
    if (result.has_ratio) out << " ratio=" << format_double("%.4f", result.ratio);
    out << " assembly=" << format_double("%.6f", result.assembly_seconds)
        << "s solve=" << format_double("%.6f", result.solve_seconds) << "s total="
        << format_double("%.6f", result.assembly_seconds + result.solve_seconds) << "s";
    return out.str();
}

} // namespace petrovkit
