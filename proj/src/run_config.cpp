#include "petrovkit/run_config.hpp"
#include "petrovkit/errors.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <ostream>
#include <sstream>

namespace petrovkit {

namespace {

std::string trim(const std::string& s) {
    size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const double v = std::stod(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': cannot parse number '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value) {
    try {
        size_t pos = 0;
        const int v = std::stoi(value, &pos);
        if (pos != value.size()) throw std::invalid_argument(value);
        return v;
    } catch (const std::exception&) {
        throw config_error("config key '" + key + "': cannot parse integer '" + value + "'");
    }
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "on" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "off" || value == "no") return false;
    throw config_error("config key '" + key + "': cannot parse boolean '" + value + "'");
}

SubdomainShape parse_shape(const std::string& text) {
    if (text == "ball" || text == "circle") return SubdomainShape::Ball;
    if (text == "square") return SubdomainShape::Square;
    throw config_error("unknown subdomain shape '" + text + "' (expected ball or square)");
}

} // namespace

BenchParams RunConfig::bench_params() const {
    if (c0 < 0.0) throw config_error("c0 must be positive (0 = default), got " + std::to_string(c0));
    if (delta0 < 0.0)
        throw config_error("delta0 must be positive (0 = default), got " + std::to_string(delta0));
    if (sigma0 < 0.0)
        throw config_error("sigma0 must be positive (0 = default), got " + std::to_string(sigma0));
    if (m < 1) throw config_error("degree m must be at least 1, got " + std::to_string(m));
    if (boundary_points < 0 || interior_points < 0 || rhs_points < 0) {
        throw config_error("quadrature point counts must be positive (0 = default)");
    }
    if (workers < 0) throw config_error("workers must be positive (0 = hardware), got " +
                                        std::to_string(workers));
    BenchParams params;
    params.c0 = c0;
    params.delta0 = delta0;
    params.sigma0 = sigma0;
    if (!shape.empty()) params.shape = parse_shape(shape);
    params.quadrature.boundary_points = boundary_points;
    params.quadrature.interior_points = interior_points;
    params.quadrature.rhs_points = rhs_points;
    params.workers = workers;
    params.oversample = oversample;
    params.probe_error = probe_error;
    params.parallel_cases = parallel_cases;
    return params;
}

std::vector<double> parse_h_list(const std::string& text) {
    std::vector<double> out;
    std::istringstream in(text);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const double h = parse_double("h", item);
        if (h <= 0.0) throw config_error("grid spacing h must be positive, got " + item);
        out.push_back(h);
    }
    if (out.empty()) throw config_error("empty grid spacing list '" + text + "'");
    return out;
}

void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value) {
    if (key == "command") {
        config.command = value;
    } else if (key == "method") {
        config.method = value;
    } else if (key == "m") {
        config.m = parse_int(key, value);
    } else if (key == "h") {
        config.h_list = parse_h_list(value);
    } else if (key == "c0") {
        config.c0 = parse_double(key, value);
    } else if (key == "delta0") {
        config.delta0 = parse_double(key, value);
    } else if (key == "sigma0") {
        config.sigma0 = parse_double(key, value);
    } else if (key == "shape") {
        parse_shape(value); // validate now, store as text
        config.shape = value;
    } else if (key == "boundary_points") {
        config.boundary_points = parse_int(key, value);
    } else if (key == "interior_points") {
        config.interior_points = parse_int(key, value);
    } else if (key == "rhs_points") {
        config.rhs_points = parse_int(key, value);
    } else if (key == "output") {
        config.output = value;
    } else if (key == "export_matrix") {
        config.export_matrix = value;
    } else if (key == "export_rhs") {
        config.export_rhs = value;
    } else if (key == "save_nodes") {
        config.save_nodes_path = value;
    } else if (key == "workers") {
        config.workers = parse_int(key, value);
    } else if (key == "seed") {
        config.seed = static_cast<unsigned>(parse_int(key, value));
    } else if (key == "oversample") {
        config.oversample = parse_bool(key, value);
    } else if (key == "probe_error") {
        config.probe_error = parse_bool(key, value);
    } else if (key == "parallel_cases") {
        config.parallel_cases = parse_bool(key, value);
    } else {
        throw config_error("unknown config key '" + key + "'");
    }
}

std::vector<std::string> load_config_file(const std::string& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file " + path);
    std::vector<std::string> keys;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const size_t hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const size_t eq = line.find('=');
        if (eq == std::string::npos) {
            std::ostringstream msg;
            msg << path << ":" << line_no << ": expected 'key = value', got '" << line << "'";
            throw config_error(msg.str());
        }
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        apply_config_entry(config, key, value);
        keys.push_back(key);
    }
    return keys;
}

void run_command(const RunConfig& config, std::ostream& log) {
    const Rectangle domain = unit_square();
    const BenchParams params = config.bench_params();
    const TestCase test = franke_case();

    if (config.command == "solve") {
        if (config.h_list.size() != 1) {
            throw config_error("solve expects exactly one grid spacing, got " +
                               std::to_string(config.h_list.size()));
        }
        const Method method = parse_method(config.method);
        const double h = config.h_list.front();
        const CaseResult result = run_case(method, config.m, h, domain, params, test);
        log << case_log_line(result) << '\n';

        if (!config.export_matrix.empty() || !config.export_rhs.empty() ||
            !config.save_nodes_path.empty()) {
            const DiscreteProblem p = make_problem(method, config.m, h, domain, params, test);
            if (!config.export_matrix.empty() || !config.export_rhs.empty()) {
                if (config.export_matrix.empty() || config.export_rhs.empty()) {
                    throw config_error("matrix and rhs export paths must be given together");
                }
                export_system(assemble(p), config.export_matrix, config.export_rhs);
                log << "system written to " << config.export_matrix << " / "
                    << config.export_rhs << '\n';
            }
            if (!config.save_nodes_path.empty()) {
                save_nodes(p.nodes, config.save_nodes_path);
                log << "nodes written to " << config.save_nodes_path << '\n';
            }
        }
        if (!config.output.empty()) {
            ConvergenceReport report;
            report.cases.push_back(result);
            write_csv(report, config.output);
            log << "report written to " << config.output << '\n';
        }
        return;
    }

    if (config.command == "converge") {
        const Method method = parse_method(config.method);
        const ConvergenceReport report =
            convergence_study(method, config.m, config.h_list, domain, params, test);
        for (const CaseResult& c : report.cases) log << case_log_line(c) << '\n';
        log << "observed order (least squares): " << report.observed_order() << '\n';
        if (!config.output.empty()) {
            write_csv(report, config.output);
            log << "report written to " << config.output << '\n';
        }
        return;
    }

    if (config.command == "compare") {
        const CompareReport report =
            compare_methods(config.m, config.h_list, domain, params, test);
        for (size_t i = 0; i < report.speedup.size(); ++i) {
            log << case_log_line(report.reference.cases[i]) << '\n';
            log << case_log_line(report.direct.cases[i]) << '\n';
            log << "assembly speedup at h=" << report.reference.cases[i].h << ": "
                << report.speedup[i] << "x\n";
        }
        if (!config.output.empty()) {
            write_compare_csv(report, config.output);
            log << "report written to " << config.output << '\n';
        }
        return;
    }

    if (config.command == "gmls-derivative-test") {
        const ConvergenceReport report =
            derivative_study(config.m, config.h_list, domain, params);
        for (const CaseResult& c : report.cases) log << case_log_line(c) << '\n';
        log << "observed order (least squares): " << report.observed_order() << '\n';
        if (!config.output.empty()) {
            write_csv(report, config.output);
            log << "report written to " << config.output << '\n';
        }
        return;
    }

    throw config_error("unknown command '" + config.command +
                       "' (expected solve, converge, compare or gmls-derivative-test)");
}

} // namespace petrovkit
