#pragma once

#include "petrovkit/bench.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace petrovkit {

// Everything a command-line run needs, fillable from a flat "key = value"
// config file and from flags (flags win). Zeros/empty strings mean "use the
// per-degree defaults".
struct RunConfig {
    std::string command;           // solve | converge | compare | gmls-derivative-test
    std::string method = "dmlpg5";
    int m = 2;
    std::vector<double> h_list;    // a single entry for `solve`
    double c0 = 0.0;
    double delta0 = 0.0;
    double sigma0 = 0.0;
    std::string shape;             // "", "ball", "square"
    int boundary_points = 0;
    int interior_points = 0;
    int rhs_points = 0;
    std::string output;            // CSV path; empty = no file output
    std::string export_matrix;     // solve only: triplet dump of the system
    std::string export_rhs;
    std::string save_nodes_path;   // solve only: node table dump
    int workers = 0;
    unsigned seed = 12345;         // used by randomized diagnostics
    bool oversample = false;
    bool probe_error = false;
    bool parallel_cases = false;

    BenchParams bench_params() const;
};

std::vector<double> parse_h_list(const std::string& text);

// Flat config file: one `key = value` per line, '#' starts a comment.
// Unknown keys are an error. Returns the keys that were set.
std::vector<std::string> load_config_file(const std::string& path, RunConfig& config);
void apply_config_entry(RunConfig& config, const std::string& key, const std::string& value);

// Execute a fully populated RunConfig, writing progress to `log`. Throws the
// library error types on invalid configurations.
void run_command(const RunConfig& config, std::ostream& log);

} // namespace petrovkit
