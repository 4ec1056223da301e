#include "petrovkit/errors.hpp"
#include "petrovkit/run_config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

namespace {

void add_common_options(CLI::App* cmd, petrovkit::RunConfig& config, std::string& h_text,
                        std::string& config_path) {
    cmd->set_help_flag("--help", "print this help message and exit");
    // The config file is pre-scanned before parsing; this option only makes
    // `--config` legal in subcommand position too.
    cmd->add_option("--config", config_path, "flat key = value settings file");
    cmd->add_option("--method", config.method, "dmlpg1 | dmlpg2 | dmlpg5 | mlpg5");
    cmd->add_option("-m,--degree", config.m, "polynomial degree of the local basis");
    cmd->add_option("--h", h_text, "grid spacing, comma separated for studies");
    cmd->add_option("--c0", config.c0, "Gaussian width factor (c = c0*h)");
    cmd->add_option("--delta0", config.delta0, "stencil radius factor (delta = delta0*h)");
    cmd->add_option("--sigma0", config.sigma0, "subdomain size factor (sigma = sigma0*h)");
    cmd->add_option("--shape", config.shape, "subdomain shape: ball | square");
    cmd->add_option("--boundary-points", config.boundary_points,
                    "quadrature points per subdomain boundary piece");
    cmd->add_option("--interior-points", config.interior_points,
                    "quadrature points per axis inside subdomains");
    cmd->add_option("--rhs-points", config.rhs_points, "quadrature points for load integrals");
    cmd->add_option("-o,--output", config.output, "CSV report path");
    cmd->add_option("--workers", config.workers, "assembly threads (0 = hardware)");
    cmd->add_option("--seed", config.seed, "seed for randomized diagnostics");
    cmd->add_flag("--oversample", config.oversample,
                  "add midpoint test sites and solve least squares");
    cmd->add_flag("--probe-error", config.probe_error,
                  "measure the error on a 4x finer probe grid");
    cmd->add_flag("--parallel-cases", config.parallel_cases,
                  "run grid levels concurrently (timings suppressed)");
}

// Find `--config <path>` / `--config=<path>` ahead of the real parse so the
// file can seed the defaults and typed flags override it.
std::string find_config_path(int argc, char** argv) {
    for (int i = 1; i < argc; ++i) {
        const std::string arg = argv[i];
        if (arg == "--config" && i + 1 < argc) return argv[i + 1];
        if (arg.rfind("--config=", 0) == 0) return arg.substr(9);
    }
    return {};
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Meshless Poisson solvers built on generalized moving least squares"};
    app.set_help_flag("--help", "print this help message and exit");
    app.require_subcommand(0, 1);

    petrovkit::RunConfig config;
    std::string h_text;
    std::string config_path;
    app.add_option("--config", config_path, "flat key = value settings file");

    try {
        const std::string pre_path = find_config_path(argc, argv);
        if (!pre_path.empty()) petrovkit::load_config_file(pre_path, config);
    } catch (const petrovkit::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    }

    CLI::App* solve = app.add_subcommand("solve", "solve one Poisson problem on a grid");
    solve->add_option("--export-matrix", config.export_matrix, "write system triplets here");
    solve->add_option("--export-rhs", config.export_rhs, "write right-hand side here");
    solve->add_option("--save-nodes", config.save_nodes_path, "write the node table here");
    add_common_options(solve, config, h_text, config_path);

    CLI::App* converge = app.add_subcommand("converge", "error study over halving spacings");
    add_common_options(converge, config, h_text, config_path);

    CLI::App* compare =
        app.add_subcommand("compare", "classical vs direct assembly cost on the same grids");
    add_common_options(compare, config, h_text, config_path);

    CLI::App* deriv = app.add_subcommand("gmls-derivative-test",
                                         "recovery order of d/dx on the Franke surface");
    add_common_options(deriv, config, h_text, config_path);

    CLI11_PARSE(app, argc, argv);

    try {
        for (CLI::App* cmd : {solve, converge, compare, deriv}) {
            if (cmd->parsed()) config.command = cmd->get_name();
        }
        if (config.command.empty()) {
            throw petrovkit::config_error(
                "no command given (use a subcommand or set command= in the config file)");
        }
        if (!h_text.empty()) config.h_list = petrovkit::parse_h_list(h_text);
        if (config.h_list.empty()) {
            throw petrovkit::config_error("no grid spacing given (use --h)");
        }

        petrovkit::run_command(config, std::cout);
        return 0;
    } catch (const petrovkit::config_error& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return 2;
    } catch (const petrovkit::unisolvency_error& e) {
        std::cerr << "unisolvency error: " << e.what() << '\n';
        return 3;
    } catch (const petrovkit::solver_error& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
