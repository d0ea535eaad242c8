#include <cstdlib>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "bidshade/config.hpp"
#include "bidshade/io.hpp"
#include "bidshade/plotdata.hpp"
#include "bidshade/sim.hpp"

namespace {

namespace fs = std::filesystem;
using namespace bidshade;

// --out beats the config; otherwise BIDSHADE_OUT_ROOT (if set) roots
// relative config out_dirs.
fs::path resolve_out_dir(const RunConfig& config, const std::string& cli_out) {
    if (!cli_out.empty()) return cli_out;
    fs::path dir = config.out_dir;
    if (dir.is_relative()) {
        if (const char* root = std::getenv("BIDSHADE_OUT_ROOT"); root && *root)
            dir = fs::path(root) / dir;
    }
    return dir;
}

int cmd_run(const std::string& config_path, const std::string& cli_out, bool dry_run) {
    const RunConfig config = load_config(config_path);
    const fs::path out_dir = resolve_out_dir(config, cli_out);

    if (dry_run) {
        std::cout << describe_config(config);
        std::cout << "  output_dir = " << out_dir.string() << "\n";
        std::cout << "dry run: nothing written\n";
        return 0;
    }

    const RunResult result = run_campaign(config);
    const ParameterGrid grid = build_grid(config.theta1_range, config.theta2_range,
                                          config.grid_n1, config.grid_n2, config.epsilon);
    write_run_outputs(result, grid, config, out_dir);

    std::cout << "run complete: " << result.summary.steps << " steps, spend "
              << fmt_double(result.summary.total_spend) << ", surplus "
              << fmt_double(result.summary.total_surplus) << ", win rate "
              << fmt_double(result.summary.win_rate) << ", final entropy "
              << fmt_double(result.summary.final_entropy) << " -> " << out_dir.string()
              << "\n";
    return 0;
}

int cmd_validate(const std::string& config_path) {
    const RunConfig config = load_config(config_path);
    std::cout << describe_config(config);
    std::cout << "config OK\n";
    return 0;
}

int cmd_plotdata(const std::string& run_dir, const std::string& figure,
                 const std::string& out_file) {
    const std::string csv = plot_figure(run_dir, figure);
    if (out_file.empty()) {
        std::cout << csv;
    } else {
        atomic_write_file(out_file, csv);
        std::cout << figure << " -> " << out_file << "\n";
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"bidshade: bid-shading distribution optimizer and campaign simulator"};
    app.require_subcommand(1);

    std::string config_path;
    std::string cli_out;
    bool dry_run = false;
    auto* run = app.add_subcommand("run", "execute a campaign from a config file");
    run->add_option("config", config_path, "path to key = value config file")->required();
    run->add_option("--out", cli_out, "output directory (overrides config)");
    run->add_flag("--dry-run", dry_run, "validate and print resolved parameters only");

    std::string validate_path;
    auto* validate = app.add_subcommand("validate", "validate a config file");
    validate->add_option("config", validate_path, "path to config file")->required();

    std::string run_dir;
    std::string figure;
    std::string plot_out;
    auto* plotdata = app.add_subcommand("plotdata", "derive figure CSVs from a run directory");
    plotdata->add_option("run_dir", run_dir, "completed run directory")->required();
    plotdata->add_option("--figure", figure,
                         "bids | distribution | daily_spend | cumulative_spend")
        ->required();
    plotdata->add_option("--out", plot_out, "write CSV here instead of stdout");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(config_path, cli_out, dry_run);
        if (validate->parsed()) return cmd_validate(validate_path);
        if (plotdata->parsed()) return cmd_plotdata(run_dir, figure, plot_out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 1;
}
