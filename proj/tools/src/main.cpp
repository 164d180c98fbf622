#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "amput_cli/commands.hpp"

int main(int argc, char** argv) {
    using namespace amput::cli;
    CLI::App app{"American Put exercise boundaries under jump-diffusion"};
    app.require_subcommand(1);

    CommandOptions opt;
    app.add_option("--out-dir", opt.out_dir, "Directory for CSV output")->capture_default_str();
    app.add_flag("--seedless", opt.seedless, "No randomness is used; accepted for compatibility");
    app.add_flag("-v,--verbose", opt.verbose, "Print per-strike details");

    std::string cfg;
    double t = 0.0;
    std::vector<double> spots;

    auto* boundary = app.add_subcommand("boundary", "Solve the exercise boundary for every strike");
    boundary->add_option("config", cfg, "Config file")->required();
    auto* price = app.add_subcommand("price", "Price at time t for the given spots");
    price->add_option("config", cfg, "Config file")->required();
    price->add_option("--t", t, "Calendar time")->required();
    price->add_option("--spots", spots, "Comma-separated spot prices")->required()->delimiter(',');
    auto* compare = app.add_subcommand("compare", "Compare against the finite-difference or tree oracle");
    compare->add_option("config", cfg, "Config file")->required();
    auto* oracle = app.add_subcommand("oracle", "Run the reference solvers only");
    oracle->add_option("config", cfg, "Config file")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : static_cast<int>(config_error);
    }

    if (boundary->parsed()) return cmd_boundary(cfg, opt);
    if (price->parsed()) return cmd_price(cfg, t, spots, opt);
    if (compare->parsed()) return cmd_compare(cfg, opt);
    return cmd_oracle(cfg, opt);
}
