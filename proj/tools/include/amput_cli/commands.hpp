#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "amput_cli/config.hpp"

namespace amput::cli {

enum ExitCode : int { ok = 0, config_error = 2, solver_error = 3, tolerance_error = 4, non_finite = 5 };

struct CommandOptions {
    std::string out_dir = ".";
    bool verbose = false;
    bool seedless = false;  // nothing is random; accepted for interface stability
    std::ostream* out = nullptr;  // defaults to std::cout
    std::ostream* err = nullptr;  // defaults to std::cerr
};

// Each command loads the config, runs, writes its CSV files under out_dir and returns an exit code.
int cmd_boundary(const std::string& config_path, const CommandOptions& opt);
int cmd_price(const std::string& config_path, double t, const std::vector<double>& spots, const CommandOptions& opt);
int cmd_compare(const std::string& config_path, const CommandOptions& opt);
int cmd_oracle(const std::string& config_path, const CommandOptions& opt);

// "%.17g"; the formatting used for every numeric CSV cell.
std::string format_number(double v);

}  // namespace amput::cli
