#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "amput/oracle.hpp"
#include "amput/params.hpp"
#include "amput/volterra.hpp"

namespace amput::cli {

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ModelKind { exponential_jump, kou, no_jump };

const char* to_string(ModelKind k);

struct CompareTolerances {
    double price_atm = 0.01;     // relative
    double price_wing = 0.02;    // relative
    double boundary = 0.02;      // fraction of K
    double tree_fd = 0.002;      // fraction of K
};

struct OutputPaths {
    std::string boundary = "boundary.csv";
    std::string diagnostics = "diagnostics.csv";
    std::string prices = "prices.csv";
    std::string compare = "compare.csv";
    std::string oracle = "oracle.csv";
};

struct RunConfig {
    ModelKind model = ModelKind::exponential_jump;
    double T = 1.0;
    // Curves by parameter name: r, q, sigma, lambda, phi, theta1, theta2, p.
    std::map<std::string, ParamCurve> curves;
    std::vector<double> strikes;
    SolverConfig solver;
    FDConfig fd;
    int tree_steps = 400;
    CompareTolerances tol;
    OutputPaths out;

    // Parameter set for one strike, with S_* = K.
    ParamSet params_for(double K) const;
};

// Line-oriented "key = value" under [section] headers. '#' and ';' start comments.
// Curves are "name c0 c1" or "tabulated t0 v0 t1 v1 ...". Throws ConfigError.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

ParamCurve parse_curve(const std::string& spec);

}  // namespace amput::cli
