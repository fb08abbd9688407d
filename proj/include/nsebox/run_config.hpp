#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nsebox/cutoff.hpp"
#include "nsebox/solver.hpp"

namespace nsebox {

/// @file run_config.hpp
/// Plain-text experiment configuration: `key = value` lines with dotted
/// section prefixes (e.g. `solver.n = 64`), `#` comments, unknown keys
/// rejected with their line number.

struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("config line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

enum class IcType { abc, taylor_green, random, perturbed_beltrami };

struct InitialCondition {
    IcType type = IcType::abc;
    double A = 1.0, B = 1.0, C = 1.0;       // abc
    std::uint64_t seed = 1;                 // random / perturbed-beltrami
    double slope = 2.0;                     // random
    double k_peak = 2.5;                    // random
    double epsilon = 1e-2;                  // perturbed-beltrami
};

struct RunConfig {
    SolverConfig solver;
    InitialCondition ic;
    std::vector<Cylinder> cylinders;
    double M = 1.0;
    double delta = 0.5;
    int profile_order = 3;
    double eps_reg = 0.0;  // <= 0 selects the 1e-12 * max|u| * max|omega| default
    std::string output_dir = "nsebox-out";

    void validate() const;
};

/// Parse and fully validate a configuration; defaults are filled for keys
/// not present (nu = 1, box_length = 2*pi, delta = 0.5, ...). Throws
/// ConfigError with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig parse_config_file(const std::string& path);

/// Materialize the configured initial condition on the configured grid.
VectorField make_initial_condition(const RunConfig& cfg);

}  // namespace nsebox
