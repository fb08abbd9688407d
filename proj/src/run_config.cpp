#include "nsebox/run_config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "nsebox/initial_conditions.hpp"

namespace nsebox {

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    return a == std::string::npos ? std::string() : s.substr(a, b - a + 1);
}

double parse_double(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double x = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        if (!std::isfinite(x)) throw std::invalid_argument("not finite");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "cannot parse '" + v + "' as a number for key '" + key + "'");
    }
}

long parse_long(const std::string& v, int line, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long x = std::stol(v, &pos);
        if (pos != v.size()) throw std::invalid_argument("trailing characters");
        return x;
    } catch (const std::exception&) {
        throw ConfigError(line, "cannot parse '" + v + "' as an integer for key '" + key + "'");
    }
}

std::vector<double> parse_doubles(const std::string& v, int line, const std::string& key,
                                  std::size_t expected) {
    std::istringstream ss(v);
    std::vector<double> out;
    std::string tok;
    while (ss >> tok) out.push_back(parse_double(tok, line, key));
    if (out.size() != expected)
        throw ConfigError(line, "key '" + key + "' expects " + std::to_string(expected) +
                                    " numbers, got " + std::to_string(out.size()));
    return out;
}

}  // namespace

void RunConfig::validate() const {
    solver.validate();
    if (!(M > 0.0)) throw std::invalid_argument("config: M must be positive");
    if (!(delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("config: delta must lie in (0,1)");
    for (const auto& cyl : cylinders) validate_cylinder_spatial(cyl, solver.grid);
}

RunConfig parse_config(const std::string& text) {
    RunConfig cfg;
    cfg.solver.grid = Grid(32);  // documented default resolution
    bool has_ic = false, has_t_end = false;
    std::map<std::size_t, Cylinder> cylinders;
    std::map<std::size_t, int> cylinder_lines;

    std::istringstream in(text);
    std::string raw;
    int lineno = 0;
    while (std::getline(in, raw)) {
        ++lineno;
        std::string line = raw;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(lineno, "expected 'key = value', got '" + trim(raw) + "'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty()) throw ConfigError(lineno, "empty key");
        if (value.empty()) throw ConfigError(lineno, "empty value for key '" + key + "'");

        if (key == "solver.n") {
            const long n = parse_long(value, lineno, key);
            if (n < 4 || n % 2 != 0)
                throw ConfigError(lineno, "solver.n must be an even integer >= 4");
            if (n > 0xFFFF) throw ConfigError(lineno, "solver.n exceeds the snapshot format range");
            cfg.solver.grid.n = int(n);
        } else if (key == "solver.box_length") {
            cfg.solver.grid.box_length = parse_double(value, lineno, key);
            if (!(cfg.solver.grid.box_length > 0.0))
                throw ConfigError(lineno, "solver.box_length must be positive");
        } else if (key == "solver.nu") {
            cfg.solver.grid.nu = parse_double(value, lineno, key);
            if (!(cfg.solver.grid.nu > 0.0))
                throw ConfigError(lineno, "solver.nu must be positive");
        } else if (key == "solver.dt") {
            cfg.solver.dt = parse_double(value, lineno, key);
            if (!(cfg.solver.dt > 0.0)) throw ConfigError(lineno, "solver.dt must be positive");
        } else if (key == "solver.t_end") {
            cfg.solver.t_end = parse_double(value, lineno, key);
            if (!(cfg.solver.t_end > 0.0))
                throw ConfigError(lineno, "solver.t_end must be positive");
            has_t_end = true;
        } else if (key == "solver.snapshot_interval") {
            cfg.solver.snapshot_interval = parse_double(value, lineno, key);
            if (!(cfg.solver.snapshot_interval > 0.0))
                throw ConfigError(lineno, "solver.snapshot_interval must be positive");
        } else if (key == "solver.scheme") {
            if (value == "rk4-integrating-factor")
                cfg.solver.scheme = TimeScheme::rk4_integrating_factor;
            else if (value == "rk4-plain")
                cfg.solver.scheme = TimeScheme::rk4_plain;
            else
                throw ConfigError(lineno, "solver.scheme must be 'rk4-integrating-factor' or "
                                          "'rk4-plain'");
        } else if (key == "ic.type") {
            if (value == "abc")
                cfg.ic.type = IcType::abc;
            else if (value == "taylor-green")
                cfg.ic.type = IcType::taylor_green;
            else if (value == "random")
                cfg.ic.type = IcType::random;
            else if (value == "perturbed-beltrami")
                cfg.ic.type = IcType::perturbed_beltrami;
            else
                throw ConfigError(lineno, "unknown ic.type '" + value + "'");
            has_ic = true;
        } else if (key == "ic.A") {
            cfg.ic.A = parse_double(value, lineno, key);
        } else if (key == "ic.B") {
            cfg.ic.B = parse_double(value, lineno, key);
        } else if (key == "ic.C") {
            cfg.ic.C = parse_double(value, lineno, key);
        } else if (key == "ic.seed") {
            const long s = parse_long(value, lineno, key);
            if (s < 0) throw ConfigError(lineno, "ic.seed must be non-negative");
            cfg.ic.seed = std::uint64_t(s);
        } else if (key == "ic.slope") {
            cfg.ic.slope = parse_double(value, lineno, key);
        } else if (key == "ic.k_peak") {
            cfg.ic.k_peak = parse_double(value, lineno, key);
            if (!(cfg.ic.k_peak > 0.0)) throw ConfigError(lineno, "ic.k_peak must be positive");
        } else if (key == "ic.epsilon") {
            cfg.ic.epsilon = parse_double(value, lineno, key);
            if (cfg.ic.epsilon < 0.0) throw ConfigError(lineno, "ic.epsilon must be >= 0");
        } else if (key.rfind("cylinder.", 0) == 0) {
            const std::string idx_str = key.substr(9);
            std::size_t idx = 0;
            const auto res = std::from_chars(idx_str.data(), idx_str.data() + idx_str.size(), idx);
            if (res.ec != std::errc() || res.ptr != idx_str.data() + idx_str.size())
                throw ConfigError(lineno, "bad cylinder index in key '" + key + "'");
            const auto nums = parse_doubles(value, lineno, key, 5);
            Cylinder cyl;
            cyl.x0 = {nums[0], nums[1], nums[2]};
            cyl.t0 = nums[3];
            cyl.r = nums[4];
            if (cylinders.count(idx))
                throw ConfigError(lineno, "duplicate cylinder index " + std::to_string(idx));
            cylinders[idx] = cyl;
            cylinder_lines[idx] = lineno;
        } else if (key == "M") {
            cfg.M = parse_double(value, lineno, key);
            if (!(cfg.M > 0.0)) throw ConfigError(lineno, "M must be positive");
        } else if (key == "delta") {
            cfg.delta = parse_double(value, lineno, key);
            if (!(cfg.delta > 0.0 && cfg.delta < 1.0))
                throw ConfigError(lineno, "delta must lie in (0,1)");
        } else if (key == "profile_order") {
            const long p = parse_long(value, lineno, key);
            if (p != 3 && p != 5) throw ConfigError(lineno, "profile_order must be 3 or 5");
            cfg.profile_order = int(p);
        } else if (key == "eps_reg") {
            cfg.eps_reg = parse_double(value, lineno, key);
        } else if (key == "output_dir") {
            cfg.output_dir = value;
        } else {
            throw ConfigError(lineno, "unknown key '" + key + "'");
        }
    }

    if (!has_ic) throw ConfigError(lineno, "missing required key 'ic.type'");
    if (!has_t_end) throw ConfigError(lineno, "missing required key 'solver.t_end'");

    std::size_t expect = 0;
    for (const auto& [idx, cyl] : cylinders) {
        if (idx != expect)
            throw ConfigError(cylinder_lines.at(idx),
                              "cylinder indices must be contiguous from 0");
        cfg.cylinders.push_back(cyl);
        ++expect;
    }

    try {
        cfg.solver.validate();
    } catch (const std::exception& e) {
        throw ConfigError(lineno, e.what());
    }
    for (std::size_t i = 0; i < cfg.cylinders.size(); ++i) {
        try {
            validate_cylinder_spatial(cfg.cylinders[i], cfg.solver.grid);
        } catch (const std::exception& e) {
            throw ConfigError(cylinder_lines.at(i), e.what());
        }
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

VectorField make_initial_condition(const RunConfig& cfg) {
    const Grid& g = cfg.solver.grid;
    switch (cfg.ic.type) {
        case IcType::abc:
            return init_abc(g, cfg.ic.A, cfg.ic.B, cfg.ic.C);
        case IcType::taylor_green:
            return init_taylor_green(g);
        case IcType::random:
            return init_random_solenoidal(g, cfg.ic.seed, cfg.ic.slope, cfg.ic.k_peak);
        case IcType::perturbed_beltrami:
            return init_perturbed_beltrami(g, cfg.ic.epsilon, cfg.ic.seed);
    }
    throw std::logic_error("make_initial_condition: unreachable");
}

}  // namespace nsebox
