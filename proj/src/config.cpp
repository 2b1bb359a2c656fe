#include "mpsolve/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "mpsolve/errors.hpp"
#include "mpsolve/field_io.hpp"

namespace mps {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

const std::set<std::string> kKnownKeys = {
    "preset",        "mu",           "dimension",     "nodes_x",        "nodes_y",
    "nodes_z",       "extent_x",     "extent_y",      "extent_z",       "q",
    "c_file",        "f_file",       "out_dir",       "mu_scan",        "theta",
    "p",             "lambda_start", "lambda_cap",    "lambda",         "sphere_probes",
    "path_nodes",    "tol_gradient", "tol_newton",    "tol_path",       "tol_p",
    "max_descent",   "max_outer",    "max_newton",    "seed",           "distinct_rel",
    "geometry_retries", "eigen_tol", "eigen_max_iter", "newton_gate",
};

const std::set<std::string> kKnownPresets = {"paper-regime", "coercive", "czero", "gate-fail",
                                             "custom"};

double parse_num(const std::string& key, const std::string& value, int line) {
    try {
        return parse_double(value);
    } catch (const ConfigError&) {
        throw ConfigError("config line " + std::to_string(line) + ": malformed value for '" + key +
                          "': '" + value + "'");
    }
}

int parse_int(const std::string& key, const std::string& value, int line) {
    const double d = parse_num(key, value, line);
    const int i = static_cast<int>(d);
    if (static_cast<double>(i) != d)
        throw ConfigError("config line " + std::to_string(line) + ": '" + key +
                          "' expects an integer, got '" + value + "'");
    return i;
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
    if (key == "preset") {
        if (!kKnownPresets.count(value))
            throw ConfigError("config line " + std::to_string(line) + ": unknown preset '" + value +
                              "'");
        cfg.preset = value;
    } else if (key == "mu") {
        cfg.mu = parse_num(key, value, line);
        if (!(cfg.mu > 0.0))
            throw ConfigError("config line " + std::to_string(line) + ": mu must be positive");
    } else if (key == "dimension") {
        cfg.dimension = parse_int(key, value, line);
        if (cfg.dimension != 2 && cfg.dimension != 3)
            throw ConfigError("config line " + std::to_string(line) + ": dimension must be 2 or 3");
    } else if (key == "nodes_x") {
        cfg.nodes[0] = parse_int(key, value, line);
    } else if (key == "nodes_y") {
        cfg.nodes[1] = parse_int(key, value, line);
    } else if (key == "nodes_z") {
        cfg.nodes[2] = parse_int(key, value, line);
    } else if (key == "extent_x") {
        cfg.extents[0] = parse_num(key, value, line);
    } else if (key == "extent_y") {
        cfg.extents[1] = parse_num(key, value, line);
    } else if (key == "extent_z") {
        cfg.extents[2] = parse_num(key, value, line);
    } else if (key == "q") {
        cfg.q = parse_num(key, value, line);
    } else if (key == "c_file") {
        cfg.c_file = value;
    } else if (key == "f_file") {
        cfg.f_file = value;
    } else if (key == "out_dir") {
        cfg.out_dir = value;
    } else if (key == "mu_scan") {
        cfg.mu_scan = value;
    } else if (key == "theta") {
        cfg.solver.theta = parse_num(key, value, line);
    } else if (key == "p") {
        cfg.solver.p = parse_num(key, value, line);
    } else if (key == "lambda_start") {
        cfg.solver.lambda_start = parse_num(key, value, line);
    } else if (key == "lambda_cap") {
        cfg.solver.lambda_cap = parse_num(key, value, line);
    } else if (key == "lambda") {
        cfg.solver.lambda_override = parse_num(key, value, line);
    } else if (key == "sphere_probes") {
        cfg.solver.sphere_probes = parse_int(key, value, line);
    } else if (key == "path_nodes") {
        cfg.solver.path_nodes = parse_int(key, value, line);
    } else if (key == "tol_gradient") {
        cfg.solver.tol_gradient = parse_num(key, value, line);
    } else if (key == "tol_newton") {
        cfg.solver.tol_newton = parse_num(key, value, line);
    } else if (key == "tol_path") {
        cfg.solver.tol_path = parse_num(key, value, line);
    } else if (key == "tol_p") {
        cfg.solver.tol_p = parse_num(key, value, line);
    } else if (key == "max_descent") {
        cfg.solver.max_descent = parse_int(key, value, line);
    } else if (key == "max_outer") {
        cfg.solver.max_outer = parse_int(key, value, line);
    } else if (key == "max_newton") {
        cfg.solver.max_newton = parse_int(key, value, line);
    } else if (key == "seed") {
        cfg.solver.seed = static_cast<std::uint64_t>(parse_num(key, value, line));
    } else if (key == "distinct_rel") {
        cfg.solver.distinct_rel = parse_num(key, value, line);
    } else if (key == "geometry_retries") {
        cfg.solver.geometry_retries = parse_int(key, value, line);
    } else if (key == "eigen_tol") {
        cfg.solver.eigen.tol = parse_num(key, value, line);
    } else if (key == "eigen_max_iter") {
        cfg.solver.eigen.max_iter = parse_int(key, value, line);
    } else if (key == "newton_gate") {
        cfg.solver.newton_gate = parse_num(key, value, line);
    } else {
        throw ConfigError("config line " + std::to_string(line) + ": unknown key '" + key + "'");
    }
}

}  // namespace

Grid RunConfig::make_grid() const {
    std::vector<double> ext(extents.begin(), extents.begin() + dimension);
    std::vector<int> nds(nodes.begin(), nodes.begin() + dimension);
    return Grid(dimension, ext, nds);
}

RunConfig parse_config(const std::string& text, const ConfigOverlay& overlay) {
    RunConfig cfg;
    std::set<std::string> seen;

    std::istringstream in(text);
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(line_no) + ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
        if (!seen.insert(key).second)
            throw ConfigError("config line " + std::to_string(line_no) + ": duplicate key '" + key +
                              "' (last-wins is not allowed)");
        apply_key(cfg, key, value, line_no);
    }

    for (const auto& [key, value] : overlay) apply_key(cfg, key, value, 0);

    std::vector<std::string> missing;
    if (cfg.preset.empty()) missing.push_back("preset");
    if (cfg.preset == "custom") {
        if (cfg.c_file.empty()) missing.push_back("c_file");
        if (cfg.f_file.empty()) missing.push_back("f_file");
    }
    if (!missing.empty()) {
        std::string msg = "missing required config key(s):";
        for (const auto& k : missing) msg += " " + k;
        throw ConfigError(msg);
    }

    for (int d = 0; d < cfg.dimension; ++d) {
        if (cfg.nodes[static_cast<std::size_t>(d)] < 3)
            throw ConfigError("config: node counts must be >= 3");
        if (!(cfg.extents[static_cast<std::size_t>(d)] > 0.0))
            throw ConfigError("config: extents must be positive");
    }
    return cfg;
}

RunConfig parse_config_file(const std::string& path, const ConfigOverlay& overlay) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str(), overlay);
}

std::vector<std::pair<std::string, std::string>> echo_config(const RunConfig& cfg) {
    std::vector<std::pair<std::string, std::string>> kv;
    auto num = [](double x) { return format_double(x); };
    kv.emplace_back("preset", cfg.preset);
    kv.emplace_back("mu", std::isnan(cfg.mu) ? "auto" : num(cfg.mu));
    kv.emplace_back("dimension", std::to_string(cfg.dimension));
    kv.emplace_back("nodes_x", std::to_string(cfg.nodes[0]));
    kv.emplace_back("nodes_y", std::to_string(cfg.nodes[1]));
    if (cfg.dimension == 3) kv.emplace_back("nodes_z", std::to_string(cfg.nodes[2]));
    kv.emplace_back("extent_x", num(cfg.extents[0]));
    kv.emplace_back("extent_y", num(cfg.extents[1]));
    if (cfg.dimension == 3) kv.emplace_back("extent_z", num(cfg.extents[2]));
    kv.emplace_back("q", num(cfg.q));
    if (!cfg.c_file.empty()) kv.emplace_back("c_file", cfg.c_file);
    if (!cfg.f_file.empty()) kv.emplace_back("f_file", cfg.f_file);
    kv.emplace_back("out_dir", cfg.out_dir);
    if (!cfg.mu_scan.empty()) kv.emplace_back("mu_scan", cfg.mu_scan);
    kv.emplace_back("theta", num(cfg.solver.theta));
    kv.emplace_back("p", num(cfg.solver.p));
    kv.emplace_back("lambda_start", num(cfg.solver.lambda_start));
    kv.emplace_back("lambda_cap", num(cfg.solver.lambda_cap));
    if (cfg.solver.lambda_override > 0.0) kv.emplace_back("lambda", num(cfg.solver.lambda_override));
    kv.emplace_back("sphere_probes", std::to_string(cfg.solver.sphere_probes));
    kv.emplace_back("path_nodes", std::to_string(cfg.solver.path_nodes));
    kv.emplace_back("tol_gradient", num(cfg.solver.tol_gradient));
    kv.emplace_back("tol_newton", num(cfg.solver.tol_newton));
    kv.emplace_back("tol_path", num(cfg.solver.tol_path));
    kv.emplace_back("tol_p", num(cfg.solver.tol_p));
    kv.emplace_back("newton_gate", num(cfg.solver.newton_gate));
    kv.emplace_back("max_descent", std::to_string(cfg.solver.max_descent));
    kv.emplace_back("max_outer", std::to_string(cfg.solver.max_outer));
    kv.emplace_back("max_newton", std::to_string(cfg.solver.max_newton));
    kv.emplace_back("seed", std::to_string(cfg.solver.seed));
    kv.emplace_back("distinct_rel", num(cfg.solver.distinct_rel));
    kv.emplace_back("geometry_retries", std::to_string(cfg.solver.geometry_retries));
    kv.emplace_back("eigen_tol", num(cfg.solver.eigen.tol));
    kv.emplace_back("eigen_max_iter", std::to_string(cfg.solver.eigen.max_iter));
    return kv;
}

}  // namespace mps
