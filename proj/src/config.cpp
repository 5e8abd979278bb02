#include "islab/config.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "islab/errors.hpp"

namespace islab {

ModelConstants RunConfig::constants() const {
    ModelConstants c = ModelConstants::defaults(kappa, lambda0);
    if (tau_pi) c.tau_pi = *tau_pi;
    return c;
}

void RunConfig::validate() const {
    if (!(T > 0.0)) throw spec_error("config: T must be positive");
    if (n_cells < 32) throw spec_error("config: n_cells must be at least 32");
    if (!(cfl > 0.0 && cfl < 1.0)) throw spec_error("config: cfl must lie in (0,1)");
    if (!(kappa > 0.0)) throw spec_error("config: kappa must be positive");
    if (!(x_far > b0)) throw spec_error("config: x_far must exceed b0");
    if (tau_pi && !(*tau_pi > 0.0)) throw spec_error("config: tau_pi must be positive");
}

namespace {

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r");
    const auto b = s.find_last_not_of(" \t\r");
    if (a == std::string::npos) return "";
    return s.substr(a, b - a + 1);
}

}  // namespace

RunConfig parse_config_text(const std::string& text) {
    RunConfig cfg;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw spec_error("config line " + std::to_string(lineno) +
                             ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        try {
            if (key == "kappa") cfg.kappa = std::stod(value);
            else if (key == "lambda0") cfg.lambda0 = std::stod(value);
            else if (key == "tau_pi") cfg.tau_pi = std::stod(value);
            else if (key == "n_cells") cfg.n_cells = std::stoi(value);
            else if (key == "b0") cfg.b0 = std::stod(value);
            else if (key == "x_far") cfg.x_far = std::stod(value);
            else if (key == "T") cfg.T = std::stod(value);
            else if (key == "cfl") cfg.cfl = std::stod(value);
            else if (key == "experiment") cfg.experiment = value;
            else if (key == "suite") cfg.suite = value;
            else if (key == "output_dir") cfg.output_dir = value;
            else if (key == "seed") cfg.seed = std::stoull(value);
            else
                throw spec_error("config line " + std::to_string(lineno) +
                                 ": unknown key '" + key + "'");
        } catch (const std::invalid_argument& e) {
            if (dynamic_cast<const spec_error*>(&e)) throw;
            throw spec_error("config line " + std::to_string(lineno) + ": bad value for '" +
                             key + "': " + value);
        } catch (const std::out_of_range&) {
            throw spec_error("config line " + std::to_string(lineno) +
                             ": value out of range for '" + key + "'");
        }
    }
    cfg.validate();
    return cfg;
}

RunConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw spec_error("config: cannot open '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

}  // namespace islab
