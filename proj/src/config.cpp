#include "netsir/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "netsir/errors.hpp"
#include "netsir/ode.hpp"

namespace netsir {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::string exact(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double to_double(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("'" + key + "' expects a number, got '" + v + "'");
    return out;
}

long long to_integer(const std::string& key, const std::string& v) {
    std::size_t used = 0;
    long long out = 0;
    try {
        out = std::stoll(v, &used);
    } catch (const std::exception&) {
        throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    }
    if (used != v.size()) throw ConfigError("'" + key + "' expects an integer, got '" + v + "'");
    return out;
}

int to_int(const std::string& key, const std::string& v) {
    const long long x = to_integer(key, v);
    if (x < -2147483647LL || x > 2147483647LL) throw ConfigError("'" + key + "' is out of range");
    return static_cast<int>(x);
}

}  // namespace

bool ExperimentConfig::operator==(const ExperimentConfig& o) const {
    return degree == o.degree && model.beta == o.model.beta && model.gamma == o.model.gamma &&
           model.omega == o.model.omega && network == o.network && engine == o.engine && n == o.n &&
           runs == o.runs && i0 == o.i0 && seed == o.seed && threshold == o.threshold && t_end == o.t_end &&
           grid_points == o.grid_points && eps == o.eps && out_dir == o.out_dir;
}

void apply_setting(ExperimentConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "degree.kind") c.degree.kind = v;
    else if (key == "degree.lambda") c.degree.lambda = to_double(key, v);
    else if (key == "degree.p") c.degree.p = to_double(key, v);
    else if (key == "degree.file") c.degree.file = v;
    else if (key == "degree.max_degree") c.degree.max_degree = to_int(key, v);
    else if (key == "model.beta") c.model.beta = to_double(key, v);
    else if (key == "model.gamma") c.model.gamma = to_double(key, v);
    else if (key == "model.omega") c.model.omega = to_double(key, v);
    else if (key == "network.kind") c.network = v;
    else if (key == "network.n") c.n = to_int(key, v);
    else if (key == "sim.engine") c.engine = v;
    else if (key == "sim.runs") c.runs = to_int(key, v);
    else if (key == "sim.i0") c.i0 = to_int(key, v);
    else if (key == "sim.seed") {
        std::uint64_t s = 0;
        const auto res = std::from_chars(v.data(), v.data() + v.size(), s);
        if (res.ec != std::errc() || res.ptr != v.data() + v.size())
            throw ConfigError("'sim.seed' expects an unsigned 64-bit integer, got '" + v + "'");
        c.seed = s;
    } else if (key == "sim.threshold") c.threshold = to_double(key, v);
    else if (key == "grid.t_end") c.t_end = to_double(key, v);
    else if (key == "grid.points") c.grid_points = to_int(key, v);
    else if (key == "init.eps") c.eps = to_double(key, v);
    else if (key == "output.dir") c.out_dir = v;
    else throw ConfigError("unknown config key '" + key + "'");
}

void apply_degree_flag(ExperimentConfig& cfg, const std::string& spec) {
    const auto colon = spec.find(':');
    if (colon == std::string::npos) throw ConfigError("degree spec must look like kind:value, got '" + spec + "'");
    const std::string kind = spec.substr(0, colon);
    const std::string arg = spec.substr(colon + 1);
    if (kind == "poisson") {
        cfg.degree.kind = kind;
        apply_setting(cfg, "degree.lambda", arg);
    } else if (kind == "geometric") {
        cfg.degree.kind = kind;
        apply_setting(cfg, "degree.p", arg);
    } else if (kind == "empirical") {
        cfg.degree.kind = kind;
        cfg.degree.file = arg;
    } else {
        throw ConfigError("unknown degree kind '" + kind + "'");
    }
}

ExperimentConfig parse_config(std::istream& in) {
    ExperimentConfig cfg;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
        apply_setting(cfg, trim(line.substr(0, eq)), line.substr(eq + 1));
    }
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    return parse_config(in);
}

std::string serialize_config(const ExperimentConfig& c) {
    std::ostringstream o;
    o << "degree.kind = " << c.degree.kind << '\n'
      << "degree.lambda = " << exact(c.degree.lambda) << '\n'
      << "degree.p = " << exact(c.degree.p) << '\n';
    if (!c.degree.file.empty()) o << "degree.file = " << c.degree.file << '\n';
    o << "degree.max_degree = " << c.degree.max_degree << '\n'
      << "model.beta = " << exact(c.model.beta) << '\n'
      << "model.gamma = " << exact(c.model.gamma) << '\n'
      << "model.omega = " << exact(c.model.omega) << '\n'
      << "network.kind = " << c.network << '\n'
      << "network.n = " << c.n << '\n'
      << "sim.engine = " << c.engine << '\n'
      << "sim.runs = " << c.runs << '\n'
      << "sim.i0 = " << c.i0 << '\n'
      << "sim.seed = " << c.seed << '\n'
      << "sim.threshold = " << exact(c.threshold) << '\n'
      << "grid.t_end = " << exact(c.t_end) << '\n'
      << "grid.points = " << c.grid_points << '\n'
      << "init.eps = " << exact(c.eps) << '\n'
      << "output.dir = " << c.out_dir << '\n';
    return o.str();
}

void validate_config(const ExperimentConfig& c) {
    if (c.degree.kind != "poisson" && c.degree.kind != "geometric" && c.degree.kind != "empirical")
        throw ConfigError("degree.kind must be poisson, geometric or empirical");
    if (c.degree.kind == "empirical" && c.degree.file.empty()) throw ConfigError("empirical degrees need degree.file");
    if (c.degree.max_degree < -1) throw ConfigError("degree.max_degree must be nonnegative, or -1 for the default");
    if (!(c.model.beta >= 0.0) || !(c.model.gamma >= 0.0) || !(c.model.omega >= 0.0))
        throw ConfigError("model rates must be nonnegative");
    if (c.network != "mr" && c.network != "nsw") throw ConfigError("network.kind must be mr or nsw");
    if (c.engine != "gillespie" && c.engine != "effective") throw ConfigError("sim.engine must be gillespie or effective");
    if (c.n < 1 || c.runs < 1 || c.i0 < 1 || c.i0 > c.n) throw ConfigError("counts must be positive with i0 <= n");
    if (!(c.threshold > 0.0 && c.threshold < 1.0)) throw ConfigError("sim.threshold must lie in (0,1)");
    if (!(c.t_end > 0.0) || c.grid_points < 2) throw ConfigError("grid needs t_end > 0 and at least 2 points");
    if (!(c.eps >= 0.0 && c.eps < 1.0)) throw ConfigError("init.eps must lie in [0,1)");
}

int resolved_max_degree(const DegreeSpec& spec) {
    if (spec.max_degree >= 0) return spec.max_degree;
    return spec.kind == "geometric" ? 50 : 15;
}

DegreeDistribution make_distribution(const DegreeSpec& spec) {
    try {
        if (spec.kind == "poisson") return make_poisson(spec.lambda, resolved_max_degree(spec));
        if (spec.kind == "geometric") return make_geometric(spec.p, resolved_max_degree(spec));
        if (spec.kind == "empirical") return make_empirical(read_degree_sequence(spec.file));
    } catch (const std::exception& e) {
        throw ConfigError(std::string("degree distribution: ") + e.what());
    }
    throw ConfigError("unknown degree kind '" + spec.kind + "'");
}

EnsembleConfig ensemble_config(const ExperimentConfig& cfg) {
    validate_config(cfg);
    EnsembleConfig e;
    e.dist = make_distribution(cfg.degree);
    if (cfg.degree.kind == "empirical" && cfg.network == "mr") {
        try {
            e.degree_sequence = read_degree_sequence(cfg.degree.file);
        } catch (const std::exception& ex) {
            throw ConfigError(ex.what());
        }
    }
    e.network = cfg.network == "mr" ? NetworkKind::mr : NetworkKind::nsw;
    e.engine = cfg.engine == "effective" ? Engine::effective_degree : Engine::gillespie;
    e.n = e.degree_sequence.empty() ? cfg.n : static_cast<int>(e.degree_sequence.size());
    e.i0 = cfg.i0;
    e.params = cfg.model;
    e.grid = uniform_grid(cfg.t_end, cfg.grid_points);
    return e;
}

}  // namespace netsir
