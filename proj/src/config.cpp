#include "homoglab/config.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "homoglab/errors.hpp"

namespace homoglab {
namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

// Strips a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& line) {
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"') quoted = !quoted;
        if (line[i] == '#' && !quoted) return line.substr(0, i);
    }
    return line;
}

std::string unquote(const std::string& v) {
    if (v.size() >= 2 && v.front() == '"' && v.back() == '"')
        return v.substr(1, v.size() - 2);
    return v;
}

double parse_number(const std::string& key, const std::string& v) {
    char* end = nullptr;
    const double x = std::strtod(v.c_str(), &end);
    if (end == v.c_str() || *end != '\0')
        throw validation_error("config: key '" + key + "' is not a number: " + v);
    return x;
}

}  // namespace

Config Config::parse_string(const std::string& text) {
    Config cfg;
    std::istringstream is(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        line = trim(strip_comment(line));
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw validation_error("config: malformed section at line " +
                                       std::to_string(lineno));
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw validation_error("config: expected key = value at line " +
                                   std::to_string(lineno));
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw validation_error("config: empty key or value at line " +
                                   std::to_string(lineno));
        if (!section.empty()) key = section + "." + key;
        cfg.raw_[key] = value;
    }
    return cfg;
}

Config Config::parse_file(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw validation_error("config: cannot open " + path);
    std::ostringstream os;
    os << is.rdbuf();
    return parse_string(os.str());
}

bool Config::has(const std::string& key) const { return raw_.count(key) > 0; }

void Config::set(const std::string& key, const std::string& value) {
    raw_[key] = value;
}

std::string Config::get_string(const std::string& key, const std::string& def) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? def : unquote(it->second);
}

std::string Config::require_string(const std::string& key) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) throw validation_error("config: missing key '" + key + "'");
    return unquote(it->second);
}

double Config::get_double(const std::string& key, double def) const {
    const auto it = raw_.find(key);
    return it == raw_.end() ? def : parse_number(key, it->second);
}

std::int64_t Config::get_int(const std::string& key, std::int64_t def) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return def;
    const double x = parse_number(key, it->second);
    const auto n = static_cast<std::int64_t>(std::llround(x));
    if (static_cast<double>(n) != x)
        throw validation_error("config: key '" + key + "' is not an integer");
    return n;
}

bool Config::get_bool(const std::string& key, bool def) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return def;
    if (it->second == "true") return true;
    if (it->second == "false") return false;
    throw validation_error("config: key '" + key + "' is not a boolean");
}

std::vector<double> Config::get_double_list(const std::string& key,
                                            const std::vector<double>& def) const {
    const auto it = raw_.find(key);
    if (it == raw_.end()) return def;
    std::string v = trim(it->second);
    if (v.size() < 2 || v.front() != '[' || v.back() != ']')
        throw validation_error("config: key '" + key + "' is not an array");
    v = v.substr(1, v.size() - 2);
    std::vector<double> out;
    std::istringstream is(v);
    std::string item;
    while (std::getline(is, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number(key, item));
    }
    return out;
}

std::shared_ptr<CovarianceModel> model_from_config(const Config& cfg) {
    const std::string kind = cfg.get_string("model.kind", "separable");
    if (kind == "separable") {
        const double amp = cfg.get_double("model.amplitude", 1.0);
        const std::string sk = cfg.get_string("model.spatial", "gaussian");
        const double sx = cfg.get_double("model.spatial_scale", 1.0);
        const std::string tk = cfg.get_string("model.temporal", "exp_decay");
        const double st = cfg.get_double("model.temporal_scale", 1.0);
        SpatialKind spatial;
        if (sk == "gaussian")
            spatial = SpatialKind::gaussian;
        else if (sk == "indicator")
            spatial = SpatialKind::indicator;
        else if (sk == "heat_kernel")
            spatial = SpatialKind::heat_kernel;
        else if (sk == "constant")
            spatial = SpatialKind::constant;
        else
            throw validation_error("config: unknown spatial profile '" + sk + "'");
        TemporalKind temporal;
        if (tk == "exp_decay")
            temporal = TemporalKind::exp_decay;
        else if (tk == "constant")
            temporal = TemporalKind::constant;
        else
            throw validation_error("config: unknown temporal profile '" + tk + "'");
        return std::make_shared<SeparableModel>(amp, spatial, sx, temporal, st);
    }
    if (kind == "shot-noise") {
        ShotNoiseSpec spec;
        const auto w = cfg.get_double_list("model.weights", {});
        const auto a = cfg.get_double_list("model.amplitudes", {});
        const auto ry = cfg.get_double_list("model.ry", {});
        const auto rs = cfg.get_double_list("model.rs", {});
        if (w.size() != a.size() || w.size() != ry.size() || w.size() != rs.size() ||
            w.empty())
            throw validation_error(
                "config: shot-noise needs equal-length weights/amplitudes/ry/rs arrays");
        for (std::size_t i = 0; i < w.size(); ++i)
            spec.components.push_back({w[i], a[i], ry[i], rs[i]});
        return std::make_shared<ShotNoiseModel>(spec);
    }
    throw validation_error("config: unknown model kind '" + kind + "'");
}

ExperimentConfig ExperimentConfig::from(const Config& cfg) {
    ExperimentConfig ec;
    ec.model = model_from_config(cfg);
    ec.alpha = cfg.get_double("study.alpha", ec.alpha);
    ec.eps_ladder = cfg.get_double_list("study.eps", ec.eps_ladder);
    ec.horizon = cfg.get_double("study.horizon", ec.horizon);
    ec.window_x = cfg.get_double("study.window_x", ec.window_x);
    ec.window_t0 = cfg.get_double("study.window_t0", ec.window_t0);
    ec.realizations =
        static_cast<std::size_t>(cfg.get_int("study.realizations",
                                             static_cast<std::int64_t>(ec.realizations)));
    ec.seed = static_cast<std::uint64_t>(
        cfg.get_int("study.seed", static_cast<std::int64_t>(ec.seed)));
    ec.domain_L = cfg.get_double("study.L", ec.domain_L);
    ec.points_per_corr = cfg.get_double("study.points_per_corr", ec.points_per_corr);
    ec.t_values = cfg.get_double_list("study.t_values", ec.t_values);
    ec.threads = static_cast<int>(cfg.get_int("study.threads", ec.threads));
    ec.out_dir = cfg.get_string("study.out", ec.out_dir);
    ec.validate();
    return ec;
}

void ExperimentConfig::validate() const {
    if (!model) throw validation_error("experiment: no model");
    if (eps_ladder.empty()) throw validation_error("experiment: empty eps ladder");
    for (std::size_t i = 0; i < eps_ladder.size(); ++i) {
        if (eps_ladder[i] <= 0 || eps_ladder[i] > 1)
            throw validation_error("experiment: eps ladder must lie in (0, 1]");
        if (i > 0 && eps_ladder[i] >= eps_ladder[i - 1])
            throw validation_error("experiment: eps ladder must be strictly decreasing");
    }
    if (realizations < 1) throw validation_error("experiment: need >= 1 realization");
    if (horizon <= 0 || window_t0 < 0 || window_t0 > horizon)
        throw validation_error("experiment: bad time window");
    if (window_x <= 0 || window_x > domain_L)
        throw validation_error("experiment: observation window outside solver domain");
    if (threads < 1) throw validation_error("experiment: threads >= 1");
    if (!(alpha > 0)) throw validation_error("experiment: alpha must be > 0");
}

}  // namespace homoglab
