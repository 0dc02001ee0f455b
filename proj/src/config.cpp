#include "nfnls/config.hpp"

#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "nfnls/errors.hpp"
#include "nfnls/verify.hpp"

namespace nfnls::cli {

namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

DomainError bad_value(const std::string& key, const std::string& value, const char* want) {
    return DomainError("config key '" + key + "': expected " + want + ", got '" + value + "'", "invalid_config");
}

double to_double(std::string_view text, const std::string& what) {
    const std::string s(trim(text));
    if (s.empty()) throw bad_value(what, s, "a number");
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size() || errno == ERANGE || std::isnan(v)) throw bad_value(what, s, "a number");
    return v;
}

long long to_integer(std::string_view text, const std::string& what) {
    const auto s = trim(text);
    long long v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) throw bad_value(what, std::string(s), "an integer");
    return v;
}

}  // namespace

Settings parse_config_text(std::string_view text) {
    Settings out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        if (const auto c = line.find_first_of("#;"); c != std::string_view::npos) {
            // u0 lists use ';' as a separator, so only a leading ';' is a comment
            if (line[c] == '#' || trim(line.substr(0, c)).empty()) line = line.substr(0, c);
        }
        line = trim(line);
        if (line.empty() || line.front() == '[') continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw DomainError("config line " + std::to_string(line_no) + ": expected key = value", "invalid_config");
        }
        const std::string key(trim(line.substr(0, eq)));
        std::string_view value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && (value.front() == '"' || value.front() == '\'') && value.back() == value.front()) {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) throw DomainError("config line " + std::to_string(line_no) + ": empty key", "invalid_config");
        out[key] = std::string(value);
    }
    return out;
}

Settings load_config_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DomainError("cannot open config file: " + path.string(), "file_not_found");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

void merge_known(Settings& base, const Settings& over, std::string_view origin) {
    for (const auto& [k, v] : over) {
        if (!base.count(k)) {
            throw DomainError("unknown config key '" + k + "' in " + std::string(origin), "invalid_config");
        }
        base[k] = v;
    }
}

std::string get(const Settings& s, const std::string& key) {
    const auto it = s.find(key);
    if (it == s.end()) throw DomainError("missing config key '" + key + "'", "invalid_config");
    return it->second;
}

double get_double(const Settings& s, const std::string& key) { return to_double(get(s, key), key); }

int get_int(const Settings& s, const std::string& key) {
    const long long v = to_integer(get(s, key), key);
    if (v < INT32_MIN || v > INT32_MAX) throw bad_value(key, get(s, key), "a 32-bit integer");
    return static_cast<int>(v);
}

std::uint64_t get_u64(const Settings& s, const std::string& key) {
    const auto text = trim(get(s, key));
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw bad_value(key, std::string(text), "an unsigned integer");
    }
    return v;
}

bool get_bool(const Settings& s, const std::string& key) {
    const std::string v = get(s, key);
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    throw bad_value(key, v, "a boolean");
}

std::vector<std::string> split(std::string_view text, char sep) {
    std::vector<std::string> out;
    if (trim(text).empty()) return out;
    std::size_t pos = 0;
    for (;;) {
        const auto next = text.find(sep, pos);
        out.emplace_back(trim(text.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

std::vector<double> parse_double_list(std::string_view text) {
    std::vector<double> out;
    for (const auto& item : split(text, ',')) out.push_back(to_double(item, "list item"));
    return out;
}

std::vector<int> parse_int_list(std::string_view text) {
    std::vector<int> out;
    for (const auto& item : split(text, ',')) out.push_back(static_cast<int>(to_integer(item, "list item")));
    return out;
}

std::map<int, double> parse_cutoff_override(std::string_view text) {
    std::map<int, double> out;
    for (const auto& item : split(text, ',')) {
        const auto parts = split(item, ':');
        if (parts.size() != 2) throw bad_value("cutoff_override", item, "entries j:value");
        out[static_cast<int>(to_integer(parts[0], "cutoff_override"))] = to_double(parts[1], "cutoff_override");
    }
    return out;
}

std::string format_cutoff_override(const std::map<int, double>& m) {
    std::string out;
    for (const auto& [j, c] : m) {
        if (!out.empty()) out += ',';
        out += std::to_string(j) + ':' + format_double(c);
    }
    return out;
}

ModeVector parse_modes(std::string_view text, int n_max) {
    std::vector<std::pair<int, cplx>> modes;
    for (const auto& item : split(text, ';')) {
        if (item.empty()) continue;
        const auto parts = split(item, ':');
        if (parts.size() < 2 || parts.size() > 3) throw bad_value("u0", item, "entries n:re[:im]");
        const double im = parts.size() == 3 ? to_double(parts[2], "u0") : 0.0;
        modes.emplace_back(static_cast<int>(to_integer(parts[0], "u0")), cplx(to_double(parts[1], "u0"), im));
    }
    return ModeVector::from_modes(n_max, modes);
}

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, res.ptr);
}

ModelSpec model_from(const Settings& s) {
    ModelSpec m;
    const std::string r = get(s, "renormalization");
    if (r == "renormalized") {
        m.renormalization = Renormalization::renormalized;
    } else if (r == "full") {
        m.renormalization = Renormalization::full;
    } else {
        throw bad_value("renormalization", r, "renormalized or full");
    }
    m.sign = get_int(s, "nonlinearity_sign");
    m.validate();
    return m;
}

ModulationConfig modulation_from(const Settings& s) {
    ModulationConfig mod;
    mod.p = get_double(s, "p");
    mod.K = get_double(s, "K");
    const std::string eps = get(s, "eps"), theta = get(s, "theta");
    mod.eps = eps == "auto" ? ModulationConfig::default_eps(mod.p) : to_double(eps, "eps");
    mod.theta = theta == "auto" ? ModulationConfig::default_theta(mod.p, mod.eps) : to_double(theta, "theta");
    mod.cutoff_override = parse_cutoff_override(get(s, "cutoff_override"));
    mod.validate();
    return mod;
}

SolverConfig solver_config_from(const Settings& s) {
    SolverConfig cfg;
    cfg.model = model_from(s);
    cfg.mod = modulation_from(s);
    cfg.J_max = get_int(s, "J_max");
    cfg.n_max = get_int(s, "n_max");
    cfg.T = get_double(s, "T");
    cfg.time_grid_size = get_int(s, "time_grid_size");
    cfg.picard_tol = get_double(s, "picard_tol");
    cfg.picard_max_iter = get_int(s, "picard_max_iter");
    cfg.quadrature = quadrature_from_string(get(s, "quadrature"));
    cfg.auto_K = get_bool(s, "auto_K");
    cfg.safety_constant = get_double(s, "safety_constant");
    cfg.validate();
    return cfg;
}

ModeVector initial_data_from(const Settings& s, int n_max) {
    if (n_max < 0) throw DomainError("n_max must be >= 0", "invalid_config");
    if (const auto text = get(s, "u0"); !text.empty()) return parse_modes(text, n_max);
    if (const auto file = get(s, "u0_file"); !file.empty()) {
        std::ifstream in(file, std::ios::binary);
        if (!in) throw DomainError("cannot open u0_file: " + file, "file_not_found");
        nlohmann::json j;
        try {
            in >> j;
        } catch (const nlohmann::json::exception& e) {
            throw DomainError("u0_file is not valid JSON: " + std::string(e.what()), "invalid_config");
        }
        const ModeVector u = mode_vector_from_json(j);
        if (u.n_max() > n_max) throw DomainError("u0_file lattice exceeds n_max", "invalid_config");
        ModeVector out(n_max);
        for (int n = -u.n_max(); n <= u.n_max(); ++n) out.at(n) = u[n];
        return out;
    }
    const int support = get_int(s, "support");
    return geometric_data(n_max, get_double(s, "amplitude"), get_double(s, "rate"), support < 0 ? n_max : support);
}

}  // namespace nfnls::cli
