#include "exlab/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <type_traits>

#include "exlab/error.hpp"
#include "exlab/io.hpp"
#include "exlab/laplace.hpp"
#include "exlab/pointproc.hpp"
#include "exlab/risk.hpp"

namespace exlab {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string unquote(const std::string& s) {
    if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
        return s.substr(1, s.size() - 2);
    return s;
}

std::vector<std::string> split_list(const std::string& raw) {
    std::string body = trim(raw);
    if (body.size() >= 2 && body.front() == '[' && body.back() == ']') body = body.substr(1, body.size() - 2);
    std::vector<std::string> out;
    std::stringstream ss(body);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = unquote(trim(item));
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

double parse_double(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    double v = 0.0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty())
        throw ValidationError(key + ": expected a number, got '" + raw + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& raw) {
    const std::string s = trim(raw);
    std::uint64_t v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
        // Accept integral values written in exponent form, e.g. 1e5.
        const double d = parse_double(key, raw);
        if (!(d >= 0.0) || d != std::floor(d) || d > 1.8e19)
            throw ValidationError(key + ": expected a non-negative integer, got '" + raw + "'");
        return static_cast<std::uint64_t>(d);
    }
    return v;
}

template <class T, class Parse>
std::vector<T> parse_list(const std::string& key, const std::string& raw, Parse parse) {
    std::vector<T> out;
    for (const auto& item : split_list(raw)) out.push_back(static_cast<T>(parse(key, item)));
    if (out.empty()) throw ValidationError(key + ": list must not be empty");
    return out;
}

template <class T>
std::string join(const std::vector<T>& items) {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += ",";
        if constexpr (std::is_same_v<T, double>)
            out += format_double(items[i]);
        else if constexpr (std::is_same_v<T, std::string>)
            out += items[i];
        else
            out += std::to_string(items[i]);
    }
    return out;
}

}  // namespace

std::map<std::string, std::string> parse_config_text(const std::string& text) {
    std::map<std::string, std::string> out;
    std::stringstream ss(text);
    std::string line;
    std::string section;
    std::size_t line_no = 0;
    while (std::getline(ss, line)) {
        ++line_no;
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (line[i] == '"') quoted = !quoted;
            if (line[i] == '#' && !quoted) {
                line.resize(i);
                break;
            }
        }
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[' && line.back() == ']' && line.find('=') == std::string::npos) {
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ValidationError("config line " + std::to_string(line_no) + ": expected key = value");
        std::string key = trim(line.substr(0, eq));
        if (key.empty()) throw ValidationError("config line " + std::to_string(line_no) + ": empty key");
        if (!section.empty()) key = section + "." + key;
        out[key] = unquote(trim(line.substr(eq + 1)));
    }
    return out;
}

std::map<std::string, std::string> read_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ValidationError("config: cannot read '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config_text(buf.str());
}

void apply_config_value(ExperimentConfig& c, const std::string& key, const std::string& value) {
    if (key == "model.kind") {
        c.model.kind = model_kind_from_string(unquote(trim(value)));
    } else if (key == "model.a" || key == "a") {
        c.model.a = parse_double("model.a", value);
    } else if (key == "model.alpha" || key == "alpha") {
        c.model.alpha = parse_double("model.alpha", value);
    } else if (key == "model.lambda" || key == "lambda") {
        c.model.lambda = parse_double("model.lambda", value);
    } else if (key == "model.sites" || key == "sites") {
        const auto items = split_list(value);
        if (items.size() == 1 && std::all_of(items[0].begin(), items[0].end(), ::isdigit)) {
            const auto count = parse_uint("model.sites", items[0]);
            if (count == 0) throw ValidationError("model.sites: need at least one site");
            c.model.sites = default_site_names(count);
        } else {
            if (items.empty()) throw ValidationError("model.sites: need at least one site");
            c.model.sites = items;
        }
    } else if (key == "seed" || key == "model.seed") {
        c.model.seed = parse_uint("seed", value);
    } else if (key == "risk") {
        c.risk = unquote(trim(value));
    } else if (key == "mark") {
        c.mark = unquote(trim(value));
    } else if (key == "u") {
        c.u = parse_double("u", value);
    } else if (key == "n") {
        c.n = parse_uint("n", value);
    } else if (key == "n_grid") {
        c.n_grid = parse_list<std::size_t>("n_grid", value, parse_uint);
    } else if (key == "r_exponent") {
        c.r_exponent = parse_double("r_exponent", value);
    } else if (key == "test_functions") {
        c.test_functions = split_list(value);
    } else if (key == "reps") {
        c.reps = parse_uint("reps", value);
    } else if (key == "series_reps") {
        c.series_reps = parse_uint("series_reps", value);
    } else if (key == "window" || key == "m") {
        c.window = static_cast<int>(parse_uint("window", value));
    } else if (key == "m_grid") {
        c.m_grid = parse_list<std::size_t>("m_grid", value, parse_uint);
    } else if (key == "v_grid") {
        c.v_grid = parse_list<double>("v_grid", value, parse_double);
    } else if (key == "t_grid") {
        c.t_grid = parse_list<double>("t_grid", value, parse_double);
    } else if (key == "anchors") {
        c.anchors = parse_uint("anchors", value);
    } else if (key == "scaling") {
        c.scaling = unquote(trim(value));
    } else if (key == "output") {
        c.output = unquote(trim(value));
    } else if (key == "workers") {
        c.workers = static_cast<unsigned>(parse_uint("workers", value));
    } else {
        throw ValidationError("config: unknown key '" + key + "'");
    }
}

void apply_model_shorthand(ExperimentConfig& config, const std::string& text) {
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ValidationError("--model: expected key=value, got '" + item + "'");
        const std::string key = trim(item.substr(0, eq));
        const std::string value = trim(item.substr(eq + 1));
        if (key == "kind" || key == "a" || key == "alpha" || key == "lambda" || key == "sites" || key == "seed")
            apply_config_value(config, "model." + key, value);
        else
            throw ValidationError("--model: unknown model key '" + key + "'");
    }
}

void validate_config(const ExperimentConfig& c) {
    c.model.validate();
    RiskFunctional::from_name(c.risk, c.model.site_count());
    MarkFunctional::from_name(c.mark);
    for (const auto& name : c.test_functions) TestFunction::from_name(name);
    scaling_method_from_string(c.scaling);
    if (!(c.u > 0.0) || !std::isfinite(c.u)) throw ValidationError("u: must be finite and > 0");
    if (c.n == 0) throw ValidationError("n: must be >= 1");
    if (!(c.r_exponent > 0.0 && c.r_exponent < 1.0)) throw ValidationError("r_exponent: must lie in (0, 1)");
    if (c.reps == 0) throw ValidationError("reps: must be >= 1");
    if (c.series_reps == 0) throw ValidationError("series_reps: must be >= 1");
    if (c.test_functions.empty()) throw ValidationError("test_functions: must not be empty");
    for (std::size_t i = 1; i < c.n_grid.size(); ++i)
        if (c.n_grid[i] <= c.n_grid[i - 1]) throw ValidationError("n_grid: must be strictly increasing");
    for (std::size_t i = 1; i < c.m_grid.size(); ++i)
        if (c.m_grid[i] <= c.m_grid[i - 1]) throw ValidationError("m_grid: must be strictly increasing");
    for (double v : c.v_grid)
        if (!(v > 0.0 && v <= 1.0)) throw ValidationError("v_grid: values must lie in (0, 1]");
    for (double t : c.t_grid)
        if (!(t >= 0.0 && t <= 1.0)) throw ValidationError("t_grid: values must lie in [0, 1]");
    if (c.anchors == 0) throw ValidationError("anchors: must be >= 1");
    if (c.output.empty()) throw ValidationError("output: must not be empty");
}

std::map<std::string, std::string> canonical_config(const ExperimentConfig& c) {
    std::map<std::string, std::string> out;
    out["model.kind"] = to_string(c.model.kind);
    out["model.a"] = format_double(c.model.a);
    out["model.alpha"] = format_double(c.model.alpha);
    out["model.lambda"] = format_double(c.model.lambda);
    out["model.sites"] = join(c.model.sites);
    out["seed"] = std::to_string(c.model.seed);
    out["risk"] = c.risk;
    out["mark"] = c.mark;
    out["u"] = format_double(c.u);
    out["n"] = std::to_string(c.n);
    out["n_grid"] = join(c.n_grid);
    out["r_exponent"] = format_double(c.r_exponent);
    out["test_functions"] = join(c.test_functions);
    out["reps"] = std::to_string(c.reps);
    out["series_reps"] = std::to_string(c.series_reps);
    out["window"] = std::to_string(c.window);
    out["m_grid"] = join(c.m_grid);
    out["v_grid"] = join(c.v_grid);
    out["t_grid"] = join(c.t_grid);
    out["anchors"] = std::to_string(c.anchors);
    out["scaling"] = c.scaling;
    return out;
}

std::string config_hash(const ExperimentConfig& config) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const auto& [k, v] : canonical_config(config)) {
        for (char ch : k + "=" + v + "\n") {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

}  // namespace exlab
