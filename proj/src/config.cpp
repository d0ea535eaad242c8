#include "bidshade/config.hpp"

#include <cctype>
#include <cmath>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>

#include "bidshade/io.hpp"

namespace bidshade {

Schedule RunConfig::default_schedule() {
    Schedule s;
    s.pieces = {{72.0, 135.0}, {120.0, 300.0}, {216.0, 80.0},
                {288.0, 200.0}, {384.0, 130.0}, {408.0, 400.0}};
    s.steps_per_day = 720;
    s.horizon_hours = 408.0;
    return s;
}

namespace {

[[noreturn]] void config_error(const std::string& key, const std::string& what) {
    throw std::invalid_argument("config: " + key + ": " + what);
}

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const double v = std::strtod(value.c_str(), &end);
    if (end == value.c_str() || *end != '\0' || !std::isfinite(v))
        config_error(key, "not a finite number: '" + value + "'");
    return v;
}

std::int64_t parse_int(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const long long v = std::strtoll(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0')
        config_error(key, "not an integer: '" + value + "'");
    return v;
}

std::uint64_t parse_uint(const std::string& key, const std::string& value) {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(value.c_str(), &end, 10);
    if (end == value.c_str() || *end != '\0' || value.find('-') != std::string::npos)
        config_error(key, "not a nonnegative integer: '" + value + "'");
    return v;
}

bool parse_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    config_error(key, "not a boolean (true/false): '" + value + "'");
}

// "t_end:budget,t_end:budget,..." with strictly increasing t_end.
std::vector<SchedulePiece> parse_schedule(const std::string& key, const std::string& value) {
    std::vector<SchedulePiece> pieces;
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) config_error(key, "empty schedule entry");
        const std::size_t colon = item.find(':');
        if (colon == std::string::npos)
            config_error(key, "expected t_end:budget, got '" + item + "'");
        pieces.push_back({parse_double(key, trim(item.substr(0, colon))),
                          parse_double(key, trim(item.substr(colon + 1)))});
    }
    if (pieces.empty()) config_error(key, "empty schedule");
    return pieces;
}

std::string schedule_to_string(const std::vector<SchedulePiece>& pieces) {
    std::string out;
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        if (i) out += ',';
        out += fmt_double(pieces[i].t_end);
        out += ':';
        out += fmt_double(pieces[i].daily_budget);
    }
    return out;
}

} // namespace

void validate_config(const RunConfig& config) {
    if (config.scenario.empty()) config_error("scenario", "must not be empty");
    if (!(config.theta1_range.lo <= config.theta1_range.hi))
        config_error("theta1_min/theta1_max", "inverted bounds");
    if (!(config.theta2_range.lo <= config.theta2_range.hi))
        config_error("theta2_min/theta2_max", "inverted bounds");
    if (config.theta1_range.lo < 0.0 || config.theta1_range.hi > 1.0)
        config_error("theta1_min/theta1_max", "theta1 range must lie within [0, 1]");
    if (config.theta2_range.lo < 0.0)
        config_error("theta2_min", "theta2 must be >= 0");
    if (config.grid_n1 < 1) config_error("grid_n1", "must be >= 1");
    if (config.grid_n2 < 1) config_error("grid_n2", "must be >= 1");
    if (!(config.epsilon > 0.0)) config_error("epsilon", "must be > 0");
    if (!(config.step_size > 0.0)) config_error("step_size", "must be > 0");

    try {
        validate_schedule(config.schedule);
    } catch (const std::invalid_argument& e) {
        config_error("schedule", e.what());
    }
    const double steps = config.schedule.horizon_hours * config.schedule.steps_per_day / 24.0;
    if (std::abs(steps - std::llround(steps)) > 1e-9)
        config_error("horizon_hours", "horizon must be a whole number of steps");

    if (!(config.learning_rate > 0.0)) config_error("learning_rate", "must be > 0");
    if (!(config.forgetting > 0.0 && config.forgetting <= 1.0))
        config_error("forgetting", "must lie in (0, 1]");
    if (!(config.l2 >= 0.0)) config_error("l2", "must be >= 0");
    if (!(config.gain > 0.0)) config_error("gain", "must be > 0");
    if (!(config.ema_alpha > 0.0 && config.ema_alpha <= 1.0))
        config_error("ema_alpha", "must lie in (0, 1]");
    if (!(config.sigma_w >= 0.0)) config_error("sigma_w", "must be >= 0");
    if (!(config.valuation_std >= 0.0)) config_error("valuation_std", "must be >= 0");
    if (config.snapshot_every < 1) config_error("snapshot_every", "must be >= 1");
    if (config.out_dir.empty()) config_error("out_dir", "must not be empty");
    if (config.attribute_count < 1) config_error("attribute_count", "must be >= 1");
}

RunConfig parse_config(const std::string& text, const std::string& origin) {
    RunConfig config;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    std::map<std::string, bool> seen;

    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;

        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(origin + ":" + std::to_string(lineno) + ": empty key");
        if (seen.count(key))
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": duplicate key '" + key + "'");
        seen[key] = true;

        if (key == "scenario") config.scenario = value;
        else if (key == "theta1_min") config.theta1_range.lo = parse_double(key, value);
        else if (key == "theta1_max") config.theta1_range.hi = parse_double(key, value);
        else if (key == "theta2_min") config.theta2_range.lo = parse_double(key, value);
        else if (key == "theta2_max") config.theta2_range.hi = parse_double(key, value);
        else if (key == "grid_n1") config.grid_n1 = static_cast<std::size_t>(parse_uint(key, value));
        else if (key == "grid_n2") config.grid_n2 = static_cast<std::size_t>(parse_uint(key, value));
        else if (key == "epsilon") config.epsilon = parse_double(key, value);
        else if (key == "step_size") config.step_size = parse_double(key, value);
        else if (key == "schedule") config.schedule.pieces = parse_schedule(key, value);
        else if (key == "horizon_hours") config.schedule.horizon_hours = parse_double(key, value);
        else if (key == "steps_per_day")
            config.schedule.steps_per_day = static_cast<int>(parse_int(key, value));
        else if (key == "learning_rate") config.learning_rate = parse_double(key, value);
        else if (key == "forgetting") config.forgetting = parse_double(key, value);
        else if (key == "l2") config.l2 = parse_double(key, value);
        else if (key == "gain") config.gain = parse_double(key, value);
        else if (key == "ema_alpha") config.ema_alpha = parse_double(key, value);
        else if (key == "sigma_w") config.sigma_w = parse_double(key, value);
        else if (key == "valuation_std") config.valuation_std = parse_double(key, value);
        else if (key == "seed") config.seed = parse_uint(key, value);
        else if (key == "snapshot_every") config.snapshot_every = parse_int(key, value);
        else if (key == "out_dir") config.out_dir = value;
        else if (key == "redraw_attributes") config.redraw_attributes = parse_bool(key, value);
        else if (key == "attribute_count")
            config.attribute_count = static_cast<std::size_t>(parse_uint(key, value));
        else
            throw std::runtime_error(origin + ":" + std::to_string(lineno) +
                                     ": unknown key '" + key + "'");
    }

    validate_config(config);
    return config;
}

RunConfig load_config(const std::filesystem::path& path) {
    return parse_config(read_file(path), path.string());
}

std::string write_config(const RunConfig& config) {
    std::string out;
    auto kv = [&out](const std::string& key, const std::string& value) {
        out += key;
        out += " = ";
        out += value;
        out += '\n';
    };
    kv("scenario", config.scenario);
    kv("theta1_min", fmt_double(config.theta1_range.lo));
    kv("theta1_max", fmt_double(config.theta1_range.hi));
    kv("theta2_min", fmt_double(config.theta2_range.lo));
    kv("theta2_max", fmt_double(config.theta2_range.hi));
    kv("grid_n1", std::to_string(config.grid_n1));
    kv("grid_n2", std::to_string(config.grid_n2));
    kv("epsilon", fmt_double(config.epsilon));
    kv("step_size", fmt_double(config.step_size));
    kv("schedule", schedule_to_string(config.schedule.pieces));
    kv("horizon_hours", fmt_double(config.schedule.horizon_hours));
    kv("steps_per_day", std::to_string(config.schedule.steps_per_day));
    kv("learning_rate", fmt_double(config.learning_rate));
    kv("forgetting", fmt_double(config.forgetting));
    kv("l2", fmt_double(config.l2));
    kv("gain", fmt_double(config.gain));
    kv("ema_alpha", fmt_double(config.ema_alpha));
    kv("sigma_w", fmt_double(config.sigma_w));
    kv("valuation_std", fmt_double(config.valuation_std));
    kv("seed", std::to_string(config.seed));
    kv("snapshot_every", std::to_string(config.snapshot_every));
    kv("out_dir", config.out_dir);
    kv("redraw_attributes", config.redraw_attributes ? "true" : "false");
    kv("attribute_count", std::to_string(config.attribute_count));
    return out;
}

std::string describe_config(const RunConfig& config) {
    std::string out = "resolved configuration:\n";
    std::istringstream in(write_config(config));
    std::string line;
    while (std::getline(in, line)) out += "  " + line + "\n";
    out += "  total_steps = " + std::to_string(config.total_steps()) + "\n";
    out += "  grid_points = " + std::to_string(config.grid_n1 * config.grid_n2) + "\n";
    return out;
}

} // namespace bidshade
