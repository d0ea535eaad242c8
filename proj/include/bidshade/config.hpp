#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include "bidshade/campaign.hpp"
#include "bidshade/grid.hpp"

namespace bidshade {

// One campaign scenario. Defaults reproduce the built-in reference scenario:
// 10x10 grid on [0,1]x[0,3], eps = 0.8, h = 1, 17-day horizon at 720
// steps/day with the six-level budget schedule.
struct RunConfig {
    std::string scenario = "default";

    Interval theta1_range{0.0, 1.0};
    Interval theta2_range{0.0, 3.0};
    std::size_t grid_n1 = 10;
    std::size_t grid_n2 = 10;

    double epsilon = 0.8;
    double step_size = 1.0;  // proximal step h

    Schedule schedule = default_schedule();

    double learning_rate = 1e-3;
    double forgetting = 0.999;  // lambda
    double l2 = 1e-4;

    double gain = 0.05;
    double ema_alpha = 0.05;

    double sigma_w = 0.1;         // plant noise scale
    double valuation_std = 0.1;   // v_hat noise std

    std::uint64_t seed = 42;
    std::int64_t snapshot_every = 720;
    std::string out_dir = "default";
    bool redraw_attributes = false;

    std::size_t attribute_count = 5;

    std::int64_t total_steps() const { return schedule.total_steps(); }

    static Schedule default_schedule();
};

// Full validation with field-level messages; throws std::invalid_argument
// naming the offending key.
void validate_config(const RunConfig& config);

// Flat key = value config file. Unknown keys are rejected; parse errors
// report the line number; missing keys take the defaults above. Throws
// std::runtime_error / std::invalid_argument accordingly.
RunConfig load_config(const std::filesystem::path& path);
RunConfig parse_config(const std::string& text, const std::string& origin = "<string>");

// Serialization such that parse_config(write_config(c)) == c exactly.
std::string write_config(const RunConfig& config);

// Human-readable resolved-parameter listing (used by validate / --dry-run).
std::string describe_config(const RunConfig& config);

} // namespace bidshade
