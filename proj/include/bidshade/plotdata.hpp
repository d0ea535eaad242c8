#pragma once

#include <filesystem>
#include <string>

namespace bidshade {

// Figure-data extraction from a completed run directory. Each function is a
// pure function of the run files and returns a CSV string.

// "t_hours,bid" per step.
std::string plot_bids(const std::filesystem::path& run_dir);

// Long format "k,theta1,theta2,weight" over all snapshots, ordered by k.
std::string plot_distribution(const std::filesystem::path& run_dir);

// "day,target,actual" per campaign day.
std::string plot_daily_spend(const std::filesystem::path& run_dir);

// "t_hours,cumulative_target,cumulative_actual" per step.
std::string plot_cumulative_spend(const std::filesystem::path& run_dir);

// Dispatch by figure name: bids | distribution | daily_spend |
// cumulative_spend. Throws std::invalid_argument for unknown names and
// std::runtime_error for missing/truncated run files.
std::string plot_figure(const std::filesystem::path& run_dir, const std::string& figure);

} // namespace bidshade
