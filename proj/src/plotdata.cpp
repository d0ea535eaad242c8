#include "bidshade/plotdata.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "bidshade/campaign.hpp"
#include "bidshade/config.hpp"
#include "bidshade/io.hpp"

namespace bidshade {

namespace {

CsvTable load_timeseries(const std::filesystem::path& run_dir) {
    const auto path = run_dir / "timeseries.csv";
    return parse_csv(read_file(path), path.string());
}

RunConfig load_resolved_config(const std::filesystem::path& run_dir) {
    const auto path = run_dir / "config_resolved.cfg";
    return load_config(path);
}

} // namespace

std::string plot_bids(const std::filesystem::path& run_dir) {
    const CsvTable ts = load_timeseries(run_dir);
    const std::size_t c_t = ts.column("t_hours");
    const std::size_t c_bid = ts.column("bid");
    std::string out = "t_hours,bid\n";
    for (const auto& row : ts.rows) {
        out += fmt_double(row[c_t]);
        out += ',';
        out += fmt_double(row[c_bid]);
        out += '\n';
    }
    return out;
}

std::string plot_distribution(const std::filesystem::path& run_dir) {
    // Collect dist_<k>.csv snapshots, ordered by k.
    std::vector<std::int64_t> ks;
    for (const auto& entry : std::filesystem::directory_iterator(run_dir)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("dist_", 0) == 0 && name.size() > 9 &&
            name.substr(name.size() - 4) == ".csv")
            ks.push_back(std::stoll(name.substr(5, name.size() - 9)));
    }
    if (ks.empty())
        throw std::runtime_error("plotdata: no distribution snapshots in " + run_dir.string());
    std::sort(ks.begin(), ks.end());

    std::string out = "k,theta1,theta2,weight\n";
    for (std::int64_t k : ks) {
        const auto path = run_dir / ("dist_" + std::to_string(k) + ".csv");
        const CsvTable snap = parse_csv(read_file(path), path.string());
        const std::size_t c1 = snap.column("theta1");
        const std::size_t c2 = snap.column("theta2");
        const std::size_t cw = snap.column("weight");
        for (const auto& row : snap.rows) {
            out += std::to_string(k);
            out += ',';
            out += fmt_double(row[c1]);
            out += ',';
            out += fmt_double(row[c2]);
            out += ',';
            out += fmt_double(row[cw]);
            out += '\n';
        }
    }
    return out;
}

std::string plot_daily_spend(const std::filesystem::path& run_dir) {
    const CsvTable ts = load_timeseries(run_dir);
    const RunConfig config = load_resolved_config(run_dir);
    const Schedule& schedule = config.schedule;
    const int t_day = schedule.steps_per_day;
    const std::size_t c_k = ts.column("k");
    const std::size_t c_spend = ts.column("spend");

    // Day d covers steps (d-1)*T_day + 1 .. d*T_day.
    std::vector<double> actual;
    std::vector<double> target;
    for (const auto& row : ts.rows) {
        const std::int64_t k = static_cast<std::int64_t>(row[c_k]);
        const std::size_t day = static_cast<std::size_t>((k - 1) / t_day);
        if (day >= actual.size()) {
            actual.resize(day + 1, 0.0);
            target.resize(day + 1, 0.0);
        }
        actual[day] += row[c_spend];
        target[day] += budget_at(schedule, static_cast<double>(k) * schedule.step_hours()) /
                       t_day;
    }

    std::string out = "day,target,actual\n";
    for (std::size_t d = 0; d < actual.size(); ++d) {
        out += std::to_string(d + 1);
        out += ',';
        out += fmt_double(target[d]);
        out += ',';
        out += fmt_double(actual[d]);
        out += '\n';
    }
    return out;
}

std::string plot_cumulative_spend(const std::filesystem::path& run_dir) {
    const CsvTable ts = load_timeseries(run_dir);
    const RunConfig config = load_resolved_config(run_dir);
    const Schedule& schedule = config.schedule;
    const std::size_t c_k = ts.column("k");
    const std::size_t c_t = ts.column("t_hours");
    const std::size_t c_spend = ts.column("spend");

    std::string out = "t_hours,cumulative_target,cumulative_actual\n";
    double cum_target = 0.0;
    double cum_actual = 0.0;
    for (const auto& row : ts.rows) {
        const std::int64_t k = static_cast<std::int64_t>(row[c_k]);
        cum_target += budget_at(schedule, static_cast<double>(k) * schedule.step_hours()) /
                      schedule.steps_per_day;
        cum_actual += row[c_spend];
        out += fmt_double(row[c_t]);
        out += ',';
        out += fmt_double(cum_target);
        out += ',';
        out += fmt_double(cum_actual);
        out += '\n';
    }
    return out;
}

std::string plot_figure(const std::filesystem::path& run_dir, const std::string& figure) {
    if (figure == "bids") return plot_bids(run_dir);
    if (figure == "distribution") return plot_distribution(run_dir);
    if (figure == "daily_spend") return plot_daily_spend(run_dir);
    if (figure == "cumulative_spend") return plot_cumulative_spend(run_dir);
    throw std::invalid_argument(
        "plotdata: unknown figure '" + figure +
        "' (expected bids | distribution | daily_spend | cumulative_spend)");
}

} // namespace bidshade
