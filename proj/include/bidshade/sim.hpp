#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "bidshade/campaign.hpp"
#include "bidshade/config.hpp"
#include "bidshade/grid.hpp"
#include "bidshade/rng.hpp"
#include "bidshade/winmodel.hpp"

namespace bidshade {

// Ground-truth market win law: P(win | bid) = NormalCDF(sin(bid)).
double true_win_prob(double bid);

// Binary outcome: 1 iff the uniform draw falls below true_win_prob(bid).
int observe_with_draw(double bid, double uniform01);
int observe(double bid, Rng& rng);

// Everything recorded about one auction step.
struct AuctionRecord {
    std::int64_t k;
    double t_hours;
    double theta1;
    double theta2;
    std::size_t grid_index;
    double v_hat;
    double b_u;
    double bid;
    double f_hat;  // model's win-probability estimate at bid time
    int outcome;
    double spend;
    double surplus;
    double u;       // control signal used for this auction
    double energy;  // <r^k, mu^k>
};

struct DistributionSnapshot {
    std::int64_t k;
    std::vector<double> weights;
};

struct ModelCheckpoint {
    std::int64_t k;
    WinModel model;
};

struct RunSummary {
    double total_spend = 0.0;
    double total_surplus = 0.0;
    double win_rate = 0.0;
    double final_entropy = 0.0;
    std::int64_t steps = 0;
};

struct RunResult {
    std::vector<AuctionRecord> records;
    std::vector<DistributionSnapshot> snapshots;
    std::vector<ModelCheckpoint> model_checkpoints;
    RunSummary summary;
    std::vector<double> attributes;     // campaign attribute vector
    std::vector<double> final_weights;  // mu at the horizon
    double max_simplex_error = 0.0;     // worst per-step validation error
};

// Closed-loop campaign: per step, sample shading parameters from the current
// distribution, bid, observe the market outcome, take one win-model step,
// rebuild the energy vector and apply the proximal update, then pace the
// spend controller. Deterministic given config.seed. Throws on the first
// step whose distribution fails simplex validation at 1e-10.
RunResult run_campaign(const RunConfig& config);

// CSV renderings (17 significant digits, '\n' line endings).
std::string timeseries_csv(const RunResult& result);
std::string summary_csv(const RunResult& result);

// Writes timeseries.csv, dist_<k>.csv / model_<k>.csv per snapshot,
// summary.csv, and config_resolved.cfg into out_dir (each file atomically:
// temp + rename). Creates out_dir if needed.
void write_run_outputs(const RunResult& result, const ParameterGrid& grid,
                       const RunConfig& config, const std::filesystem::path& out_dir);

} // namespace bidshade
