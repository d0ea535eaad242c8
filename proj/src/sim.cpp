#include "bidshade/sim.hpp"

#include <cmath>
#include <stdexcept>

#include "bidshade/energy.hpp"
#include "bidshade/io.hpp"
#include "bidshade/shading.hpp"
#include "bidshade/wprox.hpp"

namespace bidshade {

double true_win_prob(double bid) {
    if (!(bid >= 0.0))
        throw std::invalid_argument("true_win_prob: bid must be >= 0");
    // Standard normal CDF of sin(bid).
    return 0.5 * std::erfc(-std::sin(bid) / 1.4142135623730950488016887242097);
}

int observe_with_draw(double bid, double uniform01) {
    return uniform01 < true_win_prob(bid) ? 1 : 0;
}

int observe(double bid, Rng& rng) {
    return observe_with_draw(bid, rng.uniform01());
}

namespace {

constexpr double kRunSimplexTol = 1e-10;

std::vector<double> draw_attributes(Rng& rng, std::size_t count) {
    std::vector<double> a(count);
    for (double& ai : a) ai = rng.uniform01();
    return a;
}

} // namespace

RunResult run_campaign(const RunConfig& config) {
    validate_config(config);

    const ParameterGrid grid = build_grid(config.theta1_range, config.theta2_range,
                                          config.grid_n1, config.grid_n2, config.epsilon);
    const ProximalConfig prox{config.step_size, config.epsilon};
    const Schedule& schedule = config.schedule;
    const int t_day = schedule.steps_per_day;
    const double step_hours = schedule.step_hours();
    const std::int64_t total = schedule.total_steps();

    RngStreams streams(config.seed);
    std::vector<double> attributes = draw_attributes(streams.attributes,
                                                     config.attribute_count);

    ShadingDistribution mu = uniform_distribution(grid);
    WinModel model(config.attribute_count);
    CampaignState state;
    state.u = 1.0;
    // Start the controller on-target; the EMA takes over as spend arrives.
    if (total > 0) state.spend_ema = budget_at(schedule, step_hours) / t_day;

    RunResult result;
    result.records.reserve(static_cast<std::size_t>(total));
    result.attributes = attributes;
    result.snapshots.push_back({0, mu.weights()});
    result.model_checkpoints.push_back({0, model});

    std::int64_t wins = 0;

    for (std::int64_t k = 1; k <= total; ++k) {
        const double t_hours = static_cast<double>(k) * step_hours;
        const double setpoint = budget_at(schedule, t_hours) / t_day;

        if (config.redraw_attributes)
            attributes = draw_attributes(streams.attributes, config.attribute_count);

        const SampledParameters theta = sample_parameters(mu, grid, streams.sampling);

        const double v_hat = estimate_value(state.u, streams.valuation,
                                            config.valuation_std);
        const double b_u = unshaded_bid(state.u, v_hat);
        const double bid = shade_bid(theta.theta1, theta.theta2, BidRequest{b_u, attributes});
        const double model_bid = std::max(bid, kBidFloor);
        const double f_hat = predict_win(model, attributes, model_bid);

        const int outcome = observe(bid, streams.market);
        const double spend = plant_spend(bid, outcome, k, t_day, streams.plant,
                                         config.sigma_w);
        const double surplus = realized_surplus(v_hat, bid, outcome);

        model = update_model(model, Observation{attributes, model_bid, outcome, k},
                             config.learning_rate, config.forgetting, config.l2);

        const EnergyContext ctx{attributes, v_hat, b_u, &model};
        const std::vector<double> r = r_vector(ctx, grid);
        ShadingDistribution mu_next = proximal_update(mu, r, grid, prox);
        const double simplex_err = mu_next.simplex_error();
        if (simplex_err > result.max_simplex_error) result.max_simplex_error = simplex_err;
        if (simplex_err > kRunSimplexTol)
            throw std::runtime_error("run_campaign: simplex validation failed at step " +
                                     std::to_string(k));
        mu = mu_next.normalized();

        // Pacing is gated off while the plant cannot respond (seasonality
        // factor at or below zero forces zero spend); updating the integrator
        // there only winds it up.
        if (1.0 + seasonality(k, t_day) > 0.0)
            state = pace_control(state, spend, setpoint, config.gain, config.ema_alpha);

        state.step = k;
        state.cumulative_spend += spend;
        state.cumulative_target += setpoint;

        result.records.push_back({k, t_hours, theta.theta1, theta.theta2, theta.index,
                                  v_hat, b_u, bid, f_hat, outcome, spend, surplus,
                                  state.u, energy_value(mu, r)});
        wins += outcome;

        if (config.snapshot_every > 0 && k % config.snapshot_every == 0) {
            result.snapshots.push_back({k, mu.weights()});
            result.model_checkpoints.push_back({k, model});
        }
    }

    result.final_weights = mu.weights();
    result.summary.steps = total;
    result.summary.total_spend = state.cumulative_spend;
    double total_surplus = 0.0;
    for (const AuctionRecord& rec : result.records) total_surplus += rec.surplus;
    result.summary.total_surplus = total_surplus;
    result.summary.win_rate =
        total > 0 ? static_cast<double>(wins) / static_cast<double>(total) : 0.0;
    result.summary.final_entropy = mu.entropy();
    return result;
}

std::string timeseries_csv(const RunResult& result) {
    std::string out =
        "k,t_hours,theta1,theta2,v_hat,b_u,bid,f_hat,outcome,spend,surplus,u,energy\n";
    for (const AuctionRecord& rec : result.records) {
        out += std::to_string(rec.k);
        out += ',';
        out += fmt_double(rec.t_hours);
        out += ',';
        out += fmt_double(rec.theta1);
        out += ',';
        out += fmt_double(rec.theta2);
        out += ',';
        out += fmt_double(rec.v_hat);
        out += ',';
        out += fmt_double(rec.b_u);
        out += ',';
        out += fmt_double(rec.bid);
        out += ',';
        out += fmt_double(rec.f_hat);
        out += ',';
        out += std::to_string(rec.outcome);
        out += ',';
        out += fmt_double(rec.spend);
        out += ',';
        out += fmt_double(rec.surplus);
        out += ',';
        out += fmt_double(rec.u);
        out += ',';
        out += fmt_double(rec.energy);
        out += '\n';
    }
    return out;
}

std::string summary_csv(const RunResult& result) {
    std::string out = "total_spend,total_surplus,win_rate,final_entropy,steps\n";
    out += fmt_double(result.summary.total_spend);
    out += ',';
    out += fmt_double(result.summary.total_surplus);
    out += ',';
    out += fmt_double(result.summary.win_rate);
    out += ',';
    out += fmt_double(result.summary.final_entropy);
    out += ',';
    out += std::to_string(result.summary.steps);
    out += '\n';
    return out;
}

void write_run_outputs(const RunResult& result, const ParameterGrid& grid,
                       const RunConfig& config, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec || !std::filesystem::is_directory(out_dir))
        throw std::runtime_error("cannot create output directory: " + out_dir.string());

    atomic_write_file(out_dir / "timeseries.csv", timeseries_csv(result));
    for (const DistributionSnapshot& snap : result.snapshots) {
        const auto dist = ShadingDistribution::from_weights(snap.weights, 1e-9);
        atomic_write_file(out_dir / ("dist_" + std::to_string(snap.k) + ".csv"),
                          snapshot_csv(grid, dist));
    }
    for (const ModelCheckpoint& ckpt : result.model_checkpoints)
        atomic_write_file(out_dir / ("model_" + std::to_string(ckpt.k) + ".csv"),
                          model_checkpoint_line(ckpt.model));
    atomic_write_file(out_dir / "summary.csv", summary_csv(result));
    atomic_write_file(out_dir / "config_resolved.cfg", write_config(config));
}

} // namespace bidshade
