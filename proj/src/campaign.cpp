#include "bidshade/campaign.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace bidshade {

std::int64_t Schedule::total_steps() const {
    // horizon_hours * steps_per_day / 24, validated to be integral.
    const double steps = horizon_hours * steps_per_day / 24.0;
    return static_cast<std::int64_t>(std::llround(steps));
}

void validate_schedule(const Schedule& schedule) {
    if (schedule.pieces.empty())
        throw std::invalid_argument("schedule: needs at least one piece");
    if (schedule.steps_per_day <= 0)
        throw std::invalid_argument("schedule: steps_per_day must be > 0");
    if (!(schedule.horizon_hours >= 0.0))
        throw std::invalid_argument("schedule: horizon must be >= 0");
    double prev = 0.0;
    for (const SchedulePiece& piece : schedule.pieces) {
        if (!(piece.t_end > prev))
            throw std::invalid_argument("schedule: piece boundaries must be strictly increasing");
        if (!(piece.daily_budget > 0.0))
            throw std::invalid_argument("schedule: daily budgets must be > 0");
        prev = piece.t_end;
    }
    if (prev < schedule.horizon_hours)
        throw std::invalid_argument("schedule: does not cover the horizon");
}

double budget_at(const Schedule& schedule, double t_hours) {
    if (!(t_hours >= 0.0) || t_hours > schedule.horizon_hours)
        throw std::out_of_range("budget_at: t outside [0, horizon]");
    for (const SchedulePiece& piece : schedule.pieces)
        if (t_hours <= piece.t_end) return piece.daily_budget;
    // validate_schedule guarantees coverage; unreachable for valid schedules.
    throw std::out_of_range("budget_at: schedule does not cover t");
}

double seasonality(std::int64_t t_step, int steps_per_day) {
    if (steps_per_day <= 0)
        throw std::invalid_argument("seasonality: steps_per_day must be > 0");
    std::int64_t t = t_step % steps_per_day;  // makes the period exact
    if (t < 0) t += steps_per_day;
    const double phase = 2.0 * 3.141592653589793238462643383280 *
                         static_cast<double>(t) / static_cast<double>(steps_per_day);
    return std::sin(phase - 1.6) + 0.32 * std::sin(2.0 * phase - 1.5);
}

double estimate_value(double control_u, double noise) {
    if (!(control_u > 0.0))
        throw std::invalid_argument("estimate_value: control must be > 0");
    return std::max(0.0, control_u + noise);
}

double estimate_value(double control_u, Rng& rng, double noise_std) {
    return estimate_value(control_u, noise_std * rng.gaussian());
}

double plant_spend(double bid, int won, std::int64_t t_step, int steps_per_day,
                   double noise_w) {
    if (!(bid >= 0.0))
        throw std::invalid_argument("plant_spend: bid must be >= 0");
    if (won != 0 && won != 1)
        throw std::invalid_argument("plant_spend: won must be 0 or 1");
    const double spend =
        (1.0 + seasonality(t_step, steps_per_day)) * bid * won * (1.0 + noise_w);
    return std::max(0.0, spend);
}

double plant_spend(double bid, int won, std::int64_t t_step, int steps_per_day,
                   Rng& rng, double sigma_w) {
    return plant_spend(bid, won, t_step, steps_per_day, sigma_w * rng.gaussian());
}

CampaignState pace_control(const CampaignState& state, double observed_spend,
                           double setpoint, double gain, double ema_alpha) {
    if (!(setpoint > 0.0))
        throw std::invalid_argument("pace_control: setpoint must be > 0");
    if (!(gain > 0.0))
        throw std::invalid_argument("pace_control: gain must be > 0");
    if (!(ema_alpha > 0.0 && ema_alpha <= 1.0))
        throw std::invalid_argument("pace_control: ema_alpha must lie in (0, 1]");
    if (!(observed_spend >= 0.0))
        throw std::invalid_argument("pace_control: observed spend must be >= 0");

    CampaignState next = state;
    next.spend_ema = (1.0 - ema_alpha) * state.spend_ema + ema_alpha * observed_spend;
    const double error = (setpoint - next.spend_ema) / setpoint;
    next.u = std::clamp(state.u * std::exp(gain * error), CampaignState::kUMin,
                        CampaignState::kUMax);
    return next;
}

} // namespace bidshade
