#pragma once

#include <cstdint>
#include <vector>

#include "bidshade/rng.hpp"

namespace bidshade {

// Piecewise-constant daily budget schedule with right-closed pieces:
// budget_at(t) is entries[i].daily_budget for the first i with t <= t_end.
struct SchedulePiece {
    double t_end;         // hours
    double daily_budget;  // currency/day
};

struct Schedule {
    std::vector<SchedulePiece> pieces;  // strictly increasing t_end
    int steps_per_day;                  // T_day
    double horizon_hours;

    double step_hours() const { return 24.0 / steps_per_day; }
    std::int64_t total_steps() const;
};

// Throws std::invalid_argument on non-increasing pieces, nonpositive
// budgets, or a schedule that does not cover the horizon.
void validate_schedule(const Schedule& schedule);

// Piecewise-constant lookup; throws std::out_of_range for t outside
// [0, horizon].
double budget_at(const Schedule& schedule, double t_hours);

// Seasonal modulation h(t) = sin(2 pi t/T - 1.6) + 0.32 sin(4 pi t/T - 1.5)
// with t in steps. t is reduced mod T_day first, making the period exact.
double seasonality(std::int64_t t_step, int steps_per_day);

// Estimated impression value v_hat = max(0, u + noise).
double estimate_value(double control_u, double noise);
double estimate_value(double control_u, Rng& rng, double noise_std);

// Observed spend (1 + h(t)) * bid * won * (1 + w), clamped at 0.
double plant_spend(double bid, int won, std::int64_t t_step, int steps_per_day,
                   double noise_w);
double plant_spend(double bid, int won, std::int64_t t_step, int steps_per_day,
                   Rng& rng, double sigma_w);

// Pacing control signal and spend accounting along the campaign.
struct CampaignState {
    double u = 1.0;  // control signal, kept in [kUMin, kUMax]
    std::int64_t step = 0;
    double cumulative_spend = 0.0;
    double cumulative_target = 0.0;
    double spend_ema = 0.0;

    static constexpr double kUMin = 1e-4;
    static constexpr double kUMax = 1e4;
};

// Multiplicative-integral pacing: updates the spend EMA with the observed
// spend y, then scales u by exp(gain * (setpoint - ema)/setpoint), clipped
// into [kUMin, kUMax]. Throws std::invalid_argument on setpoint <= 0.
CampaignState pace_control(const CampaignState& state, double observed_spend,
                           double setpoint, double gain, double ema_alpha = 0.05);

} // namespace bidshade
