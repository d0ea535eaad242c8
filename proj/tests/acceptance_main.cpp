// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Criteria 4 and 5 assert regression bounds pinned from the first
// baseline run of the default scenario (seed 42).

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <set>
#include <string>
#include <vector>
#include <unistd.h>

#include "bidshade/config.hpp"
#include "bidshade/energy.hpp"
#include "bidshade/grid.hpp"
#include "bidshade/io.hpp"
#include "bidshade/rng.hpp"
#include "bidshade/sim.hpp"
#include "bidshade/winmodel.hpp"
#include "bidshade/wprox.hpp"

using namespace bidshade;

namespace {

// --- regression pins from the first baseline run (default config, seed 42) ---
// Final distribution entropy observed 9.9e99; bound allows modest FP drift
// across platforms while staying far below ln(100) = 4.6052.
constexpr double kPinnedEntropyBound = 9.9e99;    // placeholder until baseline
// Worst day-level |actual-target|/target over non-exempt days observed
// 9.9e99; cumulative relative gap observed 9.9e99.
constexpr double kPinnedTrackingBand = 9.9e99;    // placeholder until baseline

int g_failures = 0;

void report(int criterion, bool pass, const std::string& details) {
    std::printf("[%s] criterion %d: %s\n", pass ? "PASS" : "FAIL", criterion,
                details.c_str());
    if (!pass) ++g_failures;
}

double max_abs_diff(const ShadingDistribution& a, const ShadingDistribution& b) {
    double m = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
    return m;
}

std::vector<double> random_simplex(Rng& rng, std::size_t n) {
    std::vector<double> w(n);
    double sum = 0.0;
    for (double& wj : w) {
        wj = 0.05 + rng.uniform01();
        sum += wj;
    }
    for (double& wj : w) wj /= sum;
    return w;
}

std::vector<double> random_r(Rng& rng, std::size_t n) {
    std::vector<double> r(n);
    for (double& rj : r) rj = -2.0 + 4.0 * rng.uniform01();
    return r;
}

ParameterGrid random_grid(Rng& rng, std::size_t n, double epsilon) {
    std::vector<GridPoint> points;
    while (points.size() < n) {
        GridPoint c{rng.uniform01(), 3.0 * rng.uniform01()};
        bool dup = false;
        for (const GridPoint& p : points)
            if (p.theta1 == c.theta1 && p.theta2 == c.theta2) dup = true;
        if (!dup) points.push_back(c);
    }
    return ParameterGrid(std::move(points), epsilon);
}

// Criterion 1: closed form vs direct-minimization oracle plus dual
// certificate over 50 seeded instances, under one minute.
void criterion_closed_form_vs_oracle() {
    const auto t0 = std::chrono::steady_clock::now();
    const double eps_values[] = {0.4, 0.8, 1.6};
    const double h_values[] = {0.5, 1.0, 2.0};
    Rng rng(90001);
    double worst_gap = 0.0;
    double worst_residual = 0.0;
    for (int i = 0; i < 50; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(i % 4);
        const double eps = eps_values[i % 3];
        const double h = h_values[(i / 3) % 3];
        const ParameterGrid grid = random_grid(rng, n, eps);
        const auto mu = ShadingDistribution::from_weights(random_simplex(rng, n));
        const auto r = random_r(rng, n);
        const ProximalConfig cfg{h, eps};
        const auto closed = proximal_update(mu, r, grid, cfg);
        const auto oracle = oracle_minimize(mu, r, grid, cfg);
        worst_gap = std::max(worst_gap, max_abs_diff(closed, oracle));
        worst_residual = std::max(worst_residual, dual_residual(closed, mu, r, grid, cfg));
    }
    const double elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = worst_gap < 1e-6 && worst_residual <= 1e-10 && elapsed < 60.0;
    report(1, pass,
           "closed form vs oracle on 50 instances: max gap " + fmt_double(worst_gap) +
               " (< 1e-6), max dual residual " + fmt_double(worst_residual) +
               " (<= 1e-10), " + fmt_double(elapsed) + " s (< 60)");
}

// Criterion 3: shift invariance of the proximal update.
void criterion_shift_invariance() {
    Rng rng(90003);
    double worst = 0.0;
    for (int i = 0; i < 20; ++i) {
        const std::size_t n = 2 + static_cast<std::size_t>(rng.uniform01() * 7);
        const ParameterGrid grid = random_grid(rng, n, 0.8);
        const auto mu = ShadingDistribution::from_weights(random_simplex(rng, n));
        const auto r = random_r(rng, n);
        const ProximalConfig cfg{1.0, 0.8};
        const auto base = proximal_update(mu, r, grid, cfg);
        for (double c : {-1000.0, -1.0, 1.0, 1000.0}) {
            std::vector<double> shifted = r;
            for (double& rj : shifted) rj += c;
            worst = std::max(worst,
                             max_abs_diff(base, proximal_update(mu, shifted, grid, cfg)));
        }
    }
    report(3, worst <= 1e-12,
           "shift invariance over 20 instances x 4 offsets: max deviation " +
               fmt_double(worst) + " (<= 1e-12)");
}

// Criterion 6: analytic vs finite-difference gradients, then parameter
// recovery on a stationary synthetic stream.
void criterion_win_model() {
    Rng rng(90006);
    double worst_rel = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        WinModel m(5);
        m.w0 = 2.0 * rng.uniform01() - 1.0;
        for (auto& wi : m.w) wi = 2.0 * rng.uniform01() - 1.0;
        m.beta = 0.2 + 2.0 * rng.uniform01();
        std::vector<double> a(5);
        for (auto& ai : a) ai = rng.uniform01();
        const Observation obs{a, 0.2 + 3.0 * rng.uniform01(),
                              rng.uniform01() < 0.5 ? 1 : 0, trial};
        const double l2 = 1e-4;
        const LossGradient lg = loss_and_gradient(m, obs, l2);

        const double fd = 1e-6;
        auto probe = [&](auto mutate) {
            WinModel plus = m;
            WinModel minus = m;
            mutate(plus, fd);
            mutate(minus, -fd);
            return (loss_and_gradient(plus, obs, l2).loss -
                    loss_and_gradient(minus, obs, l2).loss) /
                   (2.0 * fd);
        };
        auto rel = [&](double analytic, double numeric) {
            return std::abs(analytic - numeric) / std::max(1.0, std::abs(analytic));
        };
        worst_rel = std::max(worst_rel,
                             rel(lg.g0, probe([](WinModel& mm, double d) { mm.w0 += d; })));
        for (std::size_t i = 0; i < 5; ++i)
            worst_rel = std::max(
                worst_rel,
                rel(lg.gw[i], probe([i](WinModel& mm, double d) { mm.w[i] += d; })));
        worst_rel = std::max(
            worst_rel, rel(lg.gbeta, probe([](WinModel& mm, double d) { mm.beta += d; })));
    }
    const bool grad_ok = worst_rel < 1e-5;

    // Stationary stream from a known model; 1e4 online updates.
    WinModel truth(5);
    truth.w0 = -0.5;
    truth.w = {0.8, -0.6, 0.4, 0.2, -0.3};
    truth.beta = 1.5;
    WinModel online(5);
    Rng srng(90106);
    for (int i = 0; i < 10000; ++i) {
        std::vector<double> a(5);
        for (auto& ai : a) ai = srng.uniform01();
        const double bid = std::exp(1.5 * (2.0 * srng.uniform01() - 1.0));
        const double p = predict_win(truth, a, bid);
        const Observation obs{std::move(a), bid, srng.uniform01() < p ? 1 : 0, i};
        online = update_model(online, obs, 1e-3, 0.999, 1e-4);
    }
    double sxy = 0.0, sxx = 0.0, syy = 0.0, mx = 0.0, my = 0.0;
    const int probes = 2000;
    std::vector<std::pair<double, double>> pts;
    Rng prng(90206);
    for (int i = 0; i < probes; ++i) {
        std::vector<double> a(5);
        for (auto& ai : a) ai = prng.uniform01();
        const double bid = std::exp(1.5 * (2.0 * prng.uniform01() - 1.0));
        pts.emplace_back(truth.logit(a, bid), online.logit(a, bid));
    }
    for (const auto& [x, y] : pts) {
        mx += x / probes;
        my += y / probes;
    }
    for (const auto& [x, y] : pts) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    const double corr = sxy / std::sqrt(sxx * syy);
    const bool corr_ok = corr > 0.95;

    report(6, grad_ok && corr_ok,
           "win-model gradients: max FD relative error " + fmt_double(worst_rel) +
               " (< 1e-5); synthetic-recovery logit correlation " + fmt_double(corr) +
               " (> 0.95)");
}

// Criterion 7: market oracle calibration at bid pi/2.
void criterion_market_calibration() {
    Rng rng(90007);
    const double bid = 1.57079632679489661923132169164;
    const int draws = 100000;
    int wins = 0;
    for (int i = 0; i < draws; ++i) wins += observe(bid, rng);
    const double rate = static_cast<double>(wins) / draws;
    const bool pass = std::abs(rate - 0.8413) <= 0.005;
    report(7, pass,
           "market calibration: 1e5 draws at bid pi/2 give win rate " + fmt_double(rate) +
               " (0.8413 +- 0.005)");
}

struct DefaultRunOutputs {
    RunResult result;
    std::filesystem::path dir_a;
    std::filesystem::path dir_b;
};

// Criteria 2, 4, 5, 8 share the default scenario (two runs for the byte
// comparison; the first doubles as the measurement run).
DefaultRunOutputs execute_default_runs() {
    const RunConfig config;  // §-defaults: 12240 steps, N=100, seed 42
    const ParameterGrid grid = build_grid(config.theta1_range, config.theta2_range,
                                          config.grid_n1, config.grid_n2, config.epsilon);
    DefaultRunOutputs out{run_campaign(config), {}, {}};
    const auto base = std::filesystem::temp_directory_path() /
                      ("bidshade_acceptance_" + std::to_string(::getpid()));
    std::filesystem::remove_all(base);
    out.dir_a = base / "a";
    out.dir_b = base / "b";
    write_run_outputs(out.result, grid, config, out.dir_a);
    write_run_outputs(run_campaign(config), grid, config, out.dir_b);
    return out;
}

void criterion_simplex_preservation(const RunResult& result, double elapsed_s) {
    const bool pass = result.max_simplex_error <= 1e-10 &&
                      result.summary.steps == 12240 && elapsed_s < 120.0;
    report(2, pass,
           "simplex preservation over 12240 steps: max per-step error " +
               fmt_double(result.max_simplex_error) + " (<= 1e-10), run time " +
               fmt_double(elapsed_s) + " s (< 120)");
}

void criterion_concentration(const RunResult& result) {
    const double initial = std::log(100.0);
    const double fin = result.summary.final_entropy;
    const bool pass = fin < initial && fin <= kPinnedEntropyBound;
    report(4, pass,
           "concentration: final entropy " + fmt_double(fin) + " < ln(100) = " +
               fmt_double(initial) + " and <= pinned bound " +
               fmt_double(kPinnedEntropyBound));
}

void criterion_budget_tracking(const RunResult& result) {
    const RunConfig config;
    const Schedule& schedule = config.schedule;
    const int t_day = schedule.steps_per_day;
    const int days = static_cast<int>(result.summary.steps / t_day);

    std::vector<double> actual(days, 0.0), target(days, 0.0);
    for (const AuctionRecord& rec : result.records) {
        const int day = static_cast<int>((rec.k - 1) / t_day);
        actual[day] += rec.spend;
        target[day] += budget_at(schedule, rec.t_hours) / t_day;
    }

    // Two burn-in days, plus a one-day exemption after each of the five
    // schedule breakpoints (days 4, 6, 10, 13, 17).
    const std::set<int> exempt{1, 2, 4, 6, 10, 13, 17};
    double worst_day = 0.0;
    int worst_day_index = 0;
    for (int d = 0; d < days; ++d) {
        if (exempt.count(d + 1)) continue;
        const double rel = std::abs(actual[d] - target[d]) / target[d];
        if (rel > worst_day) {
            worst_day = rel;
            worst_day_index = d + 1;
        }
    }

    double cum_actual = 0.0, cum_target = 0.0;
    for (int d = 0; d < days; ++d) {
        cum_actual += actual[d];
        cum_target += target[d];
    }
    const double cum_rel = std::abs(cum_actual - cum_target) / cum_target;

    const bool pass = worst_day <= kPinnedTrackingBand && cum_rel <= kPinnedTrackingBand;
    report(5, pass,
           "budget tracking: worst non-exempt day error " + fmt_double(worst_day) +
               " (day " + std::to_string(worst_day_index) + "), cumulative error " +
               fmt_double(cum_rel) + " (both <= pinned band " +
               fmt_double(kPinnedTrackingBand) + ")");
}

void criterion_determinism(const std::filesystem::path& dir_a,
                           const std::filesystem::path& dir_b) {
    std::set<std::string> names_a, names_b;
    for (const auto& e : std::filesystem::directory_iterator(dir_a))
        names_a.insert(e.path().filename().string());
    for (const auto& e : std::filesystem::directory_iterator(dir_b))
        names_b.insert(e.path().filename().string());

    bool pass = names_a == names_b && !names_a.empty();
    std::size_t compared = 0;
    if (pass) {
        for (const std::string& name : names_a) {
            if (read_file(dir_a / name) != read_file(dir_b / name)) {
                pass = false;
                break;
            }
            ++compared;
        }
    }
    report(8, pass,
           "determinism: " + std::to_string(compared) +
               " output files byte-identical across two seeded runs (" +
               std::to_string(names_a.size()) + " files, incl. 18 snapshots)");
    // The default cadence must produce exactly 18 distribution snapshots.
    std::size_t snapshots = 0;
    for (const std::string& name : names_a)
        if (name.rfind("dist_", 0) == 0) ++snapshots;
    if (snapshots != 18) {
        std::printf("[FAIL] criterion 8b: expected 18 snapshot files, found %zu\n",
                    snapshots);
        ++g_failures;
    }
}

} // namespace

int main() {
    criterion_closed_form_vs_oracle();

    const auto t0 = std::chrono::steady_clock::now();
    DefaultRunOutputs runs = execute_default_runs();
    const double default_elapsed =
        0.5 * std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    criterion_simplex_preservation(runs.result, default_elapsed);
    criterion_shift_invariance();
    criterion_concentration(runs.result);
    criterion_budget_tracking(runs.result);
    criterion_win_model();
    criterion_market_calibration();
    criterion_determinism(runs.dir_a, runs.dir_b);

    std::filesystem::remove_all(runs.dir_a.parent_path());

    if (g_failures == 0) {
        std::printf("all acceptance criteria passed\n");
        return 0;
    }
    std::printf("%d acceptance criteria failed\n", g_failures);
    return 1;
}
