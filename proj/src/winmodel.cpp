#include "bidshade/winmodel.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bidshade/io.hpp"

namespace bidshade {

namespace {

constexpr double kAdamBeta1 = 0.9;
constexpr double kAdamBeta2 = 0.999;
constexpr double kAdamEps = 1e-8;

// Probability clamp keeping log-losses finite; active only past |logit|~27.6.
constexpr double kProbLo = 1e-300;
constexpr double kProbHi = 1.0 - 1e-12;

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

void check_observation(const WinModel& model, const Observation& obs) {
    if (obs.attributes.size() != model.attribute_count())
        throw std::invalid_argument("winmodel: attribute length mismatch");
    if (!(obs.bid > 0.0))
        throw std::invalid_argument("winmodel: observation bid must be > 0");
    if (obs.outcome != 0 && obs.outcome != 1)
        throw std::invalid_argument("winmodel: outcome must be 0 or 1");
}

} // namespace

double WinModel::logit(const std::vector<double>& attributes, double bid) const {
    double z = w0;
    for (std::size_t i = 0; i < w.size(); ++i) z += w[i] * attributes[i];
    return z + beta * std::log(bid);
}

double predict_win(const WinModel& model, const std::vector<double>& attributes,
                   double bid) {
    if (!(bid > 0.0))
        throw std::invalid_argument("predict_win: bid must be > 0");
    if (attributes.size() != model.attribute_count())
        throw std::invalid_argument("predict_win: attribute length mismatch");
    return std::clamp(sigmoid(model.logit(attributes, bid)), kProbLo, kProbHi);
}

LossGradient loss_and_gradient(const WinModel& model, const Observation& obs, double l2) {
    check_observation(model, obs);
    const double log_bid = std::log(obs.bid);
    const double p = std::clamp(sigmoid(model.logit(obs.attributes, obs.bid)),
                                kProbLo, kProbHi);
    const double y = static_cast<double>(obs.outcome);

    LossGradient out;
    out.loss = -(y * std::log(p) + (1.0 - y) * std::log1p(-p));
    out.loss += l2 * (model.w0 * model.w0 + model.beta * model.beta);
    for (double wi : model.w) out.loss += l2 * wi * wi;

    const double dz = p - y;  // d(cross-entropy)/d(logit)
    out.g0 = dz + 2.0 * l2 * model.w0;
    out.gw.resize(model.w.size());
    for (std::size_t i = 0; i < model.w.size(); ++i)
        out.gw[i] = dz * obs.attributes[i] + 2.0 * l2 * model.w[i];
    out.gbeta = dz * log_bid + 2.0 * l2 * model.beta;
    return out;
}

WinModel update_model(const WinModel& model, const Observation& obs, double lr,
                      double lambda, double l2) {
    if (!(lr > 0.0))
        throw std::invalid_argument("update_model: learning rate must be > 0");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("update_model: forgetting factor must lie in (0, 1]");
    if (!(l2 >= 0.0))
        throw std::invalid_argument("update_model: l2 must be >= 0");

    const LossGradient lg = loss_and_gradient(model, obs, l2);
    if (!std::isfinite(lg.g0) || !std::isfinite(lg.gbeta))
        throw std::domain_error("update_model: non-finite gradient");
    for (double gi : lg.gw)
        if (!std::isfinite(gi)) throw std::domain_error("update_model: non-finite gradient");

    WinModel next = model;
    next.step_count = model.step_count + 1;
    const double bc1 = 1.0 - std::pow(kAdamBeta1, static_cast<double>(next.step_count));
    const double bc2 = 1.0 - std::pow(kAdamBeta2, static_cast<double>(next.step_count));

    // Forgetting: old moments decay by lambda before the new gradient enters.
    auto adam = [&](double& param, double& m, double& v, double gradient) {
        m = kAdamBeta1 * (lambda * m) + (1.0 - kAdamBeta1) * gradient;
        v = kAdamBeta2 * (lambda * v) + (1.0 - kAdamBeta2) * gradient * gradient;
        param -= lr * (m / bc1) / (std::sqrt(v / bc2) + kAdamEps);
    };

    adam(next.w0, next.m0, next.v0, lg.g0);
    for (std::size_t i = 0; i < next.w.size(); ++i)
        adam(next.w[i], next.mw[i], next.vw[i], lg.gw[i]);
    adam(next.beta, next.mbeta, next.vbeta, lg.gbeta);

    next.beta = std::max(next.beta, WinModel::kBetaMin);
    return next;
}

namespace {

struct BatchGradient {
    double loss = 0.0;
    double g0 = 0.0;
    std::vector<double> gw;
    double gbeta = 0.0;
};

// Exponentially weighted loss over the history (most recent weight 1) with a
// single unweighted l2 term.
BatchGradient batch_loss_gradient(const WinModel& model,
                                  const std::vector<Observation>& history,
                                  double lambda, double l2) {
    BatchGradient out;
    out.gw.assign(model.w.size(), 0.0);
    const std::size_t K = history.size();
    for (std::size_t k = 0; k < K; ++k) {
        const Observation& obs = history[k];
        check_observation(model, obs);
        const double weight = std::pow(lambda, static_cast<double>(K - 1 - k));
        const double p = std::clamp(sigmoid(model.logit(obs.attributes, obs.bid)),
                                    kProbLo, kProbHi);
        const double y = static_cast<double>(obs.outcome);
        out.loss -= weight * (y * std::log(p) + (1.0 - y) * std::log1p(-p));
        const double dz = weight * (p - y);
        out.g0 += dz;
        for (std::size_t i = 0; i < model.w.size(); ++i)
            out.gw[i] += dz * obs.attributes[i];
        out.gbeta += dz * std::log(obs.bid);
    }
    out.loss += l2 * (model.w0 * model.w0 + model.beta * model.beta);
    out.g0 += 2.0 * l2 * model.w0;
    out.gbeta += 2.0 * l2 * model.beta;
    for (std::size_t i = 0; i < model.w.size(); ++i) {
        out.loss += l2 * model.w[i] * model.w[i];
        out.gw[i] += 2.0 * l2 * model.w[i];
    }
    return out;
}

// Max-norm of the gradient projected onto the feasible set (beta >= min).
double projected_grad_norm(const WinModel& model, const BatchGradient& g) {
    double norm = std::max(std::abs(g.g0), 0.0);
    for (double gi : g.gw) norm = std::max(norm, std::abs(gi));
    const bool pinned = model.beta <= WinModel::kBetaMin && g.gbeta > 0.0;
    if (!pinned) norm = std::max(norm, std::abs(g.gbeta));
    return norm;
}

} // namespace

WinModel batch_refit(const std::vector<Observation>& history, double lambda,
                     double l2, std::size_t iters, double lr) {
    if (history.empty())
        throw std::invalid_argument("batch_refit: empty history");
    if (!(lambda > 0.0 && lambda <= 1.0))
        throw std::invalid_argument("batch_refit: forgetting factor must lie in (0, 1]");
    if (!(lr > 0.0))
        throw std::invalid_argument("batch_refit: learning rate must be > 0");

    WinModel model(history.front().attributes.size());
    BatchGradient g = batch_loss_gradient(model, history, lambda, l2);
    const std::size_t dim = model.w.size() + 2;

    auto pack = [&](const WinModel& m, std::vector<double>& out) {
        out[0] = m.w0;
        for (std::size_t i = 0; i < m.w.size(); ++i) out[1 + i] = m.w[i];
        out[dim - 1] = m.beta;
    };
    auto pack_grad = [&](const BatchGradient& bg, std::vector<double>& out) {
        out[0] = bg.g0;
        for (std::size_t i = 0; i < bg.gw.size(); ++i) out[1 + i] = bg.gw[i];
        out[dim - 1] = bg.gbeta;
    };

    std::vector<double> x_prev(dim), g_prev(dim), x_cur(dim), g_cur(dim);
    double step = lr;

    for (std::size_t it = 0; it < iters; ++it) {
        if (projected_grad_norm(model, g) < 1e-8) return model;

        pack(model, x_prev);
        pack_grad(g, g_prev);

        // Near the optimum loss differences sink below summation rounding, so
        // descent is accepted within a noise slack; the gradient max-norm
        // remains the convergence criterion.
        const double slack = 1e-10 * (1.0 + std::abs(g.loss));
        bool accepted = false;
        for (int bt = 0; bt < 60 && !accepted; ++bt) {
            WinModel trial = model;
            trial.w0 -= step * g.g0;
            for (std::size_t i = 0; i < trial.w.size(); ++i) trial.w[i] -= step * g.gw[i];
            trial.beta = std::max(trial.beta - step * g.gbeta, WinModel::kBetaMin);
            BatchGradient g_trial = batch_loss_gradient(trial, history, lambda, l2);
            if (g_trial.loss <= g.loss + slack) {
                model = std::move(trial);
                g = std::move(g_trial);
                accepted = true;
            } else {
                step *= 0.5;
            }
        }
        if (!accepted) {
            if (projected_grad_norm(model, g) < 1e-8) return model;
            throw std::runtime_error("batch_refit: line search stalled before convergence");
        }

        // Barzilai-Borwein step for the next iteration: <dx,dg>/<dg,dg>.
        pack(model, x_cur);
        pack_grad(g, g_cur);
        double num = 0.0, den = 0.0;
        for (std::size_t i = 0; i < dim; ++i) {
            const double dx = x_cur[i] - x_prev[i];
            const double dg = g_cur[i] - g_prev[i];
            num += dx * dg;
            den += dg * dg;
        }
        if (num > 0.0 && den > 0.0 && std::isfinite(num / den))
            step = std::clamp(num / den, 1e-12, 1e6);
        else
            step = std::min(step * 2.0, 1e6);
    }
    if (projected_grad_norm(model, g) < 1e-8) return model;
    throw std::runtime_error("batch_refit: gradient descent failed to converge");
}

std::string model_checkpoint_line(const WinModel& model) {
    std::string out = fmt_double(model.w0);
    out += ',';
    out += fmt_double(model.beta);
    for (double wi : model.w) {
        out += ',';
        out += fmt_double(wi);
    }
    out += '\n';
    return out;
}

} // namespace bidshade
