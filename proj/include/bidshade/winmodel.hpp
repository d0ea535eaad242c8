#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace bidshade {

struct Observation {
    std::vector<double> attributes;
    double bid;        // must be > 0 so log(bid) is finite
    int outcome;       // y in {0, 1}
    std::int64_t timestamp;
};

// Logistic win-probability model p = sigma(w0 + <w, a> + beta * log(bid))
// trained online by adaptive-moment gradient steps with exponential
// forgetting (the accumulated moments decay by lambda per step).
struct WinModel {
    double w0 = 0.0;
    std::vector<double> w;  // length A
    double beta = 1.0;      // kept >= kBetaMin by projection

    // Adam state, one slot per parameter in (w0, w, beta) order.
    double m0 = 0.0, v0 = 0.0;
    std::vector<double> mw, vw;
    double mbeta = 0.0, vbeta = 0.0;
    std::int64_t step_count = 0;

    static constexpr double kBetaMin = 1e-6;

    explicit WinModel(std::size_t n_attributes = 0)
        : w(n_attributes, 0.0), mw(n_attributes, 0.0), vw(n_attributes, 0.0) {}

    std::size_t attribute_count() const { return w.size(); }

    double logit(const std::vector<double>& attributes, double bid) const;
};

// sigma(w0 + <w, a> + beta log bid), clamped into (0, 1) so that downstream
// log-losses stay finite even at saturating logits. Throws on bid <= 0.
double predict_win(const WinModel& model, const std::vector<double>& attributes,
                   double bid);

// Per-observation regularized log-loss and its analytic gradient:
//   loss = -[y log p + (1-y) log(1-p)] + l2 * ||(w0, w, beta)||^2
struct LossGradient {
    double loss;
    double g0;
    std::vector<double> gw;
    double gbeta;
};
LossGradient loss_and_gradient(const WinModel& model, const Observation& obs, double l2);

// One Adam step on the per-observation loss. Exponential forgetting is
// realized by decaying the stored first/second moments by lambda before the
// new gradient is accumulated; beta is projected to [kBetaMin, inf) after
// the step. Throws std::domain_error on a non-finite gradient.
WinModel update_model(const WinModel& model, const Observation& obs, double lr,
                      double lambda, double l2);

// Offline oracle: full-gradient descent (with backtracking) on the
// exponentially weighted loss sum_k lambda^{K-1-k} ce_k + l2 ||params||^2,
// run until the projected gradient max-norm < 1e-8. Throws
// std::runtime_error if the cap is hit first.
WinModel batch_refit(const std::vector<Observation>& history, double lambda,
                     double l2, std::size_t iters, double lr);

// Checkpoint line "w0,beta,w_1,...,w_A" at 17 significant digits.
std::string model_checkpoint_line(const WinModel& model);

} // namespace bidshade
