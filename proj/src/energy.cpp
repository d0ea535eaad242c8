#include "bidshade/energy.hpp"

#include <algorithm>
#include <stdexcept>

#include "bidshade/shading.hpp"

namespace bidshade {

std::vector<double> r_vector(const EnergyContext& ctx, const ParameterGrid& grid) {
    if (ctx.win_model == nullptr)
        throw std::invalid_argument("r_vector: missing win model");
    if (!(ctx.estimated_value >= 0.0) || !(ctx.unshaded_bid >= 0.0))
        throw std::invalid_argument("r_vector: value and unshaded bid must be >= 0");

    const BidRequest request{ctx.unshaded_bid, ctx.attributes};
    std::vector<double> r(grid.size());
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const GridPoint& p = grid.point(j);
        const double bid = shade_bid(p.theta1, p.theta2, request);
        const double f_hat =
            predict_win(*ctx.win_model, ctx.attributes, std::max(bid, kBidFloor));
        r[j] = -f_hat * (ctx.estimated_value - bid);
    }
    return r;
}

double energy_value(const ShadingDistribution& dist, const std::vector<double>& r) {
    if (dist.size() != r.size())
        throw std::invalid_argument("energy_value: dimension mismatch");
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * dist[j];
    return acc;
}

double realized_surplus(double value, double cost, int won) {
    if (!(value >= 0.0) || !(cost >= 0.0))
        throw std::invalid_argument("realized_surplus: value and cost must be >= 0");
    if (won != 0 && won != 1)
        throw std::invalid_argument("realized_surplus: won must be 0 or 1");
    return won ? value - cost : 0.0;
}

} // namespace bidshade
