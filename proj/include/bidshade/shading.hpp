#pragma once

#include <cmath>
#include <stdexcept>
#include <vector>

namespace bidshade {

struct BidRequest {
    double unshaded_bid;             // b_u >= 0
    std::vector<double> attributes;  // fixed length per campaign
};

// Below this theta2 the linear branch is used; the two branches agree to
// first order and log(1+x)/theta2 loses precision as theta2 -> 0.
inline constexpr double kTheta2Switch = 1e-9;

// Parametric shading map: log(1 + theta1*theta2*b_u)/theta2 for theta2 above
// the switch, theta1*b_u at and below it. Monotone nondecreasing and concave
// in b_u; result lies in [0, b_u].
inline double shade_bid(double theta1, double theta2, const BidRequest& request) {
    if (!(theta1 >= 0.0 && theta1 <= 1.0))
        throw std::invalid_argument("shade_bid: theta1 must lie in [0, 1]");
    if (!(theta2 >= 0.0))
        throw std::invalid_argument("shade_bid: theta2 must be >= 0");
    if (!(request.unshaded_bid >= 0.0))
        throw std::invalid_argument("shade_bid: unshaded bid must be >= 0");
    if (theta2 > kTheta2Switch)
        return std::log1p(theta1 * theta2 * request.unshaded_bid) / theta2;
    return theta1 * request.unshaded_bid;
}

// Unshaded bid b_u = u * v_hat.
inline double unshaded_bid(double control_u, double estimated_value) {
    if (!(control_u > 0.0))
        throw std::invalid_argument("unshaded_bid: control must be > 0");
    if (!(estimated_value >= 0.0))
        throw std::invalid_argument("unshaded_bid: estimated value must be >= 0");
    return control_u * estimated_value;
}

} // namespace bidshade
