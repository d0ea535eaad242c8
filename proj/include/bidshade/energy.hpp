#pragma once

#include <vector>

#include "bidshade/grid.hpp"
#include "bidshade/winmodel.hpp"

namespace bidshade {

// Context for one evaluation of the energy functional on the grid.
struct EnergyContext {
    std::vector<double> attributes;
    double estimated_value;  // v_hat >= 0
    double unshaded_bid;     // b_u >= 0
    const WinModel* win_model;
};

// Floor bid used where the shading map yields 0 (theta1 = 0); keeps log(bid)
// finite and the predicted win probability at such points negligible.
inline constexpr double kBidFloor = 1e-6;

// r_j = -f_hat(theta_j) * (v_hat - b(theta_j)), the linear-functional vector
// of the energy; the proximal update's exp(-h r / eps) then up-weights grid
// points with high expected surplus.
std::vector<double> r_vector(const EnergyContext& ctx, const ParameterGrid& grid);

// <r, dist>: the energy of a distribution under the current context.
double energy_value(const ShadingDistribution& dist, const std::vector<double>& r);

// Realized surplus won*(value - cost) of a single auction.
double realized_surplus(double value, double cost, int won);

} // namespace bidshade
