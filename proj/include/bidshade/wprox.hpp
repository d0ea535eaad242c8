#pragma once

#include <vector>

#include "bidshade/grid.hpp"

namespace bidshade {

struct ProximalConfig {
    double step_size;  // h > 0
    double epsilon;    // shared with the grid kernel, > 0
};

// One entropy-regularized Wasserstein-proximal step for a linear functional
// <r, mu>:
//
//   mu_next = exp(-h r / eps) .* ( K^T ( mu_prev ./ (K exp(-h r / eps)) ) )
//
// r is pre-shifted by -min(r) before exponentiation; the shift cancels
// exactly, and keeps exp() in range for large offsets. Normalization is
// preserved analytically, so the output is not renormalized.
// Throws std::invalid_argument on dimension mismatch and std::domain_error
// if a shifted exponential or a denominator entry underflows to zero
// (the caller should rescale r or raise epsilon).
ShadingDistribution proximal_update(const ShadingDistribution& mu_prev,
                                    const std::vector<double>& r,
                                    const ParameterGrid& grid,
                                    const ProximalConfig& cfg);

// Brute-force validation oracle for the same objective:
//
//   min_{mu in simplex}  [ min_{M in Pi(mu, mu_prev)} <C/2 + eps log M, M> ]
//                        + h <r, mu>
//
// solved as a nested minimization: the inner transport subproblem by
// alternating kernel scaling, the outer problem by multiplicative-weights
// descent on the simplex with backtracking line search, iterated until the
// first-order stationarity residual max_j mu_j |g_j - <g, mu>| < 1e-10.
// Desk-scale only (N <= 16). Throws std::runtime_error on non-convergence.
ShadingDistribution oracle_minimize(const ShadingDistribution& mu_prev,
                                    const std::vector<double>& r,
                                    const ParameterGrid& grid,
                                    const ProximalConfig& cfg);

// Certificate from the dual optimality system: with lambda1 = -r and
// exp(h lambda0 / eps) = mu_prev ./ (K exp(-h r / eps)), returns the max-norm
// residual of the first dual equation plus the max-norm mismatch between
// mu_next and the general dual-form update. Near zero iff mu_next is the
// proximal step for (mu_prev, r).
double dual_residual(const ShadingDistribution& mu_next,
                     const ShadingDistribution& mu_prev,
                     const std::vector<double>& r,
                     const ParameterGrid& grid,
                     const ProximalConfig& cfg);

// Entropy-regularized squared Wasserstein distance between p and q on the
// grid (cost = squared Euclidean distance, entropy relative to the product
// of the marginals). Diagnostic; requires strictly positive p and q.
// Converged when the marginal error drops below 1e-10 in max norm; throws
// std::runtime_error on non-convergence.
double entropic_distance(const ShadingDistribution& p, const ShadingDistribution& q,
                         const ParameterGrid& grid, double epsilon);

} // namespace bidshade
