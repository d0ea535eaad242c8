#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "bidshade/rng.hpp"

namespace bidshade {

struct GridPoint {
    double theta1;
    double theta2;
};

struct Interval {
    double lo;
    double hi;
};

// Discretized shading-parameter space: N points in R^2 together with the
// squared-Euclidean ground-cost matrix and the Gibbs kernel
// K = exp(-cost / (2*epsilon)). Immutable after construction; safe to share
// read-only across threads.
class ParameterGrid {
public:
    ParameterGrid(std::vector<GridPoint> points, double epsilon);

    std::size_t size() const { return points_.size(); }
    const GridPoint& point(std::size_t j) const { return points_[j]; }
    const std::vector<GridPoint>& points() const { return points_; }
    double epsilon() const { return epsilon_; }

    double cost(std::size_t i, std::size_t j) const { return cost_[i * size() + j]; }
    double kernel(std::size_t i, std::size_t j) const { return kernel_[i * size() + j]; }

    // Row i of the kernel matrix (the matrix is symmetric).
    const double* kernel_row(std::size_t i) const { return kernel_.data() + i * size(); }

private:
    std::vector<GridPoint> points_;
    std::vector<double> cost_;    // N*N, row-major
    std::vector<double> kernel_;  // N*N, row-major
    double epsilon_;
};

// Uniform n1 x n2 lattice over theta1_range x theta2_range, both interval
// endpoints included (single-point axes collapse to the lower bound).
// Point ordering is row-major over (theta1, theta2): index j = i1*n2 + i2,
// so theta2 varies fastest.
// Throws std::invalid_argument on epsilon <= 0, inverted bounds, zero counts,
// or a degenerate axis that would duplicate points.
ParameterGrid build_grid(Interval theta1_range, Interval theta2_range,
                         std::size_t n1, std::size_t n2, double epsilon);

// Probability vector over the grid points.
class ShadingDistribution {
public:
    static constexpr double kSimplexTol = 1e-12;

    // Validates the simplex invariants (entries >= 0, sum within tol of 1).
    static ShadingDistribution from_weights(std::vector<double> weights,
                                            double tol = kSimplexTol);
    static ShadingDistribution uniform(std::size_t n);

    std::size_t size() const { return weights_.size(); }
    double operator[](std::size_t j) const { return weights_[j]; }
    const std::vector<double>& weights() const { return weights_; }

    // Max of (negative-entry magnitude, |sum - 1|); 0 for an exact simplex.
    double simplex_error() const;
    bool is_valid(double tol = kSimplexTol) const { return simplex_error() <= tol; }

    // Shannon entropy in nats, with 0*log(0) = 0.
    double entropy() const;

    // Exact renormalization (divides by the current sum).
    ShadingDistribution normalized() const;

private:
    explicit ShadingDistribution(std::vector<double> weights)
        : weights_(std::move(weights)) {}

    std::vector<double> weights_;
};

// uniform_distribution(grid): every weight 1/N.
ShadingDistribution uniform_distribution(const ParameterGrid& grid);

struct SampledParameters {
    double theta1;
    double theta2;
    std::size_t index;
};

// Categorical draw of one grid point with probabilities dist[j].
// Throws std::invalid_argument if all weights are zero.
SampledParameters sample_parameters(const ShadingDistribution& dist,
                                    const ParameterGrid& grid, Rng& rng);

// Distribution snapshot: CSV "index,theta1,theta2,weight", one row per point,
// floats at 17 significant digits.
std::string snapshot_csv(const ParameterGrid& grid, const ShadingDistribution& dist);

} // namespace bidshade
