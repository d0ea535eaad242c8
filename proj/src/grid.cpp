#include "bidshade/grid.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "bidshade/io.hpp"

namespace bidshade {

ParameterGrid::ParameterGrid(std::vector<GridPoint> points, double epsilon)
    : points_(std::move(points)), epsilon_(epsilon) {
    if (points_.empty())
        throw std::invalid_argument("ParameterGrid: need at least one point");
    if (!(epsilon_ > 0.0))
        throw std::invalid_argument("ParameterGrid: epsilon must be > 0");
    const std::size_t n = points_.size();
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j)
            if (points_[i].theta1 == points_[j].theta1 &&
                points_[i].theta2 == points_[j].theta2)
                throw std::invalid_argument("ParameterGrid: points must be pairwise distinct");

    cost_.resize(n * n);
    kernel_.resize(n * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            const double d1 = points_[i].theta1 - points_[j].theta1;
            const double d2 = points_[i].theta2 - points_[j].theta2;
            const double c = d1 * d1 + d2 * d2;
            cost_[i * n + j] = c;
            kernel_[i * n + j] = std::exp(-c / (2.0 * epsilon_));
        }
    }
}

namespace {

std::vector<double> linspace(const Interval& range, std::size_t n) {
    if (!(range.lo <= range.hi))
        throw std::invalid_argument("build_grid: interval bounds inverted");
    if (!std::isfinite(range.lo) || !std::isfinite(range.hi))
        throw std::invalid_argument("build_grid: interval bounds must be finite");
    if (n == 0)
        throw std::invalid_argument("build_grid: point count must be >= 1");
    std::vector<double> xs(n);
    if (n == 1) {
        xs[0] = range.lo;
        return xs;
    }
    if (range.lo == range.hi)
        throw std::invalid_argument("build_grid: degenerate interval with multiple points");
    const double step = (range.hi - range.lo) / static_cast<double>(n - 1);
    for (std::size_t i = 0; i < n; ++i)
        xs[i] = range.lo + static_cast<double>(i) * step;
    xs[n - 1] = range.hi;  // endpoints exact
    return xs;
}

} // namespace

ParameterGrid build_grid(Interval theta1_range, Interval theta2_range,
                         std::size_t n1, std::size_t n2, double epsilon) {
    if (!(epsilon > 0.0))
        throw std::invalid_argument("build_grid: epsilon must be > 0");
    const std::vector<double> t1 = linspace(theta1_range, n1);
    const std::vector<double> t2 = linspace(theta2_range, n2);
    std::vector<GridPoint> points;
    points.reserve(n1 * n2);
    for (std::size_t i1 = 0; i1 < n1; ++i1)
        for (std::size_t i2 = 0; i2 < n2; ++i2)
            points.push_back({t1[i1], t2[i2]});
    return ParameterGrid(std::move(points), epsilon);
}

ShadingDistribution ShadingDistribution::from_weights(std::vector<double> weights,
                                                      double tol) {
    ShadingDistribution dist(std::move(weights));
    if (dist.weights_.empty())
        throw std::invalid_argument("ShadingDistribution: empty weight vector");
    const double err = dist.simplex_error();
    if (!(err <= tol))
        throw std::invalid_argument("ShadingDistribution: not a simplex vector (error " +
                                    fmt_double(err) + ")");
    return dist;
}

ShadingDistribution ShadingDistribution::uniform(std::size_t n) {
    if (n == 0)
        throw std::invalid_argument("ShadingDistribution: empty weight vector");
    return ShadingDistribution(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

double ShadingDistribution::simplex_error() const {
    double sum = 0.0;
    double worst_neg = 0.0;
    for (double wj : weights_) {
        if (!std::isfinite(wj)) return std::numeric_limits<double>::infinity();
        if (wj < 0.0 && -wj > worst_neg) worst_neg = -wj;
        sum += wj;
    }
    const double sum_err = std::abs(sum - 1.0);
    return worst_neg > sum_err ? worst_neg : sum_err;
}

double ShadingDistribution::entropy() const {
    double h = 0.0;
    for (double wj : weights_)
        if (wj > 0.0) h -= wj * std::log(wj);
    return h;
}

ShadingDistribution ShadingDistribution::normalized() const {
    double sum = 0.0;
    for (double wj : weights_) sum += wj;
    if (!(sum > 0.0))
        throw std::invalid_argument("ShadingDistribution: cannot normalize zero mass");
    std::vector<double> scaled(weights_);
    for (double& wj : scaled) wj /= sum;
    return ShadingDistribution(std::move(scaled));
}

ShadingDistribution uniform_distribution(const ParameterGrid& grid) {
    return ShadingDistribution::uniform(grid.size());
}

SampledParameters sample_parameters(const ShadingDistribution& dist,
                                    const ParameterGrid& grid, Rng& rng) {
    if (dist.size() != grid.size())
        throw std::invalid_argument("sample_parameters: distribution/grid size mismatch");
    double total = 0.0;
    for (std::size_t j = 0; j < dist.size(); ++j) total += dist[j];
    if (!(total > 0.0))
        throw std::invalid_argument("sample_parameters: all-zero weight vector");

    const double u = rng.uniform01() * total;
    double acc = 0.0;
    std::size_t chosen = dist.size() - 1;  // guards against FP shortfall in acc
    for (std::size_t j = 0; j < dist.size(); ++j) {
        acc += dist[j];
        if (u < acc) {
            chosen = j;
            break;
        }
    }
    const GridPoint& p = grid.point(chosen);
    return {p.theta1, p.theta2, chosen};
}

std::string snapshot_csv(const ParameterGrid& grid, const ShadingDistribution& dist) {
    if (dist.size() != grid.size())
        throw std::invalid_argument("snapshot_csv: distribution/grid size mismatch");
    std::string out = "index,theta1,theta2,weight\n";
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const GridPoint& p = grid.point(j);
        out += std::to_string(j);
        out += ',';
        out += fmt_double(p.theta1);
        out += ',';
        out += fmt_double(p.theta2);
        out += ',';
        out += fmt_double(dist[j]);
        out += '\n';
    }
    return out;
}

} // namespace bidshade
