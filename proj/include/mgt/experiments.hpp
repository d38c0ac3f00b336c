#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "mgt/carleman.hpp"
#include "mgt/reconstruct.hpp"

namespace mgt {

using SpaceFunction = std::function<double(double)>;
using SpaceTimeFunction = std::function<double(double, double)>;

/// Smooth coefficient M/2 + sum_k a_k cos(k pi (x - x_left) / L), k = 1..3, with sum |a_k| <= 0.45 M,
/// so the values stay inside [0.05 M, 0.95 M].
SpaceFunction random_coefficient(std::mt19937_64& rng, double box_bound, double x_left, double x_right);

/// sum_k a_k sin(k pi (x - x_left) / L) * t^2 * (1 + b1 t + b2 t^2), k = 1..4.
SpaceTimeFunction random_trajectory(std::mt19937_64& rng, double x_left, double x_right);

struct StabilityRecord {
    double coefficient_gap_sq = 0.0;
    double trace_gap_sq = 0.0;
    /// ||gap||^2 / ||trace gap||^2: the constant needed by the lower inequality.
    double lower_ratio = 0.0;
    /// ||trace gap||^2 / ||gap||^2: the constant needed by the upper inequality.
    double upper_ratio = 0.0;
    bool skipped = false;
};

struct StabilityReport {
    std::vector<StabilityRecord> pairs;
    double max_lower_ratio = 0.0;
    double max_upper_ratio = 0.0;
    /// max(max upper_ratio, max lower_ratio)
    double constant = 0.0;
};

/// For each pair: two forward solves with homogeneous Dirichlet data, traces on the observed endpoints,
/// H2-in-time norm of the trace difference against the L2 norm of the coefficient difference.
StabilityReport stability_two_sided(const std::vector<std::pair<SpaceFunction, SpaceFunction>>& pairs,
                                    const ReconstructionConfig& config);

struct CarlemanSweepEntry {
    double s = 0.0;
    double lambda = 0.0;
    std::vector<double> ratios;
    double max_ratio = 0.0;
    double min_rhs = 0.0;
};

struct CarlemanSweepReport {
    std::vector<CarlemanSweepEntry> entries;
};

/// Evaluates carleman_lhs_rhs for sample_count random trajectories at each scale pair, with the operator
/// coefficient gamma.
CarlemanSweepReport carleman_constant_sweep(int sample_count, const std::vector<CarlemanScales>& scales_list,
                                            const ReconstructionConfig& config, const SpaceFunction& gamma,
                                            std::uint64_t seed);

struct WeightRow {
    std::string label;
    double x_left = 0.0;
    double x_right = 1.0;
    CarlemanGeometry geometry;
    CarlemanScales scales;
    bool admissible = false;
    WeightStatistics stats;
    /// Claimed order of magnitude for comparison rows, NaN otherwise.
    double reference_log10 = 0.0;
};

struct WeightRowSpec {
    std::string label;
    double x_left = 0.0;
    double x_right = 1.0;
    CarlemanGeometry geometry;
    CarlemanScales scales;
    double reference_log10 = 0.0;
};

/// Evaluates weight_statistics on each row (grid with both endpoints and both time ends, so the extremes
/// are exact) and marks admissibility without rejecting rows.
std::vector<WeightRow> weight_ratio_report(const std::vector<WeightRowSpec>& rows, int nx = 201, int nt = 201);

/// Rows of the large-parameter example: s = lambda = 3, (0,1), x0 = 0, T = 1, beta = 1, one row per M0.
std::vector<WeightRowSpec> large_parameter_rows(const std::vector<double>& m0_values, double claimed_log10);

/// M0 at which the large-parameter example reaches the given log10 ratio (bisection on [lo, hi]).
double large_parameter_m0_for(double target_log10, double lo = -5.0, double hi = 5.0);

struct EnergySuiteEntry {
    std::string label;
    int nx = 0;
    int nt = 0;
    BoundReport energy;
    BoundReport laplacian;
    double hidden_regularity = 0.0;
};

/// Energy, Laplacian and trace bounds at gamma = 0 and gamma = M on the configured grid and on one
/// refinement (h and dt halved).
std::vector<EnergySuiteEntry> energy_suite(const ReconstructionConfig& config);

}  // namespace mgt
