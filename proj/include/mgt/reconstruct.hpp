#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mgt/carleman.hpp"
#include "mgt/functional.hpp"
#include "mgt/mgt_solver.hpp"
#include "mgt/observation.hpp"

namespace mgt {

/// Initial data and source given as functions so they can be sampled on the data grid and on the
/// reconstruction grid alike.
struct ProblemData {
    std::function<double(double)> u0 = [](double) { return 0.0; };
    std::function<double(double)> u1 = [](double) { return 0.0; };
    std::function<double(double)> u2 = [](double) { return 1.0; };
    std::function<double(double, double)> source = [](double, double) { return 0.0; };
    double eta = 1.0;

    /// Samples the initial triple; u0 and u1 are forced to zero at the two ends.
    InitialData sample(const SpaceTimeGrid& grid) const;
    SpaceTimeField sample_source(const SpaceTimeGrid& grid) const;
};

enum class BoundaryMode { homogeneous, compatible };

struct ReconstructionConfig {
    SpaceTimeGrid grid;
    double c = 1.0;
    double b = 1.0;
    double box_bound = 1.0;
    ProblemData data;
    BoundaryMode boundary = BoundaryMode::homogeneous;
    CarlemanGeometry geometry;
    CarlemanScales scales;
    /// s values used by sweeps; scales.s is used by single runs.
    std::vector<double> s_sweep{0.5, 1.0, 2.0, 4.0};
    int max_iterations = 20;
    double stop_tol = 1e-6;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
    int smoothing_window = 0;
    int data_factor = 2;
    MinimizeOptions minimizer;
    /// Warm start; empty means gamma^0 = 0.
    ScalarField initial_gamma;

    void validate() const;
    MGTCoefficients coefficients(const ScalarField& gamma) const;
};

/// Nodewise clamp to [0, M].
ScalarField project_to_box(const ScalarField& gamma_tilde, double box_bound);

/// Dirichlet data used for every forward solve: zero, or the compatible profile built from gamma_true.
BoundaryData boundary_for(const ReconstructionConfig& config, const ScalarField& gamma_true_on_grid,
                          const SpaceTimeGrid& grid);

/// Synthetic measurements: forward solve with gamma_true on the grid refined by data_factor, traces
/// thinned back to the reconstruction time levels, then optional noise.
ObservationData synthesize_observation(const ReconstructionConfig& config,
                                       const std::function<double(double)>& gamma_true);

struct StepDiagnostics {
    MinimizerDiagnostics minimizer;
    ScalarField increment;
    double step_norm = 0.0;
    /// Nodes where the clamp moved the update.
    int clamped_nodes = 0;
};

/// One pass of: forward solve with gamma_k, boundary increments, functional minimization, update, clamp.
/// The increment at the two end nodes (where the discrete model never reads gamma) is extrapolated
/// linearly from the interior.
std::pair<ScalarField, StepDiagnostics> reconstruction_step(const ScalarField& gamma_k,
                                                            const ObservationData& data_obs,
                                                            const ReconstructionConfig& config,
                                                            const BoundaryData& boundary);

/// Same update with the minimizer replaced by the exact difference trajectory u_t(gamma_k) - u_t(gamma_true).
ScalarField oracle_step(const ScalarField& gamma_k, const ScalarField& gamma_true, const ReconstructionConfig& config,
                        const BoundaryData& boundary);

/// sum over interior nodes of h exp(log_w(x, 0) - log_scale) (a - b)^2 with log_scale = max_x log_w(x, 0).
double weighted_error(const ScalarField& a, const ScalarField& b, const SpaceTimeGrid& grid,
                      const CarlemanGeometry& geometry, const CarlemanScales& scales);
double weighted_error_log_scale(const SpaceTimeGrid& grid, const CarlemanGeometry& geometry,
                                const CarlemanScales& scales);

struct IterateRecord {
    ScalarField gamma;
    /// Weighted squared error against gamma_true, NaN without one.
    double weighted_error = 0.0;
    StepDiagnostics step;
};

enum class StopReason { converged, max_iterations, divergence, failure };
std::string to_string(StopReason reason);

struct ReconstructionReport {
    std::vector<IterateRecord> history;
    std::vector<double> ratios;
    StopReason stop = StopReason::max_iterations;
    std::string failure;
    double error_log_scale = 0.0;
    /// Nodes where the clamp increased the distance to gamma_true (must stay 0).
    int projection_violations = 0;
    bool synthetic = false;
};

/// Iterates from gamma^0 until stop_tol, max_iterations, or (synthetic mode) three consecutive error
/// increases. Failures are recorded in the report with the history preserved.
ReconstructionReport run_reconstruction(const ReconstructionConfig& config, const ObservationData& data_obs,
                                        const BoundaryData& boundary,
                                        const std::optional<ScalarField>& gamma_true = std::nullopt);

/// Synthetic-mode convenience: builds the data from gamma_true and runs.
ReconstructionReport run_reconstruction(const ReconstructionConfig& config,
                                        const std::function<double(double)>& gamma_true);

/// rho_k = e_{k+1} / e_k for every k with e_k > 1e-30.
std::vector<double> contraction_ratios(const std::vector<double>& errors);
std::vector<double> contraction_ratios(const ReconstructionReport& report);

}  // namespace mgt
