#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mgt/grid.hpp"
#include "mgt/mgt_solver.hpp"

namespace mgt {

/// Normal derivatives of u and u_t on the observed endpoints, one entry per endpoint.
struct ObservationData {
    std::vector<TraceSeries> trace;
    std::vector<TraceSeries> trace_t;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

/// Boundary increments fed to the functional: mu and mu_t per observed endpoint.
struct MuPair {
    std::vector<TraceSeries> mu;
    std::vector<TraceSeries> mu_t;

    static MuPair zeros(const std::vector<Side>& sides, int nt);
};

ObservationData extract_observation(const Trajectory& traj, const std::vector<Side>& sides,
                                    const SpaceTimeGrid& grid);

/// Keeps every `factor`-th sample in time. The space grids must share endpoints, so the trace values
/// already sit on the coarse boundary points.
ObservationData restrict_observation(const ObservationData& fine, int factor);

struct RegularityReport {
    double trace_norm_sq = 0.0;
    double data_norm_sq = 0.0;
    double ratio = 0.0;
};

/// ||du/dn||^2_{H1(0,T)} summed over the observed endpoints against
/// ||u0||^2_{H2} + ||u1||^2_{H1} + ||u2||^2 + ||f||^2 (H2 via u0, u0_x, u0_xx; H1 via u1, u1_x).
RegularityReport hidden_regularity_check(const ObservationData& obs, const InitialData& data,
                                         const SpaceTimeField& source, const SpaceTimeGrid& grid);

/// Adds N(0, (level * max|series|)^2) noise to every sample of both series, seeded deterministically.
ObservationData perturb_with_noise(const ObservationData& obs, double level, std::uint64_t seed);

/// mu = d/dt(trace_k - trace_data), mu_t = d/dt(trace_t,k - trace_t,data). A positive odd window applies
/// a centered moving average to the differences before differentiating.
MuPair build_mu(const ObservationData& obs_k, const ObservationData& obs_data, double dt, int smoothing_window = 0);

/// Centered moving average, window shrinks at the ends.
std::vector<double> moving_average(const std::vector<double>& series, int window);

/// CSV with columns t, dudn, dudtn for the first observed endpoint.
void write_trace_csv(std::ostream& os, const ObservationData& obs, const SpaceTimeGrid& grid);

}  // namespace mgt
