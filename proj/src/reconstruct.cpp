#include "mgt/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace mgt {

InitialData ProblemData::sample(const SpaceTimeGrid& grid) const {
    InitialData d;
    d.u0 = sample_field(grid, u0);
    d.u1 = sample_field(grid, u1);
    d.u2 = sample_field(grid, u2);
    d.u0.front() = d.u0.back() = 0.0;
    d.u1.front() = d.u1.back() = 0.0;
    d.eta = eta;
    return d;
}

SpaceTimeField ProblemData::sample_source(const SpaceTimeGrid& grid) const { return sample_spacetime(grid, source); }

void ReconstructionConfig::validate() const {
    build_grid(grid.x_left, grid.x_right, grid.nx, grid.final_time, grid.nt);
    if (!(b > 0.0)) throw InvalidInput("config: b must be positive");
    if (c == 0.0) throw InvalidInput("config: c must be nonzero");
    if (!(box_bound > 0.0)) throw InvalidInput("config: M must be positive");
    if (!(data.eta > 0.0)) throw InvalidInput("config: eta must be positive for the update division");
    if (!(scales.s > 0.0) || !(scales.lambda > 0.0)) throw InvalidInput("config: s and lambda must be positive");
    if (max_iterations < 1) throw InvalidInput("config: max_iterations must be at least 1");
    if (stop_tol < 0.0) throw InvalidInput("config: stop_tol must be nonnegative");
    if (noise_level < 0.0) throw InvalidInput("config: noise level must be nonnegative");
    if (data_factor < 1) throw InvalidInput("config: data grid factor must be at least 1");
    if (smoothing_window < 0 || (smoothing_window > 1 && smoothing_window % 2 == 0))
        throw InvalidInput("config: smoothing window must be 0 or odd");
    if (!initial_gamma.empty()) check_field(initial_gamma, grid, "config initial gamma");
    require_admissible(geometry, grid);
    data.sample(grid).validate(grid);
}

MGTCoefficients ReconstructionConfig::coefficients(const ScalarField& gamma) const {
    return MGTCoefficients{c, b, gamma, box_bound};
}

ScalarField project_to_box(const ScalarField& gamma_tilde, double box_bound) {
    if (!(box_bound > 0.0)) throw InvalidInput("project_to_box: M must be positive");
    ScalarField out(gamma_tilde.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::clamp(gamma_tilde[i], 0.0, box_bound);
    return out;
}

BoundaryData boundary_for(const ReconstructionConfig& config, const ScalarField& gamma_true_on_grid,
                          const SpaceTimeGrid& grid) {
    if (config.boundary == BoundaryMode::homogeneous) return {};
    return BoundaryData::compatible(config.coefficients(gamma_true_on_grid), config.data.sample(grid));
}

namespace {

SpaceTimeGrid refine(const SpaceTimeGrid& g, int factor) {
    return SpaceTimeGrid{g.x_left, g.x_right, factor * (g.nx - 1) + 1, g.final_time, factor * (g.nt - 1) + 1};
}

// Increment at the two ends extrapolated linearly from the first two interior nodes.
void extrapolate_ends(ScalarField& inc) {
    const std::size_t n = inc.size();
    inc[0] = 2.0 * inc[1] - inc[2];
    inc[n - 1] = 2.0 * inc[n - 2] - inc[n - 3];
}

double l2_distance(const ScalarField& a, const ScalarField& b, const SpaceTimeGrid& grid) {
    ScalarField d(a.size());
    for (std::size_t i = 0; i < d.size(); ++i) d[i] = a[i] - b[i];
    return std::sqrt(norm_sq(d, grid));
}

}  // namespace

ObservationData synthesize_observation(const ReconstructionConfig& config,
                                       const std::function<double(double)>& gamma_true) {
    const SpaceTimeGrid fine = refine(config.grid, config.data_factor);
    const auto gamma = sample_field(fine, gamma_true);
    const auto coeffs = config.coefficients(gamma);
    const auto data = config.data.sample(fine);
    const auto boundary = boundary_for(config, gamma, fine);
    const auto traj = solve_forward(coeffs, data, config.data.sample_source(fine), fine, boundary);
    const auto sides = require_admissible(config.geometry, config.grid).observed_sides;
    auto obs = restrict_observation(extract_observation(traj, sides, fine), config.data_factor);
    return perturb_with_noise(obs, config.noise_level, config.seed);
}

std::pair<ScalarField, StepDiagnostics> reconstruction_step(const ScalarField& gamma_k,
                                                            const ObservationData& data_obs,
                                                            const ReconstructionConfig& config,
                                                            const BoundaryData& boundary) {
    const SpaceTimeGrid& grid = config.grid;
    const auto data = config.data.sample(grid);
    if (config.data.eta > 0.0)
        for (double v : data.u2)
            if (std::abs(v) < config.data.eta) throw InvalidInput("reconstruction: |u2| below eta, update undefined");
    const auto coeffs = config.coefficients(gamma_k);
    const auto traj = solve_forward(coeffs, data, config.data.sample_source(grid), grid, boundary);

    const DiscreteFunctional fn(coeffs, config.geometry, config.scales, grid);
    const auto obs_k = extract_observation(traj, fn.observed_sides(), grid);
    const MuPair mu = build_mu(obs_k, data_obs, grid.dt(), config.smoothing_window);
    const auto [y, diag] = fn.minimize(mu, SpaceTimeField(grid), config.minimizer);

    StepDiagnostics sd;
    sd.minimizer = diag;
    sd.increment = initial_second_derivative(y, grid.dt());
    for (int i = 1; i < grid.nx - 1; ++i) sd.increment[i] /= data.u2[i];
    extrapolate_ends(sd.increment);

    ScalarField tilde(grid.nx);
    for (int i = 0; i < grid.nx; ++i) tilde[i] = gamma_k[i] + sd.increment[i];
    ScalarField next = project_to_box(tilde, config.box_bound);
    for (int i = 0; i < grid.nx; ++i)
        if (next[i] != tilde[i]) ++sd.clamped_nodes;
    sd.step_norm = l2_distance(next, gamma_k, grid);
    return {next, sd};
}

ScalarField oracle_step(const ScalarField& gamma_k, const ScalarField& gamma_true, const ReconstructionConfig& config,
                        const BoundaryData& boundary) {
    const SpaceTimeGrid& grid = config.grid;
    const auto data = config.data.sample(grid);
    const auto f = config.data.sample_source(grid);
    const auto tk = solve_forward(config.coefficients(gamma_k), data, f, grid, boundary);
    const auto tt = solve_forward(config.coefficients(gamma_true), data, f, grid, boundary);
    ScalarField inc(grid.nx, 0.0);
    const Stencil st = time_stencil(grid.nt, 2, 0);
    const double dt2 = grid.dt() * grid.dt();
    for (int i = 1; i < grid.nx - 1; ++i) {
        double acc = 0.0;
        for (std::size_t j = 0; j < st.weights.size(); ++j) {
            const int n = st.start + static_cast<int>(j);
            acc += st.weights[j] * (tk.ut(n, i) - tt.ut(n, i));
        }
        inc[i] = acc / dt2 / data.u2[i];
    }
    extrapolate_ends(inc);
    ScalarField tilde(grid.nx);
    for (int i = 0; i < grid.nx; ++i) tilde[i] = gamma_k[i] + inc[i];
    return project_to_box(tilde, config.box_bound);
}

double weighted_error_log_scale(const SpaceTimeGrid& grid, const CarlemanGeometry& geometry,
                                const CarlemanScales& scales) {
    double top = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid.nx; ++i) top = std::max(top, log_weight(grid.x(i), 0.0, geometry, scales));
    return top;
}

double weighted_error(const ScalarField& a, const ScalarField& b, const SpaceTimeGrid& grid,
                      const CarlemanGeometry& geometry, const CarlemanScales& scales) {
    check_field(a, grid, "weighted_error");
    check_field(b, grid, "weighted_error");
    const double top = weighted_error_log_scale(grid, geometry, scales);
    double acc = 0.0;
    for (int i = 1; i < grid.nx - 1; ++i) {
        const double d = a[i] - b[i];
        acc += grid.h() * std::exp(log_weight(grid.x(i), 0.0, geometry, scales) - top) * d * d;
    }
    return acc;
}

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::converged: return "converged";
        case StopReason::max_iterations: return "max_iterations";
        case StopReason::divergence: return "divergence";
        case StopReason::failure: return "failure";
    }
    return "unknown";
}

std::vector<double> contraction_ratios(const std::vector<double>& errors) {
    std::vector<double> out;
    for (std::size_t k = 0; k + 1 < errors.size(); ++k)
        out.push_back(errors[k] > 1e-30 ? errors[k + 1] / errors[k] : std::numeric_limits<double>::quiet_NaN());
    return out;
}

std::vector<double> contraction_ratios(const ReconstructionReport& report) {
    std::vector<double> e;
    for (const auto& rec : report.history) e.push_back(rec.weighted_error);
    return contraction_ratios(e);
}

ReconstructionReport run_reconstruction(const ReconstructionConfig& config, const ObservationData& data_obs,
                                        const BoundaryData& boundary, const std::optional<ScalarField>& gamma_true) {
    config.validate();
    const SpaceTimeGrid& grid = config.grid;
    ReconstructionReport rep;
    rep.synthetic = gamma_true.has_value();
    rep.error_log_scale = weighted_error_log_scale(grid, config.geometry, config.scales);
    auto error_of = [&](const ScalarField& g) {
        return gamma_true ? weighted_error(g, *gamma_true, grid, config.geometry, config.scales)
                          : std::numeric_limits<double>::quiet_NaN();
    };

    ScalarField gamma = config.initial_gamma.empty() ? ScalarField(grid.nx, 0.0) : config.initial_gamma;
    rep.history.push_back({gamma, error_of(gamma), {}});
    int increases = 0;
    for (int k = 0; k < config.max_iterations; ++k) {
        std::pair<ScalarField, StepDiagnostics> step;
        try {
            step = reconstruction_step(gamma, data_obs, config, boundary);
        } catch (const std::exception& e) {
            rep.stop = StopReason::failure;
            rep.failure = "iteration " + std::to_string(k + 1) + ": " + e.what();
            break;
        }
        if (gamma_true) {
            for (int i = 0; i < grid.nx; ++i) {
                const double tilde = gamma[i] + step.second.increment[i];
                if (std::abs(step.first[i] - (*gamma_true)[i]) > std::abs(tilde - (*gamma_true)[i]) + 1e-15)
                    ++rep.projection_violations;
            }
        }
        gamma = step.first;
        const double e = error_of(gamma);
        rep.history.push_back({gamma, e, step.second});
        if (step.second.step_norm < config.stop_tol) {
            rep.stop = StopReason::converged;
            break;
        }
        if (gamma_true) {
            const double prev = rep.history[rep.history.size() - 2].weighted_error;
            increases = e > prev ? increases + 1 : 0;
            if (increases >= 3) {
                rep.stop = StopReason::divergence;
                break;
            }
        }
        rep.stop = StopReason::max_iterations;
    }
    if (gamma_true) rep.ratios = contraction_ratios(rep);
    return rep;
}

ReconstructionReport run_reconstruction(const ReconstructionConfig& config,
                                        const std::function<double(double)>& gamma_true) {
    config.validate();
    const auto truth = sample_field(config.grid, gamma_true);
    const auto obs = synthesize_observation(config, gamma_true);
    // The compatible profile depends only on endpoint values, identical on both grids.
    const auto boundary = boundary_for(config, truth, config.grid);
    return run_reconstruction(config, obs, boundary, truth);
}

}  // namespace mgt
