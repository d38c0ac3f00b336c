#include "mgt/observation.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

namespace mgt {

MuPair MuPair::zeros(const std::vector<Side>& sides, int nt) {
    MuPair p;
    for (Side s : sides) {
        p.mu.push_back({s, std::vector<double>(nt, 0.0)});
        p.mu_t.push_back({s, std::vector<double>(nt, 0.0)});
    }
    return p;
}

ObservationData extract_observation(const Trajectory& traj, const std::vector<Side>& sides, const SpaceTimeGrid& grid) {
    if (sides.empty()) throw InvalidInput("extract_observation: observed boundary is empty");
    check_field(traj.u, grid, "extract_observation");
    ObservationData obs;
    const double h = grid.h();
    for (Side s : sides) {
        TraceSeries tr{s, std::vector<double>(grid.nt)};
        TraceSeries trt{s, std::vector<double>(grid.nt)};
        for (int n = 0; n < grid.nt; ++n) {
            tr.samples[n] = boundary_normal_derivative(traj.u.row(n), h, s);
            trt.samples[n] = boundary_normal_derivative(traj.ut.row(n), h, s);
        }
        obs.trace.push_back(std::move(tr));
        obs.trace_t.push_back(std::move(trt));
    }
    return obs;
}

ObservationData restrict_observation(const ObservationData& fine, int factor) {
    if (factor < 1) throw InvalidInput("restrict_observation: factor must be positive");
    auto thin = [factor](const TraceSeries& s) {
        if ((s.samples.size() - 1) % factor != 0)
            throw InvalidInput("restrict_observation: trace length incompatible with the factor");
        TraceSeries out{s.side, {}};
        for (std::size_t n = 0; n < s.samples.size(); n += factor) out.samples.push_back(s.samples[n]);
        return out;
    };
    ObservationData out = fine;
    for (auto& s : out.trace) s = thin(s);
    for (auto& s : out.trace_t) s = thin(s);
    return out;
}

RegularityReport hidden_regularity_check(const ObservationData& obs, const InitialData& data,
                                         const SpaceTimeField& source, const SpaceTimeGrid& grid) {
    RegularityReport r;
    for (const auto& s : obs.trace) r.trace_norm_sq += discrete_norm_sq(s, grid, NormKind::h1_time);
    const auto u0x = gradient(data.u0, grid);
    const auto u0xx = apply_laplacian(data.u0, grid);
    const auto u1x = gradient(data.u1, grid);
    r.data_norm_sq = norm_sq(data.u0, grid) + norm_sq(u0x, grid) + norm_sq(u0xx, grid) + norm_sq(data.u1, grid) +
                     norm_sq(u1x, grid) + norm_sq(data.u2, grid) + norm_sq(source, grid);
    if (r.trace_norm_sq == 0.0 && r.data_norm_sq == 0.0)
        r.ratio = 0.0;
    else
        r.ratio = r.trace_norm_sq / r.data_norm_sq;
    return r;
}

ObservationData perturb_with_noise(const ObservationData& obs, double level, std::uint64_t seed) {
    if (level < 0.0) throw InvalidInput("perturb_with_noise: level must be nonnegative");
    ObservationData out = obs;
    out.noise_level = level;
    out.seed = seed;
    if (level == 0.0) return out;
    std::mt19937_64 rng(seed);
    auto perturb = [&](TraceSeries& s) {
        double peak = 0.0;
        for (double v : s.samples) peak = std::max(peak, std::abs(v));
        std::normal_distribution<double> dist(0.0, level * peak);
        for (double& v : s.samples) v += dist(rng);
    };
    for (auto& s : out.trace) perturb(s);
    for (auto& s : out.trace_t) perturb(s);
    return out;
}

std::vector<double> moving_average(const std::vector<double>& series, int window) {
    if (window <= 1) return series;
    if (window % 2 == 0) throw InvalidInput("moving_average: window must be odd");
    const int half = window / 2;
    const int len = static_cast<int>(series.size());
    std::vector<double> out(len);
    for (int n = 0; n < len; ++n) {
        const int lo = std::max(0, n - half);
        const int hi = std::min(len - 1, n + half);
        const int r = std::min(n - lo, hi - n);
        double acc = 0.0;
        for (int j = n - r; j <= n + r; ++j) acc += series[j];
        out[n] = acc / (2 * r + 1);
    }
    return out;
}

MuPair build_mu(const ObservationData& obs_k, const ObservationData& obs_data, double dt, int smoothing_window) {
    if (obs_k.trace.size() != obs_data.trace.size() || obs_k.trace_t.size() != obs_data.trace_t.size())
        throw InvalidInput("build_mu: observed endpoint sets differ");
    auto diff = [&](const TraceSeries& a, const TraceSeries& b) {
        if (a.side != b.side) throw InvalidInput("build_mu: boundary points differ");
        if (a.samples.size() != b.samples.size()) throw InvalidInput("build_mu: trace lengths differ");
        std::vector<double> d(a.samples.size());
        for (std::size_t n = 0; n < d.size(); ++n) d[n] = a.samples[n] - b.samples[n];
        return TraceSeries{a.side, time_difference(moving_average(d, smoothing_window), dt, 1)};
    };
    MuPair p;
    for (std::size_t k = 0; k < obs_k.trace.size(); ++k) p.mu.push_back(diff(obs_k.trace[k], obs_data.trace[k]));
    for (std::size_t k = 0; k < obs_k.trace_t.size(); ++k)
        p.mu_t.push_back(diff(obs_k.trace_t[k], obs_data.trace_t[k]));
    return p;
}

void write_trace_csv(std::ostream& os, const ObservationData& obs, const SpaceTimeGrid& grid) {
    os << "t,dudn,dudtn\n";
    if (obs.trace.empty()) return;
    os << std::setprecision(17);
    for (int n = 0; n < grid.nt; ++n)
        os << grid.t(n) << ',' << obs.trace[0].samples[n] << ',' << obs.trace_t[0].samples[n] << '\n';
}

}  // namespace mgt
