#include "mgt/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>

namespace mgt {

SpaceFunction random_coefficient(std::mt19937_64& rng, double box_bound, double x_left, double x_right) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::array<double, 3> a{u(rng), u(rng), u(rng)};
    double total = 0.0;
    for (double v : a) total += std::abs(v);
    const double scale = total > 0.0 ? 0.45 * box_bound / total : 0.0;
    for (double& v : a) v *= scale;
    const double len = x_right - x_left;
    return [a, box_bound, x_left, len](double x) {
        double g = 0.5 * box_bound;
        for (int k = 0; k < 3; ++k) g += a[k] * std::cos((k + 1) * std::numbers::pi * (x - x_left) / len);
        return g;
    };
}

SpaceTimeFunction random_trajectory(std::mt19937_64& rng, double x_left, double x_right) {
    std::normal_distribution<double> nd(0.0, 1.0);
    std::uniform_real_distribution<double> ud(-0.5, 0.5);
    std::array<double, 4> a{};
    for (int k = 0; k < 4; ++k) a[k] = nd(rng) / (k + 1);
    const double b1 = ud(rng);
    const double b2 = ud(rng);
    const double len = x_right - x_left;
    return [a, b1, b2, x_left, len](double x, double t) {
        double s = 0.0;
        for (int k = 0; k < 4; ++k) s += a[k] * std::sin((k + 1) * std::numbers::pi * (x - x_left) / len);
        return s * t * t * (1.0 + b1 * t + b2 * t * t);
    };
}

StabilityReport stability_two_sided(const std::vector<std::pair<SpaceFunction, SpaceFunction>>& pairs,
                                    const ReconstructionConfig& config) {
    const SpaceTimeGrid& grid = config.grid;
    const auto sides = require_admissible(config.geometry, grid).observed_sides;
    const auto data = config.data.sample(grid);
    const auto source = config.data.sample_source(grid);
    StabilityReport rep;
    for (const auto& [f1, f2] : pairs) {
        const auto g1 = sample_field(grid, f1);
        const auto g2 = sample_field(grid, f2);
        StabilityRecord rec;
        ScalarField gap(grid.nx);
        for (int i = 0; i < grid.nx; ++i) gap[i] = g1[i] - g2[i];
        rec.coefficient_gap_sq = norm_sq(gap, grid);
        if (rec.coefficient_gap_sq == 0.0) {
            rec.skipped = true;
            rep.pairs.push_back(rec);
            continue;
        }
        const auto o1 = extract_observation(solve_forward(config.coefficients(g1), data, source, grid), sides, grid);
        const auto o2 = extract_observation(solve_forward(config.coefficients(g2), data, source, grid), sides, grid);
        for (std::size_t k = 0; k < o1.trace.size(); ++k) {
            std::vector<double> d(grid.nt);
            for (int n = 0; n < grid.nt; ++n) d[n] = o1.trace[k].samples[n] - o2.trace[k].samples[n];
            rec.trace_gap_sq += trace_norm_sq(d, grid.dt(), NormKind::h2_time);
        }
        rec.upper_ratio = rec.trace_gap_sq / rec.coefficient_gap_sq;
        rec.lower_ratio = rec.trace_gap_sq > 0.0 ? rec.coefficient_gap_sq / rec.trace_gap_sq
                                                 : std::numeric_limits<double>::infinity();
        rep.max_lower_ratio = std::max(rep.max_lower_ratio, rec.lower_ratio);
        rep.max_upper_ratio = std::max(rep.max_upper_ratio, rec.upper_ratio);
        rep.pairs.push_back(rec);
    }
    rep.constant = std::max(rep.max_lower_ratio, rep.max_upper_ratio);
    return rep;
}

CarlemanSweepReport carleman_constant_sweep(int sample_count, const std::vector<CarlemanScales>& scales_list,
                                            const ReconstructionConfig& config, const SpaceFunction& gamma,
                                            std::uint64_t seed) {
    if (sample_count < 0) throw InvalidInput("carleman_constant_sweep: negative sample count");
    CarlemanSweepReport rep;
    if (sample_count == 0) return rep;
    const SpaceTimeGrid& grid = config.grid;
    const auto coeffs = config.coefficients(sample_field(grid, gamma));
    std::mt19937_64 rng(seed);
    std::vector<SpaceTimeField> samples;
    for (int k = 0; k < sample_count; ++k) {
        auto fn = random_trajectory(rng, grid.x_left, grid.x_right);
        auto y = sample_spacetime(grid, fn);
        for (int n = 0; n < grid.nt; ++n) y(n, 0) = y(n, grid.nx - 1) = 0.0;
        for (int i = 0; i < grid.nx; ++i) y(0, i) = 0.0;
        samples.push_back(std::move(y));
    }
    for (const auto& sc : scales_list) {
        CarlemanSweepEntry e;
        e.s = sc.s;
        e.lambda = sc.lambda;
        e.min_rhs = std::numeric_limits<double>::infinity();
        for (const auto& y : samples) {
            const auto terms = carleman_lhs_rhs(y, coeffs, config.geometry, sc, grid);
            e.ratios.push_back(terms.ratio);
            e.max_ratio = std::max(e.max_ratio, terms.ratio);
            e.min_rhs = std::min(e.min_rhs, terms.rhs_interior + terms.rhs_boundary);
        }
        rep.entries.push_back(std::move(e));
    }
    return rep;
}

std::vector<WeightRow> weight_ratio_report(const std::vector<WeightRowSpec>& rows, int nx, int nt) {
    std::vector<WeightRow> out;
    for (const auto& spec : rows) {
        const auto grid = build_grid(spec.x_left, spec.x_right, nx, spec.geometry.final_time, nt);
        WeightRow r;
        r.label = spec.label;
        r.x_left = spec.x_left;
        r.x_right = spec.x_right;
        r.geometry = spec.geometry;
        r.scales = spec.scales;
        r.admissible = validate_admissibility(spec.geometry, grid).accepted;
        r.stats = weight_statistics(grid, spec.geometry, spec.scales);
        r.reference_log10 = spec.reference_log10;
        out.push_back(r);
    }
    return out;
}

std::vector<WeightRowSpec> large_parameter_rows(const std::vector<double>& m0_values, double claimed_log10) {
    std::vector<WeightRowSpec> rows;
    for (double m0 : m0_values) {
        WeightRowSpec r;
        r.label = "large-parameter example, M0 = " + std::to_string(m0);
        r.geometry = CarlemanGeometry{0.0, 1.0, m0, 1.0, {Side::right}};
        r.scales = CarlemanScales{3.0, 3.0};
        r.reference_log10 = claimed_log10;
        rows.push_back(r);
    }
    return rows;
}

double large_parameter_m0_for(double target_log10, double lo, double hi) {
    auto ratio = [](double m0) {
        const auto grid = build_grid(0.0, 1.0, 5, 1.0, 5);
        return weight_statistics(grid, CarlemanGeometry{0.0, 1.0, m0, 1.0, {Side::right}}, CarlemanScales{3.0, 3.0})
            .log10_ratio;
    };
    if (ratio(lo) > target_log10 || ratio(hi) < target_log10)
        throw InvalidInput("large_parameter_m0_for: target outside the bracket");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ratio(mid) < target_log10 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

std::vector<EnergySuiteEntry> energy_suite(const ReconstructionConfig& config) {
    std::vector<EnergySuiteEntry> out;
    for (int level = 0; level < 2; ++level) {
        const int f = 1 << level;
        const auto grid = build_grid(config.grid.x_left, config.grid.x_right, f * (config.grid.nx - 1) + 1,
                                     config.grid.final_time, f * (config.grid.nt - 1) + 1);
        const auto data = config.data.sample(grid);
        const auto source = config.data.sample_source(grid);
        const auto sides = require_admissible(config.geometry, grid).observed_sides;
        for (double g : {0.0, config.box_bound}) {
            const auto coeffs = config.coefficients(ScalarField(grid.nx, g));
            const auto traj = solve_forward(coeffs, data, source, grid);
            EnergySuiteEntry e;
            e.label = g == 0.0 ? "gamma=0" : "gamma=M";
            e.nx = grid.nx;
            e.nt = grid.nt;
            e.energy = verify_energy_bound(traj, source, coeffs.b, grid);
            e.laplacian = verify_laplacian_bound(traj, source, coeffs, grid);
            e.hidden_regularity = hidden_regularity_check(extract_observation(traj, sides, grid), data, source, grid).ratio;
            out.push_back(e);
        }
    }
    return out;
}

}  // namespace mgt
