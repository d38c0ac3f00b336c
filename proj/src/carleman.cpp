#include "mgt/carleman.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace mgt {

namespace {
bool contains(const std::vector<Side>& sides, Side s) { return std::find(sides.begin(), sides.end(), s) != sides.end(); }
}  // namespace

AdmissibilityReport validate_admissibility(const CarlemanGeometry& g, const SpaceTimeGrid& grid) {
    AdmissibilityReport rep;
    auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };

    if (g.x0 >= grid.x_left && g.x0 <= grid.x_right) fail("x0 lies in the closed domain");
    if (!(g.beta > 0.0 && g.beta < 1.0)) fail("beta must lie in (0, 1)");
    if (std::abs(g.final_time - grid.final_time) > 1e-12 * std::max(1.0, grid.final_time))
        fail("geometry final time differs from the grid final time");

    rep.sup_distance = std::max(std::abs(grid.x_left - g.x0), std::abs(grid.x_right - g.x0));
    if (!(g.final_time > rep.sup_distance)) fail("T must exceed sup |x - x0|");
    if (!(g.beta * g.final_time > rep.sup_distance)) fail("beta T must exceed sup |x - x0|");
    if (!(g.m0 >= g.beta * g.final_time * g.final_time + 1.0)) fail("M0 must be at least beta T^2 + 1");

    double closest = 0.0;
    if (g.x0 < grid.x_left)
        closest = grid.x_left - g.x0;
    else if (g.x0 > grid.x_right)
        closest = g.x0 - grid.x_right;
    rep.phi_min = closest * closest - g.beta * g.final_time * g.final_time + g.m0;

    // Outward normals: -1 on the left, +1 on the right.
    if ((grid.x_left - g.x0) * -1.0 >= 0.0) rep.required_sides.push_back(Side::left);
    if ((grid.x_right - g.x0) * 1.0 >= 0.0) rep.required_sides.push_back(Side::right);

    if (g.observed_sides.empty()) {
        rep.observed_sides = rep.required_sides;
    } else {
        rep.observed_sides = g.observed_sides;
        for (Side s : rep.required_sides)
            if (!contains(g.observed_sides, s)) fail("observed boundary misses the " + to_string(s) + " endpoint");
    }
    if (rep.observed_sides.empty()) fail("observed boundary is empty");
    std::sort(rep.observed_sides.begin(), rep.observed_sides.end());
    rep.observed_sides.erase(std::unique(rep.observed_sides.begin(), rep.observed_sides.end()), rep.observed_sides.end());
    rep.accepted = rep.violations.empty();
    return rep;
}

AdmissibilityReport require_admissible(const CarlemanGeometry& geometry, const SpaceTimeGrid& grid) {
    auto rep = validate_admissibility(geometry, grid);
    if (!rep.accepted) {
        std::string msg = "inadmissible weight geometry:";
        for (const auto& v : rep.violations) msg += " " + v + ";";
        throw InvalidInput(msg);
    }
    return rep;
}

double phi(double x, double t, const CarlemanGeometry& g) {
    const double d = x - g.x0;
    return d * d - g.beta * t * t + g.m0;
}

double phi_lambda(double x, double t, const CarlemanGeometry& g, const CarlemanScales& sc) {
    return std::exp(sc.lambda * phi(x, t, g));
}

double log_weight(double x, double t, const CarlemanGeometry& g, const CarlemanScales& sc) {
    return 2.0 * sc.s * phi_lambda(x, t, g, sc);
}

WeightStatistics weight_statistics(const SpaceTimeGrid& grid, const CarlemanGeometry& g, const CarlemanScales& sc) {
    WeightStatistics st;
    st.log_min = std::numeric_limits<double>::infinity();
    st.log_max = -std::numeric_limits<double>::infinity();
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < grid.nx; ++i) {
            const double lw = log_weight(grid.x(i), grid.t(n), g, sc);
            st.log_min = std::min(st.log_min, lw);
            st.log_max = std::max(st.log_max, lw);
        }
    st.log10_ratio = (st.log_max - st.log_min) / std::log(10.0);
    return st;
}

void check_overflow(const WeightStatistics& stats) {
    if (stats.log_max > kLogWeightGuard) {
        std::ostringstream os;
        os << "weight overflow: log_weight max = " << stats.log_max << " exceeds " << kLogWeightGuard
           << "; lower s or lambda";
        throw WeightOverflow(os.str(), stats.log_max);
    }
}

CarlemanTerms carleman_lhs_rhs(const SpaceTimeField& y, const MGTCoefficients& coeffs, const CarlemanGeometry& g,
                               const CarlemanScales& sc, const SpaceTimeGrid& grid) {
    check_field(y, grid, "carleman_lhs_rhs");
    const auto adm = require_admissible(g, grid);
    const auto stats = weight_statistics(grid, g, sc);
    check_overflow(stats);
    for (int n = 0; n < grid.nt; ++n)
        if (y(n, 0) != 0.0 || y(n, grid.nx - 1) != 0.0)
            throw InvalidInput("carleman_lhs_rhs: y must vanish at the boundary");
    for (int i = 0; i < grid.nx; ++i)
        if (y(0, i) != 0.0) throw InvalidInput("carleman_lhs_rhs: y must vanish at t = 0");

    const double dt = grid.dt();
    const double c2 = coeffs.c * coeffs.c;
    const double c4 = c2 * c2;
    const double sl = sc.s * sc.lambda;
    const double sl3 = sl * sl * sl;
    const auto alpha = coeffs.alpha();

    const SpaceTimeField yt = time_difference(y, dt, 1);
    const SpaceTimeField ytt = time_difference(y, dt, 2);
    const SpaceTimeField yttt = time_difference(y, dt, 3);
    const auto qx = trapezoid_weights(grid.nx, grid.h());
    const auto qt = trapezoid_weights(grid.nt, dt);

    CarlemanTerms out;
    out.log_scale = stats.log_min;
    for (int i = 0; i < grid.nx; ++i) {
        const double w = std::exp(log_weight(grid.x(i), 0.0, g, sc) - stats.log_min);
        out.lhs_initial += qx[i] * w * ytt(0, i) * ytt(0, i);
    }
    out.lhs_initial *= std::sqrt(sc.s);

    for (int n = 0; n < grid.nt; ++n) {
        const auto yn = y.snapshot(n);
        const auto ytn = yt.snapshot(n);
        const auto gy = gradient(yn, grid);
        const auto gyt = gradient(ytn, grid);
        const auto ly = apply_laplacian(yn, grid);
        const auto lyt = apply_laplacian(ytn, grid);
        const double t = grid.t(n);
        double state = 0.0, velocity = 0.0, interior = 0.0;
        for (int i = 0; i < grid.nx; ++i) {
            const double x = grid.x(i);
            const double w = std::exp(log_weight(x, t, g, sc) - stats.log_min);
            const double pl = phi_lambda(x, t, g, sc);
            const double pl3 = pl * pl * pl;
            state += qx[i] * w * (sl * pl * (yt(n, i) * yt(n, i) + gy[i] * gy[i]) + sl3 * pl3 * yn[i] * yn[i]);
            velocity += qx[i] * w *
                        (sl * pl * (ytt(n, i) * ytt(n, i) + gyt[i] * gyt[i]) + sl3 * pl3 * yt(n, i) * yt(n, i));
            if (i > 0 && i < grid.nx - 1) {
                const double op = yttt(n, i) + alpha[i] * ytt(n, i) - c2 * ly[i] - coeffs.b * lyt[i];
                interior += qx[i] * w * op * op;
            }
        }
        out.lhs_state += qt[n] * c4 * state;
        out.lhs_velocity += qt[n] * velocity;
        out.rhs_interior += qt[n] * interior;
        for (Side side : adm.observed_sides) {
            const double w = std::exp(log_weight(grid.endpoint(side), t, g, sc) - stats.log_min);
            const double dy = boundary_normal_derivative(std::span<const double>(yn), grid.h(), side);
            const double dyt = boundary_normal_derivative(std::span<const double>(ytn), grid.h(), side);
            out.rhs_boundary += qt[n] * sl * w * (dyt * dyt + c4 * dy * dy);
        }
    }
    out.lhs = out.lhs_initial + out.lhs_state + out.lhs_velocity;
    const double rhs = out.rhs_interior + out.rhs_boundary;
    out.ratio = (out.lhs == 0.0 && rhs == 0.0) ? 0.0 : out.lhs / rhs;
    return out;
}

}  // namespace mgt
