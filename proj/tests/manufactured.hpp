#pragma once

#include <cmath>
#include <numbers>

#include "mgt/mgt_solver.hpp"

namespace mgt::test {

// Exact solution u = sin(pi x) t^3 on (0, 1); the source follows by substituting u into
// u_ttt + alpha u_tt - c^2 u_xx - b u_txx with alpha = gamma + c^2 / b.
struct CubicManufactured {
    double c = 1.0;
    double b = 1.0;
    double gamma = 0.0;

    double alpha() const { return gamma + c * c / b; }
    static double u(double x, double t) { return std::sin(std::numbers::pi * x) * t * t * t; }
    static double ut(double x, double t) { return 3.0 * std::sin(std::numbers::pi * x) * t * t; }
    static double utt(double x, double t) { return 6.0 * std::sin(std::numbers::pi * x) * t; }
    double f(double x, double t) const {
        const double p2 = std::numbers::pi * std::numbers::pi;
        return std::sin(std::numbers::pi * x) *
               (6.0 + 6.0 * alpha() * t + 3.0 * b * p2 * t * t + c * c * p2 * t * t * t);
    }

    MGTCoefficients coefficients(const SpaceTimeGrid& g) const { return {c, b, ScalarField(g.nx, gamma), 1.0}; }
    SpaceTimeField source(const SpaceTimeGrid& g) const {
        return sample_spacetime(g, [this](double x, double t) { return f(x, t); });
    }
};

}  // namespace mgt::test
