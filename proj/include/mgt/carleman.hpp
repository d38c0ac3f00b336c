#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "mgt/grid.hpp"
#include "mgt/mgt_solver.hpp"

namespace mgt {

/// Raised when a weight would be exponentiated beyond the guard.
class WeightOverflow : public std::runtime_error {
public:
    WeightOverflow(const std::string& what, double log_weight_max)
        : std::runtime_error(what), log_weight_max_(log_weight_max) {}
    double log_weight_max() const { return log_weight_max_; }

private:
    double log_weight_max_;
};

/// Largest natural-log weight that is ever exponentiated.
inline constexpr double kLogWeightGuard = 700.0;

/// Weight centre x0 outside the domain, time decay beta, shift M0, horizon T and observed endpoints.
/// An empty observed_sides list means "use the derived set".
struct CarlemanGeometry {
    double x0 = -0.1;
    double beta = 0.9;
    double m0 = 2.5;
    double final_time = 1.25;
    std::vector<Side> observed_sides;
};

struct CarlemanScales {
    double lambda = 1.0;
    double s = 1.0;
};

struct AdmissibilityReport {
    bool accepted = false;
    std::vector<std::string> violations;
    /// Endpoints p with (p - x0) n(p) >= 0.
    std::vector<Side> required_sides;
    /// Observed set to use: the configured one if it is large enough, else the required one.
    std::vector<Side> observed_sides;
    double sup_distance = 0.0;
    double phi_min = 0.0;
};

AdmissibilityReport validate_admissibility(const CarlemanGeometry& geometry, const SpaceTimeGrid& grid);

/// Throws InvalidInput listing the violations when the geometry is rejected.
AdmissibilityReport require_admissible(const CarlemanGeometry& geometry, const SpaceTimeGrid& grid);

/// |x - x0|^2 - beta t^2 + M0
double phi(double x, double t, const CarlemanGeometry& geometry);

/// Natural log of the weight exp(2 s exp(lambda phi)).
double log_weight(double x, double t, const CarlemanGeometry& geometry, const CarlemanScales& scales);

/// exp(lambda phi)
double phi_lambda(double x, double t, const CarlemanGeometry& geometry, const CarlemanScales& scales);

struct WeightStatistics {
    double log_min = 0.0;
    double log_max = 0.0;
    double log10_ratio = 0.0;
};

/// Extremes of log_weight over the grid nodes of closure(Omega) x [0, T]. Pure evaluation: the
/// geometry is not validated, so inadmissible parameter sets can be tabulated too.
WeightStatistics weight_statistics(const SpaceTimeGrid& grid, const CarlemanGeometry& geometry,
                                   const CarlemanScales& scales);

/// Throws WeightOverflow when the largest log weight exceeds the guard.
void check_overflow(const WeightStatistics& stats);

struct CarlemanTerms {
    double lhs = 0.0;
    double rhs_interior = 0.0;
    double rhs_boundary = 0.0;
    double ratio = 0.0;
    /// Individual left-hand contributions, in the order: initial acceleration, c^4 W(y), W(y_t).
    double lhs_initial = 0.0;
    double lhs_state = 0.0;
    double lhs_velocity = 0.0;
    /// All terms are scaled by exp(-log_scale).
    double log_scale = 0.0;
};

/// Both sides of the weighted observability inequality for a trajectory y with y(0) = y_t(0) = 0 and
/// zero boundary values, evaluated with grid stencils and trapezoidal quadrature. Constants are 1.
CarlemanTerms carleman_lhs_rhs(const SpaceTimeField& y, const MGTCoefficients& coeffs,
                               const CarlemanGeometry& geometry, const CarlemanScales& scales,
                               const SpaceTimeGrid& grid);

}  // namespace mgt
