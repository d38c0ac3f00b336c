#pragma once

#include <array>
#include <stdexcept>
#include <string>

#include "mgt/grid.hpp"

namespace mgt {

/// Linear-solve failure inside a time step.
class SolveError : public std::runtime_error {
public:
    SolveError(const std::string& what, int step) : std::runtime_error(what), step_(step) {}
    int step() const { return step_; }

private:
    int step_;
};

/// u_ttt + alpha u_tt - c^2 u_xx - b u_xxt = f with alpha = gamma + c^2/b.
struct MGTCoefficients {
    double c = 1.0;
    double b = 1.0;
    ScalarField gamma;
    double box_bound = 1.0;

    ScalarField alpha() const;
    /// Throws InvalidInput unless b > 0, c != 0, M > 0 and 0 <= gamma <= M nodewise.
    void validate(const SpaceTimeGrid& grid) const;
};

struct InitialData {
    ScalarField u0;
    ScalarField u1;
    ScalarField u2;
    /// Lower bound required for |u2|; 0 disables the check.
    double eta = 0.0;

    static InitialData zeros(const SpaceTimeGrid& grid);
    void validate(const SpaceTimeGrid& grid) const;
};

/// Dirichlet values g(t) at the two endpoints. The default is g = 0. The compatible profile
/// g(t) = a (exp(-k t) - 1 + k t) / k^2 solves g''' + k g'' = 0 with g(0) = g'(0) = 0 and g''(0) = a,
/// so it matches u2 at the endpoint and the equation there for any coefficient with alpha = k.
struct BoundaryData {
    bool homogeneous = true;
    std::array<double, 2> accel{0.0, 0.0};
    std::array<double, 2> rate{1.0, 1.0};

    /// derivative in 0..2
    double value(Side side, double t, int derivative) const;

    static BoundaryData compatible(const MGTCoefficients& coeffs, const InitialData& data);
};

struct Trajectory {
    SpaceTimeField u;
    SpaceTimeField ut;
    SpaceTimeField utt;
};

/// Crank-Nicolson on (u, u_t, u_tt). The implicit stage reduces to one tridiagonal system in u_tt per
/// step, factored once.
Trajectory solve_forward(const MGTCoefficients& coeffs, const InitialData& data, const SpaceTimeField& source,
                         const SpaceTimeGrid& grid, const BoundaryData& boundary = {});

/// (b/2)||y_x||^2 + (1/2)||y_t||^2.
double energy_e(const ScalarField& y, const ScalarField& yt, double b, const SpaceTimeGrid& grid);

/// E_e(u_t, u_tt) + E_e(u, u_t) at level n.
double total_energy(const Trajectory& traj, int level, double b, const SpaceTimeGrid& grid);

struct BoundReport {
    double numerator = 0.0;
    double denominator = 0.0;
    double ratio = 0.0;
    bool unbounded = false;
};

/// max_t E(t) / (E(0) + ||f||^2).
BoundReport verify_energy_bound(const Trajectory& traj, const SpaceTimeField& source, double b,
                                const SpaceTimeGrid& grid);

/// max_t ||u_xx(t)||^2 / (||f||^2 + E(0) + ||u0_xx||^2).
BoundReport verify_laplacian_bound(const Trajectory& traj, const SpaceTimeField& source,
                                   const MGTCoefficients& coeffs, const SpaceTimeGrid& grid);

/// Discrete residual of the equation at interior nodes (boundary columns 0).
SpaceTimeField pde_residual(const Trajectory& traj, const MGTCoefficients& coeffs, const SpaceTimeField& source,
                            const SpaceTimeGrid& grid);

}  // namespace mgt
