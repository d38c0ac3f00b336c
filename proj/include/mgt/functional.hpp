#pragma once

#include <Eigen/SparseCore>
#include <vector>

#include "mgt/carleman.hpp"
#include "mgt/grid.hpp"
#include "mgt/kernels.hpp"
#include "mgt/mgt_solver.hpp"
#include "mgt/observation.hpp"

namespace mgt {

/// Unknown trajectory: interior nodes at time levels 1..Nt-1. Level 0 is zero, and the ghost level
/// y(-dt) = 3 y(dt) - y(2 dt) / 2 makes every stencil see y(0) = y_t(0) = 0 to third order.
struct TrajectoryVariable {
    int levels = 0;
    int interior = 0;
    std::vector<double> values;

    static TrajectoryVariable zeros(const SpaceTimeGrid& grid);
    /// Takes levels 1.. and interior nodes of a full field.
    static TrajectoryVariable from_field(const SpaceTimeField& field);
    SpaceTimeField to_field() const;
    double at(int level, int node) const;
};

enum class LinearSolver { cg, direct };

struct MinimizeOptions {
    double tolerance = 1e-9;
    /// 0 means 10 times the number of unknowns.
    long max_iterations = 0;
    LinearSolver solver = LinearSolver::cg;
    kernels::Exec exec = kernels::default_exec();
};

struct MinimizerDiagnostics {
    double j_value = 0.0;
    double v_norm_sq = 0.0;
    double el_residual = 0.0;
    long solver_iterations = 0;
    double bound_rhs = 0.0;
    double bound_slack = 0.0;
    bool converged = false;
};

/// Raised when the normal-equation solve misses its tolerance.
class MinimizerError : public std::runtime_error {
public:
    MinimizerError(const std::string& what, MinimizerDiagnostics diag)
        : std::runtime_error(what), diagnostics_(diag) {}
    const MinimizerDiagnostics& diagnostics() const { return diagnostics_; }

private:
    MinimizerDiagnostics diagnostics_;
};

/// Discrete weighted least-squares functional
///   J(y) = 1/(2s) sum w |Ly - g|^2 + 1/2 sum_{observed} w (|dy/dn - mu|^2 + |dy_t/dn - mu_t|^2)
/// written as J = 1/2 (A y - d)^T W (A y - d). Weights are divided by exp(log_scale), a positive rescaling
/// that leaves the minimizer unchanged.
class DiscreteFunctional {
public:
    DiscreteFunctional(const MGTCoefficients& coeffs, const CarlemanGeometry& geometry, const CarlemanScales& scales,
                       const SpaceTimeGrid& grid, bool normalize_weights = true);

    int unknowns() const { return static_cast<int>(op_.cols()); }
    int rows() const { return static_cast<int>(op_.rows()); }
    int interior_rows() const { return interior_rows_; }
    const std::vector<Side>& observed_sides() const { return sides_; }
    double log_scale() const { return log_scale_; }
    const SpaceTimeGrid& grid() const { return grid_; }
    const CarlemanScales& scales() const { return scales_; }
    const std::vector<double>& row_weights() const { return weights_; }
    const Eigen::SparseMatrix<double, Eigen::RowMajor>& op() const { return op_; }

    /// A y: Ly at interior nodes of levels 0..Nt-1, then per observed endpoint the traces of y and y_t.
    std::vector<double> apply(const TrajectoryVariable& y) const;
    /// Target vector d built from (mu, g); g is read at interior nodes.
    std::vector<double> data_vector(const MuPair& mu, const SpaceTimeField& g) const;

    double evaluate(const TrajectoryVariable& y, const MuPair& mu, const SpaceTimeField& g) const;
    double v_norm_sq(const TrajectoryVariable& y) const;
    /// sum W (A y)_r (A v)_r
    double bilinear(const TrajectoryVariable& y, const TrajectoryVariable& v) const;
    /// sum W d_r (A v)_r
    double data_form(const TrajectoryVariable& v, const MuPair& mu, const SpaceTimeField& g) const;
    /// A^T W (A y - d)
    std::vector<double> gradient(const TrajectoryVariable& y, const MuPair& mu, const SpaceTimeField& g) const;

    std::pair<TrajectoryVariable, MinimizerDiagnostics> minimize(const MuPair& mu, const SpaceTimeField& g,
                                                                 const MinimizeOptions& options = {}) const;

    /// sum over interior rows of W g^2 (equals (1/s) * weighted ||g||^2 in scaled units)
    double weighted_source_sq(const SpaceTimeField& g) const;

    /// Unscaled initial-time weight exp(log_w(x_i, 0) - log_scale) at each node.
    std::vector<double> initial_weights() const;

private:
    void assemble(const ScalarField& alpha, double c, double b);

    SpaceTimeGrid grid_;
    CarlemanGeometry geometry_;
    CarlemanScales scales_;
    std::vector<Side> sides_;
    double log_scale_ = 0.0;
    int interior_rows_ = 0;
    Eigen::SparseMatrix<double, Eigen::RowMajor> op_;
    kernels::CsrMatrix op_csr_;
    std::vector<double> weights_;
};

double evaluate_J(const TrajectoryVariable& y, const MuPair& mu, const SpaceTimeField& g,
                  const MGTCoefficients& coeffs, const CarlemanGeometry& geometry, const CarlemanScales& scales,
                  const SpaceTimeGrid& grid);

double v_norm_sq(const TrajectoryVariable& y, const MGTCoefficients& coeffs, const CarlemanGeometry& geometry,
                 const CarlemanScales& scales, const SpaceTimeGrid& grid);

std::pair<TrajectoryVariable, MinimizerDiagnostics> minimize_J(const MuPair& mu, const SpaceTimeField& g,
                                                               const MGTCoefficients& coeffs,
                                                               const CarlemanGeometry& geometry,
                                                               const CarlemanScales& scales, const SpaceTimeGrid& grid,
                                                               const MinimizeOptions& options = {});

/// y_tt(., 0) from the one-sided stencil (2 y^0 - 5 y^1 + 4 y^2 - y^3) / dt^2 at interior nodes, 0 at the ends.
ScalarField initial_second_derivative(const TrajectoryVariable& y, double dt);

struct DifferenceReport {
    /// 1/(2s) weighted ||L(y1 - y2)||^2 + weighted boundary terms
    double lhs = 0.0;
    /// (2/s) weighted ||g1 - g2||^2
    double rhs = 0.0;
    double slack = 0.0;
    /// The sharper bound 1/(2s) weighted ||g1 - g2||^2 implied by the same algebra.
    double sharp_rhs = 0.0;
    /// sqrt(s) weighted ||(y1 - y2)_tt(0)||^2 / weighted ||g1 - g2||^2
    double initial_constant = 0.0;
    MinimizerDiagnostics first;
    MinimizerDiagnostics second;
};

DifferenceReport minimizer_difference_check(const SpaceTimeField& g1, const SpaceTimeField& g2, const MuPair& mu,
                                            const MGTCoefficients& coeffs, const CarlemanGeometry& geometry,
                                            const CarlemanScales& scales, const SpaceTimeGrid& grid,
                                            const MinimizeOptions& options = {});

}  // namespace mgt
