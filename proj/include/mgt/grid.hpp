#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace mgt {

/// Raised for violated preconditions (shape mismatches, bad parameters).
class InvalidInput : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class Side { left, right };

std::string to_string(Side side);
Side side_from_string(const std::string& name);

/// Uniform grid on (x_left, x_right) x [0, T].
struct SpaceTimeGrid {
    double x_left = 0.0;
    double x_right = 1.0;
    int nx = 0;
    double final_time = 1.0;
    int nt = 0;

    double h() const { return (x_right - x_left) / (nx - 1); }
    double dt() const { return final_time / (nt - 1); }
    double x(int i) const { return x_left + i * h(); }
    double t(int n) const { return n * dt(); }
    double endpoint(Side side) const { return side == Side::left ? x_left : x_right; }
};

SpaceTimeGrid build_grid(double x_left, double x_right, int nx, double final_time, int nt);

/// One value per space node.
using ScalarField = std::vector<double>;

/// Nt x Nx array, row n holds the snapshot at time level n.
class SpaceTimeField {
public:
    SpaceTimeField() = default;
    SpaceTimeField(int nt, int nx, double fill = 0.0)
        : nt_(nt), nx_(nx), data_(static_cast<std::size_t>(nt) * nx, fill) {}
    explicit SpaceTimeField(const SpaceTimeGrid& grid, double fill = 0.0)
        : SpaceTimeField(grid.nt, grid.nx, fill) {}

    int nt() const { return nt_; }
    int nx() const { return nx_; }
    double& operator()(int n, int i) { return data_[static_cast<std::size_t>(n) * nx_ + i]; }
    double operator()(int n, int i) const { return data_[static_cast<std::size_t>(n) * nx_ + i]; }
    std::span<double> row(int n) { return {data_.data() + static_cast<std::size_t>(n) * nx_, static_cast<std::size_t>(nx_)}; }
    std::span<const double> row(int n) const {
        return {data_.data() + static_cast<std::size_t>(n) * nx_, static_cast<std::size_t>(nx_)};
    }
    ScalarField snapshot(int n) const;
    std::vector<double> column(int i) const;
    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }
    bool matches(const SpaceTimeGrid& grid) const { return nt_ == grid.nt && nx_ == grid.nx; }

private:
    int nt_ = 0;
    int nx_ = 0;
    std::vector<double> data_;
};

/// Normal-derivative samples over time at one endpoint.
struct TraceSeries {
    Side side = Side::right;
    std::vector<double> samples;
};

/// Finite-difference stencil over consecutive samples starting at `start`.
struct Stencil {
    int start = 0;
    std::vector<double> weights;
};

/// Weights w with sum_j w_j f(o_j) = f^(order)(0) exactly for polynomials of degree < offsets.size().
std::vector<double> fd_weights(const std::vector<double>& offsets, int order);

/// Stencil (unit spacing) for derivative `order` in 1..3 at `level` of a series of `length` samples.
/// Centered where it fits, otherwise a one-sided window of order+2 points (3 for order 1).
Stencil time_stencil(int length, int order, int level);

void check_field(const ScalarField& field, const SpaceTimeGrid& grid, const char* what);
void check_field(const SpaceTimeField& field, const SpaceTimeGrid& grid, const char* what);

ScalarField sample(const SpaceTimeGrid& grid, double (*fn)(double));

template <class Fn>
ScalarField sample_field(const SpaceTimeGrid& grid, Fn&& fn) {
    ScalarField out(grid.nx);
    for (int i = 0; i < grid.nx; ++i) out[i] = fn(grid.x(i));
    return out;
}

template <class Fn>
SpaceTimeField sample_spacetime(const SpaceTimeGrid& grid, Fn&& fn) {
    SpaceTimeField out(grid);
    for (int n = 0; n < grid.nt; ++n)
        for (int i = 0; i < grid.nx; ++i) out(n, i) = fn(grid.x(i), grid.t(n));
    return out;
}

/// Centered second difference at interior nodes; boundary output 0.
ScalarField apply_laplacian(const ScalarField& field, const SpaceTimeGrid& grid);

/// Centered first difference inside, one-sided second order at the ends.
ScalarField gradient(const ScalarField& field, const SpaceTimeGrid& grid);

/// Outward normal derivative at an endpoint, one-sided second order.
double boundary_normal_derivative(const ScalarField& field, const SpaceTimeGrid& grid, Side side);
double boundary_normal_derivative(std::span<const double> field, double h, Side side);

/// Derivative of `order` (1..3) of a uniformly sampled series, full-length output.
std::vector<double> time_difference(const std::vector<double>& series, double dt, int order);

/// Applies time_difference node by node.
SpaceTimeField time_difference(const SpaceTimeField& field, double dt, int order);

enum class NormKind { l2_space, l2_spacetime, l2_time, h1_time, h2_time };

/// Trapezoidal quadrature of the squared integrand.
std::vector<double> trapezoid_weights(int count, double spacing);
double norm_sq(const ScalarField& field, const SpaceTimeGrid& grid);
double norm_sq(const SpaceTimeField& field, const SpaceTimeGrid& grid);
double trace_norm_sq(const std::vector<double>& samples, double dt, NormKind which);
double discrete_norm_sq(const ScalarField& field, const SpaceTimeGrid& grid, NormKind which);
double discrete_norm_sq(const SpaceTimeField& field, const SpaceTimeGrid& grid, NormKind which);
double discrete_norm_sq(const TraceSeries& trace, const SpaceTimeGrid& grid, NormKind which);

}  // namespace mgt
