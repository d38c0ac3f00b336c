#include "mgt/grid.hpp"

#include <algorithm>
#include <cmath>

namespace mgt {

std::string to_string(Side side) { return side == Side::left ? "left" : "right"; }

Side side_from_string(const std::string& name) {
    if (name == "left") return Side::left;
    if (name == "right") return Side::right;
    throw InvalidInput("unknown boundary side '" + name + "'");
}

SpaceTimeGrid build_grid(double x_left, double x_right, int nx, double final_time, int nt) {
    if (!(x_left < x_right)) throw InvalidInput("grid: x_left must be smaller than x_right");
    if (!(final_time > 0.0)) throw InvalidInput("grid: final time must be positive");
    if (nx < 5) throw InvalidInput("grid: Nx must be at least 5");
    if (nt < 5) throw InvalidInput("grid: Nt must be at least 5");
    return SpaceTimeGrid{x_left, x_right, nx, final_time, nt};
}

ScalarField SpaceTimeField::snapshot(int n) const {
    auto r = row(n);
    return ScalarField(r.begin(), r.end());
}

std::vector<double> SpaceTimeField::column(int i) const {
    std::vector<double> out(nt_);
    for (int n = 0; n < nt_; ++n) out[n] = (*this)(n, i);
    return out;
}

std::vector<double> fd_weights(const std::vector<double>& offsets, int order) {
    const int n = static_cast<int>(offsets.size());
    if (order < 0 || order >= n) throw InvalidInput("fd_weights: order must be below the stencil size");
    // Vandermonde system sum_j w_j o_j^p = p! delta_{p,order}, solved by Gaussian elimination.
    std::vector<double> a(static_cast<std::size_t>(n) * n);
    std::vector<double> rhs(n, 0.0);
    for (int p = 0; p < n; ++p)
        for (int j = 0; j < n; ++j) a[p * n + j] = std::pow(offsets[j], p);
    double fact = 1.0;
    for (int p = 2; p <= order; ++p) fact *= p;
    rhs[order] = fact;
    for (int col = 0; col < n; ++col) {
        int piv = col;
        for (int r = col + 1; r < n; ++r)
            if (std::abs(a[r * n + col]) > std::abs(a[piv * n + col])) piv = r;
        if (a[piv * n + col] == 0.0) throw InvalidInput("fd_weights: repeated offsets");
        if (piv != col) {
            for (int j = 0; j < n; ++j) std::swap(a[col * n + j], a[piv * n + j]);
            std::swap(rhs[col], rhs[piv]);
        }
        for (int r = col + 1; r < n; ++r) {
            const double f = a[r * n + col] / a[col * n + col];
            for (int j = col; j < n; ++j) a[r * n + j] -= f * a[col * n + j];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> w(n);
    for (int r = n - 1; r >= 0; --r) {
        double acc = rhs[r];
        for (int j = r + 1; j < n; ++j) acc -= a[r * n + j] * w[j];
        w[r] = acc / a[r * n + r];
    }
    return w;
}

Stencil time_stencil(int length, int order, int level) {
    if (order < 1 || order > 3) throw InvalidInput("time_stencil: order must be 1, 2 or 3");
    if (level < 0 || level >= length) throw InvalidInput("time_stencil: level out of range");
    const int half = order == 3 ? 2 : 1;
    int start = 0;
    int width = 0;
    if (level - half >= 0 && level + half <= length - 1) {
        start = level - half;
        width = 2 * half + 1;
    } else {
        width = order > 1 ? order + 2 : 3;
        if (width > length) throw InvalidInput("time_stencil: series too short");
        start = std::clamp(level - width / 2, 0, length - width);
    }
    std::vector<double> offsets(width);
    for (int j = 0; j < width; ++j) offsets[j] = start + j - level;
    Stencil st{start, fd_weights(offsets, order)};
    // Exact integer arithmetic for the centered cases keeps the classic weights bit-exact.
    if (width == 2 * half + 1 && start == level - half) {
        if (order == 1) st.weights = {-0.5, 0.0, 0.5};
        if (order == 2) st.weights = {1.0, -2.0, 1.0};
        if (order == 3) st.weights = {-0.5, 1.0, 0.0, -1.0, 0.5};
    }
    return st;
}

void check_field(const ScalarField& field, const SpaceTimeGrid& grid, const char* what) {
    if (static_cast<int>(field.size()) != grid.nx)
        throw InvalidInput(std::string(what) + ": expected " + std::to_string(grid.nx) + " space values, got " +
                           std::to_string(field.size()));
}

void check_field(const SpaceTimeField& field, const SpaceTimeGrid& grid, const char* what) {
    if (!field.matches(grid))
        throw InvalidInput(std::string(what) + ": space-time field shape does not match the grid");
}

ScalarField sample(const SpaceTimeGrid& grid, double (*fn)(double)) { return sample_field(grid, fn); }

ScalarField apply_laplacian(const ScalarField& field, const SpaceTimeGrid& grid) {
    check_field(field, grid, "apply_laplacian");
    const double inv_h2 = 1.0 / (grid.h() * grid.h());
    ScalarField out(grid.nx, 0.0);
    for (int i = 1; i < grid.nx - 1; ++i) out[i] = (field[i - 1] - 2.0 * field[i] + field[i + 1]) * inv_h2;
    return out;
}

ScalarField gradient(const ScalarField& field, const SpaceTimeGrid& grid) {
    check_field(field, grid, "gradient");
    const int n = grid.nx;
    const double h = grid.h();
    ScalarField out(n);
    for (int i = 1; i < n - 1; ++i) out[i] = (field[i + 1] - field[i - 1]) / (2.0 * h);
    out[0] = (-3.0 * field[0] + 4.0 * field[1] - field[2]) / (2.0 * h);
    out[n - 1] = (3.0 * field[n - 1] - 4.0 * field[n - 2] + field[n - 3]) / (2.0 * h);
    return out;
}

double boundary_normal_derivative(std::span<const double> f, double h, Side side) {
    const std::size_t n = f.size();
    if (n < 3) throw InvalidInput("boundary_normal_derivative: need at least 3 nodes");
    if (side == Side::right) return (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return -(-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
}

double boundary_normal_derivative(const ScalarField& field, const SpaceTimeGrid& grid, Side side) {
    check_field(field, grid, "boundary_normal_derivative");
    return boundary_normal_derivative(std::span<const double>(field), grid.h(), side);
}

std::vector<double> time_difference(const std::vector<double>& series, double dt, int order) {
    const int len = static_cast<int>(series.size());
    std::vector<double> out(len);
    const double scale = std::pow(dt, -order);
    for (int n = 0; n < len; ++n) {
        const Stencil st = time_stencil(len, order, n);
        double acc = 0.0;
        for (std::size_t j = 0; j < st.weights.size(); ++j) acc += st.weights[j] * series[st.start + j];
        out[n] = acc * scale;
    }
    return out;
}

SpaceTimeField time_difference(const SpaceTimeField& field, double dt, int order) {
    const int nt = field.nt();
    SpaceTimeField out(nt, field.nx());
    const double scale = std::pow(dt, -order);
    for (int n = 0; n < nt; ++n) {
        const Stencil st = time_stencil(nt, order, n);
        auto dst = out.row(n);
        for (std::size_t j = 0; j < st.weights.size(); ++j) {
            const double w = st.weights[j] * scale;
            if (w == 0.0) continue;
            auto src = field.row(st.start + static_cast<int>(j));
            for (int i = 0; i < field.nx(); ++i) dst[i] += w * src[i];
        }
    }
    return out;
}

std::vector<double> trapezoid_weights(int count, double spacing) {
    std::vector<double> q(count, spacing);
    q.front() *= 0.5;
    q.back() *= 0.5;
    return q;
}

double norm_sq(const ScalarField& field, const SpaceTimeGrid& grid) {
    check_field(field, grid, "norm_sq");
    const auto q = trapezoid_weights(grid.nx, grid.h());
    double acc = 0.0;
    for (int i = 0; i < grid.nx; ++i) acc += q[i] * field[i] * field[i];
    return acc;
}

double norm_sq(const SpaceTimeField& field, const SpaceTimeGrid& grid) {
    check_field(field, grid, "norm_sq");
    const auto qx = trapezoid_weights(grid.nx, grid.h());
    const auto qt = trapezoid_weights(grid.nt, grid.dt());
    double acc = 0.0;
    for (int n = 0; n < grid.nt; ++n) {
        double row = 0.0;
        for (int i = 0; i < grid.nx; ++i) row += qx[i] * field(n, i) * field(n, i);
        acc += qt[n] * row;
    }
    return acc;
}

double trace_norm_sq(const std::vector<double>& samples, double dt, NormKind which) {
    const auto q = trapezoid_weights(static_cast<int>(samples.size()), dt);
    auto l2 = [&](const std::vector<double>& s) {
        double acc = 0.0;
        for (std::size_t n = 0; n < s.size(); ++n) acc += q[n] * s[n] * s[n];
        return acc;
    };
    double total = l2(samples);
    if (which == NormKind::l2_time) return total;
    total += l2(time_difference(samples, dt, 1));
    if (which == NormKind::h1_time) return total;
    if (which == NormKind::h2_time) return total + l2(time_difference(samples, dt, 2));
    throw InvalidInput("trace_norm_sq: norm kind does not apply to a trace");
}

double discrete_norm_sq(const ScalarField& field, const SpaceTimeGrid& grid, NormKind which) {
    if (which != NormKind::l2_space) throw InvalidInput("discrete_norm_sq: space fields support l2_space only");
    return norm_sq(field, grid);
}

double discrete_norm_sq(const SpaceTimeField& field, const SpaceTimeGrid& grid, NormKind which) {
    if (which != NormKind::l2_spacetime)
        throw InvalidInput("discrete_norm_sq: space-time fields support l2_spacetime only");
    return norm_sq(field, grid);
}

double discrete_norm_sq(const TraceSeries& trace, const SpaceTimeGrid& grid, NormKind which) {
    if (static_cast<int>(trace.samples.size()) != grid.nt)
        throw InvalidInput("discrete_norm_sq: trace length must equal Nt");
    return trace_norm_sq(trace.samples, grid.dt(), which);
}

}  // namespace mgt
