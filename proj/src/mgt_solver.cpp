#include "mgt/mgt_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mgt/kernels.hpp"

namespace mgt {

ScalarField MGTCoefficients::alpha() const {
    ScalarField a(gamma.size());
    for (std::size_t i = 0; i < gamma.size(); ++i) a[i] = gamma[i] + c * c / b;
    return a;
}

void MGTCoefficients::validate(const SpaceTimeGrid& grid) const {
    if (!(b > 0.0)) throw InvalidInput("coefficients: b must be positive");
    if (c == 0.0 || !std::isfinite(c)) throw InvalidInput("coefficients: c must be nonzero");
    if (!(box_bound > 0.0)) throw InvalidInput("coefficients: box bound M must be positive");
    check_field(gamma, grid, "coefficients.gamma");
    for (int i = 0; i < grid.nx; ++i)
        if (!(gamma[i] >= 0.0 && gamma[i] <= box_bound))
            throw InvalidInput("coefficients: gamma(x_" + std::to_string(i) + ") = " + std::to_string(gamma[i]) +
                               " outside [0, M]");
}

InitialData InitialData::zeros(const SpaceTimeGrid& grid) {
    return InitialData{ScalarField(grid.nx, 0.0), ScalarField(grid.nx, 0.0), ScalarField(grid.nx, 0.0), 0.0};
}

void InitialData::validate(const SpaceTimeGrid& grid) const {
    check_field(u0, grid, "initial data u0");
    check_field(u1, grid, "initial data u1");
    check_field(u2, grid, "initial data u2");
    if (eta < 0.0) throw InvalidInput("initial data: eta must be nonnegative");
    const int last = grid.nx - 1;
    if (u0[0] != 0.0 || u0[last] != 0.0) throw InvalidInput("initial data: u0 must vanish at the boundary");
    if (u1[0] != 0.0 || u1[last] != 0.0) throw InvalidInput("initial data: u1 must vanish at the boundary");
    if (eta > 0.0)
        for (int i = 0; i < grid.nx; ++i)
            if (std::abs(u2[i]) < eta)
                throw InvalidInput("initial data: |u2(x_" + std::to_string(i) + ")| below the floor eta");
}

double BoundaryData::value(Side side, double t, int derivative) const {
    if (homogeneous) return 0.0;
    const int k = side == Side::left ? 0 : 1;
    const double a = accel[k];
    const double r = rate[k];
    const double e = std::exp(-r * t);
    switch (derivative) {
        case 0: return a * std::expm1(-r * t) / (r * r) + a * t / r;
        case 1: return -a * std::expm1(-r * t) / r;
        case 2: return a * e;
        default: throw InvalidInput("boundary data: derivative order must be 0, 1 or 2");
    }
}

BoundaryData BoundaryData::compatible(const MGTCoefficients& coeffs, const InitialData& data) {
    BoundaryData bd;
    bd.homogeneous = false;
    const auto alpha = coeffs.alpha();
    bd.accel = {data.u2.front(), data.u2.back()};
    bd.rate = {alpha.front(), alpha.back()};
    return bd;
}

namespace {

// Tridiagonal matrix with constant off-diagonals, LU factors kept for repeated solves.
class TridiagonalFactor {
public:
    TridiagonalFactor(const std::vector<double>& diag, double off) : off_(off), n_(static_cast<int>(diag.size())) {
        piv_.resize(n_);
        upper_.resize(n_);
        double prev = 0.0;
        for (int i = 0; i < n_; ++i) {
            const double p = diag[i] - (i > 0 ? off_ * prev : 0.0);
            if (p == 0.0 || !std::isfinite(p)) throw SolveError("step matrix is singular at row " + std::to_string(i), 0);
            piv_[i] = p;
            upper_[i] = off_ / p;
            prev = upper_[i];
        }
    }

    void solve(std::vector<double>& rhs) const {
        rhs[0] /= piv_[0];
        for (int i = 1; i < n_; ++i) rhs[i] = (rhs[i] - off_ * rhs[i - 1]) / piv_[i];
        for (int i = n_ - 2; i >= 0; --i) rhs[i] -= upper_[i] * rhs[i + 1];
    }

private:
    double off_;
    int n_;
    std::vector<double> piv_;
    std::vector<double> upper_;
};

void laplacian(const std::vector<double>& in, std::vector<double>& out, double h) {
    if (kernels::default_exec() == kernels::Exec::parallel)
        kernels::laplacian_parallel(in.data(), out.data(), static_cast<int>(in.size()), h);
    else
        kernels::laplacian_serial(in.data(), out.data(), static_cast<int>(in.size()), h);
}

}  // namespace

Trajectory solve_forward(const MGTCoefficients& coeffs, const InitialData& data, const SpaceTimeField& source,
                         const SpaceTimeGrid& grid, const BoundaryData& boundary) {
    coeffs.validate(grid);
    data.validate(grid);
    check_field(source, grid, "source");

    const int nx = grid.nx;
    const int m = nx - 2;
    const double h = grid.h();
    const double dt = grid.dt();
    const double c2 = coeffs.c * coeffs.c;
    const double b = coeffs.b;
    const auto alpha = coeffs.alpha();

    const double k = 0.5 * dt * (c2 * dt * dt / 4.0 + b * dt / 2.0);
    std::vector<double> diag(m);
    for (int j = 0; j < m; ++j) diag[j] = 1.0 + 0.5 * dt * alpha[j + 1] + 2.0 * k / (h * h);
    const TridiagonalFactor factor(diag, -k / (h * h));

    Trajectory traj{SpaceTimeField(grid), SpaceTimeField(grid), SpaceTimeField(grid)};
    for (int i = 1; i < nx - 1; ++i) {
        traj.u(0, i) = data.u0[i];
        traj.ut(0, i) = data.u1[i];
        traj.utt(0, i) = data.u2[i];
    }
    auto set_boundary = [&](int n) {
        const double t = grid.t(n);
        for (Side side : {Side::left, Side::right}) {
            const int i = side == Side::left ? 0 : nx - 1;
            traj.u(n, i) = boundary.value(side, t, 0);
            traj.ut(n, i) = boundary.value(side, t, 1);
            traj.utt(n, i) = boundary.value(side, t, 2);
        }
    };
    set_boundary(0);

    std::vector<double> u(nx), v(nx), w(nx), lap_u(nx), lap_v(nx), us(nx), vs(nx), lap_us(nx), lap_vs(nx), rhs(m);
    for (int n = 0; n + 1 < grid.nt; ++n) {
        auto ur = traj.u.row(n);
        auto vr = traj.ut.row(n);
        auto wr = traj.utt.row(n);
        std::copy(ur.begin(), ur.end(), u.begin());
        std::copy(vr.begin(), vr.end(), v.begin());
        std::copy(wr.begin(), wr.end(), w.begin());
        laplacian(u, lap_u, h);
        laplacian(v, lap_v, h);

        const double t1 = grid.t(n + 1);
        for (int i = 1; i < nx - 1; ++i) {
            us[i] = u[i] + dt * v[i] + 0.25 * dt * dt * w[i];
            vs[i] = v[i] + 0.5 * dt * w[i];
        }
        us[0] = boundary.value(Side::left, t1, 0);
        us[nx - 1] = boundary.value(Side::right, t1, 0);
        vs[0] = boundary.value(Side::left, t1, 1);
        vs[nx - 1] = boundary.value(Side::right, t1, 1);
        laplacian(us, lap_us, h);
        laplacian(vs, lap_vs, h);

        for (int i = 1; i < nx - 1; ++i) {
            const double f_now = -alpha[i] * w[i] + c2 * lap_u[i] + b * lap_v[i] + source(n, i);
            const double f_next_explicit = c2 * lap_us[i] + b * lap_vs[i] + source(n + 1, i);
            rhs[i - 1] = w[i] + 0.5 * dt * f_now + 0.5 * dt * f_next_explicit;
        }
        factor.solve(rhs);
        for (int j = 0; j < m; ++j) {
            if (!std::isfinite(rhs[j])) throw SolveError("non-finite value in step " + std::to_string(n + 1), n + 1);
            const int i = j + 1;
            traj.utt(n + 1, i) = rhs[j];
            traj.ut(n + 1, i) = vs[i] + 0.5 * dt * rhs[j];
            traj.u(n + 1, i) = us[i] + 0.25 * dt * dt * rhs[j];
        }
        set_boundary(n + 1);
    }
    return traj;
}

double energy_e(const ScalarField& y, const ScalarField& yt, double b, const SpaceTimeGrid& grid) {
    check_field(y, grid, "energy_e y");
    check_field(yt, grid, "energy_e y_t");
    return 0.5 * b * norm_sq(gradient(y, grid), grid) + 0.5 * norm_sq(yt, grid);
}

double total_energy(const Trajectory& traj, int level, double b, const SpaceTimeGrid& grid) {
    if (level < 0 || level >= grid.nt) throw InvalidInput("total_energy: level out of range");
    const auto u = traj.u.snapshot(level);
    const auto ut = traj.ut.snapshot(level);
    const auto utt = traj.utt.snapshot(level);
    return energy_e(ut, utt, b, grid) + energy_e(u, ut, b, grid);
}

namespace {
BoundReport make_report(double num, double den) {
    BoundReport r;
    r.numerator = num;
    r.denominator = den;
    if (num == 0.0 && den == 0.0)
        r.ratio = 0.0;
    else if (den == 0.0)
        r.ratio = std::numeric_limits<double>::infinity();
    else
        r.ratio = num / den;
    r.unbounded = !std::isfinite(r.ratio) || !std::isfinite(num);
    return r;
}
}  // namespace

BoundReport verify_energy_bound(const Trajectory& traj, const SpaceTimeField& source, double b,
                                const SpaceTimeGrid& grid) {
    check_field(traj.u, grid, "verify_energy_bound");
    check_field(source, grid, "verify_energy_bound source");
    double peak = 0.0;
    for (int n = 0; n < grid.nt; ++n) peak = std::max(peak, total_energy(traj, n, b, grid));
    return make_report(peak, total_energy(traj, 0, b, grid) + norm_sq(source, grid));
}

BoundReport verify_laplacian_bound(const Trajectory& traj, const SpaceTimeField& source,
                                   const MGTCoefficients& coeffs, const SpaceTimeGrid& grid) {
    check_field(traj.u, grid, "verify_laplacian_bound");
    check_field(source, grid, "verify_laplacian_bound source");
    double peak = 0.0;
    for (int n = 0; n < grid.nt; ++n) peak = std::max(peak, norm_sq(apply_laplacian(traj.u.snapshot(n), grid), grid));
    const double den = norm_sq(source, grid) + total_energy(traj, 0, coeffs.b, grid) +
                       norm_sq(apply_laplacian(traj.u.snapshot(0), grid), grid);
    return make_report(peak, den);
}

SpaceTimeField pde_residual(const Trajectory& traj, const MGTCoefficients& coeffs, const SpaceTimeField& source,
                            const SpaceTimeGrid& grid) {
    check_field(traj.u, grid, "pde_residual");
    check_field(source, grid, "pde_residual source");
    const auto alpha = coeffs.alpha();
    const double c2 = coeffs.c * coeffs.c;
    const SpaceTimeField wt = time_difference(traj.utt, grid.dt(), 1);
    SpaceTimeField res(grid);
    for (int n = 0; n < grid.nt; ++n) {
        const auto lu = apply_laplacian(traj.u.snapshot(n), grid);
        const auto lv = apply_laplacian(traj.ut.snapshot(n), grid);
        for (int i = 1; i < grid.nx - 1; ++i)
            res(n, i) = wt(n, i) + alpha[i] * traj.utt(n, i) - c2 * lu[i] - coeffs.b * lv[i] - source(n, i);
    }
    return res;
}

}  // namespace mgt
