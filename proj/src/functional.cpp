#include "mgt/functional.hpp"

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>

namespace mgt {

TrajectoryVariable TrajectoryVariable::zeros(const SpaceTimeGrid& grid) {
    TrajectoryVariable y;
    y.levels = grid.nt - 1;
    y.interior = grid.nx - 2;
    y.values.assign(static_cast<std::size_t>(y.levels) * y.interior, 0.0);
    return y;
}

TrajectoryVariable TrajectoryVariable::from_field(const SpaceTimeField& field) {
    TrajectoryVariable y;
    y.levels = field.nt() - 1;
    y.interior = field.nx() - 2;
    y.values.resize(static_cast<std::size_t>(y.levels) * y.interior);
    for (int n = 1; n < field.nt(); ++n)
        for (int i = 1; i < field.nx() - 1; ++i) y.values[(n - 1) * y.interior + (i - 1)] = field(n, i);
    return y;
}

SpaceTimeField TrajectoryVariable::to_field() const {
    SpaceTimeField f(levels + 1, interior + 2);
    for (int n = 1; n <= levels; ++n)
        for (int i = 1; i <= interior; ++i) f(n, i) = at(n, i);
    return f;
}

double TrajectoryVariable::at(int level, int node) const {
    if (level == 0 || node == 0 || node == interior + 1) return 0.0;
    return values[static_cast<std::size_t>(level - 1) * interior + (node - 1)];
}

namespace {

using Term = std::pair<int, double>;  // (time level >= 1, coefficient)

// Time-derivative stencil at `level` acting on the unknown levels, with the ghost level eliminated.
std::vector<Term> level_terms(int nt, int order, int level, double dt) {
    const Stencil st = time_stencil(nt + 1, order, level + 1);
    const double scale = std::pow(dt, -order);
    std::vector<Term> out;
    auto add = [&](int lev, double c) {
        for (auto& t : out)
            if (t.first == lev) {
                t.second += c;
                return;
            }
        out.emplace_back(lev, c);
    };
    for (std::size_t j = 0; j < st.weights.size(); ++j) {
        const int lev = st.start + static_cast<int>(j) - 1;
        const double w = st.weights[j] * scale;
        if (w == 0.0 || lev == 0) continue;
        if (lev == -1) {
            add(1, 3.0 * w);
            add(2, -0.5 * w);
        } else {
            add(lev, w);
        }
    }
    return out;
}

kernels::CsrMatrix to_csr(const Eigen::SparseMatrix<double, Eigen::RowMajor>& m) {
    kernels::CsrMatrix c;
    c.rows = static_cast<int>(m.rows());
    c.cols = static_cast<int>(m.cols());
    c.row_ptr.assign(m.outerIndexPtr(), m.outerIndexPtr() + m.outerSize() + 1);
    c.col.assign(m.innerIndexPtr(), m.innerIndexPtr() + m.nonZeros());
    c.val.assign(m.valuePtr(), m.valuePtr() + m.nonZeros());
    return c;
}

double norm2(const std::vector<double>& v, kernels::Exec exec) {
    return std::sqrt(kernels::dot(v.data(), v.data(), static_cast<int>(v.size()), exec));
}

}  // namespace

DiscreteFunctional::DiscreteFunctional(const MGTCoefficients& coeffs, const CarlemanGeometry& geometry,
                                       const CarlemanScales& scales, const SpaceTimeGrid& grid,
                                       bool normalize_weights)
    : grid_(grid), geometry_(geometry), scales_(scales) {
    coeffs.validate(grid);
    if (!(scales.s > 0.0) || !(scales.lambda > 0.0)) throw InvalidInput("functional: s and lambda must be positive");
    sides_ = require_admissible(geometry, grid).observed_sides;
    const auto stats = weight_statistics(grid, geometry, scales);
    check_overflow(stats);
    log_scale_ = normalize_weights ? stats.log_min : 0.0;
    assemble(coeffs.alpha(), coeffs.c, coeffs.b);
}

void DiscreteFunctional::assemble(const ScalarField& alpha, double c, double b) {
    const int nt = grid_.nt;
    const int nx = grid_.nx;
    const int m = nx - 2;
    const double h = grid_.h();
    const double dt = grid_.dt();
    const double c2 = c * c;
    const double ih2 = 1.0 / (h * h);
    auto idx = [m](int lev, int i) { return (lev - 1) * m + (i - 1); };

    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(nt) * m * 20);
    const auto qt = trapezoid_weights(nt, dt);
    int row = 0;
    for (int n = 0; n < nt; ++n) {
        const auto d1 = level_terms(nt, 1, n, dt);
        const auto d2 = level_terms(nt, 2, n, dt);
        const auto d3 = level_terms(nt, 3, n, dt);
        for (int i = 1; i <= m; ++i, ++row) {
            auto add = [&](int lev, int node, double v) {
                if (lev >= 1 && node >= 1 && node <= m) trip.emplace_back(row, idx(lev, node), v);
            };
            for (auto [lev, w] : d3) add(lev, i, w);
            for (auto [lev, w] : d2) add(lev, i, alpha[i] * w);
            add(n, i, 2.0 * c2 * ih2);
            add(n, i - 1, -c2 * ih2);
            add(n, i + 1, -c2 * ih2);
            for (auto [lev, w] : d1) {
                add(lev, i, 2.0 * b * w * ih2);
                add(lev, i - 1, -b * w * ih2);
                add(lev, i + 1, -b * w * ih2);
            }
            weights_.push_back(std::exp(log_weight(grid_.x(i), grid_.t(n), geometry_, scales_) - log_scale_) * qt[n] *
                               h / scales_.s);
        }
    }
    interior_rows_ = row;

    // The boundary value is zero, so only the two inner nodes of the one-sided stencil remain.
    for (Side side : sides_) {
        const int near = side == Side::right ? m : 1;
        const int far = side == Side::right ? m - 1 : 2;
        const double wn = -4.0 / (2.0 * h);
        const double wf = 1.0 / (2.0 * h);
        const double xb = grid_.endpoint(side);
        for (int n = 0; n < nt; ++n, ++row) {
            if (n >= 1) {
                trip.emplace_back(row, idx(n, near), wn);
                trip.emplace_back(row, idx(n, far), wf);
            }
            weights_.push_back(std::exp(log_weight(xb, grid_.t(n), geometry_, scales_) - log_scale_) * qt[n]);
        }
        for (int n = 0; n < nt; ++n, ++row) {
            for (auto [lev, w] : level_terms(nt, 1, n, dt)) {
                trip.emplace_back(row, idx(lev, near), w * wn);
                trip.emplace_back(row, idx(lev, far), w * wf);
            }
            weights_.push_back(std::exp(log_weight(xb, grid_.t(n), geometry_, scales_) - log_scale_) * qt[n]);
        }
    }
    op_.resize(row, (nt - 1) * m);
    op_.setFromTriplets(trip.begin(), trip.end());
    op_.makeCompressed();
    op_csr_ = to_csr(op_);
}

std::vector<double> DiscreteFunctional::apply(const TrajectoryVariable& y) const {
    if (static_cast<int>(y.values.size()) != unknowns()) throw InvalidInput("functional: trajectory size mismatch");
    std::vector<double> out(rows());
    kernels::spmv(op_csr_, y.values.data(), out.data(), kernels::default_exec());
    return out;
}

std::vector<double> DiscreteFunctional::data_vector(const MuPair& mu, const SpaceTimeField& g) const {
    check_field(g, grid_, "functional source g");
    std::vector<double> d(rows(), 0.0);
    int row = 0;
    for (int n = 0; n < grid_.nt; ++n)
        for (int i = 1; i < grid_.nx - 1; ++i) d[row++] = g(n, i);
    auto find = [&](const std::vector<TraceSeries>& list, Side side) -> const TraceSeries& {
        for (const auto& s : list)
            if (s.side == side) {
                if (static_cast<int>(s.samples.size()) != grid_.nt) throw InvalidInput("functional: mu length != Nt");
                return s;
            }
        throw InvalidInput("functional: no boundary data for the " + to_string(side) + " endpoint");
    };
    for (Side side : sides_) {
        const auto& a = find(mu.mu, side);
        for (int n = 0; n < grid_.nt; ++n) d[row++] = a.samples[n];
        const auto& b = find(mu.mu_t, side);
        for (int n = 0; n < grid_.nt; ++n) d[row++] = b.samples[n];
    }
    return d;
}

double DiscreteFunctional::evaluate(const TrajectoryVariable& y, const MuPair& mu, const SpaceTimeField& g) const {
    const auto ay = apply(y);
    const auto d = data_vector(mu, g);
    double acc = 0.0;
    for (int r = 0; r < rows(); ++r) acc += weights_[r] * (ay[r] - d[r]) * (ay[r] - d[r]);
    return 0.5 * acc;
}

double DiscreteFunctional::v_norm_sq(const TrajectoryVariable& y) const {
    const auto ay = apply(y);
    double acc = 0.0;
    for (int r = 0; r < rows(); ++r) acc += weights_[r] * ay[r] * ay[r];
    return acc;
}

double DiscreteFunctional::bilinear(const TrajectoryVariable& y, const TrajectoryVariable& v) const {
    const auto ay = apply(y);
    const auto av = apply(v);
    double acc = 0.0;
    for (int r = 0; r < rows(); ++r) acc += weights_[r] * ay[r] * av[r];
    return acc;
}

double DiscreteFunctional::data_form(const TrajectoryVariable& v, const MuPair& mu, const SpaceTimeField& g) const {
    const auto av = apply(v);
    const auto d = data_vector(mu, g);
    double acc = 0.0;
    for (int r = 0; r < rows(); ++r) acc += weights_[r] * d[r] * av[r];
    return acc;
}

std::vector<double> DiscreteFunctional::gradient(const TrajectoryVariable& y, const MuPair& mu,
                                                 const SpaceTimeField& g) const {
    const auto ay = apply(y);
    const auto d = data_vector(mu, g);
    Eigen::VectorXd r(rows());
    for (int k = 0; k < rows(); ++k) r[k] = weights_[k] * (ay[k] - d[k]);
    const Eigen::VectorXd grad = op_.transpose() * r;
    return std::vector<double>(grad.data(), grad.data() + grad.size());
}

double DiscreteFunctional::weighted_source_sq(const SpaceTimeField& g) const {
    check_field(g, grid_, "functional source g");
    double acc = 0.0;
    int row = 0;
    for (int n = 0; n < grid_.nt; ++n)
        for (int i = 1; i < grid_.nx - 1; ++i, ++row) acc += weights_[row] * g(n, i) * g(n, i);
    return acc;
}

std::vector<double> DiscreteFunctional::initial_weights() const {
    std::vector<double> w(grid_.nx);
    for (int i = 0; i < grid_.nx; ++i) w[i] = std::exp(log_weight(grid_.x(i), 0.0, geometry_, scales_) - log_scale_);
    return w;
}

namespace {

struct SolveOutcome {
    std::vector<double> x;
    long iterations = 0;
};

SolveOutcome pcg(const kernels::CsrMatrix& a, const std::vector<double>& rhs, double tol, long max_it,
                 kernels::Exec exec) {
    const int n = a.rows;
    SolveOutcome out;
    out.x.assign(n, 0.0);
    const double rhs_norm = norm2(rhs, exec);
    if (rhs_norm == 0.0) return out;
    auto dinv = a.diagonal();
    for (double& d : dinv) d = d > 0.0 ? 1.0 / d : 1.0;

    std::vector<double> r(n), z(n), p(n), ap(n);
    // Restarts recompute the true residual so the reported tolerance is never a drifted recursion value.
    for (int restart = 0; restart < 6 && out.iterations < max_it; ++restart) {
        kernels::spmv(a, out.x.data(), ap.data(), exec);
        for (int i = 0; i < n; ++i) r[i] = rhs[i] - ap[i];
        if (norm2(r, exec) <= tol * rhs_norm) return out;
        for (int i = 0; i < n; ++i) p[i] = z[i] = dinv[i] * r[i];
        double rz = kernels::dot(r.data(), z.data(), n, exec);
        while (out.iterations < max_it) {
            ++out.iterations;
            kernels::spmv(a, p.data(), ap.data(), exec);
            const double pap = kernels::dot(p.data(), ap.data(), n, exec);
            if (!(pap > 0.0)) break;
            const double step = rz / pap;
            kernels::axpy(step, p.data(), out.x.data(), n, exec);
            kernels::axpy(-step, ap.data(), r.data(), n, exec);
            if (norm2(r, exec) <= 0.5 * tol * rhs_norm) break;
            for (int i = 0; i < n; ++i) z[i] = dinv[i] * r[i];
            const double rz_new = kernels::dot(r.data(), z.data(), n, exec);
            const double beta = rz_new / rz;
            rz = rz_new;
            for (int i = 0; i < n; ++i) p[i] = z[i] + beta * p[i];
        }
    }
    return out;
}

SolveOutcome direct(const Eigen::SparseMatrix<double>& normal, const std::vector<double>& rhs,
                    const kernels::CsrMatrix& csr, double tol) {
    const int n = static_cast<int>(normal.rows());
    Eigen::VectorXd scale(n);
    for (int i = 0; i < n; ++i) {
        const double d = normal.coeff(i, i);
        scale[i] = d > 0.0 ? 1.0 / std::sqrt(d) : 1.0;
    }
    const Eigen::SparseMatrix<double> scaled = scale.asDiagonal() * normal * scale.asDiagonal();
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(scaled);
    if (ldlt.info() != Eigen::Success) throw MinimizerError("sparse factorization failed", {});
    const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), n);
    Eigen::VectorXd x = scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * b);
    SolveOutcome out;
    out.iterations = 1;
    std::vector<double> ax(n);
    const double bn = b.norm();
    for (int sweep = 0; sweep < 4; ++sweep) {
        kernels::spmv(csr, x.data(), ax.data(), kernels::Exec::serial);
        Eigen::VectorXd r(n);
        for (int i = 0; i < n; ++i) r[i] = rhs[i] - ax[i];
        if (r.norm() <= 0.1 * tol * bn) break;
        x += scale.asDiagonal() * ldlt.solve(scale.asDiagonal() * r);
        ++out.iterations;
    }
    out.x.assign(x.data(), x.data() + n);
    return out;
}

}  // namespace

std::pair<TrajectoryVariable, MinimizerDiagnostics> DiscreteFunctional::minimize(const MuPair& mu,
                                                                                 const SpaceTimeField& g,
                                                                                 const MinimizeOptions& options) const {
    const auto d = data_vector(mu, g);
    Eigen::SparseMatrix<double, Eigen::RowMajor> scaled = op_;
    Eigen::VectorXd sd(rows());
    for (int r = 0; r < rows(); ++r) {
        const double sw = std::sqrt(weights_[r]);
        for (Eigen::SparseMatrix<double, Eigen::RowMajor>::InnerIterator it(scaled, r); it; ++it) it.valueRef() *= sw;
        sd[r] = sw * d[r];
    }
    const Eigen::SparseMatrix<double> normal = Eigen::SparseMatrix<double>(scaled.transpose()) * scaled;
    const Eigen::VectorXd rhs_e = scaled.transpose() * sd;
    const std::vector<double> rhs(rhs_e.data(), rhs_e.data() + rhs_e.size());
    Eigen::SparseMatrix<double, Eigen::RowMajor> normal_rm = normal;
    normal_rm.makeCompressed();
    const auto csr = to_csr(normal_rm);

    const long cap = options.max_iterations > 0 ? options.max_iterations : 10L * unknowns();
    SolveOutcome sol = options.solver == LinearSolver::cg ? pcg(csr, rhs, options.tolerance, cap, options.exec)
                                                          : direct(normal, rhs, csr, options.tolerance);

    TrajectoryVariable y = TrajectoryVariable::zeros(grid_);
    y.values = std::move(sol.x);

    MinimizerDiagnostics diag;
    diag.solver_iterations = sol.iterations;
    std::vector<double> ax(unknowns());
    kernels::spmv(csr, y.values.data(), ax.data(), options.exec);
    double rn = 0.0, bn = 0.0;
    for (int i = 0; i < unknowns(); ++i) {
        rn += (ax[i] - rhs[i]) * (ax[i] - rhs[i]);
        bn += rhs[i] * rhs[i];
    }
    diag.el_residual = bn > 0.0 ? std::sqrt(rn / bn) : std::sqrt(rn);
    diag.j_value = evaluate(y, mu, g);
    diag.v_norm_sq = v_norm_sq(y);
    double data_sq = 0.0;
    for (int r = 0; r < rows(); ++r) data_sq += weights_[r] * d[r] * d[r];
    diag.bound_rhs = 4.0 * data_sq;
    diag.bound_slack = diag.bound_rhs - diag.v_norm_sq;
    diag.converged = diag.el_residual <= options.tolerance;
    if (!diag.converged)
        throw MinimizerError("minimizer did not reach the tolerance: relative gradient " +
                                 std::to_string(diag.el_residual) + " after " + std::to_string(diag.solver_iterations) +
                                 " iterations",
                             diag);
    return {std::move(y), diag};
}

double evaluate_J(const TrajectoryVariable& y, const MuPair& mu, const SpaceTimeField& g,
                  const MGTCoefficients& coeffs, const CarlemanGeometry& geometry, const CarlemanScales& scales,
                  const SpaceTimeGrid& grid) {
    return DiscreteFunctional(coeffs, geometry, scales, grid).evaluate(y, mu, g);
}

double v_norm_sq(const TrajectoryVariable& y, const MGTCoefficients& coeffs, const CarlemanGeometry& geometry,
                 const CarlemanScales& scales, const SpaceTimeGrid& grid) {
    return DiscreteFunctional(coeffs, geometry, scales, grid).v_norm_sq(y);
}

std::pair<TrajectoryVariable, MinimizerDiagnostics> minimize_J(const MuPair& mu, const SpaceTimeField& g,
                                                               const MGTCoefficients& coeffs,
                                                               const CarlemanGeometry& geometry,
                                                               const CarlemanScales& scales, const SpaceTimeGrid& grid,
                                                               const MinimizeOptions& options) {
    return DiscreteFunctional(coeffs, geometry, scales, grid).minimize(mu, g, options);
}

ScalarField initial_second_derivative(const TrajectoryVariable& y, double dt) {
    if (y.levels < 3) throw InvalidInput("initial_second_derivative: need at least three unknown levels");
    ScalarField out(y.interior + 2, 0.0);
    // One-sided second-order stencil with y^0 = 0.
    for (int i = 1; i <= y.interior; ++i)
        out[i] = (-5.0 * y.at(1, i) + 4.0 * y.at(2, i) - y.at(3, i)) / (dt * dt);
    return out;
}

DifferenceReport minimizer_difference_check(const SpaceTimeField& g1, const SpaceTimeField& g2, const MuPair& mu,
                                            const MGTCoefficients& coeffs, const CarlemanGeometry& geometry,
                                            const CarlemanScales& scales, const SpaceTimeGrid& grid,
                                            const MinimizeOptions& options) {
    const DiscreteFunctional fn(coeffs, geometry, scales, grid);
    auto [y1, d1] = fn.minimize(mu, g1, options);
    auto [y2, d2] = fn.minimize(mu, g2, options);
    TrajectoryVariable diff = y1;
    for (std::size_t k = 0; k < diff.values.size(); ++k) diff.values[k] -= y2.values[k];
    SpaceTimeField dg(grid);
    for (std::size_t k = 0; k < dg.data().size(); ++k) dg.data()[k] = g1.data()[k] - g2.data()[k];

    const auto ad = fn.apply(diff);
    const auto& w = fn.row_weights();
    double interior = 0.0, boundary = 0.0;
    for (int r = 0; r < fn.rows(); ++r) (r < fn.interior_rows() ? interior : boundary) += w[r] * ad[r] * ad[r];
    const double gsq = fn.weighted_source_sq(dg);

    DifferenceReport rep;
    rep.lhs = 0.5 * interior + boundary;
    rep.rhs = 2.0 * gsq;
    rep.sharp_rhs = 0.5 * gsq;
    rep.slack = rep.rhs - rep.lhs;
    const auto ytt = initial_second_derivative(diff, grid.dt());
    const auto w0 = fn.initial_weights();
    double init = 0.0;
    for (int i = 1; i < grid.nx - 1; ++i) init += grid.h() * w0[i] * ytt[i] * ytt[i];
    rep.initial_constant = gsq > 0.0 ? std::sqrt(scales.s) * init / (scales.s * gsq) : 0.0;
    rep.first = d1;
    rep.second = d2;
    return rep;
}

}  // namespace mgt
