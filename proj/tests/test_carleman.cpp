#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mgt/carleman.hpp"
#include "mgt/experiments.hpp"
#include "test_support.hpp"

using namespace mgt;

namespace {

SpaceTimeGrid canonical_grid(int nx = 41, int nt = 51) { return build_grid(0.0, 1.0, nx, 1.25, nt); }

SpaceTimeField sin_t2(const SpaceTimeGrid& g) {
    auto y = sample_spacetime(g, [](double x, double t) { return std::sin(std::numbers::pi * x) * t * t; });
    for (int n = 0; n < g.nt; ++n) y(n, 0) = y(n, g.nx - 1) = 0.0;
    return y;
}

MGTCoefficients coeffs_for(const SpaceTimeGrid& g, double gamma = 0.5) { return {1.0, 1.0, ScalarField(g.nx, gamma), 1.0}; }

}  // namespace

TEST_CASE("admissibility of the canonical geometry") {
    const auto g = canonical_grid();
    const auto rep = validate_admissibility(CarlemanGeometry{}, g);
    CHECK(rep.accepted);
    REQUIRE(rep.observed_sides.size() == 1);
    CHECK(rep.observed_sides[0] == Side::right);
    CHECK(rep.sup_distance == doctest::Approx(1.1));
    CHECK(rep.phi_min == doctest::Approx(1.10375));

    CarlemanGeometry low_beta;
    low_beta.beta = 0.8;
    const auto r2 = validate_admissibility(low_beta, g);
    CHECK_FALSE(r2.accepted);
    bool mentions_beta = false;
    for (const auto& v : r2.violations) mentions_beta = mentions_beta || v.find("beta T") != std::string::npos;
    CHECK(mentions_beta);

    CarlemanGeometry inside;
    inside.x0 = 0.5;
    CHECK_FALSE(validate_admissibility(inside, g).accepted);
    CHECK_THROWS_AS(require_admissible(inside, g), InvalidInput);

    CarlemanGeometry wrong_side;
    wrong_side.observed_sides = {Side::left};
    CHECK_FALSE(validate_admissibility(wrong_side, g).accepted);

    CarlemanGeometry low_m0;
    low_m0.m0 = 1.0;
    CHECK_FALSE(validate_admissibility(low_m0, g).accepted);
}

TEST_CASE("phi and log_weight examples") {
    const CarlemanGeometry geo;
    CHECK(phi(1.0, 0.0, geo) == doctest::Approx(3.71));
    CHECK(phi(0.9, 1.25, geo) == doctest::Approx(2.09375));
    CHECK(phi(0.0, 1.25, geo) == doctest::Approx(1.10375));
    CHECK(log_weight(1.0, 0.0, geo, {1.0, 1.0}) == doctest::Approx(2.0 * std::exp(3.71)));
    CHECK(log_weight(1.0, 0.0, geo, {1.0, 1.0}) == doctest::Approx(81.70).epsilon(1e-3));
    CHECK(log_weight(0.3, 0.7, geo, {1e-12, 1.7}) == doctest::Approx(3.4).epsilon(1e-9));
    CHECK(log_weight(0.3, 0.7, geo, {1.0, 0.0}) == 0.0);
}

TEST_CASE("weight statistics examples") {
    const auto g = canonical_grid();
    const auto st = weight_statistics(g, CarlemanGeometry{}, {1.0, 1.0});
    CHECK(st.log10_ratio == doctest::Approx(32.9).epsilon(0.1 / 32.9));
    CHECK(st.log_max == doctest::Approx(2.0 * std::exp(3.71)));
    CHECK(st.log_min == doctest::Approx(2.0 * std::exp(1.10375)));
    CHECK(weight_statistics(g, CarlemanGeometry{}, {0.0, 1.0}).log10_ratio == 0.0);
    const auto doubled = weight_statistics(g, CarlemanGeometry{}, {1.0, 2.0});
    CHECK(doubled.log10_ratio == doctest::Approx(2.0 * st.log10_ratio).epsilon(1e-14));

    const auto unit = build_grid(0.0, 1.0, 21, 1.0, 21);
    for (double m0 = 0.0; m0 <= 2.0 + 1e-12; m0 += 0.25) {
        const auto r = weight_statistics(unit, CarlemanGeometry{0.0, 1.0, m0, 1.0, {Side::right}}, {3.0, 3.0});
        CHECK(r.log10_ratio > 40.0);
    }
}

TEST_CASE("overflow guard names the log-weight maximum") {
    const auto g = canonical_grid();
    const auto st = weight_statistics(g, CarlemanGeometry{}, {1.0, 100.0});
    CHECK_THROWS_AS(check_overflow(st), WeightOverflow);
    try {
        check_overflow(st);
    } catch (const WeightOverflow& e) {
        CHECK(e.log_weight_max() == doctest::Approx(st.log_max));
        CHECK(std::string(e.what()).find("log_weight max") != std::string::npos);
    }
    CHECK_NOTHROW(check_overflow(weight_statistics(g, CarlemanGeometry{}, {1.0, 4.0})));
}

TEST_CASE("Carleman terms vanish for the zero trajectory") {
    const auto g = canonical_grid();
    const auto t = carleman_lhs_rhs(SpaceTimeField(g), coeffs_for(g), CarlemanGeometry{}, {1.0, 1.0}, g);
    CHECK(t.lhs == 0.0);
    CHECK(t.rhs_interior == 0.0);
    CHECK(t.rhs_boundary == 0.0);
    CHECK(t.ratio == 0.0);
}

TEST_CASE("Carleman ratio of sin(pi x) t^2 is finite and refinement-stable") {
    // The weight grows by decades per cell on coarse grids; refine in space only.
    const auto g = canonical_grid(161, 101);
    const auto fine = build_grid(0.0, 1.0, 321, 1.25, 101);
    const auto a = carleman_lhs_rhs(sin_t2(g), coeffs_for(g), CarlemanGeometry{}, {1.0, 1.0}, g);
    const auto b = carleman_lhs_rhs(sin_t2(fine), coeffs_for(fine), CarlemanGeometry{}, {1.0, 1.0}, fine);
    CHECK(std::isfinite(a.ratio));
    CHECK(a.ratio > 0.0);
    CHECK(test::rel_diff(a.ratio, b.ratio) < 0.2);
    CHECK(a.lhs == doctest::Approx(a.lhs_initial + a.lhs_state + a.lhs_velocity));
}

TEST_CASE("Carleman ratio does not grow with s on random trajectories") {
    ReconstructionConfig cfg;
    cfg.grid = canonical_grid(41, 51);
    const auto rep = carleman_constant_sweep(20, {{1.0, 1.0}, {1.0, 2.0}}, cfg, [](double) { return 0.5; }, 3);
    REQUIRE(rep.entries.size() == 2);
    CHECK(std::isfinite(rep.entries[0].max_ratio));
    CHECK(std::isfinite(rep.entries[1].max_ratio));
    CHECK(rep.entries[1].max_ratio <= 1.2 * rep.entries[0].max_ratio);
    CHECK(rep.entries[0].min_rhs > 0.0);
}

TEST_CASE("Carleman inputs must satisfy the trajectory constraints") {
    const auto g = canonical_grid();
    auto y = sin_t2(g);
    y(3, 0) = 1.0;
    CHECK_THROWS_AS(carleman_lhs_rhs(y, coeffs_for(g), CarlemanGeometry{}, {1.0, 1.0}, g), InvalidInput);
    y = sin_t2(g);
    y(0, 5) = 1.0;
    CHECK_THROWS_AS(carleman_lhs_rhs(y, coeffs_for(g), CarlemanGeometry{}, {1.0, 1.0}, g), InvalidInput);
    CHECK_THROWS_AS(carleman_lhs_rhs(sin_t2(g), coeffs_for(g), CarlemanGeometry{}, {1.0, 100.0}, g), WeightOverflow);
}
