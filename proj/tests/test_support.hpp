#pragma once

#include <cmath>
#include <random>
#include <vector>

#include "mgt/grid.hpp"

namespace mgt::test {

inline double rel_diff(double a, double b) {
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

inline double observed_order(double coarse_error, double fine_error, double ratio = 2.0) {
    return std::log(coarse_error / fine_error) / std::log(ratio);
}

inline std::vector<double> random_vector(std::mt19937_64& rng, std::size_t n, double scale = 1.0) {
    std::normal_distribution<double> nd(0.0, scale);
    std::vector<double> v(n);
    for (double& x : v) x = nd(rng);
    return v;
}

inline double max_abs(const std::vector<double>& v) {
    double m = 0.0;
    for (double x : v) m = std::max(m, std::abs(x));
    return m;
}

}  // namespace mgt::test
