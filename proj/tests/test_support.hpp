#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "chns/grid.hpp"

namespace chns::testing {

inline constexpr double pi = std::numbers::pi;

inline ScalarField random_field(const Grid& g, unsigned seed, double lo = -1.0, double hi = 1.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(lo, hi);
    ScalarField f(g);
    for (Index k = 0; k < f.values.size(); ++k) f.values.data()[k] = d(rng);
    return f;
}

inline ScalarField random_mean_zero(const Grid& g, unsigned seed) {
    ScalarField f = random_field(g, seed);
    f.values -= f.values.mean();
    return f;
}

/// Random face field with zero boundary normals.
inline MACVelocity random_velocity(const Grid& g, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> d(-1.0, 1.0);
    MACVelocity w(g);
    for (Index k = 0; k < w.u.size(); ++k) w.u.data()[k] = d(rng);
    for (Index k = 0; k < w.v.size(); ++k) w.v.data()[k] = d(rng);
    w.zero_normals();
    return w;
}

inline ScalarField cos_x(const Grid& g) {
    return ScalarField::from_function(g, [&](double x, double) { return std::cos(pi * x / g.lx); });
}

/// Eigenvalue of the mirrored 5-point Laplacian for the cos(pi x / Lx) mode
/// sampled at cell centres: (4/h^2) sin^2(pi h / (2 Lx)).
inline double discrete_cos_eigenvalue(const Grid& g) {
    const double s = std::sin(pi * g.hx / (2.0 * g.lx));
    return 4.0 * s * s / (g.hx * g.hx);
}

inline double observed_order(double coarse_err, double fine_err, double ratio = 2.0) {
    return std::log(coarse_err / fine_err) / std::log(ratio);
}

}  // namespace chns::testing
