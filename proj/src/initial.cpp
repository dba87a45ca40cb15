#include "chns/initial.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace chns {

double unit_uniform(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

MACVelocity vortex_velocity(const Grid& g, double amplitude) {
    const double kx = std::numbers::pi / g.lx, ky = std::numbers::pi / g.ly;
    const double scale = amplitude / std::max(kx, ky);
    return velocity_from_streamfunction(g, [&](double x, double y) {
        const double sx = std::sin(kx * x), sy = std::sin(ky * y);
        return scale * sx * sx * sy * sy;
    });
}

State make_initial_state(const Config& cfg) {
    const Grid g = cfg.grid.make();
    State s(g);
    const IcConfig& ic = cfg.ic;
    switch (ic.preset) {
        case Preset::Spinodal: {
            std::mt19937_64 rng(ic.seed);
            for (Index k = 0; k < s.phi.values.size(); ++k)
                s.phi.values.data()[k] = ic.mean + ic.amplitude * (2.0 * unit_uniform(rng()) - 1.0);
            break;
        }
        case Preset::Stratified:
            s.phi = ScalarField::from_function(
                g, [&](double, double y) { return std::tanh((y - 0.5 * g.ly) / ic.width) * (1.0 - 1e-6); });
            break;
        case Preset::Uniform: s.phi.values.setConstant(ic.phi); break;
    }
    s.sigma.values.setConstant(ic.sigma);
    if (ic.vortex != 0.0) s.v = vortex_velocity(g, ic.vortex);

    if (!(std::abs(mean(s.phi)) < 1.0)) throw ConfigError("initial data: |mean(φ₀)| < 1");
    if (!(s.phi.values.abs().maxCoeff() <= 1.0)) throw ConfigError("initial data: ‖φ₀‖∞ ≤ 1");
    s.mu = chemical_potential(s.phi, s.sigma, cfg.physics);
    return s;
}

ScalarField phase_bump(const ScalarField& phi0, std::uint64_t seed, bool zero_mean) {
    const Grid& g = phi0.grid;
    std::mt19937_64 rng(seed);
    const double cx = g.lx * (0.3 + 0.4 * unit_uniform(rng()));
    const double cy = g.ly * (0.3 + 0.4 * unit_uniform(rng()));
    const double w = 0.1 * std::min(g.lx, g.ly);
    ScalarField b = ScalarField::from_function(g, [&](double x, double y) {
        const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        return std::exp(-0.5 * r2 / (w * w));
    });
    b.values *= 1.0 - phi0.values.square();
    if (zero_mean) b.values -= b.values.mean();
    return b;
}

State perturb_phase(const State& base, const ScalarField& bump, double delta, const PhysParams& params) {
    State s = base;
    s.phi.values += delta * bump.values;
    s.mu = chemical_potential(s.phi, s.sigma, params);
    return s;
}

}  // namespace chns
