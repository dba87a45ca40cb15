#pragma once

#include <cstdint>

#include "chns/config.hpp"

namespace chns {

/// Uniform double in [0, 1) from the top 53 bits of a 64-bit draw.
double unit_uniform(std::uint64_t bits);

/// Preset initial data with mu computed from phi and sigma.  Throws
/// ConfigError when |mean(phi0)| >= 1 or max|phi0| > 1.
State make_initial_state(const Config& cfg);

/// Divergence-free vortex of peak speed ~amplitude with zero wall normals.
MACVelocity vortex_velocity(const Grid& g, double amplitude);

/// Gaussian bump at a seed-chosen interior point, modulated by (1 - phi0^2)
/// so that phi0 + delta * bump stays in [-1, 1] for |delta| <= 1/2.  With
/// zero_mean the bump's mean is removed.
ScalarField phase_bump(const ScalarField& phi0, std::uint64_t seed, bool zero_mean = false);

/// base with phi replaced by phi + delta * bump and mu recomputed.
State perturb_phase(const State& base, const ScalarField& bump, double delta, const PhysParams& params);

}  // namespace chns
