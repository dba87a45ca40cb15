#pragma once

// Run configuration.  Grammar, one statement per line:
//
//   # comment (also allowed after a value)
//   section.key = value
//
// value is an integer, a decimal (C locale, exponent allowed) or a bare
// identifier [A-Za-z_][A-Za-z0-9_]*.  Keys are case sensitive; unknown and
// repeated keys are errors.  Missing keys take the defaults below.
//
//   grid.nx, grid.ny               cells per direction (>= 4)         64, 64
//   grid.lx, grid.ly               box size                           1, 1
//   physics.A, physics.B           bulk and gradient coefficients     1, 0.01
//   physics.chi                    chemotaxis / active transport      0
//   physics.alpha, physics.c0      relaxation rate and target mean    0, 0
//   physics.consumption            nutrient consumption rate          0
//   physics.eta1, physics.eta2     viscosities of phi = +1 / -1       1, 1
//   physics.h_clamp                true | false                       true
//   physics.potential              quartic | logarithmic | regularized_log
//   physics.theta, physics.theta_c logarithmic parameters             1, 2
//   physics.epsilon                regularization width               1e-3
//   physics.epsilon0               admissible bound for epsilon       0.5
//   physics.source                 s0                                 0
//   physics.source_amp             s1                                 0
//   physics.source_freq            omega                              0
//        S(x, y, t) = s0 + s1 cos(pi x / lx) cos(pi y / ly) cos(omega t)
//   time.dt, time.T                step and final time (T multiple of dt)
//   time.coupling                  sequential | picard
//   time.picard_tol, time.picard_max_iters                            1e-10, 10
//   time.newton_tol, time.newton_max_iters                            1e-10, 50
//   time.solver_rel_tol            linear solver tolerance            1e-10
//   time.cfl_limit                 warning threshold                  0.5
//   ic.preset                      spinodal | stratified | uniform
//   ic.seed                        RNG seed (spinodal)                1
//   ic.amplitude                   spinodal half-width a              0.05
//   ic.mean                        spinodal centre                    0
//   ic.width                       stratified interface width w       0.05
//   ic.phi                         uniform value                      0
//   ic.sigma                       initial nutrient (constant)        0
//   ic.vortex                      amplitude of a solenoidal vortex   0
//   output.directory               empty: no files                    ""
//   output.snapshot_every          steps between snapshots, 0 = off   0
//   output.series_every            steps between series rows          1

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

#include "chns/stepper.hpp"

namespace chns {

struct GridConfig {
    int nx = 64, ny = 64;
    double lx = 1.0, ly = 1.0;
    Grid make() const { return make_grid(nx, ny, lx, ly); }
};

struct SourceConfig {
    double s0 = 0.0, s1 = 0.0, omega = 0.0;
    bool active() const { return s0 != 0.0 || s1 != 0.0; }
};

struct TimeConfig {
    double dt = 1e-4;
    double T = 0.0;
    CouplingMode coupling;
    StepperOptions stepper;
    long steps() const;
};

enum class Preset { Spinodal, Stratified, Uniform };

struct IcConfig {
    Preset preset = Preset::Spinodal;
    std::uint64_t seed = 1;
    double amplitude = 0.05;
    double mean = 0.0;
    double width = 0.05;
    double phi = 0.0;
    double sigma = 0.0;
    double vortex = 0.0;
};

struct OutputConfig {
    std::string directory;
    int snapshot_every = 0;
    int series_every = 1;
};

struct Config {
    GridConfig grid;
    PhysParams physics;
    SourceConfig source;
    TimeConfig time;
    IcConfig ic;
    OutputConfig output;

    /// Throws ConfigError naming the violated hypothesis.
    void validate() const;
    /// Installs the source function described by `source`.
    void bind_source();
};

Config parse_config(std::string_view text);
Config load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(format_config(c)) reproduces c.
std::string format_config(const Config& c);

std::string_view preset_name(Preset p);
std::string_view potential_name(PotentialKind k);

}  // namespace chns
