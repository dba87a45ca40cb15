#pragma once

// Energy, dissipation and source functionals of the coupled system, the mean
// law, and the two-trajectory stability metrics W and Z.

#include <utility>
#include <vector>

#include "chns/elliptic.hpp"
#include "chns/stepper.hpp"

namespace chns {

struct EnergyReport {
    double kinetic = 0.0;
    double potential_bulk = 0.0;
    double gradient = 0.0;
    double nutrient = 0.0;
    double cross = 0.0;
    double total = 0.0;

    double viscous = 0.0;
    double chem = 0.0;
    double nutrient_flux = 0.0;

    double oono = 0.0;
    double reaction = 0.0;

    double dissipation() const { return viscous + chem + nutrient_flux; }
    double remainder() const { return oono + reaction; }
};

/// Energy parts only.  Uses the potential as configured; an unregularized
/// logarithmic potential throws DomainError when |phi| > 1.
EnergyReport energy(const State& s, const PhysParams& params);

/// Dissipation parts only.
EnergyReport dissipation(const State& s, const PhysParams& params);

/// Source parts only, with S evaluated at time t.
EnergyReport remainder(const State& s, const PhysParams& params, double t);

/// All three groups, with the source at s.t.
EnergyReport full_report(const State& s, const PhysParams& params);

/// E(next) - E(prev) + dt D(next) - dt R(next).
double energy_residual(const State& prev, const State& next, double dt, const PhysParams& params);

/// Exact mean of phi under the relaxation law, c0 + exp(-alpha t) (m0 - c0).
double mean_law(double t, double phi0_mean, const PhysParams& params);
double mean_phi_error(const State& s, const PhysParams& params, double phi0_mean);

double max_abs_phi(const State& s);
/// max(0, max|phi| - 1)
double overshoot(const State& s);

struct StabilityMetrics {
    double W = 0.0;
    double W_velocity = 0.0;  // 1/2 ||grad S^-1 (v1 - v2)||^2
    double W_phi = 0.0;       // 1/2 ||phi1 - phi2||_(H1)'^2
    double W_sigma = 0.0;     // 1/2 ||sigma1 - sigma2||_(H1)'^2
    double W_mean = 0.0;      // |mean phi1 - mean phi2|
    double Z1 = 0.0;          // per-trajectory Z of s1
    double Z2 = 0.0;          // per-trajectory Z of s2
    double Z_pair = 0.0;      // combined two-solution form
};

/// Full W^{2,3} norm: the cube root of the summed cubes of the L3 norms of f,
/// its gradient and its second differences.
double norm_w23(const ScalarField& f);

/// ||grad v||^2 + ||phi||_{W23}^2 + ||phi||_{H2}^4 + ||Psi'(phi)||_{L1} + ||sigma||_{H1}^2 + 1
double z_single(const State& s, const PhysParams& params);

StabilityMetrics stability_metrics(const State& s1, const State& s2, const PhysParams& params,
                                   const EllipticSuite& suite);
StabilityMetrics stability_metrics(const State& s1, const State& s2, const PhysParams& params);

/// Least-squares slope of log(sup W) against log(W0).
double holder_fit(const std::vector<std::pair<double, double>>& runs);

}  // namespace chns
