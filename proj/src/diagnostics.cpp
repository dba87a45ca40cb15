#include "chns/diagnostics.hpp"

#include <algorithm>
#include <cmath>

namespace chns {

namespace {

template <typename F>
ScalarField map_cells(const ScalarField& f, F&& fn) {
    return ScalarField(f.grid, f.values.unaryExpr(fn));
}

double face_l3_cubed(const MACVelocity& w) {
    const double area = w.grid.cell_area();
    return (w.u.abs().cube().sum() + w.v.abs().cube().sum()) * area;
}

}  // namespace

EnergyReport energy(const State& s, const PhysParams& params) {
    const PotentialSpec& pot = params.potential;
    EnergyReport r;
    r.kinetic = 0.5 * inner(s.v, s.v);
    r.potential_bulk = params.A * integral(map_cells(s.phi, [&](double x) { return psi_value(x, pot); }));
    const MACVelocity gp = gradient_to_faces(s.phi);
    r.gradient = 0.5 * params.B * inner(gp, gp);
    r.nutrient = 0.5 * inner(s.sigma, s.sigma);
    r.cross = params.chi * inner(s.sigma, map_cells(s.phi, [](double x) { return 1.0 - x; }));
    r.total = r.kinetic + r.potential_bulk + r.gradient + r.nutrient + r.cross;
    return r;
}

EnergyReport dissipation(const State& s, const PhysParams& params) {
    EnergyReport r;
    const ScalarField eta = map_cells(s.phi, [&](double x) { return viscosity_eta(x, params.laws); });
    r.viscous = viscous_dissipation(s.v, eta);
    const MACVelocity gm = gradient_to_faces(s.mu);
    r.chem = inner(gm, gm);
    ScalarField nu = s.sigma;
    nu.values -= params.chi * s.phi.values;
    const MACVelocity gn = gradient_to_faces(nu);
    r.nutrient_flux = inner(gn, gn);
    return r;
}

EnergyReport remainder(const State& s, const PhysParams& params, double t) {
    EnergyReport r;
    if (params.alpha != 0.0) {
        ScalarField d = s.phi;
        d.values -= params.c0;
        r.oono = -params.alpha * inner(d, s.mu);
    }
    if (params.consumption != 0.0 || params.has_source()) {
        ScalarField react = params.source_field(s.grid(), t);
        if (params.consumption != 0.0)
            react.values -= params.consumption *
                            s.phi.values.unaryExpr([&](double x) { return interp_h(x, params.laws); }) *
                            s.sigma.values;
        ScalarField nu = s.sigma;
        nu.values += params.chi * (1.0 - s.phi.values);
        r.reaction = inner(react, nu);
    }
    return r;
}

EnergyReport full_report(const State& s, const PhysParams& params) {
    EnergyReport r = energy(s, params);
    const EnergyReport d = dissipation(s, params);
    const EnergyReport q = remainder(s, params, s.t);
    r.viscous = d.viscous;
    r.chem = d.chem;
    r.nutrient_flux = d.nutrient_flux;
    r.oono = q.oono;
    r.reaction = q.reaction;
    return r;
}

double energy_residual(const State& prev, const State& next, double dt, const PhysParams& params) {
    const double e0 = energy(prev, params).total;
    const double e1 = energy(next, params).total;
    return e1 - e0 + dt * dissipation(next, params).dissipation() - dt * remainder(next, params, next.t).remainder();
}

double mean_law(double t, double phi0_mean, const PhysParams& params) {
    return params.c0 + std::exp(-params.alpha * t) * (phi0_mean - params.c0);
}

double mean_phi_error(const State& s, const PhysParams& params, double phi0_mean) {
    if (s.t == 0.0) return std::abs(mean(s.phi) - phi0_mean);
    return std::abs(mean(s.phi) - mean_law(s.t, phi0_mean, params));
}

double max_abs_phi(const State& s) { return s.phi.values.abs().maxCoeff(); }

double overshoot(const State& s) { return std::max(0.0, max_abs_phi(s) - 1.0); }

double norm_w23(const ScalarField& f) {
    const double l3 = norm(f, NormKind::L3);
    const double semi = norm(f, NormKind::W23);
    return std::cbrt(l3 * l3 * l3 + face_l3_cubed(gradient_to_faces(f)) + semi * semi * semi);
}

double z_single(const State& s, const PhysParams& params) {
    const PotentialSpec pot = params.stepping_potential();
    const double gv = norm(s.v, NormKind::H1Semi);
    const double w23 = norm_w23(s.phi);
    const double h2 = norm_h2(s.phi);
    const double psi_l1 = norm(map_cells(s.phi, [&](double x) { return psi_prime(x, pot); }), NormKind::L1);
    const double h1 = norm_h1(s.sigma);
    return gv * gv + w23 * w23 + h2 * h2 * h2 * h2 + psi_l1 + h1 * h1 + 1.0;
}

StabilityMetrics stability_metrics(const State& s1, const State& s2, const PhysParams& params,
                                   const EllipticSuite& suite) {
    require_same_grid(s1.grid(), s2.grid(), "stability_metrics");
    require_same_grid(s1.grid(), suite.grid(), "stability_metrics");
    StabilityMetrics m;
    const double dv = dual_norm_stokes(s1.v - s2.v, suite.stokes(), suite.poisson());
    const double dp = dual_norm_h1(s1.phi - s2.phi, suite.helmholtz());
    const double ds = dual_norm_h1(s1.sigma - s2.sigma, suite.helmholtz());
    m.W_velocity = 0.5 * dv * dv;
    m.W_phi = 0.5 * dp * dp;
    m.W_sigma = 0.5 * ds * ds;
    m.W_mean = std::abs(mean(s1.phi) - mean(s2.phi));
    m.W = m.W_velocity + m.W_phi + m.W_sigma + m.W_mean;

    m.Z1 = z_single(s1, params);
    m.Z2 = z_single(s2, params);

    const PotentialSpec pot = params.stepping_potential();
    auto sq = [](double x) { return x * x; };
    auto psi_l1 = [&](const State& s) {
        return norm(map_cells(s.phi, [&](double x) { return psi_prime(x, pot); }), NormKind::L1);
    };
    m.Z_pair = sq(norm(s1.v, NormKind::H1Semi)) + sq(norm(s2.v, NormKind::H1Semi)) + sq(norm_w23(s1.phi)) +
               sq(norm_w23(s2.phi)) + sq(sq(norm_h2(s1.phi))) + psi_l1(s1) + psi_l1(s2) + sq(norm_h1(s2.sigma)) +
               1.0;
    return m;
}

StabilityMetrics stability_metrics(const State& s1, const State& s2, const PhysParams& params) {
    const EllipticSuite suite(s1.grid());
    return stability_metrics(s1, s2, params, suite);
}

double holder_fit(const std::vector<std::pair<double, double>>& runs) {
    if (runs.size() < 3) throw InvalidArgument("holder_fit: need at least three perturbation magnitudes");
    double lo = runs.front().first, hi = lo;
    for (const auto& [w0, ws] : runs) {
        if (!(w0 > 0.0) || !(ws > 0.0) || !std::isfinite(w0) || !std::isfinite(ws))
            throw InvalidArgument("holder_fit: W values must be positive and finite");
        lo = std::min(lo, w0);
        hi = std::max(hi, w0);
    }
    if (!(hi > lo)) throw InvalidArgument("holder_fit: identical initial distances");
    if (hi / lo < 100.0 * (1.0 - 1e-9)) throw InvalidArgument("holder_fit: initial distances must span two decades");

    const double n = static_cast<double>(runs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [w0, ws] : runs) {
        const double x = std::log(w0), y = std::log(ws);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

}  // namespace chns
