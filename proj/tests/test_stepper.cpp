#include <cmath>

#include "chns/diagnostics.hpp"
#include "chns/initial.hpp"
#include "chns/stepper.hpp"
#include "doctest.h"
#include "test_support.hpp"

using namespace chns;
using chns::testing::pi;

namespace {

PhysParams base_params() {
    PhysParams p;
    p.A = 1.0;
    p.B = 0.01;
    p.laws.eta1 = 1.0;
    p.laws.eta2 = 5.0;
    return p;
}

State uniform_state(const Grid& g, double phi, double sigma, const PhysParams& params) {
    State s(g);
    s.phi.values.setConstant(phi);
    s.sigma.values.setConstant(sigma);
    s.mu = chemical_potential(s.phi, s.sigma, params);
    return s;
}

/// Smooth interface with a small solenoidal swirl.
State smooth_state(const Grid& g, const PhysParams& params, double sigma0 = 0.5) {
    State s(g);
    s.phi = ScalarField::from_function(g, [&](double x, double y) {
        return 0.6 * std::tanh((y - 0.5 - 0.1 * std::cos(pi * x)) / 0.15);
    });
    s.sigma = ScalarField::from_function(g, [&](double x, double y) { return sigma0 + 0.2 * std::cos(pi * x) * y; });
    s.v = vortex_velocity(g, 0.3);
    s.mu = chemical_potential(s.phi, s.sigma, params);
    return s;
}

double max_abs(const ScalarField& f) { return f.values.abs().maxCoeff(); }
double max_abs(const MACVelocity& w) { return std::max(w.u.abs().maxCoeff(), w.v.abs().maxCoeff()); }

}  // namespace

TEST_CASE("sources") {
    CHECK(constant_source(0.7)(0.1, 0.2, 3.0) == 0.7);
    const SourceFunction s = cosine_source(1.0, 0.5, 2.0, 2.0, 1.0);
    CHECK(s(0.0, 0.0, 0.0) == doctest::Approx(1.5));
    CHECK(s(2.0, 0.0, 0.0) == doctest::Approx(0.5));
    CHECK(s(0.0, 0.0, pi / 4.0) == doctest::Approx(1.0));
    CHECK(s(0.0, 0.0, pi / 2.0) == doctest::Approx(0.5));
    PhysParams p;
    CHECK_FALSE(p.has_source());
    const Grid g = make_grid(4, 4, 1.0, 1.0);
    CHECK(max_abs(p.source_field(g, 0.0)) == 0.0);
}

TEST_CASE("parameter validation names the violated hypothesis") {
    auto expect = [](PhysParams p, const char* tag) {
        try {
            p.validate();
            FAIL("accepted invalid parameters, expected " << tag);
        } catch (const InvalidArgument& e) {
            CHECK(std::string(e.what()) == tag);
        }
    };
    CHECK_NOTHROW(base_params().validate());
    PhysParams p = base_params();
    p.A = 0.0;
    expect(p, "(H4): A > 0");
    p = base_params();
    p.B = -1.0;
    expect(p, "(H4): B > 0");
    p = base_params();
    p.chi = NAN;
    expect(p, "(H4): χ ∈ ℝ");
    p = base_params();
    p.consumption = INFINITY;
    expect(p, "(H4): 𝒞 ∈ ℝ");
    p = base_params();
    p.alpha = -0.1;
    expect(p, "(H4): α ≥ 0");
    p = base_params();
    p.c0 = 1.5;
    expect(p, "(H4): c₀ ∈ (−1,1)");
    p.c0 = -1.0;
    expect(p, "(H4): c₀ ∈ (−1,1)");
    p = base_params();
    p.laws.eta2 = 0.0;
    expect(p, "(H1): η₁, η₂ > 0");
    p = base_params();
    p.laws.h_clamp = false;
    expect(p, "(H3): h ∈ L∞ requires the clamped interpolation");
    p = base_params();
    p.potential.kind = PotentialKind::Logarithmic;
    p.potential.theta = 2.0;
    p.potential.theta_c = 1.0;
    expect(p, "Eq. (1.4): 0 < θ < θ_c");
    p.potential.theta = 1.0;
    p.potential.theta_c = 2.0;
    p.step_eps = 0.7;
    expect(p, "(H2): 0 < ε < ε₀ < 1");
    p.step_eps = 1e-3;
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("stepping potential regularizes the singular log") {
    PhysParams p = base_params();
    p.potential = PotentialSpec::logarithmic(1.0, 2.0);
    p.step_eps = 1e-2;
    const PotentialSpec s = p.stepping_potential();
    CHECK(s.kind == PotentialKind::RegularizedLog);
    CHECK(s.eps == 1e-2);
    p.potential = PotentialSpec::quartic();
    CHECK(p.stepping_potential().kind == PotentialKind::Quartic);
}

TEST_CASE("Cahn-Hilliard substep") {
    const Grid g = make_grid(16, 12, 1.0, 0.75);
    const double dt = 1e-3;

    SUBCASE("uniform phase is a fixed point") {
        for (double c : {-0.6, 0.0, 0.3}) {
            const PhysParams p = base_params();
            const State s = uniform_state(g, c, 0.0, p);
            const CHResult r = ch_substep(s, dt, p);
            CHECK(max_abs(r.phi - s.phi) < 1e-14);
            const double mu = p.A * (c * c * c - c);
            CHECK((r.mu.values - mu).abs().maxCoeff() < 1e-13);
        }
    }

    SUBCASE("uniform phase relaxes towards c0") {
        PhysParams p = base_params();
        p.alpha = 2.0;
        p.c0 = 0.2;
        const State s = uniform_state(g, -0.4, 0.0, p);
        const CHResult r = ch_substep(s, dt, p);
        const double expected = (-0.4 + dt * p.alpha * p.c0) / (1.0 + dt * p.alpha);
        CHECK((r.phi.values - expected).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("mean update is exact for nonuniform data") {
        PhysParams p = base_params();
        p.alpha = 1.0;
        p.c0 = -0.3;
        p.chi = 0.5;
        State s = smooth_state(g, p);
        const double m0 = mean(s.phi);
        const CHResult r = ch_substep(s, dt, p);
        CHECK(mean(r.phi) == doctest::Approx((m0 + dt * p.alpha * p.c0) / (1.0 + dt * p.alpha)).epsilon(1e-13));
        CHECK(r.residuals.back() <= 1e-10);
    }

    SUBCASE("alpha = 0 conserves the mean under advection") {
        PhysParams p = base_params();
        p.chi = 0.5;
        State s = smooth_state(g, p);
        s.phi.values += 0.05 * chns::testing::random_field(g, 3).values;
        s.mu = chemical_potential(s.phi, s.sigma, p);
        const double m0 = mean(s.phi);
        Stepper st(g, p);
        State cur = s;
        for (int k = 0; k < 5; ++k) {
            const CHResult r = st.ch_substep(cur, cur.v, dt);
            cur.phi = r.phi;
            cur.mu = r.mu;
        }
        CHECK(std::abs(mean(cur.phi) - m0) <= 1e-14 * std::max(1.0, std::abs(m0)));
    }

    SUBCASE("chemical potential matches the discrete relation") {
        PhysParams p = base_params();
        p.chi = 0.3;
        const State s = smooth_state(g, p);
        const CHResult r = ch_substep(s, dt, p);
        // mu = A (Psi0'(phi1) - theta0 phi0) - B L phi1 - chi sigma0 for the quartic split
        ScalarField expect = laplacian_neumann(r.phi);
        expect.values *= -p.B;
        expect.values += p.A * (r.phi.values.cube() - s.phi.values) - p.chi * s.sigma.values;
        CHECK(max_abs(r.mu - expect) < 1e-9);
    }

    SUBCASE("Newton converges quadratically") {
        PhysParams p = base_params();
        p.potential = PotentialSpec::regularized_log(1.5, 3.0, 1e-3);
        const State s = smooth_state(g, p);
        const CHResult r = ch_substep(s, 1e-2, p);
        REQUIRE(r.residuals.size() >= 3);
        const auto& h = r.residuals;
        for (std::size_t k = 2; k + 1 < h.size(); ++k)
            if (h[k] > 1e-12 && h[k - 1] < 1e-2) CHECK(h[k] <= 10.0 * h[k - 1] * h[k - 1] + 1e-13);
    }

    SUBCASE("non-positive dt is rejected") {
        const PhysParams p = base_params();
        const State s = uniform_state(g, 0.1, 0.0, p);
        CHECK_THROWS_AS(ch_substep(s, 0.0, p), InvalidArgument);
        CHECK_THROWS_AS(ch_substep(s, -1e-3, p), InvalidArgument);
    }
}

TEST_CASE("nutrient substep") {
    const Grid g = make_grid(12, 12, 1.0, 1.0);
    const double dt = 5e-3;

    SUBCASE("uniform nutrient without reaction is unchanged") {
        PhysParams p = base_params();
        p.chi = 0.7;
        const State s = uniform_state(g, 0.2, 0.8, p);
        const ScalarField r = sigma_substep(s, s.phi, dt, p);
        CHECK((r.values - 0.8).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("uniform reaction update inside the phi = 1 phase") {
        PhysParams p = base_params();
        p.consumption = 3.0;
        p.source = constant_source(0.4);
        const State s = uniform_state(g, 1.0, 0.5, p);
        const ScalarField r = sigma_substep(s, s.phi, dt, p);
        const double expected = (0.5 + dt * 0.4) / (1.0 + dt * 3.0);
        CHECK((r.values - expected).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("no consumption inside the phi = -1 phase") {
        PhysParams p = base_params();
        p.consumption = 3.0;
        const State s = uniform_state(g, -1.0, 0.5, p);
        const ScalarField r = sigma_substep(s, s.phi, dt, p);
        CHECK((r.values - 0.5).abs().maxCoeff() < 1e-14);
    }

    SUBCASE("without consumption the mean gains dt times the mean source") {
        PhysParams p = base_params();
        p.chi = 0.5;
        p.source = cosine_source(0.3, 0.8, 1.0, g.lx, g.ly);
        State s = smooth_state(g, p);
        const ScalarField phi_new = ScalarField::from_function(g, [](double x, double y) { return 0.5 * x - 0.2 * y; });
        const ScalarField r = sigma_substep(s, phi_new, dt, p);
        CHECK(mean(r) == doctest::Approx(mean(s.sigma) + dt * 0.3).epsilon(1e-13));
    }

    SUBCASE("negative consumption large enough to lose coercivity is a domain error") {
        PhysParams p = base_params();
        p.consumption = -100.0;
        const State s = uniform_state(g, 1.0, 0.5, p);
        CHECK_THROWS_AS(sigma_substep(s, s.phi, 0.1, p), DomainError);
        CHECK_NOTHROW(sigma_substep(s, s.phi, 1e-3, p));
    }
}

TEST_CASE("momentum substep") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const double dt = 1e-3;

    SUBCASE("zero data gives zero velocity") {
        const PhysParams p = base_params();
        const State s(g);
        const NSResult r = ns_substep(s, s.phi, s.mu, s.sigma, dt, p);
        CHECK(max_abs(r.v) == 0.0);
        CHECK(max_abs(r.p) == 0.0);
    }

    SUBCASE("uniform phase exerts no force") {
        PhysParams p = base_params();
        p.chi = 0.5;
        State s = uniform_state(g, 0.3, 0.0, p);
        const ScalarField mu = chns::testing::random_field(g, 11);
        const ScalarField sig = chns::testing::random_field(g, 12);
        const NSResult r = ns_substep(s, s.phi, mu, sig, dt, p);
        CHECK(max_abs(r.v) < 1e-14);
    }

    SUBCASE("output is discretely solenoidal with zero normals") {
        PhysParams p = base_params();
        p.chi = 0.5;
        const State s = smooth_state(g, p);
        const ScalarField phi1 = chns::testing::random_field(g, 4, -0.9, 0.9);
        const NSResult r = ns_substep(s, phi1, chns::testing::random_field(g, 5), s.sigma, dt, p);
        CHECK(max_abs(divergence_mac(r.v)) < 1e-10);
        CHECK(r.div_inf < 1e-10);
        CHECK(std::abs(mean(r.p)) < 1e-12);
        for (int j = 0; j < g.ny; ++j) {
            CHECK(r.v.u(0, j) == 0.0);
            CHECK(r.v.u(g.nx, j) == 0.0);
        }
        for (int i = 0; i < g.nx; ++i) {
            CHECK(r.v.v(i, 0) == 0.0);
            CHECK(r.v.v(i, g.ny) == 0.0);
        }
    }

    SUBCASE("gradient forcing is absorbed into the pressure") {
        // constant mu makes the capillary force c grad(phi); only the
        // viscous boundary layer survives the projection, at O(dt^2)
        PhysParams p = base_params();
        p.laws.eta2 = 1.0;
        const ScalarField phi1 =
            ScalarField::from_function(g, [](double x, double y) { return 0.5 * std::cos(pi * x) * std::cos(pi * y); });
        ScalarField mu(g);
        mu.values.setConstant(2.0);
        State s(g);
        const double F = norm(2.0 * gradient_to_faces(phi1), NormKind::L2);
        double prev = 0.0;
        for (double h : {1e-4, 5e-5, 2.5e-5}) {
            const NSResult r = ns_substep(s, phi1, mu, s.sigma, h, p);
            const double e = norm(r.v, NormKind::L2);
            CHECK(e < 0.05 * h * F);
            if (prev > 0.0) CHECK(prev / e > 3.5);
            prev = e;
        }
    }

    SUBCASE("CFL number") {
        const PhysParams p = base_params();
        State s(g);
        s.v = vortex_velocity(g, 1.0);
        const NSResult r = ns_substep(s, s.phi, s.mu, s.sigma, dt, p);
        const double vmax = max_abs(r.v);
        CHECK(r.cfl == doctest::Approx(dt * vmax / g.hx).epsilon(1e-12));
    }
}

TEST_CASE("full step") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);

    SUBCASE("stationary uniform state") {
        PhysParams p = base_params();
        p.chi = 0.5;
        const State s = uniform_state(g, 0.25, 0.6, p);
        const StepResult r = step(s, 1e-2, p);
        CHECK(r.state.t == doctest::Approx(1e-2));
        CHECK(state_distance(r.state, s) < 1e-12);
        CHECK(r.info.warnings.empty());
        CHECK(all_finite(r.state));
    }

    SUBCASE("Picard sweeps contract") {
        PhysParams p = base_params();
        p.chi = 0.5;
        p.consumption = 0.5;
        p.source = constant_source(0.3);
        StepperOptions o;
        o.newton_tol = 1e-13;
        const State s = smooth_state(g, p);
        const double dt = g.hx / 4.0;
        const StepResult r = step(s, dt, p, CouplingMode::picard(1e-11, 10), o);
        CHECK(r.info.picard_iterations <= 10);
        CHECK(r.info.picard_differences.back() < 1e-11);
        REQUIRE_FALSE(r.info.contraction.empty());
        for (double c : r.info.contraction) CHECK(c < 1.0);
        // the first sweep is the sequential step
        const StepResult seq = step(s, dt, p, CouplingMode::sequential(), o);
        CHECK(seq.info.picard_iterations == 1);
        CHECK(state_distance(seq.state, r.state) > 0.0);
    }

    SUBCASE("Picard failure reports the history") {
        PhysParams p = base_params();
        p.chi = 0.5;
        const State s = smooth_state(g, p);
        try {
            step(s, 1e-2, p, CouplingMode::picard(1e-300, 2));
            FAIL("expected ConvergenceError");
        } catch (const ConvergenceError& e) {
            CHECK_FALSE(e.history().empty());
        }
    }

    SUBCASE("invalid coupling options") {
        PhysParams p = base_params();
        const State s = uniform_state(g, 0.0, 0.0, p);
        CHECK_THROWS_AS(step(s, 1e-3, p, CouplingMode::picard(0.0, 5)), InvalidArgument);
        CHECK_THROWS_AS(step(s, 1e-3, p, CouplingMode::picard(1e-8, 0)), InvalidArgument);
    }

    SUBCASE("large velocity raises a CFL warning") {
        PhysParams p = base_params();
        State s = uniform_state(g, 0.0, 0.0, p);
        s.v = vortex_velocity(g, 50.0);
        const StepResult r = step(s, 0.02, p);
        REQUIRE(r.info.cfl > 0.5);
        CHECK(r.info.warnings.size() == 1);
    }

    SUBCASE("energy decays on a pure-dissipation step") {
        PhysParams p = base_params();
        p.chi = 0.5;
        p.laws.eta2 = 1.0;
        State s = smooth_state(g, p);
        s.v = MACVelocity(g);
        Stepper st(g, p);
        double e = energy(s, p).total;
        for (int k = 0; k < 10; ++k) {
            s = st.step(s, 1e-3).state;
            const double e1 = energy(s, p).total;
            CHECK(e1 <= e + 1e-10 * std::abs(e));
            e = e1;
        }
    }
}

TEST_CASE("state helpers") {
    const Grid g = make_grid(6, 5, 1.0, 1.0);
    const PhysParams p = base_params();
    State a = uniform_state(g, 0.1, 0.2, p);
    State b = a;
    CHECK(state_distance(a, b) == 0.0);
    b.sigma.values += 1.0;
    CHECK(state_distance(a, b) == doctest::Approx(std::sqrt(g.lx * g.ly)));
    CHECK(all_finite(a));
    b.p.values(2, 3) = NAN;
    CHECK_FALSE(all_finite(b));
}
