#include "doctest.h"

#include "chns/grid.hpp"
#include "test_support.hpp"

using namespace chns;
using namespace chns::testing;

TEST_CASE("make_grid spacings and preconditions") {
    const Grid a = make_grid(64, 64, 1.0, 1.0);
    CHECK(a.hx == doctest::Approx(1.0 / 64));
    CHECK(a.hy == doctest::Approx(1.0 / 64));
    const Grid b = make_grid(4, 8, 2.0, 1.0);
    CHECK(b.hx == 0.5);
    CHECK(b.hy == 0.125);
    CHECK_THROWS_AS(make_grid(2, 2, 1.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 8, 0.0, 1.0), InvalidArgument);
    CHECK_THROWS_AS(make_grid(8, 8, 1.0, -1.0), InvalidArgument);
}

TEST_CASE("Neumann Laplacian") {
    const Grid g = make_grid(16, 12, 1.0, 2.0);

    SUBCASE("constants are harmonic") {
        const ScalarField lap = laplacian_neumann(ScalarField(g, 3.5));
        CHECK(lap.values.abs().maxCoeff() == 0.0);
    }

    SUBCASE("discrete divergence theorem on random data") {
        for (unsigned seed = 1; seed <= 20; ++seed) {
            const ScalarField lap = laplacian_neumann(random_field(g, seed));
            CHECK(std::abs(integral(lap)) <= 1e-12 * lap.values.abs().sum() * g.cell_area());
        }
    }

    SUBCASE("cosine eigenfunction converges at second order") {
        double errs[3];
        const int sizes[3] = {64, 128, 256};
        for (int k = 0; k < 3; ++k) {
            const Grid gk = make_grid(sizes[k], 4, 1.0, 1.0);
            const ScalarField f = cos_x(gk);
            const ScalarField lap = laplacian_neumann(f);
            errs[k] = (lap.values + pi * pi * f.values).abs().maxCoeff();
        }
        CHECK(observed_order(errs[0], errs[1]) >= 1.9);
        CHECK(observed_order(errs[1], errs[2]) >= 1.9);
    }

    SUBCASE("cosine is an exact discrete eigenvector") {
        const Grid gk = make_grid(32, 8, 1.0, 1.0);
        const ScalarField f = cos_x(gk);
        const ScalarField lap = laplacian_neumann(f);
        CHECK((lap.values + discrete_cos_eigenvalue(gk) * f.values).abs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("face gradient and MAC divergence") {
    const Grid g = make_grid(10, 14, 1.5, 1.0);

    SUBCASE("gradient of a constant vanishes") {
        const MACVelocity w = gradient_to_faces(ScalarField(g, -2.0));
        CHECK(norm(w, NormKind::Linf) == 0.0);
    }

    SUBCASE("gradient of a linear function is its slope on interior faces") {
        const ScalarField f = ScalarField::from_function(g, [](double x, double y) { return 0.7 * x - 0.2 * y; });
        const MACVelocity w = gradient_to_faces(f);
        for (int j = 0; j < g.ny; ++j) {
            CHECK(w.u(0, j) == 0.0);
            CHECK(w.u(g.nx, j) == 0.0);
            for (int i = 1; i < g.nx; ++i) CHECK(w.u(i, j) == doctest::Approx(0.7).epsilon(1e-12));
        }
        for (int j = 1; j < g.ny; ++j)
            for (int i = 0; i < g.nx; ++i) CHECK(w.v(i, j) == doctest::Approx(-0.2).epsilon(1e-12));
    }

    SUBCASE("summation by parts") {
        for (unsigned seed = 1; seed <= 10; ++seed) {
            const ScalarField f = random_field(g, seed);
            const MACVelocity w = random_velocity(g, 100 + seed);
            const double lhs = inner(gradient_to_faces(f), w);
            const double rhs = -inner(f, divergence_mac(w));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
        }
    }

    SUBCASE("uniform flux has zero divergence") {
        MACVelocity w(g);
        w.u.setConstant(0.3);
        w.v.setConstant(-1.1);
        CHECK(divergence_mac(w).values.abs().maxCoeff() < 1e-13);
    }

    SUBCASE("div of grad is the Neumann Laplacian") {
        const ScalarField f = cos_x(g);
        const ScalarField a = divergence_mac(gradient_to_faces(f));
        const ScalarField b = laplacian_neumann(f);
        CHECK((a.values - b.values).abs().maxCoeff() < 1e-10);
        const ScalarField r = random_field(g, 7);
        CHECK((divergence_mac(gradient_to_faces(r)).values - laplacian_neumann(r).values).abs().maxCoeff() < 1e-9);
    }

    SUBCASE("zero normals telescope") {
        for (unsigned seed = 1; seed <= 10; ++seed) {
            const ScalarField d = divergence_mac(random_velocity(g, seed));
            CHECK(std::abs(integral(d)) < 1e-12 * (1.0 + d.values.abs().sum() * g.cell_area()));
        }
    }

    SUBCASE("streamfunction velocity is solenoidal with zero normals") {
        const MACVelocity w = velocity_from_streamfunction(g, [&](double x, double y) {
            return std::pow(std::sin(pi * x / g.lx) * std::sin(pi * y / g.ly), 2);
        });
        CHECK(divergence_mac(w).values.abs().maxCoeff() < 1e-12);
        CHECK(w.u.row(0).abs().maxCoeff() == 0.0);
        CHECK(w.v.col(g.ny).abs().maxCoeff() < 1e-15);
    }
}

TEST_CASE("advect_scalar") {
    const Grid g = make_grid(12, 12, 1.0, 1.0);
    const MACVelocity sol = velocity_from_streamfunction(
        g, [](double x, double y) { return std::pow(std::sin(pi * x) * std::sin(pi * y), 2); });

    CHECK(advect_scalar(MACVelocity(g), random_field(g, 3)).values.abs().maxCoeff() == 0.0);
    CHECK(advect_scalar(sol, ScalarField(g, 0.8)).values.abs().maxCoeff() < 1e-12);

    for (unsigned seed = 1; seed <= 10; ++seed) {
        // conservation holds whether or not w is solenoidal
        const ScalarField a = advect_scalar(random_velocity(g, seed), random_field(g, 50 + seed));
        CHECK(std::abs(integral(a)) < 1e-13 * (1.0 + a.values.abs().sum()));
    }

    // <f, A(w) f> = 0 for solenoidal w (centred fluxes)
    const ScalarField f = random_field(g, 99);
    CHECK(std::abs(inner(f, advect_scalar(sol, f))) < 1e-12);
}

TEST_CASE("skew-symmetric momentum transport") {
    const Grid g = make_grid(9, 11, 1.0, 1.3);
    for (unsigned seed = 1; seed <= 5; ++seed) {
        const MACVelocity w = random_velocity(g, seed);
        const MACVelocity x = random_velocity(g, 10 + seed);
        const MACVelocity y = random_velocity(g, 20 + seed);
        CHECK(std::abs(inner(convect_skew(w, x), x)) < 1e-12);
        CHECK(inner(convect_skew(w, x), y) == doctest::Approx(-inner(x, convect_skew(w, y))).epsilon(1e-12));
    }

    SUBCASE("matches the divergence form for solenoidal transport") {
        const MACVelocity w = velocity_from_streamfunction(
            g, [](double x, double y) { return std::pow(std::sin(pi * x) * std::sin(pi * y / 1.3), 2); });
        const MACVelocity x = random_velocity(g, 5);
        const MACVelocity c = convect_skew(w, x);
        // Independent divergence-form evaluation for the x-component, interior faces.
        for (int j = 1; j + 1 < g.ny; ++j) {
            for (int i = 1; i < g.nx; ++i) {
                const double fe = 0.5 * (w.u(i, j) + w.u(i + 1, j));
                const double fw = 0.5 * (w.u(i - 1, j) + w.u(i, j));
                const double fn = 0.5 * (w.v(i - 1, j + 1) + w.v(i, j + 1));
                const double fs = 0.5 * (w.v(i - 1, j) + w.v(i, j));
                const double ue = 0.5 * (x.u(i, j) + x.u(i + 1, j)), uw = 0.5 * (x.u(i, j) + x.u(i - 1, j));
                const double un = 0.5 * (x.u(i, j) + x.u(i, j + 1)), us = 0.5 * (x.u(i, j) + x.u(i, j - 1));
                const double div_form = (fe * ue - fw * uw) / g.hx + (fn * un - fs * us) / g.hy;
                CHECK(c.u(i, j) == doctest::Approx(div_form).epsilon(1e-10).scale(1.0));
            }
        }
    }
}

TEST_CASE("norms and means") {
    const Grid g = make_grid(16, 16, 1.0, 1.0);
    const ScalarField two(g, 2.0);
    CHECK(norm(two, NormKind::L2) == doctest::Approx(2.0));
    CHECK(norm(two, NormKind::L1) == doctest::Approx(2.0));
    CHECK(norm(two, NormKind::L3) == doctest::Approx(2.0));
    CHECK(norm(two, NormKind::L6) == doctest::Approx(2.0));
    CHECK(mean(two) == doctest::Approx(2.0));
    CHECK(norm(two, NormKind::H1Semi) == 0.0);
    CHECK(norm(two, NormKind::H2Semi) == 0.0);
    CHECK(norm(two, NormKind::W23) == 0.0);

    // midpoint quadrature integrates cos^2 exactly
    for (int n : {8, 16, 32, 64}) {
        const ScalarField c = cos_x(make_grid(n, n, 1.0, 1.0));
        CHECK(norm(c, NormKind::L2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-14));
    }

    // second differences of a quadratic are exact, including one-sided walls
    const ScalarField q = ScalarField::from_function(g, [](double x, double y) { return x * x + 3.0 * x * y; });
    const double expected_w23 = std::cbrt(8.0 + 2.0 * 27.0);
    CHECK(norm(q, NormKind::W23) == doctest::Approx(expected_w23).epsilon(1e-9));

    CHECK_THROWS_AS(parse_norm_kind("H7"), InvalidArgument);
    CHECK(parse_norm_kind("W23") == NormKind::W23);
    CHECK_THROWS_AS(norm(MACVelocity(g), NormKind::W23), InvalidArgument);
}

TEST_CASE("velocity Dirichlet energy matches a ghost-cell Laplacian") {
    const Grid g = make_grid(7, 9, 1.0, 1.2);
    const MACVelocity w = random_velocity(g, 42);
    // Matrix-free -Lap with reflected tangential ghosts.
    double quad = 0.0;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            const double c = w.u(i, j);
            const double s = j > 0 ? w.u(i, j - 1) : -c;
            const double n = j + 1 < g.ny ? w.u(i, j + 1) : -c;
            const double lap = (w.u(i - 1, j) - 2 * c + w.u(i + 1, j)) / (g.hx * g.hx) + (s - 2 * c + n) / (g.hy * g.hy);
            quad -= lap * c;
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            const double c = w.v(i, j);
            const double wst = i > 0 ? w.v(i - 1, j) : -c;
            const double est = i + 1 < g.nx ? w.v(i + 1, j) : -c;
            const double lap = (wst - 2 * c + est) / (g.hx * g.hx) + (w.v(i, j - 1) - 2 * c + w.v(i, j + 1)) / (g.hy * g.hy);
            quad -= lap * c;
        }
    CHECK(velocity_dirichlet_energy(w) == doctest::Approx(quad * g.cell_area()).epsilon(1e-12));
    CHECK(norm(w, NormKind::H1Semi) == doctest::Approx(std::sqrt(quad * g.cell_area())));
}
