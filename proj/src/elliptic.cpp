#include "chns/elliptic.hpp"

#include <cmath>
#include <vector>

namespace chns {

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

Index cell(const Grid& g, int i, int j) { return i + Index(g.nx) * j; }

// Accumulates w * a a^T for a two-entry stencil a.
void add_outer(Triplets& t, double w, const Stencil2& a) {
    for (int p = 0; p < a.n; ++p)
        for (int q = 0; q < a.n; ++q) t.emplace_back(a.c[p].dof, a.c[q].dof, w * a.c[p].value * a.c[q].value);
}

// w * (a + b)(a + b)^T
void add_outer_sum(Triplets& t, double w, const Stencil2& a, const Stencil2& b) {
    std::array<Coef, 4> c{};
    int n = 0;
    for (int p = 0; p < a.n; ++p) c[n++] = a.c[p];
    for (int p = 0; p < b.n; ++p) c[n++] = b.c[p];
    for (int p = 0; p < n; ++p)
        for (int q = 0; q < n; ++q) t.emplace_back(c[p].dof, c[q].dof, w * c[p].value * c[q].value);
}

void check_finite(const Eigen::VectorXd& x, const char* where) {
    if (!x.allFinite()) throw InvalidArgument(std::string(where) + ": non-finite input");
}

template <typename Solver>
void factorize_or_throw(Solver& s, const SparseMatrix& m, const char* where) {
    s.compute(m);
    if (s.info() != Eigen::Success) throw ConvergenceError(std::string(where) + ": factorization failed");
}

}  // namespace

SparseMatrix neumann_laplacian_matrix(const Grid& g) {
    Triplets t;
    t.reserve(5 * std::size_t(g.cells()));
    const double ix2 = 1.0 / (g.hx * g.hx), iy2 = 1.0 / (g.hy * g.hy);
    for (int j = 0; j < g.ny; ++j) {
        for (int i = 0; i < g.nx; ++i) {
            const Index c = cell(g, i, j);
            double diag = 0.0;
            if (i > 0) { t.emplace_back(c, cell(g, i - 1, j), ix2); diag -= ix2; }
            if (i + 1 < g.nx) { t.emplace_back(c, cell(g, i + 1, j), ix2); diag -= ix2; }
            if (j > 0) { t.emplace_back(c, cell(g, i, j - 1), iy2); diag -= iy2; }
            if (j + 1 < g.ny) { t.emplace_back(c, cell(g, i, j + 1), iy2); diag -= iy2; }
            t.emplace_back(c, c, diag);
        }
    }
    SparseMatrix m(g.cells(), g.cells());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix gradient_matrix(const Grid& g) {
    const FaceLayout L(g);
    Triplets t;
    for (int j = 0; j < g.ny; ++j)
        for (int i = 1; i < g.nx; ++i) {
            t.emplace_back(L.u(i, j), cell(g, i, j), 1.0 / g.hx);
            t.emplace_back(L.u(i, j), cell(g, i - 1, j), -1.0 / g.hx);
        }
    for (int j = 1; j < g.ny; ++j)
        for (int i = 0; i < g.nx; ++i) {
            t.emplace_back(L.v(i, j), cell(g, i, j), 1.0 / g.hy);
            t.emplace_back(L.v(i, j), cell(g, i, j - 1), -1.0 / g.hy);
        }
    SparseMatrix m(L.size(), g.cells());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix divergence_matrix(const Grid& g) {
    SparseMatrix d = -SparseMatrix(gradient_matrix(g).transpose());
    return d;
}

SparseMatrix vector_laplacian_matrix(const Grid& g) {
    Triplets t;
    for_each_cell_stretch(g, [&](int, int, const Stencil2& ux, const Stencil2& vy) {
        add_outer(t, 1.0, ux);
        add_outer(t, 1.0, vy);
    });
    for_each_corner_shear(g, [&](int, int, double wt, const Stencil2& uy, const Stencil2& vx) {
        add_outer(t, wt, uy);
        add_outer(t, wt, vx);
    });
    SparseMatrix m(g.faces(), g.faces());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix viscous_matrix(const Grid& g, const ScalarField& eta) {
    require_same_grid(g, eta.grid, "viscous_matrix");
    const Array2<double> eta_n = cell_to_nodes(eta);
    Triplets t;
    for_each_cell_stretch(g, [&](int i, int j, const Stencil2& ux, const Stencil2& vy) {
        add_outer(t, 2.0 * eta(i, j), ux);
        add_outer(t, 2.0 * eta(i, j), vy);
    });
    for_each_corner_shear(g, [&](int i, int j, double wt, const Stencil2& uy, const Stencil2& vx) {
        add_outer_sum(t, wt * eta_n(i, j), uy, vx);
    });
    SparseMatrix m(g.faces(), g.faces());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

SparseMatrix boundary_face_identity(const Grid& g) {
    const FaceLayout L(g);
    Triplets t;
    for (int j = 0; j < g.ny; ++j) {
        t.emplace_back(L.u(0, j), L.u(0, j), 1.0);
        t.emplace_back(L.u(g.nx, j), L.u(g.nx, j), 1.0);
    }
    for (int i = 0; i < g.nx; ++i) {
        t.emplace_back(L.v(i, 0), L.v(i, 0), 1.0);
        t.emplace_back(L.v(i, g.ny), L.v(i, g.ny), 1.0);
    }
    SparseMatrix m(L.size(), L.size());
    m.setFromTriplets(t.begin(), t.end());
    return m;
}

// ---------------------------------------------------------------------------

NeumannPoisson::NeumannPoisson(const Grid& g, SolverConfig cfg) : grid_(g), cfg_(std::move(cfg)) {
    cfg_.validate();
    minus_lap_ = -neumann_laplacian_matrix(g);
    // Pin cell 0: the pinned system is SPD and, for compatible data, differs
    // from the singular one by a constant that the mean projection removes.
    SparseMatrix pinned = minus_lap_;
    for (int k = 0; k < pinned.outerSize(); ++k)
        for (SparseMatrix::InnerIterator it(pinned, k); it; ++it)
            if (it.row() == 0 || it.col() == 0) it.valueRef() = (it.row() == it.col()) ? 1.0 : 0.0;
    pinned.prune(0.0);
    factorize_or_throw(chol_, pinned, "NeumannPoisson");
}

NeumannPoisson::Result NeumannPoisson::solve_reported(const ScalarField& f) const {
    require_same_grid(grid_, f.grid, "NeumannPoisson::solve");
    check_finite(f.vec(), "NeumannPoisson::solve");
    Result res{ScalarField(grid_), 0.0, true};
    const double fmean = f.values.mean();
    res.removed_mean = fmean;
    const double fscale = f.values.abs().maxCoeff();
    res.compatible = std::abs(fmean) <= cfg_.rel_tol * std::max(fscale, 1e-300) || fscale == 0.0;
    if (fscale == 0.0) return res;

    Eigen::VectorXd b = f.vec().array() - fmean;
    Eigen::VectorXd rhs = b;
    rhs[0] = 0.0;
    Eigen::VectorXd x = chol_.solve(rhs);
    x.array() -= x.mean();
    // One step of iterative refinement on the singular system.
    Eigen::VectorXd r = b - minus_lap_ * x;
    r.array() -= r.mean();
    r[0] = 0.0;
    Eigen::VectorXd dx = chol_.solve(r);
    x += dx;
    x.array() -= x.mean();

    const double resid = (minus_lap_ * x - b).norm() / b.norm();
    if (!(resid <= cfg_.rel_tol))
        throw ConvergenceError("NeumannPoisson: residual " + std::to_string(resid) + " above tolerance", {resid});
    res.u.vec() = x;
    return res;
}

Helmholtz::Helmholtz(const Grid& g, SolverConfig cfg) : grid_(g), cfg_(std::move(cfg)) {
    cfg_.validate();
    SparseMatrix id(g.cells(), g.cells());
    id.setIdentity();
    op_ = id - neumann_laplacian_matrix(g);
    factorize_or_throw(chol_, op_, "Helmholtz");
}

ScalarField Helmholtz::solve(const ScalarField& f) const {
    require_same_grid(grid_, f.grid, "Helmholtz::solve");
    check_finite(f.vec(), "Helmholtz::solve");
    ScalarField u(grid_);
    const Eigen::VectorXd b = f.vec();
    if (b.norm() == 0.0) return u;
    Eigen::VectorXd x = chol_.solve(b);
    x += chol_.solve(Eigen::VectorXd(b - op_ * x));
    const double resid = (op_ * x - b).norm() / b.norm();
    if (!(resid <= cfg_.rel_tol))
        throw ConvergenceError("Helmholtz: residual " + std::to_string(resid) + " above tolerance", {resid});
    u.vec() = x;
    return u;
}

Stokes::Stokes(const Grid& g, SolverConfig cfg) : grid_(g), cfg_(std::move(cfg)) {
    cfg_.validate();
    a_ = vector_laplacian_matrix(g) + boundary_face_identity(g);
    grad_ = gradient_matrix(g);
    div_ = divergence_matrix(g);
    factorize_or_throw(chol_, a_, "Stokes");
}

StokesSolution Stokes::solve(const MACVelocity& f) const {
    require_same_grid(grid_, f.grid, "Stokes::solve");
    const FaceLayout L(grid_);
    Eigen::VectorXd fv = pack(f);
    check_finite(fv, "Stokes::solve");
    for (Index k = 0; k < fv.size(); ++k)
        if (L.is_boundary(k)) fv[k] = 0.0;

    StokesSolution sol{MACVelocity(grid_), ScalarField(grid_), 0, 0.0, 0.0};
    const double fnorm = fv.norm();
    if (fnorm == 0.0) return sol;

    // Schur complement S = G^T A^-1 G acting on mean-zero pressures.
    auto project = [](Eigen::VectorXd& x) { x.array() -= x.mean(); };
    auto apply_s = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd y = -(div_ * chol_.solve(Eigen::VectorXd(grad_ * p)));
        project(y);
        return y;
    };

    const Eigen::VectorXd a_inv_f = chol_.solve(fv);
    Eigen::VectorXd b = -(div_ * a_inv_f);
    project(b);
    const double bnorm = b.norm();

    Eigen::VectorXd p = Eigen::VectorXd::Zero(grid_.cells());
    std::vector<double> history;
    if (bnorm > 0.0) {
        Eigen::VectorXd r = b, d = r;
        double rr = r.squaredNorm();
        const int cap = cfg_.iteration_cap(grid_);
        int it = 0;
        while (std::sqrt(rr) > cfg_.rel_tol * bnorm) {
            if (it >= cap)
                throw ConvergenceError("Stokes: Schur CG did not converge in " + std::to_string(cap) + " iterations",
                                       history);
            const Eigen::VectorXd sd = apply_s(d);
            const double alpha = rr / d.dot(sd);
            p += alpha * d;
            r -= alpha * sd;
            const double rr_new = r.squaredNorm();
            d = r + (rr_new / rr) * d;
            rr = rr_new;
            history.push_back(std::sqrt(rr) / bnorm);
            ++it;
        }
        sol.iterations = it;
    }
    project(p);
    Eigen::VectorXd u = chol_.solve(Eigen::VectorXd(fv - grad_ * p));
    for (Index k = 0; k < u.size(); ++k)
        if (L.is_boundary(k)) u[k] = 0.0;

    const Eigen::VectorXd divu = div_ * u;
    sol.divergence_residual = bnorm > 0.0 ? divu.norm() / bnorm : divu.norm() / fnorm;
    sol.momentum_residual = (a_ * u + grad_ * p - fv).norm() / fnorm;
    sol.u = unpack(grid_, u);
    sol.p.vec() = p;
    return sol;
}

// ---------------------------------------------------------------------------

ScalarField solve_neumann_poisson(const ScalarField& f, const SolverConfig& cfg) {
    return NeumannPoisson(f.grid, cfg).solve(f);
}

ScalarField solve_helmholtz(const ScalarField& f, const SolverConfig& cfg) { return Helmholtz(f.grid, cfg).solve(f); }

StokesSolution solve_stokes(const MACVelocity& f, const SolverConfig& cfg) { return Stokes(f.grid, cfg).solve(f); }

LerayResult leray_project(const MACVelocity& w, const NeumannPoisson& poisson) {
    MACVelocity wn = w;
    wn.zero_normals();
    // Lap z = div w  <=>  -Lap z = -div w
    ScalarField rhs = divergence_mac(wn);
    rhs *= -1.0;
    ScalarField z = poisson.solve(rhs);
    MACVelocity out = wn - gradient_to_faces(z);
    return {std::move(out), std::move(z)};
}

LerayResult leray_project(const MACVelocity& w, const SolverConfig& cfg) {
    return leray_project(w, NeumannPoisson(w.grid, cfg));
}

double dual_norm_v0(const ScalarField& f, const NeumannPoisson& poisson) {
    const double m = mean(f);
    ScalarField centred = f;
    centred.values -= m;
    const ScalarField u = poisson.solve(centred);
    const MACVelocity gu = gradient_to_faces(u);
    return std::sqrt(inner(gu, gu) + m * m);
}

double dual_norm_v0(const ScalarField& f, const SolverConfig& cfg) {
    return dual_norm_v0(f, NeumannPoisson(f.grid, cfg));
}

double dual_norm_h1(const ScalarField& f, const Helmholtz& helmholtz) {
    const ScalarField u = helmholtz.solve(f);
    return std::sqrt(std::max(0.0, inner(f, u)));
}

double dual_norm_h1(const ScalarField& f, const SolverConfig& cfg) { return dual_norm_h1(f, Helmholtz(f.grid, cfg)); }

double dual_norm_stokes(const MACVelocity& w, const Stokes& stokes, const NeumannPoisson& poisson) {
    const MACVelocity pw = leray_project(w, poisson).field;
    if (pw.u.abs().maxCoeff() == 0.0 && pw.v.abs().maxCoeff() == 0.0) return 0.0;
    const StokesSolution s = stokes.solve(pw);
    return std::sqrt(velocity_dirichlet_energy(s.u));
}

double dual_norm_stokes(const MACVelocity& w, const SolverConfig& cfg) {
    return dual_norm_stokes(w, Stokes(w.grid, cfg), NeumannPoisson(w.grid, cfg));
}

}  // namespace chns
