#pragma once

// Discrete elliptic toolbox on the MAC grid: Neumann Poisson inverse, the
// Helmholtz inverse (I - Lap)^-1, Leray projection, the no-slip Stokes inverse
// and the negative norms built on them.

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <memory>
#include <string>

#include "chns/grid.hpp"

namespace chns {

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SolverConfig {
    double rel_tol = 1e-10;
    int max_iters = 0;  // 0: 10 * nx * ny
    std::string method = "cholesky";

    void validate() const {
        if (!(rel_tol > 0.0 && rel_tol <= 1e-4)) throw InvalidArgument("SolverConfig: rel_tol must lie in (0, 1e-4]");
        if (max_iters < 0) throw InvalidArgument("SolverConfig: max_iters must be positive");
    }
    int iteration_cap(const Grid& g) const { return max_iters > 0 ? max_iters : 10 * g.nx * g.ny; }
};

// ---------------------------------------------------------------------------
// Assembled operators.  Cell unknowns are ordered i + nx*j, face unknowns as in
// FaceLayout.  Every discrete inner product carries the same cell-area weight,
// so adjoint pairs are plain transposes.

/// Neumann Laplacian (negative semidefinite, constants in the kernel).
SparseMatrix neumann_laplacian_matrix(const Grid& g);

/// Cells -> faces gradient; boundary-normal rows are empty.
SparseMatrix gradient_matrix(const Grid& g);

/// Faces -> cells divergence, equal to -gradient_matrix(g)^T.
SparseMatrix divergence_matrix(const Grid& g);

/// -Lap_h on velocity with no-slip walls.  Boundary-normal rows/columns are
/// empty; x^T K x times the cell area equals velocity_dirichlet_energy.
SparseMatrix vector_laplacian_matrix(const Grid& g);

/// -div_h(2 eta D_h .) with no-slip walls; x^T K x times the cell area equals
/// viscous_dissipation.
SparseMatrix viscous_matrix(const Grid& g, const ScalarField& eta);

/// Identity restricted to the boundary-normal face dofs.
SparseMatrix boundary_face_identity(const Grid& g);

// ---------------------------------------------------------------------------

/// -Lap u = f, d_n u = 0, mean(u) = 0.
class NeumannPoisson {
public:
    struct Result {
        ScalarField u;
        double removed_mean = 0.0;  // mean of f that was split off
        bool compatible = true;     // |removed_mean| within rel_tol of |f|
    };

    NeumannPoisson(const Grid& g, SolverConfig cfg = {});

    Result solve_reported(const ScalarField& f) const;
    ScalarField solve(const ScalarField& f) const { return solve_reported(f).u; }
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    SolverConfig cfg_;
    SparseMatrix minus_lap_;
    Eigen::SimplicialLDLT<SparseMatrix> chol_;
};

/// (I - Lap) u = f with Neumann walls.
class Helmholtz {
public:
    Helmholtz(const Grid& g, SolverConfig cfg = {});
    ScalarField solve(const ScalarField& f) const;
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    SolverConfig cfg_;
    SparseMatrix op_;
    Eigen::SimplicialLDLT<SparseMatrix> chol_;
};

struct StokesSolution {
    MACVelocity u;
    ScalarField p;
    int iterations = 0;
    double divergence_residual = 0.0;  // ||div u|| / ||rhs of the Schur system||
    double momentum_residual = 0.0;    // ||-Lap u + grad p - f|| / ||f||
};

/// -Lap u + grad p = f, div u = 0, u = 0 on the walls, mean(p) = 0.  Solved by
/// conjugate gradients on the pressure Schur complement with a factorized
/// velocity block.
class Stokes {
public:
    Stokes(const Grid& g, SolverConfig cfg = {});
    StokesSolution solve(const MACVelocity& f) const;
    const Grid& grid() const { return grid_; }

private:
    Grid grid_;
    SolverConfig cfg_;
    SparseMatrix a_;     // vector Laplacian plus identity on boundary dofs
    SparseMatrix grad_;
    SparseMatrix div_;
    Eigen::SimplicialLDLT<SparseMatrix> chol_;
};

// ---------------------------------------------------------------------------
// One-shot free functions.  Each builds and factorizes its operator; reuse the
// classes above in loops.

ScalarField solve_neumann_poisson(const ScalarField& f, const SolverConfig& cfg = {});
ScalarField solve_helmholtz(const ScalarField& f, const SolverConfig& cfg = {});
StokesSolution solve_stokes(const MACVelocity& f, const SolverConfig& cfg = {});

struct LerayResult {
    MACVelocity field;  // solenoidal part
    ScalarField z;      // potential of the removed gradient part
};

LerayResult leray_project(const MACVelocity& w, const NeumannPoisson& poisson);
LerayResult leray_project(const MACVelocity& w, const SolverConfig& cfg = {});

/// ||grad N (f - mean f)||, combined with |mean f| as sqrt(a^2 + mean^2) when
/// the mean does not vanish.
double dual_norm_v0(const ScalarField& f, const NeumannPoisson& poisson);
double dual_norm_v0(const ScalarField& f, const SolverConfig& cfg = {});

/// sqrt(<f, (I - Lap)^-1 f>).
double dual_norm_h1(const ScalarField& f, const Helmholtz& helmholtz);
double dual_norm_h1(const ScalarField& f, const SolverConfig& cfg = {});

/// ||grad S^-1 P w||.
double dual_norm_stokes(const MACVelocity& w, const Stokes& stokes, const NeumannPoisson& poisson);
double dual_norm_stokes(const MACVelocity& w, const SolverConfig& cfg = {});

/// Bundle of the three factorized solvers for one grid.
class EllipticSuite {
public:
    EllipticSuite(const Grid& g, SolverConfig cfg = {})
        : poisson_(g, cfg), helmholtz_(g, cfg), stokes_(g, cfg) {}
    const NeumannPoisson& poisson() const { return poisson_; }
    const Helmholtz& helmholtz() const { return helmholtz_; }
    const Stokes& stokes() const { return stokes_; }
    const Grid& grid() const { return poisson_.grid(); }

private:
    NeumannPoisson poisson_;
    Helmholtz helmholtz_;
    Stokes stokes_;
};

}  // namespace chns
