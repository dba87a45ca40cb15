#pragma once

// Time integration of the coupled Cahn-Hilliard / Navier-Stokes / nutrient
// system on the MAC grid.

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chns/elliptic.hpp"
#include "chns/grid.hpp"
#include "chns/potential.hpp"

namespace chns {

/// S(x, y, t).  An empty function is the zero source.
using SourceFunction = std::function<double(double, double, double)>;

SourceFunction constant_source(double s0);

/// s0 + s1 cos(pi x / lx) cos(pi y / ly) cos(omega t)
SourceFunction cosine_source(double s0, double s1, double omega, double lx, double ly);

struct PhysParams {
    double A = 1.0;
    double B = 0.01;
    double chi = 0.0;
    double alpha = 0.0;
    double c0 = 0.0;
    double consumption = 0.0;
    MaterialLaws laws;
    PotentialSpec potential = PotentialSpec::quartic();
    SourceFunction source;
    double step_eps = 1e-3;  // regularization used when stepping an unregularized log potential

    void validate() const;

    /// Potential actually stepped (and used by the diagnostics).
    PotentialSpec stepping_potential() const {
        return potential.singular() ? regularized(potential, step_eps) : potential;
    }
    bool has_source() const { return static_cast<bool>(source); }
    ScalarField source_field(const Grid& g, double t) const;
};

struct State {
    double t = 0.0;
    MACVelocity v;
    ScalarField phi, mu, sigma, p;

    State() = default;
    explicit State(const Grid& g) : v(g), phi(g), mu(g), sigma(g), p(g) {}
    const Grid& grid() const { return phi.grid; }
};

/// mu = A Psi'(phi) - B Lap phi - chi sigma with the stepped potential.
ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma, const PhysParams& params);

struct CouplingMode {
    enum class Kind { Sequential, Picard };
    Kind kind = Kind::Sequential;
    double tol = 1e-10;
    int max_iters = 10;

    static CouplingMode sequential() { return {}; }
    static CouplingMode picard(double tol, int max_iters) { return {Kind::Picard, tol, max_iters}; }
    bool is_picard() const { return kind == Kind::Picard; }
    void validate() const {
        if (!is_picard()) return;
        if (!(tol > 0.0)) throw InvalidArgument("picard tolerance must be positive");
        if (max_iters < 1) throw InvalidArgument("picard max_iters must be at least 1");
    }
};

struct StepperOptions {
    double newton_tol = 1e-10;  // max-norm of the nonlinear residual
    int newton_max_iters = 50;
    int max_halvings = 30;
    double cfl_limit = 0.5;
    SolverConfig solver;
};

struct CHResult {
    ScalarField phi, mu;
    int iterations = 0;
    std::vector<double> residuals;  // max-norm per Newton iterate, starting with the initial guess
};

struct NSResult {
    MACVelocity v;
    ScalarField p;
    double cfl = 0.0;
    double div_inf = 0.0;
};

struct StepInfo {
    int newton_iterations = 0;       // summed over Picard sweeps
    int picard_iterations = 1;
    std::vector<double> picard_differences;  // L2 difference between successive sweeps
    std::vector<double> contraction;         // ratios of successive differences
    double cfl = 0.0;
    double div_inf = 0.0;
    std::vector<std::string> warnings;
};

struct StepResult {
    State state;
    StepInfo info;
};

/// Holds the factorizations reused from step to step on one grid.
class Stepper {
public:
    Stepper(const Grid& g, PhysParams params, StepperOptions opts = {});

    /// Convex-split Cahn-Hilliard update advected by w.
    CHResult ch_substep(const State& s, const MACVelocity& w, double dt,
                        const ScalarField* phi_guess = nullptr, const ScalarField* mu_guess = nullptr);
    ScalarField sigma_substep(const State& s, const MACVelocity& w, const ScalarField& phi_new, double dt);
    NSResult ns_substep(const State& s, const ScalarField& phi_new, const ScalarField& mu_new,
                        const ScalarField& sigma_new, double dt);

    StepResult step(const State& s, double dt, const CouplingMode& mode = CouplingMode::sequential());

    const PhysParams& params() const { return params_; }
    const Grid& grid() const { return grid_; }
    const StepperOptions& options() const { return opts_; }
    const NeumannPoisson& poisson() const { return poisson_; }

private:
    void check_dt(double dt) const;
    void prepare_ch(double dt);
    Eigen::VectorXd ch_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b1,
                                const Eigen::VectorXd& g2) const;

    Grid grid_;
    PhysParams params_;
    PotentialSpec stepped_;
    StepperOptions opts_;
    SparseMatrix lap_;
    NeumannPoisson poisson_;

    // Cahn-Hilliard Jacobian [[(1 + dt alpha) I, -dt L], [-A Psi0'' + B L, I]]
    SparseMatrix ch_jac_;
    std::vector<Index> ch_diag21_;   // value offsets of the (2,1) block diagonal
    Eigen::VectorXd ch_base21_;      // B L_kk
    double ch_dt_ = -1.0;
    Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> ch_lu_;
    bool ch_analyzed_ = false;

    SparseMatrix sig_op_;
    Eigen::SimplicialLDLT<SparseMatrix> sig_chol_;
    bool sig_analyzed_ = false;
    double sig_key_dt_ = -1.0;

    SparseMatrix ns_op_;
    Eigen::SimplicialLDLT<SparseMatrix> ns_chol_;
    bool ns_analyzed_ = false;
    double ns_key_dt_ = -1.0;
};

// Free-function conveniences; each builds a Stepper for one call.
CHResult ch_substep(const State& s, double dt, const PhysParams& params, const StepperOptions& opts = {});
ScalarField sigma_substep(const State& s, const ScalarField& phi_new, double dt, const PhysParams& params);
NSResult ns_substep(const State& s, const ScalarField& phi_new, const ScalarField& mu_new,
                    const ScalarField& sigma_new, double dt, const PhysParams& params);
StepResult step(const State& s, double dt, const PhysParams& params,
                const CouplingMode& mode = CouplingMode::sequential(), const StepperOptions& opts = {});

/// sqrt of the summed squared L2 differences of v, phi, mu, sigma and p.
double state_distance(const State& a, const State& b);

bool all_finite(const State& s);

}  // namespace chns
