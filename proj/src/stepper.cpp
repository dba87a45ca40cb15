#include "chns/stepper.hpp"

#include <cmath>
#include <sstream>

namespace chns {

SourceFunction constant_source(double s0) {
    return [s0](double, double, double) { return s0; };
}

SourceFunction cosine_source(double s0, double s1, double omega, double lx, double ly) {
    const double kx = std::numbers::pi / lx, ky = std::numbers::pi / ly;
    return [=](double x, double y, double t) {
        return s0 + s1 * std::cos(kx * x) * std::cos(ky * y) * std::cos(omega * t);
    };
}

void PhysParams::validate() const {
    if (!(A > 0.0) || !std::isfinite(A)) throw InvalidArgument("(H4): A > 0");
    if (!(B > 0.0) || !std::isfinite(B)) throw InvalidArgument("(H4): B > 0");
    if (!std::isfinite(chi)) throw InvalidArgument("(H4): χ ∈ ℝ");
    if (!std::isfinite(consumption)) throw InvalidArgument("(H4): 𝒞 ∈ ℝ");
    if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("(H4): α ≥ 0");
    if (!(c0 > -1.0 && c0 < 1.0)) throw InvalidArgument("(H4): c₀ ∈ (−1,1)");
    if (!(laws.eta1 > 0.0 && laws.eta2 > 0.0) || !std::isfinite(laws.eta1) || !std::isfinite(laws.eta2))
        throw InvalidArgument("(H1): η₁, η₂ > 0");
    if (!laws.h_clamp) throw InvalidArgument("(H3): h ∈ L∞ requires the clamped interpolation");
    if (potential.kind != PotentialKind::Quartic) {
        if (!(potential.theta > 0.0 && potential.theta < potential.theta_c))
            throw InvalidArgument("Eq. (1.4): 0 < θ < θ_c");
        const double eps = potential.kind == PotentialKind::RegularizedLog ? potential.eps : step_eps;
        if (!(potential.eps0 > 0.0 && potential.eps0 < 1.0) || !(eps > 0.0 && eps < potential.eps0))
            throw InvalidArgument("(H2): 0 < ε < ε₀ < 1");
    }
}

ScalarField PhysParams::source_field(const Grid& g, double t) const {
    if (!source) return ScalarField(g);
    return ScalarField::from_function(g, [&](double x, double y) { return source(x, y, t); });
}

ScalarField chemical_potential(const ScalarField& phi, const ScalarField& sigma, const PhysParams& params) {
    const PotentialSpec pot = params.stepping_potential();
    ScalarField mu = laplacian_neumann(phi);
    mu.values *= -params.B;
    mu.values += params.A * phi.values.unaryExpr([&](double r) { return psi_prime(r, pot); });
    mu.values -= params.chi * sigma.values;
    return mu;
}

double state_distance(const State& a, const State& b) {
    const auto sq = [](double x) { return x * x; };
    return std::sqrt(sq(norm(a.v - b.v, NormKind::L2)) + sq(norm(a.phi - b.phi, NormKind::L2)) +
                     sq(norm(a.mu - b.mu, NormKind::L2)) + sq(norm(a.sigma - b.sigma, NormKind::L2)) +
                     sq(norm(a.p - b.p, NormKind::L2)));
}

bool all_finite(const State& s) {
    return std::isfinite(s.t) && s.v.u.allFinite() && s.v.v.allFinite() && s.phi.values.allFinite() &&
           s.mu.values.allFinite() && s.sigma.values.allFinite() && s.p.values.allFinite();
}

// ---------------------------------------------------------------------------

Stepper::Stepper(const Grid& g, PhysParams params, StepperOptions opts)
    : grid_(g),
      params_(std::move(params)),
      opts_(opts),
      lap_(neumann_laplacian_matrix(g)),
      poisson_(g, opts.solver) {
    params_.validate();
    stepped_ = params_.stepping_potential();
    if (!(opts_.newton_tol > 0.0) || opts_.newton_max_iters < 1 || opts_.max_halvings < 0)
        throw InvalidArgument("StepperOptions: invalid Newton settings");
}

void Stepper::check_dt(double dt) const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("time step must be positive");
}

void Stepper::prepare_ch(double dt) {
    if (dt == ch_dt_) return;
    const Index n = grid_.cells();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<std::size_t>(4 * lap_.nonZeros() + 4 * n));
    for (Index k = 0; k < n; ++k) {
        trip.emplace_back(k, k, 1.0 + dt * params_.alpha);
        trip.emplace_back(n + k, n + k, 1.0);
    }
    ch_base21_ = Eigen::VectorXd::Zero(n);
    for (Index c = 0; c < lap_.outerSize(); ++c) {
        for (SparseMatrix::InnerIterator it(lap_, c); it; ++it) {
            trip.emplace_back(it.row(), n + it.col(), -dt * it.value());
            trip.emplace_back(n + it.row(), it.col(), params_.B * it.value());
            if (it.row() == it.col()) ch_base21_[it.row()] = params_.B * it.value();
        }
    }
    ch_jac_.resize(2 * n, 2 * n);
    ch_jac_.setFromTriplets(trip.begin(), trip.end());
    ch_jac_.makeCompressed();
    ch_diag21_.resize(static_cast<std::size_t>(n));
    for (Index k = 0; k < n; ++k) ch_diag21_[k] = &ch_jac_.coeffRef(n + k, k) - ch_jac_.valuePtr();
    if (!ch_analyzed_) {
        ch_lu_.analyzePattern(ch_jac_);
        ch_analyzed_ = true;
    }
    ch_dt_ = dt;
}

Eigen::VectorXd Stepper::ch_residual(const Eigen::VectorXd& x, const Eigen::VectorXd& b1,
                                     const Eigen::VectorXd& g2) const {
    const Index n = grid_.cells();
    const auto phi = x.head(n);
    const auto mu = x.tail(n);
    Eigen::VectorXd r(2 * n);
    r.head(n) = (1.0 + ch_dt_ * params_.alpha) * phi - ch_dt_ * (lap_ * mu) - b1;
    r.tail(n) = mu + params_.B * (lap_ * phi) - g2;
    for (Index k = 0; k < n; ++k) r[n + k] -= params_.A * psi0_prime(phi[k], stepped_);
    return r;
}

CHResult Stepper::ch_substep(const State& s, const MACVelocity& w, double dt, const ScalarField* phi_guess,
                             const ScalarField* mu_guess) {
    check_dt(dt);
    require_same_grid(s.grid(), grid_, "ch_substep");
    prepare_ch(dt);
    const Index n = grid_.cells();

    const ScalarField adv = advect_scalar(w, s.phi);
    const Eigen::VectorXd b1 =
        (s.phi.values - dt * adv.values + dt * params_.alpha * params_.c0).matrix().reshaped();
    const Eigen::VectorXd g2 =
        (-params_.A * stepped_.theta0() * s.phi.values - params_.chi * s.sigma.values).matrix().reshaped();

    Eigen::VectorXd x(2 * n);
    x.head(n) = phi_guess ? phi_guess->values.matrix().reshaped() : s.phi.values.matrix().reshaped();
    if (mu_guess) {
        x.tail(n) = mu_guess->values.matrix().reshaped();
    } else {
        ScalarField phi0(grid_, x.head(n).reshaped(grid_.nx, grid_.ny).array());
        x.tail(n) = chemical_potential(phi0, s.sigma, params_).values.matrix().reshaped();
    }

    CHResult out;
    Eigen::VectorXd r = ch_residual(x, b1, g2);
    double rn = r.lpNorm<Eigen::Infinity>();
    out.residuals.push_back(rn);
    double* values = ch_jac_.valuePtr();
    while (!(rn <= opts_.newton_tol)) {
        if (out.iterations >= opts_.newton_max_iters || !std::isfinite(rn))
            throw ConvergenceError("Cahn-Hilliard Newton iteration did not converge", out.residuals);
        for (Index k = 0; k < n; ++k)
            values[ch_diag21_[k]] = ch_base21_[k] - params_.A * psi0_second(x[k], stepped_);
        ch_lu_.factorize(ch_jac_);
        if (ch_lu_.info() != Eigen::Success)
            throw ConvergenceError("Cahn-Hilliard Jacobian factorization failed", out.residuals);
        const Eigen::VectorXd delta = ch_lu_.solve(r);

        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= opts_.max_halvings; ++h) {
            Eigen::VectorXd trial = x - lambda * delta;
            Eigen::VectorXd rt = ch_residual(trial, b1, g2);
            const double tn = rt.lpNorm<Eigen::Infinity>();
            if (tn < rn) {
                x.swap(trial);
                r.swap(rt);
                rn = tn;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        ++out.iterations;
        out.residuals.push_back(rn);
        if (!accepted) throw ConvergenceError("Cahn-Hilliard line search stalled", out.residuals);
    }

    out.phi = ScalarField(grid_, x.head(n).reshaped(grid_.nx, grid_.ny).array());
    out.mu = ScalarField(grid_, x.tail(n).reshaped(grid_.nx, grid_.ny).array());
    return out;
}

ScalarField Stepper::sigma_substep(const State& s, const MACVelocity& w, const ScalarField& phi_new, double dt) {
    check_dt(dt);
    require_same_grid(s.grid(), grid_, "sigma_substep");
    const Index n = grid_.cells();
    const bool reactive = params_.consumption != 0.0;

    Eigen::VectorXd react = Eigen::VectorXd::Zero(n);
    if (reactive) {
        for (Index k = 0; k < n; ++k) react[k] = params_.consumption * interp_h(phi_new.values.data()[k], params_.laws);
        const double worst = (1.0 + dt * react.array()).minCoeff();
        if (!(worst > 0.0)) {
            std::ostringstream msg;
            msg << "nutrient step: 1 + dt*C*h(phi) = " << worst << " <= 0 breaks diagonal dominance";
            throw DomainError(msg.str());
        }
    }
    if (reactive || dt != sig_key_dt_) {
        SparseMatrix diag(n, n);
        diag.reserve(Eigen::VectorXi::Constant(n, 1));
        for (Index k = 0; k < n; ++k) diag.insert(k, k) = 1.0 / dt + react[k];
        sig_op_ = diag - lap_;
        if (!sig_analyzed_) {
            sig_chol_.analyzePattern(sig_op_);
            sig_analyzed_ = true;
        }
        sig_chol_.factorize(sig_op_);
        if (sig_chol_.info() != Eigen::Success) throw ConvergenceError("nutrient factorization failed", {});
        sig_key_dt_ = reactive ? -1.0 : dt;
    }

    ScalarField rhs = s.sigma;
    rhs.values /= dt;
    rhs -= advect_scalar(w, s.sigma);
    rhs.values -= params_.chi * laplacian_neumann(phi_new).values;
    if (params_.has_source()) rhs += params_.source_field(grid_, s.t + dt);

    const Eigen::VectorXd b = rhs.vec();
    Eigen::VectorXd x = sig_chol_.solve(b);
    x += sig_chol_.solve(b - sig_op_ * x);
    if ((b - sig_op_ * x).norm() > opts_.solver.rel_tol * (b.norm() + 1e-300) && b.norm() > 0.0)
        throw ConvergenceError("nutrient solve did not reach the requested tolerance", {});
    return ScalarField(grid_, x.reshaped(grid_.nx, grid_.ny).array());
}

NSResult Stepper::ns_substep(const State& s, const ScalarField& phi_new, const ScalarField& mu_new,
                             const ScalarField& sigma_new, double dt) {
    check_dt(dt);
    require_same_grid(s.grid(), grid_, "ns_substep");
    const FaceLayout layout(grid_);
    const Index m = layout.size();
    const bool constant_eta = params_.laws.eta1 == params_.laws.eta2;

    if (!constant_eta || dt != ns_key_dt_) {
        const ScalarField eta(grid_, phi_new.values.unaryExpr([&](double r) { return viscosity_eta(r, params_.laws); }));
        SparseMatrix diag(m, m);
        diag.reserve(Eigen::VectorXi::Constant(m, 1));
        for (Index k = 0; k < m; ++k) diag.insert(k, k) = layout.is_boundary(k) ? 1.0 : 1.0 / dt;
        ns_op_ = viscous_matrix(grid_, eta) + diag;
        if (!ns_analyzed_) {
            ns_chol_.analyzePattern(ns_op_);
            ns_analyzed_ = true;
        }
        ns_chol_.factorize(ns_op_);
        if (ns_chol_.info() != Eigen::Success) throw ConvergenceError("momentum factorization failed", {});
        ns_key_dt_ = constant_eta ? dt : -1.0;
    }

    ScalarField coupling = mu_new;
    coupling.values += params_.chi * sigma_new.values;
    const MACVelocity cf = average_to_faces(coupling);
    MACVelocity force = gradient_to_faces(phi_new);
    force.u *= cf.u;
    force.v *= cf.v;

    MACVelocity rhs = s.v;
    rhs *= 1.0 / dt;
    rhs -= convect_skew(s.v, s.v);
    rhs += force;
    rhs.zero_normals();

    const Eigen::VectorXd b = pack(rhs);
    Eigen::VectorXd x = ns_chol_.solve(b);
    x += ns_chol_.solve(b - ns_op_ * x);
    if ((b - ns_op_ * x).norm() > opts_.solver.rel_tol * b.norm() && b.norm() > 0.0)
        throw ConvergenceError("momentum solve did not reach the requested tolerance", {});
    MACVelocity vstar = unpack(grid_, x);
    vstar.zero_normals();

    ScalarField dv = divergence_mac(vstar);
    dv.values /= -dt;  // Lap q = div v* / dt  <=>  -Lap q = -div v* / dt
    NSResult out;
    out.p = poisson_.solve(dv);
    MACVelocity corr = gradient_to_faces(out.p);
    corr *= dt;
    out.v = vstar - corr;
    out.v.zero_normals();
    out.div_inf = divergence_mac(out.v).values.abs().maxCoeff();
    const double vmax = std::max(out.v.u.abs().maxCoeff(), out.v.v.abs().maxCoeff());
    out.cfl = dt * vmax / std::min(grid_.hx, grid_.hy);
    return out;
}

StepResult Stepper::step(const State& s, double dt, const CouplingMode& mode) {
    check_dt(dt);
    mode.validate();
    const int sweeps = mode.is_picard() ? std::max(mode.max_iters, 1) : 1;

    StepResult res;
    MACVelocity w = s.v;
    std::optional<State> prev;
    bool converged = !mode.is_picard();
    for (int it = 1; it <= sweeps; ++it) {
        CHResult ch = prev ? ch_substep(s, w, dt, &prev->phi, &prev->mu) : ch_substep(s, w, dt);
        res.info.newton_iterations += ch.iterations;
        ScalarField sig = sigma_substep(s, w, ch.phi, dt);
        NSResult ns = ns_substep(s, ch.phi, ch.mu, sig, dt);

        State next;
        next.t = s.t + dt;
        next.v = std::move(ns.v);
        next.phi = std::move(ch.phi);
        next.mu = std::move(ch.mu);
        next.sigma = std::move(sig);
        next.p = std::move(ns.p);
        res.info.picard_iterations = it;
        res.info.cfl = ns.cfl;
        res.info.div_inf = ns.div_inf;

        if (mode.is_picard() && prev) {
            const double d = state_distance(next, *prev);
            auto& hist = res.info.picard_differences;
            if (!hist.empty() && hist.back() > 0.0) res.info.contraction.push_back(d / hist.back());
            hist.push_back(d);
            if (d < mode.tol) {
                prev = std::move(next);
                converged = true;
                break;
            }
        }
        w = next.v;
        prev = std::move(next);
    }
    if (!converged) {
        std::vector<double> hist = res.info.contraction.empty() ? res.info.picard_differences : res.info.contraction;
        throw ConvergenceError("Picard coupling did not converge within " + std::to_string(sweeps) + " sweeps", hist);
    }
    res.state = std::move(*prev);
    if (res.info.cfl > opts_.cfl_limit) {
        std::ostringstream msg;
        msg << "CFL number " << res.info.cfl << " exceeds " << opts_.cfl_limit << " at t = " << res.state.t;
        res.info.warnings.push_back(msg.str());
    }
    return res;
}

// ---------------------------------------------------------------------------

CHResult ch_substep(const State& s, double dt, const PhysParams& params, const StepperOptions& opts) {
    Stepper st(s.grid(), params, opts);
    return st.ch_substep(s, s.v, dt);
}

ScalarField sigma_substep(const State& s, const ScalarField& phi_new, double dt, const PhysParams& params) {
    Stepper st(s.grid(), params);
    return st.sigma_substep(s, s.v, phi_new, dt);
}

NSResult ns_substep(const State& s, const ScalarField& phi_new, const ScalarField& mu_new,
                    const ScalarField& sigma_new, double dt, const PhysParams& params) {
    Stepper st(s.grid(), params);
    return st.ns_substep(s, phi_new, mu_new, sigma_new, dt);
}

StepResult step(const State& s, double dt, const PhysParams& params, const CouplingMode& mode,
                const StepperOptions& opts) {
    Stepper st(s.grid(), params, opts);
    return st.step(s, dt, mode);
}

}  // namespace chns
