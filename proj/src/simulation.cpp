#include "chns/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>

#include "chns/initial.hpp"

namespace chns {

namespace {

double div_inf(const MACVelocity& v) { return divergence_mac(v).values.abs().maxCoeff(); }

double rel(double delta, double base) { return delta / std::max(std::abs(base), 1e-300); }

}  // namespace

std::string snapshot_name(long step) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "snap_%08ld.chns", step);
    return buf;
}

RunSummary run(const Config& cfg, const RunOptions& opts) { return run(cfg, make_initial_state(cfg), opts); }

RunSummary run(const Config& cfg, const State& initial, const RunOptions& opts) {
    cfg.validate();
    const PhysParams& params = cfg.physics;
    const double dt = cfg.time.dt;
    const long steps = cfg.time.steps();
    Stepper stepper(initial.grid(), params, cfg.time.stepper);

    const bool files = opts.write_files && !cfg.output.directory.empty();
    const std::filesystem::path dir(cfg.output.directory);
    std::ofstream series;
    if (files) {
        std::filesystem::create_directories(dir);
        std::ofstream(dir / "config.txt") << format_config(cfg);
        series.open(dir / "series.csv", std::ios::trunc);
        if (!series) throw Error("cannot open " + (dir / "series.csv").string());
        write_series_header(series);
    }

    RunSummary sum;
    sum.initial = initial;
    sum.phi0_mean = mean(initial.phi);
    sum.sigma0_mean = mean(initial.sigma);
    sum.max_abs_phi = max_abs_phi(initial);
    sum.rows.reserve(static_cast<std::size_t>(steps + 1));
    sum.rows.push_back(make_series_row(initial, params, div_inf(initial.v), 0.0));
    if (files) {
        write_series_row(sum.rows.back(), series);
        if (cfg.output.snapshot_every > 0) write_snapshot(initial, dir / snapshot_name(0));
    }
    if (opts.keep_every > 0) sum.kept.push_back(initial);

    State cur = initial;
    for (long n = 1; n <= steps; ++n) {
        StepResult res;
        try {
            res = stepper.step(cur, dt, cfg.time.coupling);
        } catch (...) {
            if (files) write_snapshot(cur, dir / "last_valid.chns");
            throw;
        }
        State& next = res.state;
        const SeriesRow& prev_row = sum.rows.back();
        SeriesRow row = make_series_row(next, params, res.info.div_inf, 0.0);
        const EnergyReport& e = row.report;
        row.residual = e.total - prev_row.report.total + dt * e.dissipation() - dt * e.remainder();

        sum.max_div_inf = std::max(sum.max_div_inf, res.info.div_inf);
        sum.max_abs_phi = std::max(sum.max_abs_phi, row.max_abs_phi);
        const double inc = rel(e.total - prev_row.report.total, prev_row.report.total);
        const double rr = rel(row.residual, prev_row.report.total);
        sum.max_energy_increase = n == 1 ? inc : std::max(sum.max_energy_increase, inc);
        sum.max_residual = n == 1 ? rr : std::max(sum.max_residual, rr);
        sum.residual_abs_sum += std::abs(row.residual);
        sum.max_mean_phi_drift = std::max(sum.max_mean_phi_drift, rel(std::abs(row.mean_phi - sum.phi0_mean), sum.phi0_mean));
        sum.max_picard_iterations = std::max(sum.max_picard_iterations, res.info.picard_iterations);
        sum.newton_iterations += res.info.newton_iterations;
        for (const auto& w : res.info.warnings) {
            if (opts.on_warning) opts.on_warning(w);
            if (sum.warnings.size() < 100) sum.warnings.push_back(w);
        }

        if (files) {
            if (n % cfg.output.series_every == 0) write_series_row(row, series);
            if (cfg.output.snapshot_every > 0 && n % cfg.output.snapshot_every == 0)
                write_snapshot(next, dir / snapshot_name(n));
        }
        if (opts.on_step) opts.on_step(next, res.info, row);
        if (opts.keep_every > 0 && n % opts.keep_every == 0) sum.kept.push_back(next);
        sum.rows.push_back(row);
        cur = std::move(next);
        sum.steps = n;
    }
    if (files) {
        series.flush();
        if (!series) throw Error("series write failed");
    }
    sum.final = std::move(cur);
    return sum;
}

// ---------------------------------------------------------------------------

CompareReport compare(const Config& cfg, const CompareOptions& opts) {
    if (opts.sample_every < 1) throw InvalidArgument("compare: sample_every must be at least 1");
    if (opts.deltas.empty()) throw InvalidArgument("compare: no perturbation magnitudes given");
    const PhysParams& params = cfg.physics;
    const State s0 = make_initial_state(cfg);
    const ScalarField bump = phase_bump(s0.phi, opts.seed, opts.zero_mean);

    RunOptions ro;
    ro.write_files = false;
    ro.keep_every = opts.sample_every;
    const RunSummary base = run(cfg, s0, ro);
    const EllipticSuite suite(s0.grid(), cfg.time.stepper.solver);

    CompareReport rep;
    for (double delta : opts.deltas) {
        const State p0 = perturb_phase(s0, bump, delta, params);
        if (!(p0.phi.values.abs().maxCoeff() <= 1.0))
            throw ConfigError("compare: perturbed initial data leaves [-1, 1] (delta = " + std::to_string(delta) + ")");
        CompareRun cr;
        cr.delta = delta;
        std::size_t k = 0;
        auto record = [&](const State& s) {
            const StabilityMetrics m = stability_metrics(base.kept.at(k), s, params, suite);
            cr.t.push_back(s.t);
            cr.W.push_back(m.W);
            cr.Z1.push_back(m.Z1);
            cr.Z2.push_back(m.Z2);
            cr.Z_pair.push_back(m.Z_pair);
            ++k;
        };
        record(p0);
        long n = 0;
        RunOptions po;
        po.write_files = false;
        po.on_step = [&](const State& s, const StepInfo&, const SeriesRow&) {
            if (++n % opts.sample_every == 0) record(s);
        };
        run(cfg, p0, po);
        cr.W0 = cr.W.front();
        cr.supW = *std::max_element(cr.W.begin(), cr.W.end());
        rep.runs.push_back(std::move(cr));
    }

    std::vector<const CompareRun*> nonzero;
    for (const auto& r : rep.runs)
        if (r.delta != 0.0) nonzero.push_back(&r);
    std::sort(nonzero.begin(), nonzero.end(),
              [](const CompareRun* a, const CompareRun* b) { return std::abs(a->delta) > std::abs(b->delta); });
    rep.monotone = nonzero.size() >= 2;
    for (std::size_t i = 1; i < nonzero.size(); ++i)
        if (!(nonzero[i]->supW < nonzero[i - 1]->supW)) rep.monotone = false;
    std::vector<std::pair<double, double>> pts;
    for (const auto* r : nonzero) pts.emplace_back(r->W0, r->supW);
    try {
        rep.gamma = holder_fit(pts);
    } catch (const InvalidArgument&) {
        rep.gamma.reset();
    }
    return rep;
}

CompareRun compare_streams(const std::filesystem::path& a, const std::filesystem::path& b, const PhysParams& params) {
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(a)) {
        const std::string name = entry.path().filename().string();
        if (name.rfind("snap_", 0) == 0 && entry.path().extension() == ".chns") files.push_back(entry.path());
    }
    if (files.empty()) throw InvalidArgument("compare_streams: no snapshots in " + a.string());
    std::sort(files.begin(), files.end());

    CompareRun cr;
    std::optional<EllipticSuite> suite;
    for (const auto& fa : files) {
        const auto fb = b / fa.filename();
        if (!std::filesystem::exists(fb)) throw InvalidArgument("compare_streams: missing " + fb.string());
        const State sa = read_snapshot(fa), sb = read_snapshot(fb);
        require_same_grid(sa.grid(), sb.grid(), "compare_streams");
        if (!suite) suite.emplace(sa.grid());
        const StabilityMetrics m = stability_metrics(sa, sb, params, *suite);
        cr.t.push_back(sa.t);
        cr.W.push_back(m.W);
        cr.Z1.push_back(m.Z1);
        cr.Z2.push_back(m.Z2);
        cr.Z_pair.push_back(m.Z_pair);
    }
    cr.W0 = cr.W.front();
    cr.supW = *std::max_element(cr.W.begin(), cr.W.end());
    return cr;
}

// ---------------------------------------------------------------------------

Vary parse_vary(std::string_view s) {
    if (s == "dt") return Vary::Dt;
    if (s == "h") return Vary::H;
    if (s == "eps") return Vary::Eps;
    throw InvalidArgument("unknown convergence parameter '" + std::string(s) + "' (expected dt, h or eps)");
}

namespace {

/// 2x2 cell averages of a field on a grid twice as fine.
ScalarField restrict2(const ScalarField& fine, const Grid& coarse) {
    ScalarField c(coarse);
    for (int j = 0; j < coarse.ny; ++j)
        for (int i = 0; i < coarse.nx; ++i)
            c(i, j) = 0.25 * (fine(2 * i, 2 * j) + fine(2 * i + 1, 2 * j) + fine(2 * i, 2 * j + 1) +
                              fine(2 * i + 1, 2 * j + 1));
    return c;
}

void fill_orders(ConvergenceReport& rep) {
    const std::size_t levels = rep.values.size();
    for (std::size_t k = 0; k + 1 < levels; ++k) {
        std::vector<double> row;
        for (std::size_t c = 0; c < rep.columns.size(); ++c) {
            const double a = rep.values[k][c], b = rep.values[k + 1][c];
            row.push_back(a > 0.0 && b > 0.0 ? std::log2(a / b) : std::numeric_limits<double>::quiet_NaN());
        }
        rep.orders.push_back(row);
    }
}

}  // namespace

ConvergenceReport convergence(const Config& cfg, Vary vary, int levels) {
    if (levels < 2) throw InvalidArgument("convergence: need at least two levels");
    ConvergenceReport rep;
    rep.vary = vary;
    RunOptions ro;
    ro.write_files = false;
    const double nan = std::numeric_limits<double>::quiet_NaN();

    if (vary == Vary::Dt) {
        rep.columns = {"residual_abs_sum", "mean_phi_error", "phi_T_difference"};
        std::vector<State> finals;
        for (int k = 0; k < levels; ++k) {
            Config c = cfg;
            c.time.dt = cfg.time.dt / std::pow(2.0, k);
            const RunSummary s = run(c, ro);
            rep.params.push_back(c.time.dt);
            rep.values.push_back({s.residual_abs_sum, mean_phi_error(s.final, c.physics, s.phi0_mean), nan});
            finals.push_back(s.final);
        }
        for (int k = 0; k + 1 < levels; ++k) rep.values[k][2] = norm(finals[k].phi - finals[k + 1].phi, NormKind::L2);
    } else if (vary == Vary::H) {
        if (cfg.ic.preset == Preset::Spinodal)
            throw InvalidArgument("convergence --vary h needs grid-independent initial data (stratified or uniform)");
        rep.columns = {"phi_T_difference", "residual_abs_sum"};
        std::vector<State> finals;
        for (int k = 0; k < levels; ++k) {
            Config c = cfg;
            c.grid.nx = cfg.grid.nx << k;
            c.grid.ny = cfg.grid.ny << k;
            const RunSummary s = run(c, ro);
            rep.params.push_back(c.grid.make().hx);
            rep.values.push_back({nan, s.residual_abs_sum});
            finals.push_back(s.final);
        }
        for (int k = 0; k + 1 < levels; ++k)
            rep.values[k][0] = norm(restrict2(finals[k + 1].phi, finals[k].grid()) - finals[k].phi, NormKind::L2);
    } else {
        if (cfg.physics.potential.kind == PotentialKind::Quartic)
            throw InvalidArgument("convergence --vary eps needs a logarithmic potential");
        rep.columns = {"overshoot", "max_abs_phi"};
        for (double eps : {1e-1, 1e-2, 1e-3}) {
            Config c = cfg;
            const PotentialSpec& p = cfg.physics.potential;
            c.physics.potential = PotentialSpec::regularized_log(p.theta, p.theta_c, eps, p.eps0);
            const RunSummary s = run(c, ro);
            rep.params.push_back(eps);
            rep.values.push_back({std::max(0.0, s.max_abs_phi - 1.0), s.max_abs_phi});
        }
        for (std::size_t k = 1; k < rep.values.size(); ++k)
            if (rep.values[k][0] > rep.values[k - 1][0]) rep.monotone = false;
    }
    fill_orders(rep);
    return rep;
}

EnergyCheck check_energy(const Config& cfg, double tolerance) {
    EnergyCheck chk;
    chk.tolerance = tolerance;
    chk.pure_dissipation = cfg.physics.alpha == 0.0 && cfg.physics.consumption == 0.0 && !cfg.source.active();
    double prev_e = 0.0;
    bool have_prev = false;
    RunOptions ro;
    ro.on_step = [&](const State&, const StepInfo&, const SeriesRow& row) {
        const double e = row.report.total;
        const double base = have_prev ? prev_e : e;
        const double inc = rel(e - base, base);
        const double rr = rel(row.residual, base);
        if (chk.steps == 0 || inc > chk.worst_increase) chk.worst_increase = inc;
        if (chk.steps == 0 || rr > chk.worst_residual) chk.worst_residual = rr;
        chk.residual_abs_sum += std::abs(row.residual);
        if (chk.pure_dissipation && have_prev && inc > tolerance) ++chk.violations;
        prev_e = e;
        have_prev = true;
        ++chk.steps;
    };
    const State s0 = make_initial_state(cfg);
    prev_e = energy(s0, cfg.physics).total;
    have_prev = true;
    run(cfg, s0, ro);
    return chk;
}

}  // namespace chns
