#include <cstdio>
#include <fstream>
#include <iomanip>
#include <iostream>

#include "CLI11.hpp"
#include "chns/simulation.hpp"

using namespace chns;

namespace {

void print_warning(const std::string& w) { std::cerr << "warning: " << w << '\n'; }

int cmd_run(const std::string& path, const std::string& out_dir) {
    Config cfg = load_config(path);
    if (!out_dir.empty()) cfg.output.directory = out_dir;
    RunOptions ro;
    ro.on_warning = print_warning;
    const RunSummary s = run(cfg, ro);
    std::cout << std::setprecision(6) << "steps " << s.steps << "  t " << s.final.t << "  E " << s.rows.back().report.total
              << "  max|div v| " << s.max_div_inf << "  max|phi| " << s.max_abs_phi << "  newton " << s.newton_iterations
              << '\n';
    return 0;
}

void write_compare_csv(const CompareRun& r, const std::filesystem::path& path) {
    std::ofstream o(path, std::ios::trunc);
    o << "t,W,Z1,Z2,Z_pair\n" << std::setprecision(17);
    for (std::size_t k = 0; k < r.t.size(); ++k)
        o << r.t[k] << ',' << r.W[k] << ',' << r.Z1[k] << ',' << r.Z2[k] << ',' << r.Z_pair[k] << '\n';
    if (!o) throw Error("cannot write " + path.string());
}

int cmd_compare(const std::string& path, double delta, std::uint64_t seed, bool single, bool zero_mean, int every,
                const std::vector<std::string>& streams) {
    Config cfg = load_config(path);
    if (!streams.empty()) {
        const CompareRun r = compare_streams(streams.at(0), streams.at(1), cfg.physics);
        std::cout << std::setprecision(6) << "snapshots " << r.t.size() << "  W0 " << r.W0 << "  sup W " << r.supW << '\n';
        if (!cfg.output.directory.empty()) {
            std::filesystem::create_directories(cfg.output.directory);
            write_compare_csv(r, std::filesystem::path(cfg.output.directory) / "compare_streams.csv");
        }
        return 0;
    }
    CompareOptions co;
    co.seed = seed;
    co.zero_mean = zero_mean;
    co.sample_every = every;
    co.deltas = single ? std::vector<double>{delta} : std::vector<double>{delta, delta / 10, delta / 100};
    const CompareReport rep = compare(cfg, co);
    std::cout << std::setprecision(6);
    for (const auto& r : rep.runs) {
        std::cout << "delta " << r.delta << "  W0 " << r.W0 << "  sup W " << r.supW << '\n';
        if (!cfg.output.directory.empty()) {
            std::filesystem::create_directories(cfg.output.directory);
            char name[64];
            std::snprintf(name, sizeof name, "compare_delta_%.3e.csv", r.delta);
            write_compare_csv(r, std::filesystem::path(cfg.output.directory) / name);
        }
    }
    if (rep.gamma) std::cout << "holder_fit gamma " << *rep.gamma << '\n';
    if (rep.runs.size() > 1) std::cout << "sup W strictly decreasing: " << (rep.monotone ? "yes" : "no") << '\n';
    return 0;
}

int cmd_convergence(const std::string& path, const std::string& vary, int levels) {
    const Config cfg = load_config(path);
    const ConvergenceReport rep = convergence(cfg, parse_vary(vary), levels);
    std::cout << std::setprecision(6) << vary;
    for (const auto& c : rep.columns) std::cout << "  " << c;
    std::cout << '\n';
    for (std::size_t k = 0; k < rep.values.size(); ++k) {
        std::cout << rep.params[k];
        for (double v : rep.values[k]) std::cout << "  " << v;
        std::cout << '\n';
    }
    for (std::size_t k = 0; k < rep.orders.size(); ++k) {
        std::cout << "order " << k << "->" << k + 1;
        for (double v : rep.orders[k]) std::cout << "  " << v;
        std::cout << '\n';
    }
    if (rep.vary == Vary::Eps) std::cout << "overshoot non-increasing: " << (rep.monotone ? "yes" : "no") << '\n';
    return 0;
}

int cmd_check_energy(const std::string& path, double tol) {
    const Config cfg = load_config(path);
    const EnergyCheck chk = check_energy(cfg, tol);
    std::cout << std::setprecision(6) << "steps " << chk.steps << "  worst relative increase " << chk.worst_increase
              << "  worst relative residual " << chk.worst_residual << "  sum |residual| " << chk.residual_abs_sum
              << '\n';
    if (!chk.pure_dissipation) {
        std::cout << "sources active: energy monotonicity not asserted\n";
        return 0;
    }
    std::cout << (chk.ok() ? "energy non-increasing" : "energy increased") << " (" << chk.violations
              << " violations)\n";
    return chk.ok() ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Cahn-Hilliard / Navier-Stokes / nutrient simulator"};
    app.require_subcommand(1);

    std::string cfg_path, out_dir, vary;
    double delta = 1e-2, tol = 1e-10;
    std::uint64_t seed = 1;
    bool single = false, zero_mean = false;
    int every = 1, levels = 3;
    std::vector<std::string> streams;

    auto* run = app.add_subcommand("run", "advance one trajectory");
    run->add_option("config", cfg_path, "configuration file")->required()->check(CLI::ExistingFile);
    run->add_option("--output", out_dir, "override output.directory");

    auto* cmp = app.add_subcommand("compare", "continuous dependence on the initial phase field");
    cmp->add_option("config", cfg_path, "configuration file")->required()->check(CLI::ExistingFile);
    cmp->add_option("--perturb", delta, "largest perturbation magnitude")->check(CLI::NonNegativeNumber);
    cmp->add_option("--seed", seed, "seed of the bump position");
    cmp->add_flag("--single", single, "only the given magnitude, no ladder");
    cmp->add_flag("--zero-mean", zero_mean, "remove the mean of the bump");
    cmp->add_option("--sample-every", every, "steps between W samples")->check(CLI::PositiveNumber);
    cmp->add_option("--streams", streams, "compare two snapshot directories instead")->expected(2);

    auto* conv = app.add_subcommand("convergence", "halving studies");
    conv->add_option("config", cfg_path, "configuration file")->required()->check(CLI::ExistingFile);
    conv->add_option("--vary", vary, "dt, h or eps")->required()->check(CLI::IsMember({"dt", "h", "eps"}));
    conv->add_option("--levels", levels, "number of refinement levels")->check(CLI::Range(2, 8));

    auto* chk = app.add_subcommand("check-energy", "run with per-step energy assertions");
    chk->add_option("config", cfg_path, "configuration file")->required()->check(CLI::ExistingFile);
    chk->add_option("--tol", tol, "relative tolerance")->check(CLI::PositiveNumber);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(cfg_path, out_dir);
        if (cmp->parsed()) return cmd_compare(cfg_path, delta, seed, single, zero_mean, every, streams);
        if (conv->parsed()) return cmd_convergence(cfg_path, vary, levels);
        if (chk->parsed()) return cmd_check_energy(cfg_path, tol);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
