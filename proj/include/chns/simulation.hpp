#pragma once

// Trajectory driver and the verification studies built on it.

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "chns/config.hpp"
#include "chns/diagnostics.hpp"
#include "chns/io.hpp"

namespace chns {

struct RunOptions {
    bool write_files = true;  // honour cfg.output
    int keep_every = 0;       // keep every k-th state in memory, 0 = none
    std::function<void(const State&, const StepInfo&, const SeriesRow&)> on_step;
    std::function<void(const std::string&)> on_warning;
};

struct RunSummary {
    State initial;
    State final;
    long steps = 0;
    double phi0_mean = 0.0;
    double sigma0_mean = 0.0;
    std::vector<SeriesRow> rows;  // one per step, rows[0] at t = 0
    std::vector<State> kept;
    double max_div_inf = 0.0;
    double max_abs_phi = 0.0;           // over all time levels
    double max_energy_increase = 0.0;   // max (E_{n+1} - E_n) / |E_n|, may be negative
    double max_residual = 0.0;          // max residual / |E_n|, signed
    double residual_abs_sum = 0.0;
    double max_mean_phi_drift = 0.0;    // max |mean phi_n - mean phi_0| / |mean phi_0|
    int max_picard_iterations = 0;
    long newton_iterations = 0;
    std::vector<std::string> warnings;
};

/// Advances the configured initial state to T.  On a step failure the last
/// valid state is written to <output.directory>/last_valid.chns (when an
/// output directory is set) and the error is rethrown.
RunSummary run(const Config& cfg, const RunOptions& opts = {});
RunSummary run(const Config& cfg, const State& initial, const RunOptions& opts = {});

/// Snapshot file name for a step index.
std::string snapshot_name(long step);

// ---------------------------------------------------------------------------

struct CompareRun {
    double delta = 0.0;
    double W0 = 0.0;
    double supW = 0.0;
    std::vector<double> t, W, Z1, Z2, Z_pair;
};

struct CompareOptions {
    std::vector<double> deltas{1e-2, 1e-3, 1e-4};
    std::uint64_t seed = 1;
    bool zero_mean = false;
    int sample_every = 1;
};

struct CompareReport {
    std::vector<CompareRun> runs;
    std::optional<double> gamma;  // holder_fit over the nonzero deltas, when admissible
    bool monotone = false;        // sup W strictly decreasing as delta decreases
};

CompareReport compare(const Config& cfg, const CompareOptions& opts);

/// W and Z series between two snapshot directories holding the same step indices.
CompareRun compare_streams(const std::filesystem::path& a, const std::filesystem::path& b, const PhysParams& params);

enum class Vary { Dt, H, Eps };
Vary parse_vary(std::string_view s);

struct ConvergenceReport {
    Vary vary = Vary::Dt;
    std::vector<double> params;                   // dt, h or eps per level
    std::vector<std::string> columns;             // quantity names
    std::vector<std::vector<double>> values;      // values[level][column]
    std::vector<std::vector<double>> orders;      // orders[level-1][column], log2 of successive ratios
    bool monotone = true;                         // eps: overshoot non-increasing
};

ConvergenceReport convergence(const Config& cfg, Vary vary, int levels = 3);

struct EnergyCheck {
    bool pure_dissipation = false;
    long steps = 0;
    long violations = 0;
    double tolerance = 1e-10;
    double worst_increase = 0.0;  // relative
    double worst_residual = 0.0;  // relative, signed
    double residual_abs_sum = 0.0;
    bool ok() const { return violations == 0; }
};

/// Runs cfg and checks every step: with alpha = C = S = 0 the energy may not
/// grow by more than tolerance * |E|.
EnergyCheck check_energy(const Config& cfg, double tolerance = 1e-10);

}  // namespace chns
