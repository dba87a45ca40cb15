#pragma once

// Snapshot binary format (little-endian throughout):
//
//   char[4]  "CHNS"
//   u32      format version (1)
//   u32      nx, ny
//   f64      t
//   u32      field count F
//   F times: u32 label length, label bytes, u64 element count
//   payload: the F fields in header order, each count x f64
//
// Fields written: extent (lx, ly), u ((nx+1) ny), v (nx (ny+1)), phi, mu,
// sigma, p (nx ny each), all column-major.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string_view>

#include "chns/diagnostics.hpp"

namespace chns {

inline constexpr std::uint32_t snapshot_version = 1;

void write_snapshot(const State& s, std::ostream& out);
void write_snapshot(const State& s, const std::filesystem::path& path);
State read_snapshot(std::istream& in);
State read_snapshot(const std::filesystem::path& path);

struct SeriesRow {
    double t = 0.0;
    EnergyReport report;
    double mean_phi = 0.0;
    double mean_sigma = 0.0;
    double max_abs_phi = 0.0;
    double div_inf = 0.0;
    double residual = 0.0;
};

std::string_view series_header();
SeriesRow make_series_row(const State& s, const PhysParams& params, double div_inf, double residual);
void write_series_header(std::ostream& out);
void write_series_row(const SeriesRow& row, std::ostream& out);

}  // namespace chns
