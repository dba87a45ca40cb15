#include "chns/io.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <string>
#include <vector>

namespace chns {

namespace {

void put_u32(std::ostream& o, std::uint32_t x) {
    const std::array<char, 4> b{char(x & 0xff), char((x >> 8) & 0xff), char((x >> 16) & 0xff), char((x >> 24) & 0xff)};
    o.write(b.data(), 4);
}

void put_u64(std::ostream& o, std::uint64_t x) {
    std::array<char, 8> b;
    for (int k = 0; k < 8; ++k) b[k] = char((x >> (8 * k)) & 0xff);
    o.write(b.data(), 8);
}

void put_f64(std::ostream& o, double x) { put_u64(o, std::bit_cast<std::uint64_t>(x)); }

void put_array(std::ostream& o, const double* p, Index n) {
    for (Index k = 0; k < n; ++k) put_f64(o, p[k]);
}

void need(std::istream& in, char* dst, std::size_t n, const char* what) {
    in.read(dst, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(in.gcount()) != n) throw FormatError(std::string("snapshot truncated in ") + what);
}

std::uint32_t get_u32(std::istream& in, const char* what) {
    unsigned char b[4];
    need(in, reinterpret_cast<char*>(b), 4, what);
    return std::uint32_t(b[0]) | std::uint32_t(b[1]) << 8 | std::uint32_t(b[2]) << 16 | std::uint32_t(b[3]) << 24;
}

std::uint64_t get_u64(std::istream& in, const char* what) {
    unsigned char b[8];
    need(in, reinterpret_cast<char*>(b), 8, what);
    std::uint64_t x = 0;
    for (int k = 7; k >= 0; --k) x = (x << 8) | b[k];
    return x;
}

double get_f64(std::istream& in, const char* what) { return std::bit_cast<double>(get_u64(in, what)); }

struct FieldSpec {
    const char* label;
    Index count;
};

std::vector<FieldSpec> field_specs(Index nx, Index ny) {
    return {{"extent", 2},       {"u", (nx + 1) * ny}, {"v", nx * (ny + 1)}, {"phi", nx * ny},
            {"mu", nx * ny},     {"sigma", nx * ny},   {"p", nx * ny}};
}

void write_double(std::ostream& o, double x) {
    o << std::setprecision(17) << x;
}

}  // namespace

void write_snapshot(const State& s, std::ostream& out) {
    const Grid& g = s.grid();
    out.write("CHNS", 4);
    put_u32(out, snapshot_version);
    put_u32(out, static_cast<std::uint32_t>(g.nx));
    put_u32(out, static_cast<std::uint32_t>(g.ny));
    put_f64(out, s.t);
    const auto specs = field_specs(g.nx, g.ny);
    put_u32(out, static_cast<std::uint32_t>(specs.size()));
    for (const auto& f : specs) {
        const std::uint32_t len = static_cast<std::uint32_t>(std::strlen(f.label));
        put_u32(out, len);
        out.write(f.label, len);
        put_u64(out, static_cast<std::uint64_t>(f.count));
    }
    put_f64(out, g.lx);
    put_f64(out, g.ly);
    put_array(out, s.v.u.data(), s.v.u.size());
    put_array(out, s.v.v.data(), s.v.v.size());
    for (const ScalarField* f : {&s.phi, &s.mu, &s.sigma, &s.p}) put_array(out, f->values.data(), f->values.size());
    if (!out) throw Error("snapshot write failed");
}

void write_snapshot(const State& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    write_snapshot(s, out);
    out.flush();
    if (!out) throw Error("snapshot write failed: " + path.string());
}

State read_snapshot(std::istream& in) {
    char magic[4];
    need(in, magic, 4, "magic");
    if (std::memcmp(magic, "CHNS", 4) != 0) throw FormatError("not a snapshot: magic/version mismatch (bad magic)");
    const std::uint32_t version = get_u32(in, "version");
    if (version != snapshot_version)
        throw FormatError("magic/version mismatch: unsupported snapshot version " + std::to_string(version));
    const std::uint32_t nx = get_u32(in, "header"), ny = get_u32(in, "header");
    if (nx < 4 || ny < 4 || nx > (1u << 16) || ny > (1u << 16)) throw FormatError("snapshot grid size out of range");
    const double t = get_f64(in, "header");
    const std::uint32_t nfields = get_u32(in, "header");
    const auto specs = field_specs(nx, ny);
    if (nfields != specs.size()) throw FormatError("snapshot field count mismatch");
    for (const auto& f : specs) {
        const std::uint32_t len = get_u32(in, "labels");
        if (len > 64) throw FormatError("snapshot label too long");
        std::string label(len, '\0');
        need(in, label.data(), len, "labels");
        if (label != f.label) throw FormatError("unexpected snapshot field '" + label + "'");
        if (get_u64(in, "labels") != static_cast<std::uint64_t>(f.count))
            throw FormatError("snapshot field '" + label + "' has the wrong length");
    }
    const double lx = get_f64(in, "payload"), ly = get_f64(in, "payload");
    if (!(lx > 0.0) || !(ly > 0.0)) throw FormatError("snapshot extent must be positive");
    State s(make_grid(int(nx), int(ny), lx, ly));
    s.t = t;
    auto fill = [&](double* p, Index n) {
        for (Index k = 0; k < n; ++k) p[k] = get_f64(in, "payload");
    };
    fill(s.v.u.data(), s.v.u.size());
    fill(s.v.v.data(), s.v.v.size());
    for (ScalarField* f : {&s.phi, &s.mu, &s.sigma, &s.p}) fill(f->values.data(), f->values.size());
    if (in.peek() != std::char_traits<char>::eof()) throw FormatError("trailing bytes after snapshot payload");
    return s;
}

State read_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open snapshot " + path.string());
    return read_snapshot(in);
}

std::string_view series_header() {
    return "t,E,E_kin,E_pot,E_grad,E_nut,E_cross,D_visc,D_chem,D_nut,R_oono,R_react,mean_phi,mean_sigma,max_abs_phi,"
           "div_inf,residual";
}

SeriesRow make_series_row(const State& s, const PhysParams& params, double div_inf, double residual) {
    SeriesRow r;
    r.t = s.t;
    r.report = full_report(s, params);
    r.mean_phi = mean(s.phi);
    r.mean_sigma = mean(s.sigma);
    r.max_abs_phi = max_abs_phi(s);
    r.div_inf = div_inf;
    r.residual = residual;
    return r;
}

void write_series_header(std::ostream& out) { out << series_header() << '\n'; }

void write_series_row(const SeriesRow& row, std::ostream& out) {
    const EnergyReport& e = row.report;
    const double cols[] = {row.t,        e.total,     e.kinetic,     e.potential_bulk, e.gradient,    e.nutrient,
                           e.cross,      e.viscous,   e.chem,        e.nutrient_flux,  e.oono,        e.reaction,
                           row.mean_phi, row.mean_sigma, row.max_abs_phi, row.div_inf, row.residual};
    bool first = true;
    for (double c : cols) {
        if (!first) out << ',';
        write_double(out, c);
        first = false;
    }
    out << '\n';
    if (!out) throw Error("series write failed");
}

}  // namespace chns
