#include "chns/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <iomanip>
#include <map>
#include <sstream>

namespace chns {

namespace {

struct Token {
    std::string text;
    int line = 0, column = 0;
    bool identifier = false;
};

[[noreturn]] void fail_at(const Token& t, const std::string& what) {
    throw ConfigError("line " + std::to_string(t.line) + ", column " + std::to_string(t.column) + ": " + what);
}

double as_real(const Token& t) {
    if (t.identifier) fail_at(t, "expected a number, got '" + t.text + "'");
    double v = 0.0;
    const char* end = t.text.data() + t.text.size();
    auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || p != end || !std::isfinite(v)) fail_at(t, "malformed number '" + t.text + "'");
    return v;
}

long long as_integer(const Token& t) {
    if (t.identifier) fail_at(t, "expected an integer, got '" + t.text + "'");
    long long v = 0;
    const char* end = t.text.data() + t.text.size();
    auto [p, ec] = std::from_chars(t.text.data(), end, v);
    if (ec != std::errc() || p != end) fail_at(t, "expected an integer, got '" + t.text + "'");
    return v;
}

int as_int(const Token& t) {
    const long long v = as_integer(t);
    if (v < INT32_MIN || v > INT32_MAX) fail_at(t, "integer out of range");
    return static_cast<int>(v);
}

const std::string& as_ident(const Token& t) {
    if (!t.identifier) fail_at(t, "expected an identifier, got '" + t.text + "'");
    return t.text;
}

bool as_bool(const Token& t) {
    const std::string& s = as_ident(t);
    if (s == "true") return true;
    if (s == "false") return false;
    fail_at(t, "expected true or false");
}

bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

std::string_view trim(std::string_view s, int& offset) {
    std::size_t a = 0;
    while (a < s.size() && (s[a] == ' ' || s[a] == '\t' || s[a] == '\r')) ++a;
    std::size_t b = s.size();
    while (b > a && (s[b - 1] == ' ' || s[b - 1] == '\t' || s[b - 1] == '\r')) --b;
    offset += static_cast<int>(a);
    return s.substr(a, b - a);
}

struct Scratch {
    std::string potential = "quartic";
    double theta = 1.0, theta_c = 2.0, epsilon = 1e-3, epsilon0 = 0.5;
    std::string coupling = "sequential";
};

using Handler = std::function<void(Config&, Scratch&, const Token&)>;

const std::map<std::string, Handler, std::less<>>& handlers() {
    static const std::map<std::string, Handler, std::less<>> table = {
        {"grid.nx", [](Config& c, Scratch&, const Token& t) { c.grid.nx = as_int(t); }},
        {"grid.ny", [](Config& c, Scratch&, const Token& t) { c.grid.ny = as_int(t); }},
        {"grid.lx", [](Config& c, Scratch&, const Token& t) { c.grid.lx = as_real(t); }},
        {"grid.ly", [](Config& c, Scratch&, const Token& t) { c.grid.ly = as_real(t); }},
        {"physics.A", [](Config& c, Scratch&, const Token& t) { c.physics.A = as_real(t); }},
        {"physics.B", [](Config& c, Scratch&, const Token& t) { c.physics.B = as_real(t); }},
        {"physics.chi", [](Config& c, Scratch&, const Token& t) { c.physics.chi = as_real(t); }},
        {"physics.alpha", [](Config& c, Scratch&, const Token& t) { c.physics.alpha = as_real(t); }},
        {"physics.c0", [](Config& c, Scratch&, const Token& t) { c.physics.c0 = as_real(t); }},
        {"physics.consumption", [](Config& c, Scratch&, const Token& t) { c.physics.consumption = as_real(t); }},
        {"physics.eta1", [](Config& c, Scratch&, const Token& t) { c.physics.laws.eta1 = as_real(t); }},
        {"physics.eta2", [](Config& c, Scratch&, const Token& t) { c.physics.laws.eta2 = as_real(t); }},
        {"physics.h_clamp", [](Config& c, Scratch&, const Token& t) { c.physics.laws.h_clamp = as_bool(t); }},
        {"physics.potential",
         [](Config&, Scratch& s, const Token& t) {
             s.potential = as_ident(t);
             if (s.potential != "quartic" && s.potential != "logarithmic" && s.potential != "regularized_log")
                 fail_at(t, "unknown potential '" + s.potential + "'");
         }},
        {"physics.theta", [](Config&, Scratch& s, const Token& t) { s.theta = as_real(t); }},
        {"physics.theta_c", [](Config&, Scratch& s, const Token& t) { s.theta_c = as_real(t); }},
        {"physics.epsilon", [](Config&, Scratch& s, const Token& t) { s.epsilon = as_real(t); }},
        {"physics.epsilon0", [](Config&, Scratch& s, const Token& t) { s.epsilon0 = as_real(t); }},
        {"physics.source", [](Config& c, Scratch&, const Token& t) { c.source.s0 = as_real(t); }},
        {"physics.source_amp", [](Config& c, Scratch&, const Token& t) { c.source.s1 = as_real(t); }},
        {"physics.source_freq", [](Config& c, Scratch&, const Token& t) { c.source.omega = as_real(t); }},
        {"time.dt", [](Config& c, Scratch&, const Token& t) { c.time.dt = as_real(t); }},
        {"time.T", [](Config& c, Scratch&, const Token& t) { c.time.T = as_real(t); }},
        {"time.coupling",
         [](Config&, Scratch& s, const Token& t) {
             s.coupling = as_ident(t);
             if (s.coupling != "sequential" && s.coupling != "picard") fail_at(t, "unknown coupling '" + s.coupling + "'");
         }},
        {"time.picard_tol", [](Config& c, Scratch&, const Token& t) { c.time.coupling.tol = as_real(t); }},
        {"time.picard_max_iters", [](Config& c, Scratch&, const Token& t) { c.time.coupling.max_iters = as_int(t); }},
        {"time.newton_tol", [](Config& c, Scratch&, const Token& t) { c.time.stepper.newton_tol = as_real(t); }},
        {"time.newton_max_iters",
         [](Config& c, Scratch&, const Token& t) { c.time.stepper.newton_max_iters = as_int(t); }},
        {"time.solver_rel_tol", [](Config& c, Scratch&, const Token& t) { c.time.stepper.solver.rel_tol = as_real(t); }},
        {"time.cfl_limit", [](Config& c, Scratch&, const Token& t) { c.time.stepper.cfl_limit = as_real(t); }},
        {"ic.preset",
         [](Config& c, Scratch&, const Token& t) {
             const std::string& p = as_ident(t);
             if (p == "spinodal") c.ic.preset = Preset::Spinodal;
             else if (p == "stratified") c.ic.preset = Preset::Stratified;
             else if (p == "uniform") c.ic.preset = Preset::Uniform;
             else fail_at(t, "unknown preset '" + p + "'");
         }},
        {"ic.seed",
         [](Config& c, Scratch&, const Token& t) {
             const long long v = as_integer(t);
             if (v < 0) fail_at(t, "seed must be non-negative");
             c.ic.seed = static_cast<std::uint64_t>(v);
         }},
        {"ic.amplitude", [](Config& c, Scratch&, const Token& t) { c.ic.amplitude = as_real(t); }},
        {"ic.mean", [](Config& c, Scratch&, const Token& t) { c.ic.mean = as_real(t); }},
        {"ic.width", [](Config& c, Scratch&, const Token& t) { c.ic.width = as_real(t); }},
        {"ic.phi", [](Config& c, Scratch&, const Token& t) { c.ic.phi = as_real(t); }},
        {"ic.sigma", [](Config& c, Scratch&, const Token& t) { c.ic.sigma = as_real(t); }},
        {"ic.vortex", [](Config& c, Scratch&, const Token& t) { c.ic.vortex = as_real(t); }},
        {"output.directory",
         [](Config& c, Scratch&, const Token& t) { c.output.directory = t.text; }},
        {"output.snapshot_every", [](Config& c, Scratch&, const Token& t) { c.output.snapshot_every = as_int(t); }},
        {"output.series_every", [](Config& c, Scratch&, const Token& t) { c.output.series_every = as_int(t); }},
    };
    return table;
}

[[noreturn]] void reject(const std::string& what) { throw ConfigError(what); }

}  // namespace

long TimeConfig::steps() const {
    if (!(dt > 0.0)) return 0;
    return std::lround(T / dt);
}

void Config::bind_source() {
    physics.source = source.active() ? cosine_source(source.s0, source.s1, source.omega, grid.lx, grid.ly)
                                     : SourceFunction{};
}

void Config::validate() const {
    if (grid.nx < 4 || grid.ny < 4) reject("grid: nx and ny must be at least 4");
    if (!(grid.lx > 0.0) || !(grid.ly > 0.0)) reject("grid: lx and ly must be positive");
    try {
        physics.validate();
    } catch (const InvalidArgument& e) {
        reject(e.what());
    }
    if (!std::isfinite(source.s0) || !std::isfinite(source.s1) || !std::isfinite(source.omega))
        reject("(H3): S ∈ L²(0,T; L²(Ω)) requires finite source parameters");
    if (!(time.dt > 0.0)) reject("time: dt > 0");
    if (!(time.T >= 0.0)) reject("time: T ≥ 0");
    const double n = time.T / time.dt;
    if (std::abs(n - std::round(n)) > 1e-9 * std::max(1.0, n)) reject("time: T must be a whole number of steps");
    try {
        time.coupling.validate();
    } catch (const InvalidArgument& e) {
        reject(std::string("time: ") + e.what());
    }
    if (!(time.stepper.newton_tol > 0.0) || time.stepper.newton_max_iters < 1)
        reject("time: Newton tolerance and iteration cap must be positive");
    if (!(time.stepper.cfl_limit > 0.0)) reject("time: cfl_limit must be positive");
    try {
        time.stepper.solver.validate();
    } catch (const InvalidArgument& e) {
        reject(std::string("time: ") + e.what());
    }

    switch (ic.preset) {
        case Preset::Spinodal:
            if (!(ic.amplitude >= 0.0)) reject("ic: amplitude must be non-negative");
            if (!(std::abs(ic.mean) < 1.0)) reject("initial data: |mean(φ₀)| < 1");
            if (!(std::abs(ic.mean) + ic.amplitude <= 1.0)) reject("initial data: ‖φ₀‖∞ ≤ 1");
            break;
        case Preset::Stratified:
            if (!(ic.width > 0.0)) reject("ic: width must be positive");
            break;
        case Preset::Uniform:
            if (!(std::abs(ic.phi) < 1.0)) reject("initial data: |mean(φ₀)| < 1");
            break;
    }
    if (!std::isfinite(ic.sigma) || !std::isfinite(ic.vortex)) reject("ic: sigma and vortex must be finite");
    if (output.snapshot_every < 0) reject("output: snapshot_every must be non-negative");
    if (output.series_every < 1) reject("output: series_every must be at least 1");
}

Config parse_config(std::string_view text) {
    Config c;
    Scratch s;
    std::map<std::string, int, std::less<>> seen;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t nl = text.find('\n', pos);
        std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        if (const std::size_t hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        int col = 1;
        std::string_view body = trim(line, col);
        if (body.empty()) continue;

        const std::size_t eq = body.find('=');
        Token where{std::string(body), line_no, col, false};
        if (eq == std::string_view::npos) fail_at(where, "expected 'section.key = value'");
        int key_col = col;
        const std::string_view key = trim(body.substr(0, eq), key_col);
        int val_col = col + static_cast<int>(eq) + 1;
        const std::string_view val = trim(body.substr(eq + 1), val_col);

        Token kt{std::string(key), line_no, key_col, false};
        const std::size_t dot = key.find('.');
        if (key.empty() || dot == std::string_view::npos || dot == 0 || dot + 1 == key.size())
            fail_at(kt, "key must have the form section.key");
        for (char ch : key)
            if (!is_ident_char(ch) && ch != '.') fail_at(kt, "invalid character in key");

        Token vt{std::string(val), line_no, val_col, false};
        if (val.empty()) fail_at(vt, "missing value");
        if (key == "output.directory") {
            // a path: any run of non-blank characters
            if (val.find_first_of(" \t") != std::string_view::npos) fail_at(vt, "unexpected whitespace in path");
        } else if (is_ident_start(val[0])) {
            for (char ch : val)
                if (!is_ident_char(ch)) fail_at(vt, "invalid identifier '" + std::string(val) + "'");
            vt.identifier = true;
        } else if (val.find_first_of(" \t") != std::string_view::npos) {
            fail_at(vt, "unexpected whitespace in value");
        }

        const auto h = handlers().find(key);
        if (h == handlers().end()) fail_at(kt, "unknown key '" + std::string(key) + "'");
        if (auto [it, fresh] = seen.emplace(std::string(key), line_no); !fresh)
            fail_at(kt, "key '" + std::string(key) + "' already set on line " + std::to_string(it->second));
        h->second(c, s, vt);
    }

    if (s.potential == "quartic") {
        c.physics.potential = PotentialSpec::quartic();
    } else {
        c.physics.potential.kind =
            s.potential == "logarithmic" ? PotentialKind::Logarithmic : PotentialKind::RegularizedLog;
        c.physics.potential.theta = s.theta;
        c.physics.potential.theta_c = s.theta_c;
        c.physics.potential.eps0 = s.epsilon0;
        c.physics.potential.eps = s.potential == "logarithmic" ? 0.0 : s.epsilon;
        c.physics.step_eps = s.epsilon;
    }
    if (s.coupling == "picard") c.time.coupling.kind = CouplingMode::Kind::Picard;
    c.bind_source();
    c.validate();
    return c;
}

Config load_config(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

std::string_view preset_name(Preset p) {
    switch (p) {
        case Preset::Spinodal: return "spinodal";
        case Preset::Stratified: return "stratified";
        case Preset::Uniform: return "uniform";
    }
    return "spinodal";
}

std::string_view potential_name(PotentialKind k) {
    switch (k) {
        case PotentialKind::Quartic: return "quartic";
        case PotentialKind::Logarithmic: return "logarithmic";
        case PotentialKind::RegularizedLog: return "regularized_log";
    }
    return "quartic";
}

std::string format_config(const Config& c) {
    std::ostringstream o;
    o << std::setprecision(17);
    const PotentialSpec& p = c.physics.potential;
    o << "grid.nx = " << c.grid.nx << "\ngrid.ny = " << c.grid.ny << "\ngrid.lx = " << c.grid.lx
      << "\ngrid.ly = " << c.grid.ly << "\n";
    o << "physics.A = " << c.physics.A << "\nphysics.B = " << c.physics.B << "\nphysics.chi = " << c.physics.chi
      << "\nphysics.alpha = " << c.physics.alpha << "\nphysics.c0 = " << c.physics.c0
      << "\nphysics.consumption = " << c.physics.consumption << "\nphysics.eta1 = " << c.physics.laws.eta1
      << "\nphysics.eta2 = " << c.physics.laws.eta2
      << "\nphysics.h_clamp = " << (c.physics.laws.h_clamp ? "true" : "false")
      << "\nphysics.potential = " << potential_name(p.kind) << "\n";
    if (p.kind != PotentialKind::Quartic) {
        o << "physics.theta = " << p.theta << "\nphysics.theta_c = " << p.theta_c
          << "\nphysics.epsilon = " << (p.kind == PotentialKind::RegularizedLog ? p.eps : c.physics.step_eps)
          << "\nphysics.epsilon0 = " << p.eps0 << "\n";
    }
    o << "physics.source = " << c.source.s0 << "\nphysics.source_amp = " << c.source.s1
      << "\nphysics.source_freq = " << c.source.omega << "\n";
    o << "time.dt = " << c.time.dt << "\ntime.T = " << c.time.T
      << "\ntime.coupling = " << (c.time.coupling.is_picard() ? "picard" : "sequential")
      << "\ntime.picard_tol = " << c.time.coupling.tol << "\ntime.picard_max_iters = " << c.time.coupling.max_iters
      << "\ntime.newton_tol = " << c.time.stepper.newton_tol
      << "\ntime.newton_max_iters = " << c.time.stepper.newton_max_iters
      << "\ntime.solver_rel_tol = " << c.time.stepper.solver.rel_tol
      << "\ntime.cfl_limit = " << c.time.stepper.cfl_limit << "\n";
    o << "ic.preset = " << preset_name(c.ic.preset) << "\nic.seed = " << c.ic.seed << "\nic.amplitude = " << c.ic.amplitude
      << "\nic.mean = " << c.ic.mean << "\nic.width = " << c.ic.width << "\nic.phi = " << c.ic.phi
      << "\nic.sigma = " << c.ic.sigma << "\nic.vortex = " << c.ic.vortex << "\n";
    if (!c.output.directory.empty()) o << "output.directory = " << c.output.directory << "\n";
    o << "output.snapshot_every = " << c.output.snapshot_every << "\noutput.series_every = " << c.output.series_every
      << "\n";
    return o.str();
}

}  // namespace chns
