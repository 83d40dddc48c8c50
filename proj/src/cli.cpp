#include "lattice/cli.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "lattice/analysis.hpp"
#include "lattice/dispersion.hpp"
#include "lattice/lpw.hpp"
#include "lattice/oracle.hpp"
#include "lattice/transient.hpp"

namespace fs = std::filesystem;

namespace lattice::cli {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

// ---------------------------------------------------------------- formatting

std::string fmt17(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Short form used inside file names (snapshot times).
std::string fmt_short(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return buf;
}

// ------------------------------------------------------------------- parsing

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const auto p = s.find(sep, start);
        if (p == std::string::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, p - start));
        start = p + 1;
    }
}

double to_double(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (!t.empty()) {
        char* end = nullptr;
        const double x = std::strtod(t.c_str(), &end);
        if (end == t.c_str() + t.size() && std::isfinite(x)) return x;
    }
    throw usage_error("key '" + key + "' needs a finite number, got '" + v + "'");
}

int to_int(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (!t.empty()) {
        char* end = nullptr;
        const long x = std::strtol(t.c_str(), &end, 10);
        if (end == t.c_str() + t.size() && x >= INT_MIN && x <= INT_MAX)
            return static_cast<int>(x);
    }
    throw usage_error("key '" + key + "' needs an integer, got '" + v + "'");
}

bool to_bool(const std::string& key, const std::string& v) {
    const std::string t = trim(v);
    if (t == "true" || t == "1") return true;
    if (t == "false" || t == "0") return false;
    throw usage_error("key '" + key + "' needs true or false, got '" + v + "'");
}

ProbeKey parse_probe(const std::string& v) {
    const auto parts = split(trim(v), ',');
    if (parts.size() < 2 || parts.size() > 3)
        throw usage_error("key 'probe' needs 'm,n' or 'm,n,u|v', got '" + v + "'");
    ProbeKey p;
    p.m = to_int("probe", parts[0]);
    p.n = to_int("probe", parts[1]);
    if (parts.size() == 3) {
        const std::string s = trim(parts[2]);
        if (s != "u" && s != "v")
            throw usage_error("key 'probe' sublattice must be u or v, got '" + s + "'");
        p.sub = s[0];
    }
    return p;
}

}  // namespace

void apply_key(RunConfig& c, const std::string& key, const std::string& value) {
    const std::string v = trim(value);
    if (key == "family") {
        c.family = v;
    } else if (key == "l") {
        c.l = to_double(key, v);
    } else if (key == "gx") {
        c.gx = to_double(key, v);
    } else if (key == "gy") {
        if (v == "auto") {
            c.gy_auto = true;
            c.gy = 1.0;
        } else {
            c.gy_auto = false;
            c.gy = to_double(key, v);
        }
    } else if (key == "gamma") {
        c.gamma = to_double(key, v);
    } else if (key == "mass") {
        c.mass = to_double(key, v);
    } else if (key == "source-kind") {
        if (v != "kinematic" && v != "force")
            throw usage_error("key 'source-kind' must be kinematic or force, got '" + v + "'");
        c.source_kind = v;
    } else if (key == "omega0") {
        c.omega0 = to_double(key, v);
    } else if (key == "amplitude") {
        c.amplitude = to_double(key, v);
    } else if (key == "source-m") {
        c.source_m = to_int(key, v);
    } else if (key == "source-n") {
        c.source_n = to_int(key, v);
    } else if (key == "source-sub") {
        if (v != "u" && v != "v")
            throw usage_error("key 'source-sub' must be u or v, got '" + v + "'");
        c.source_sub = v;
    } else if (key == "dt") {
        c.dt = to_double(key, v);
    } else if (key == "t-end") {
        c.t_end = to_double(key, v);
    } else if (key == "threads") {
        c.threads = to_int(key, v);
    } else if (key == "energy-stride") {
        c.energy_stride = to_int(key, v);
    } else if (key == "window") {
        if (v == "auto") {
            c.window_auto = true;
            c.window_m_lo = c.window_m_hi = c.window_n_lo = c.window_n_hi = 0;
        } else {
            const auto parts = split(v, ',');
            if (parts.size() != 4)
                throw usage_error(
                    "key 'window' needs auto or 'm_lo,m_hi,n_lo,n_hi', got '" + v + "'");
            c.window_auto = false;
            c.window_m_lo = to_int(key, parts[0]);
            c.window_m_hi = to_int(key, parts[1]);
            c.window_n_lo = to_int(key, parts[2]);
            c.window_n_hi = to_int(key, parts[3]);
        }
    } else if (key == "allow-small-window") {
        c.allow_small_window = to_bool(key, v);
    } else if (key == "probe") {
        if (v == "none") {
            c.probes.clear();
        } else {
            c.probes.push_back(parse_probe(v));
        }
    } else if (key == "snapshot") {
        if (v == "none") {
            c.snapshots.clear();
        } else {
            for (const std::string& part : split(v, ','))
                c.snapshots.push_back(to_double(key, part));
            std::sort(c.snapshots.begin(), c.snapshots.end());
            c.snapshots.erase(std::unique(c.snapshots.begin(), c.snapshots.end()),
                              c.snapshots.end());
        }
    } else if (key == "res") {
        c.res = to_int(key, v);
    } else if (key == "branch") {
        if (v != "auto" && v != "i" && v != "ii")
            throw usage_error("key 'branch' must be auto, i or ii, got '" + v + "'");
        c.branch = v;
    } else if (key == "target-omega") {
        c.target_omega = to_double(key, v);
    } else if (key == "orientation") {
        c.orientation = to_int(key, v);
    } else if (key == "mode") {
        if (v != "line" && v != "line-acoustic" && v != "line-optical" && v != "conical" &&
            v != "band-edge")
            throw usage_error(
                "key 'mode' must be line, line-acoustic, line-optical, conical or band-edge, "
                "got '" + v + "'");
        c.mode = v;
    } else if (key == "threshold") {
        c.threshold = to_double(key, v);
    } else if (key == "fit-begin") {
        c.fit_begin = to_double(key, v);
    } else if (key == "fit-end") {
        if (v == "auto") {
            c.fit_end_auto = true;
            c.fit_end = 0.0;
        } else {
            c.fit_end_auto = false;
            c.fit_end = to_double(key, v);
        }
    } else if (key == "verify") {
        c.verify = to_bool(key, v);
    } else {
        throw usage_error("unknown key '" + key + "'");
    }
}

KeyValues parse_config_text(const std::string& text, const std::string& origin) {
    KeyValues out;
    std::istringstream in(text);
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw usage_error(origin + " line " + std::to_string(lineno) +
                              ": expected 'key = value', got '" + line + "'");
        out.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    }
    return out;
}

RunConfig config_from_pairs(const KeyValues& kvs, RunConfig base) {
    for (const auto& [k, v] : kvs) apply_key(base, k, v);
    return base;
}

namespace {

void reject_key(bool bad, const std::string& key, const std::string& family,
                const std::string& hint = "") {
    if (bad)
        throw usage_error("key '" + key + "' does not apply to family '" + family + "'" +
                          (hint.empty() ? "" : "; " + hint));
}

}  // namespace

LatticeSpec build_spec(const RunConfig& c) {
    if (c.family.empty()) throw usage_error("missing required key 'family'");
    const bool l_set = c.l != 1.0;
    const bool gamma_set = c.gamma != 1.0;
    if (c.family == "msl1d") {
        reject_key(l_set, "l", c.family);
        reject_key(!c.gy_auto, "gy", c.family);
        reject_key(gamma_set, "gamma", c.family);
        return make_msl1d(c.gx, c.mass);
    }
    if (c.family == "scl") {
        if (l_set)
            throw usage_error("family 'scl' fixes l = 1; use family 'srcl' or 'rcl'");
        if (!c.gy_auto && c.gy != c.gx)
            throw usage_error("family 'scl' has gy = gx; use family 'rcl' for gy != gx");
        reject_key(gamma_set, "gamma", c.family);
        return make_scl(c.gx, c.mass);
    }
    if (c.family == "srcl") {
        if (!c.gy_auto && c.gy != c.gx)
            throw usage_error("family 'srcl' has gy = gx; use family 'rcl' for gy != gx");
        reject_key(gamma_set, "gamma", c.family);
        return make_srcl(c.l, c.gx, c.mass);
    }
    if (c.family == "rcl") {
        reject_key(gamma_set, "gamma", c.family);
        return make_rcl(c.l, c.gx, c.gy_auto ? -1.0 : c.gy, c.mass);
    }
    if (c.family == "hcl" || c.family == "etl") {
        reject_key(l_set, "l", c.family);
        reject_key(!c.gy_auto, "gy", c.family);
        reject_key(gamma_set, "gamma", c.family);
        return c.family == "hcl" ? make_hcl(c.gx, c.mass) : make_etl(c.gx, c.mass);
    }
    if (c.family == "rtl") {
        reject_key(l_set, "l", c.family);
        reject_key(!c.gy_auto, "gy", c.family);
        return make_rtl(c.gamma, c.gx, c.mass);
    }
    throw usage_error("unknown family '" + c.family +
                      "'; expected msl1d, scl, srcl, rcl, hcl, etl or rtl");
}

std::string manifest_text(const RunConfig& c, const std::string& subcommand) {
    std::string s;
    s += std::string("# ") + kToolName + " " + kToolVersion + " manifest\n";
    s += "# subcommand = " + subcommand + "\n";
    s += "# config-format = 1\n";
    const auto kv = [&s](const std::string& k, const std::string& v) {
        s += k + " = " + v + "\n";
    };
    kv("family", c.family);
    kv("l", fmt17(c.l));
    kv("gx", fmt17(c.gx));
    kv("gy", c.gy_auto ? "auto" : fmt17(c.gy));
    kv("gamma", fmt17(c.gamma));
    kv("mass", fmt17(c.mass));
    kv("source-kind", c.source_kind);
    kv("omega0", fmt17(c.omega0));
    kv("amplitude", fmt17(c.amplitude));
    kv("source-m", std::to_string(c.source_m));
    kv("source-n", std::to_string(c.source_n));
    kv("source-sub", c.source_sub);
    kv("dt", fmt17(c.dt));
    kv("t-end", fmt17(c.t_end));
    kv("threads", std::to_string(c.threads));
    kv("energy-stride", std::to_string(c.energy_stride));
    if (c.window_auto) {
        kv("window", "auto");
    } else {
        kv("window", std::to_string(c.window_m_lo) + "," + std::to_string(c.window_m_hi) + "," +
                         std::to_string(c.window_n_lo) + "," + std::to_string(c.window_n_hi));
    }
    kv("allow-small-window", c.allow_small_window ? "true" : "false");
    for (const ProbeKey& p : c.probes)
        kv("probe", std::to_string(p.m) + "," + std::to_string(p.n) + "," + p.sub);
    if (!c.snapshots.empty()) {
        std::string list;
        for (std::size_t i = 0; i < c.snapshots.size(); ++i) {
            if (i) list += ",";
            list += fmt17(c.snapshots[i]);
        }
        kv("snapshot", list);
    }
    kv("res", std::to_string(c.res));
    kv("branch", c.branch);
    kv("target-omega", fmt17(c.target_omega));
    kv("orientation", std::to_string(c.orientation));
    kv("mode", c.mode);
    kv("threshold", fmt17(c.threshold));
    kv("fit-begin", fmt17(c.fit_begin));
    kv("fit-end", c.fit_end_auto ? "auto" : fmt17(c.fit_end));
    kv("verify", c.verify ? "true" : "false");
    return s;
}

namespace {

// ---------------------------------------------------------------- file I/O

void write_file(const fs::path& p, const std::string& content) {
    std::ofstream f(p, std::ios::binary);
    if (!f) throw domain_error("cannot write file '" + p.string() + "'");
    f << content;
    f.flush();
    if (!f) throw domain_error("write to file '" + p.string() + "' failed");
}

std::string read_file(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    if (!f) throw domain_error("cannot read file '" + p.string() + "'");
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

struct Csv {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

Csv read_csv(const fs::path& p) {
    const std::string text = read_file(p);
    Csv csv;
    std::istringstream in(text);
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        auto cells = split(line, ',');
        if (first) {
            csv.header = std::move(cells);
            first = false;
        } else {
            csv.rows.push_back(std::move(cells));
        }
    }
    if (first) throw domain_error("file '" + p.string() + "' is empty");
    return csv;
}

double cell_double(const Csv& csv, const fs::path& p, std::size_t row, std::size_t col) {
    const auto& cells = csv.rows[row];
    if (col >= cells.size())
        throw domain_error("file '" + p.string() + "' row " + std::to_string(row + 2) +
                           " is missing column " + std::to_string(col + 1));
    const std::string& t = cells[col];
    char* end = nullptr;
    const double x = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size())
        throw domain_error("file '" + p.string() + "' row " + std::to_string(row + 2) +
                           ": '" + t + "' is not a number");
    return x;
}

int cell_int(const Csv& csv, const fs::path& p, std::size_t row, std::size_t col) {
    const double x = cell_double(csv, p, row, col);
    return static_cast<int>(std::llround(x));
}

// ------------------------------------------------------------ shared pieces

Branch resolve_branch(const LatticeSpec& spec, const RunConfig& c) {
    if (spec.family == Family::HCL) {
        if (c.branch == "i") return Branch::AcousticI;
        if (c.branch == "ii") return Branch::OpticalII;
        throw usage_error("family 'hcl' needs key 'branch' set to i or ii");
    }
    if (c.branch != "auto")
        throw usage_error("key 'branch' applies to family 'hcl' only");
    return Branch::Single;
}

Sub parse_sub(const std::string& s) { return s == "v" ? Sub::V : Sub::U; }

const char* kind_slug(ResonanceKind k) {
    switch (k) {
    case ResonanceKind::BandEdge: return "band-edge";
    case ResonanceKind::InteriorLPW: return "interior-lpw";
    case ResonanceKind::ConicalPoint: return "conical-point";
    }
    return "unknown";
}

std::string snapshot_name(double t) { return "snapshot-" + fmt_short(t) + ".csv"; }
std::string envelope_name(double t) { return "envelope-" + fmt_short(t) + ".csv"; }

// --------------------------------------------------------------- dispersion

void run_dispersion(const RunConfig& cfg, const fs::path& dir) {
    if (cfg.res < 2) throw usage_error("key 'res' needs at least 2 samples per axis");
    const LatticeSpec spec = build_spec(cfg);
    const Vec2 zone = zone_half_widths(spec);
    const bool hcl = spec.family == Family::HCL;
    const bool chain = spec.family == Family::MSL1D;

    std::string out = hcl ? "kx,ky,omega-i,omega-ii\n" : "kx,ky,omega\n";
    const int nky = chain ? 1 : cfg.res;
    for (int i = 0; i < cfg.res; ++i) {
        const double kx = -zone.x + 2.0 * zone.x * i / (cfg.res - 1);
        for (int j = 0; j < nky; ++j) {
            const double ky = chain ? 0.0 : -zone.y + 2.0 * zone.y * j / (cfg.res - 1);
            const WaveVector k{kx, ky};
            if (hcl) {
                const double w1 = omega(spec, k, Branch::AcousticI);
                const double w2 = omega(spec, k, Branch::OpticalII);
                if (cfg.verify) {
                    const auto ev = oracle::bloch_eigenfrequencies(spec, k);
                    if (std::abs(w1 - ev[0]) > 1e-10 || std::abs(w2 - ev[1]) > 1e-10)
                        throw consistency_error(
                            "dispersion at kx=" + fmt17(kx) + ", ky=" + fmt17(ky) +
                            " disagrees with the Bloch oracle");
                }
                out += fmt17(kx) + "," + fmt17(ky) + "," + fmt17(w1) + "," + fmt17(w2) + "\n";
            } else {
                const double w = omega(spec, k);
                if (cfg.verify) {
                    const auto ev = oracle::bloch_eigenfrequencies(spec, k);
                    if (std::abs(w - ev[0]) > 1e-10)
                        throw consistency_error(
                            "dispersion at kx=" + fmt17(kx) + ", ky=" + fmt17(ky) +
                            " disagrees with the Bloch oracle by " + fmt17(std::abs(w - ev[0])));
                }
                out += fmt17(kx) + "," + fmt17(ky) + "," + fmt17(w) + "\n";
            }
        }
    }
    write_file(dir / "dispersion.csv", out);
    write_file(dir / "manifest-dispersion.txt", manifest_text(cfg, "dispersion"));
}

// ------------------------------------------------------------------ contour

void run_contour(const RunConfig& cfg, const fs::path& dir) {
    if (cfg.res < 2) throw usage_error("key 'res' needs at least 2 samples per axis");
    const LatticeSpec spec = build_spec(cfg);
    const Branch branch = resolve_branch(spec, cfg);
    const auto polys = equifrequency_contour(spec, cfg.target_omega, branch, cfg.res);
    std::string out = "polyline,kx,ky\n";
    for (std::size_t id = 0; id < polys.size(); ++id)
        for (const WaveVector& v : polys[id].vertices)
            out += std::to_string(id) + "," + fmt17(v.kx) + "," + fmt17(v.ky) + "\n";
    write_file(dir / "contour.csv", out);
    write_file(dir / "manifest-contour.txt", manifest_text(cfg, "contour"));
}

// ----------------------------------------------------------------- groupvel

void run_groupvel(const RunConfig& cfg, const fs::path& dir) {
    if (cfg.res < 2) throw usage_error("key 'res' needs at least 2 samples per axis");
    const LatticeSpec spec = build_spec(cfg);
    const Branch branch = resolve_branch(spec, cfg);
    const auto samples = group_velocity_field(spec, branch, cfg.res);
    std::string out = "kx,ky,cgx,cgy,beta,flag\n";
    for (const DispersionSample& s : samples) {
        if (cfg.verify && s.smooth) {
            const auto fd = oracle::fd_group_velocity(spec, s.k, branch);
            const double mag = std::hypot(s.cg.x, s.cg.y);
            if (!fd.flagged && mag > 1e-8 &&
                std::hypot(s.cg.x - fd.cg.x, s.cg.y - fd.cg.y) > 1e-6 * mag)
                throw consistency_error(
                    "group velocity at kx=" + fmt17(s.k.kx) + ", ky=" + fmt17(s.k.ky) +
                    " disagrees with central differences");
        }
        out += fmt17(s.k.kx) + "," + fmt17(s.k.ky) + "," + fmt17(s.cg.x) + "," +
               fmt17(s.cg.y) + "," + fmt17(s.beta) + "," + (s.smooth ? "1" : "0") + "\n";
    }
    write_file(dir / "groupvel.csv", out);
    write_file(dir / "manifest-groupvel.txt", manifest_text(cfg, "groupvel"));
}

// --------------------------------------------------------------- resonances

void run_resonances(const RunConfig& cfg, const fs::path& dir) {
    const LatticeSpec spec = build_spec(cfg);
    const auto catalog = resonance_catalog(spec);
    std::string out = "entry,omega,kind,kx,ky\n";
    std::string rays = "entry,omega,angle-rad,angle-deg\n";
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const ResonanceEntry& e = catalog[i];
        for (const WaveVector& k : e.kpoints)
            out += std::to_string(i) + "," + fmt17(e.omega) + "," + kind_slug(e.kind) + "," +
                   fmt17(k.kx) + "," + fmt17(k.ky) + "\n";
        for (double a : e.beaming)
            rays += std::to_string(i) + "," + fmt17(e.omega) + "," + fmt17(a) + "," +
                    fmt17(a * 180.0 / kPi) + "\n";
    }
    write_file(dir / "resonances.csv", out);
    write_file(dir / "beaming-directions.csv", rays);
    write_file(dir / "manifest-resonances.txt", manifest_text(cfg, "resonances"));
}

// ---------------------------------------------------------------------- lpw

LpwMode parse_mode(const std::string& m) {
    if (m == "line") return LpwMode::Line;
    if (m == "line-acoustic") return LpwMode::LineAcoustic;
    if (m == "line-optical") return LpwMode::LineOptical;
    if (m == "conical") return LpwMode::ConicalForm;
    return LpwMode::BandEdgeForm;
}

void run_lpw(const RunConfig& cfg, const fs::path& dir) {
    const LatticeSpec spec = build_spec(cfg);
    int omax = 0;
    switch (spec.family) {
    case Family::MSL1D: omax = 0; break;
    case Family::RCL: omax = 1; break;
    case Family::RTL: omax = 1; break;
    case Family::ETL: omax = 2; break;
    case Family::HCL: omax = 2; break;
    }
    if (cfg.orientation < 0 || cfg.orientation > omax)
        throw usage_error("key 'orientation' for family '" + cfg.family + "' must lie in 0.." +
                          std::to_string(omax));
    if (spec.family == Family::HCL && cfg.mode == "line")
        throw usage_error(
            "family 'hcl' needs key 'mode' set to line-acoustic, line-optical, conical or "
            "band-edge");
    if (spec.family != Family::HCL && cfg.mode != "line")
        throw usage_error("mode '" + cfg.mode + "' applies to family 'hcl' only");

    LpwPattern pattern;
    try {
        pattern = construct_lpw(spec, cfg.orientation, parse_mode(cfg.mode));
    } catch (const domain_error& e) {
        // The configuration admits no localized primitive waveform; that is a
        // result, not a failure.
        std::string rep;
        rep += std::string("# ") + kToolName + " " + kToolVersion + " lpw report\n";
        rep += "status = no-lpw\n";
        rep += "family = " + cfg.family + "\n";
        rep += "orientation = " + std::to_string(cfg.orientation) + "\n";
        rep += "mode = " + cfg.mode + "\n";
        rep += std::string("reason = no LPW for this configuration: ") + e.what() + "\n";
        write_file(dir / "lpw-report.txt", rep);
        write_file(dir / "manifest-lpw.txt", manifest_text(cfg, "lpw"));
        return;
    }

    const double residual = verify_lpw(spec, pattern);
    std::string csv = "m,n,sub,amplitude\n";
    for (const auto& [node, amp] : pattern.amplitudes)
        csv += std::to_string(node.m) + "," + std::to_string(node.n) + "," +
               (node.sub == Sub::V ? "v" : "u") + "," + std::to_string(amp) + "\n";
    write_file(dir / "lpw.csv", csv);

    std::string rep;
    rep += std::string("# ") + kToolName + " " + kToolVersion + " lpw report\n";
    rep += "status = ok\n";
    rep += "family = " + cfg.family + "\n";
    rep += "orientation = " + std::to_string(cfg.orientation) + "\n";
    rep += "mode = " + cfg.mode + "\n";
    rep += "omega = " + fmt17(pattern.omega) + "\n";
    rep += "residual = " + fmt17(residual) + "\n";
    rep += std::string("extension = ") +
           (pattern.extension == LpwExtension::Generated ? "generated" : "finite-map") + "\n";
    rep += "nodes = " + std::to_string(pattern.amplitudes.size()) + "\n";
    write_file(dir / "lpw-report.txt", rep);
    write_file(dir / "manifest-lpw.txt", manifest_text(cfg, "lpw"));
}

// ----------------------------------------------------------------- simulate

SourceSpec source_from(const RunConfig& cfg) {
    SourceSpec src;
    src.kind = cfg.source_kind == "force" ? SourceKind::Force : SourceKind::Kinematic;
    src.omega0 = cfg.omega0;
    src.amplitude = cfg.amplitude;
    src.node = {cfg.source_m, cfg.source_n, parse_sub(cfg.source_sub)};
    return src;
}

void write_probe_csv(const fs::path& p, const ProbeRecord& probe, double omega0, double dt) {
    const EnvelopeSeries env = envelope(probe, omega0);
    const std::size_t P = static_cast<std::size_t>(std::llround(2.0 * kPi / omega0 / dt));
    std::string out = "t,u,envelope\n";
    const std::size_t nw = env.amplitudes.size();
    for (std::size_t k = 0; k < probe.times.size(); ++k) {
        double e = std::numeric_limits<double>::quiet_NaN();
        if (nw > 0) e = env.amplitudes[std::min(k / P, nw - 1)];
        out += fmt17(probe.times[k]) + "," + fmt17(probe.displacements[k]) + "," + fmt17(e) +
               "\n";
    }
    write_file(p, out);
}

void write_snapshot_csvs(const fs::path& dir, const LatticeSpec& spec, const Snapshot& snap) {
    const FieldState& f = snap.field;
    std::string grid = "m,n,sub,x,y,u\n";
    std::string env = "m,n,sub,x,y,envelope\n";
    for (int s = 0; s < f.nsub; ++s) {
        const Sub sub = s == 0 ? Sub::U : Sub::V;
        const auto& u = s == 0 ? f.u : f.v_sub;
        const auto& e = s == 0 ? snap.env_u : snap.env_v;
        for (int m = f.m_lo; m <= f.m_hi; ++m)
            for (int n = f.n_lo; n <= f.n_hi; ++n) {
                const Vec2 pos = node_position(spec, {m, n, sub});
                const std::string head = std::to_string(m) + "," + std::to_string(n) + "," +
                                         (s == 0 ? "u" : "v") + "," + fmt17(pos.x) + "," +
                                         fmt17(pos.y) + ",";
                const std::size_t j = f.idx(m, n);
                grid += head + fmt17(u[j]) + "\n";
                env += head + fmt17(e[j]) + "\n";
            }
    }
    write_file(dir / snapshot_name(snap.t), grid);
    write_file(dir / envelope_name(snap.t), env);
}

void run_simulate(const RunConfig& cfg, const fs::path& dir) {
    const LatticeSpec spec = build_spec(cfg);
    const SourceSpec src = source_from(cfg);
    SimConfig sc;
    sc.dt = cfg.dt;
    sc.t_end = cfg.t_end;
    sc.threads = cfg.threads;
    sc.energy_stride = cfg.energy_stride;
    sc.allow_small_window = cfg.allow_small_window;
    if (!cfg.window_auto)
        sc.window = {false, cfg.window_m_lo, cfg.window_m_hi, cfg.window_n_lo, cfg.window_n_hi};
    for (const ProbeKey& p : cfg.probes) sc.probes.push_back({p.m, p.n, parse_sub({p.sub})});
    sc.snapshot_times = cfg.snapshots;

    const SimResult res = simulate(spec, src, sc);

    for (std::size_t i = 0; i < res.probes.size(); ++i)
        write_probe_csv(dir / ("probe-" + std::to_string(i) + ".csv"), res.probes[i],
                        cfg.omega0, cfg.dt);
    for (const Snapshot& snap : res.snapshots) write_snapshot_csvs(dir, spec, snap);
    if (!res.energy.empty()) {
        std::string out = "t,energy\n";
        for (const auto& [t, e] : res.energy) out += fmt17(t) + "," + fmt17(e) + "\n";
        write_file(dir / "energy.csv", out);
    }

    std::string mf = manifest_text(cfg, "simulate");
    mf += "# window-used = " + std::to_string(res.window_used.m_lo) + "," +
          std::to_string(res.window_used.m_hi) + "," + std::to_string(res.window_used.n_lo) +
          "," + std::to_string(res.window_used.n_hi) + "\n";
    mf += "# cg-max = " + fmt17(res.cg_max) + "\n";
    write_file(dir / "manifest-simulate.txt", mf);
}

// ------------------------------------------------------------------ analyze

ProbeRecord read_probe(const fs::path& dir, std::size_t i, const ProbeKey& key) {
    const fs::path p = dir / ("probe-" + std::to_string(i) + ".csv");
    if (!fs::exists(p))
        throw domain_error("run directory is missing '" + p.string() +
                           "'; re-run simulate with this probe");
    const Csv csv = read_csv(p);
    ProbeRecord rec;
    rec.node = {key.m, key.n, key.sub == 'v' ? Sub::V : Sub::U};
    rec.times.reserve(csv.rows.size());
    rec.displacements.reserve(csv.rows.size());
    for (std::size_t r = 0; r < csv.rows.size(); ++r) {
        rec.times.push_back(cell_double(csv, p, r, 0));
        rec.displacements.push_back(cell_double(csv, p, r, 1));
    }
    return rec;
}

Snapshot read_snapshot(const fs::path& dir, const LatticeSpec& spec, double t) {
    const fs::path gp = dir / snapshot_name(t);
    const fs::path ep = dir / envelope_name(t);
    if (!fs::exists(gp) || !fs::exists(ep))
        throw domain_error("run directory is missing snapshot files for t = " + fmt_short(t) +
                           "; re-run simulate with this snapshot time");
    const Csv grid = read_csv(gp);
    const Csv env = read_csv(ep);
    if (grid.rows.empty()) throw domain_error("file '" + gp.string() + "' has no rows");

    int m_lo = INT_MAX, m_hi = INT_MIN, n_lo = INT_MAX, n_hi = INT_MIN;
    for (std::size_t r = 0; r < grid.rows.size(); ++r) {
        const int m = cell_int(grid, gp, r, 0);
        const int n = cell_int(grid, gp, r, 1);
        m_lo = std::min(m_lo, m);
        m_hi = std::max(m_hi, m);
        n_lo = std::min(n_lo, n);
        n_hi = std::max(n_hi, n);
    }
    Snapshot snap;
    snap.t = t;
    snap.field = FieldState::zeros(spec, m_lo, m_hi, n_lo, n_hi);
    snap.field.t = t;
    snap.env_u.assign(snap.field.u.size(), 0.0);
    if (snap.field.nsub == 2) snap.env_v.assign(snap.field.v_sub.size(), 0.0);

    for (std::size_t r = 0; r < grid.rows.size(); ++r) {
        const int m = cell_int(grid, gp, r, 0);
        const int n = cell_int(grid, gp, r, 1);
        const bool v = grid.rows[r].size() > 2 && grid.rows[r][2] == "v";
        const double u = cell_double(grid, gp, r, 5);
        const std::size_t j = snap.field.idx(m, n);
        if (v) {
            if (snap.field.nsub != 2)
                throw domain_error("file '" + gp.string() + "' names sublattice v, but family has none");
            snap.field.v_sub[j] = u;
        } else {
            snap.field.u[j] = u;
        }
    }
    for (std::size_t r = 0; r < env.rows.size(); ++r) {
        const int m = cell_int(env, ep, r, 0);
        const int n = cell_int(env, ep, r, 1);
        if (m < m_lo || m > m_hi || n < n_lo || n > n_hi)
            throw domain_error("file '" + ep.string() + "' covers nodes missing from the snapshot grid");
        const bool v = env.rows[r].size() > 2 && env.rows[r][2] == "v";
        const double e = cell_double(env, ep, r, 5);
        const std::size_t j = snap.field.idx(m, n);
        if (v) {
            if (snap.field.nsub != 2)
                throw domain_error("file '" + ep.string() + "' names sublattice v, but family has none");
            snap.env_v[j] = e;
        } else {
            snap.env_u[j] = e;
        }
    }
    return snap;
}

RunConfig load_run_config(const fs::path& dir) {
    const fs::path mp = dir / "manifest-simulate.txt";
    if (!fs::exists(mp))
        throw domain_error("no simulate manifest in '" + dir.string() +
                           "'; run the simulate subcommand first");
    return config_from_pairs(parse_config_text(read_file(mp), mp.string()));
}

void run_analyze(const std::string& what, const KeyValues& own, const fs::path& dir) {
    RunConfig rc = config_from_pairs(own, load_run_config(dir));
    const LatticeSpec spec = build_spec(rc);

    if (what == "beaming") {
        if (rc.snapshots.empty())
            throw domain_error("the run recorded no snapshots; nothing to analyse");
        const Vec2 origin =
            node_position(spec, {rc.source_m, rc.source_n, parse_sub(rc.source_sub)});
        for (double t : rc.snapshots) {
            const Snapshot snap = read_snapshot(dir, spec, t);
            const BeamingMap bm = beaming_map(spec, snap, rc.threshold, rc.amplitude, origin);
            std::string out = "m,n,x,y,envelope,above_threshold\n";
            const FieldState& f = snap.field;
            for (int s = 0; s < f.nsub; ++s) {
                const Sub sub = s == 0 ? Sub::U : Sub::V;
                const auto& env = s == 0 ? snap.env_u : snap.env_v;
                for (int m = f.m_lo; m <= f.m_hi; ++m)
                    for (int n = f.n_lo; n <= f.n_hi; ++n) {
                        const Vec2 pos = node_position(spec, {m, n, sub});
                        out += std::to_string(m) + "," + std::to_string(n) + "," +
                               fmt17(pos.x) + "," + fmt17(pos.y) + "," +
                               fmt17(env[f.idx(m, n)]) + "," +
                               (bm.above({m, n, sub}) ? "1" : "0") + "\n";
                    }
            }
            write_file(dir / ("beaming-" + fmt_short(t) + ".csv"), out);
            std::string rays = "ray,angle-rad,angle-deg,weight\n";
            for (std::size_t i = 0; i < bm.ray_angles.size(); ++i)
                rays += std::to_string(i) + "," + fmt17(bm.ray_angles[i]) + "," +
                        fmt17(bm.ray_angles[i] * 180.0 / kPi) + "," +
                        fmt17(bm.ray_weights[i]) + "\n";
            write_file(dir / ("rays-" + fmt_short(t) + ".csv"), rays);
        }
    } else if (what == "growth") {
        if (rc.probes.empty())
            throw domain_error("the run recorded no probes; nothing to analyse");
        std::string out = "probe,m,n,sub,t-begin,t-end,exponent,r-squared\n";
        for (std::size_t i = 0; i < rc.probes.size(); ++i) {
            const ProbeRecord rec = read_probe(dir, i, rc.probes[i]);
            const EnvelopeSeries env = envelope(rec, rc.omega0);
            if (env.times.empty())
                throw domain_error("probe " + std::to_string(i) +
                                   " is too short for even one drive period");
            const double fe = rc.fit_end_auto ? env.times.back() : rc.fit_end;
            const GrowthFit fit = growth_exponent(env, rc.fit_begin, fe);
            out += std::to_string(i) + "," + std::to_string(rc.probes[i].m) + "," +
                   std::to_string(rc.probes[i].n) + "," + rc.probes[i].sub + "," +
                   fmt17(fit.t_begin) + "," + fmt17(fit.t_end) + "," + fmt17(fit.exponent) +
                   "," + fmt17(fit.r_squared) + "\n";
        }
        write_file(dir / "growth.csv", out);
    } else if (what == "front") {
        std::vector<Snapshot> snaps;
        for (double t : rc.snapshots) snaps.push_back(read_snapshot(dir, spec, t));
        const double err = front_scaling(spec, snaps);
        std::string rep;
        rep += std::string("# ") + kToolName + " " + kToolVersion + " front-collapse report\n";
        std::string list;
        for (std::size_t i = 0; i < rc.snapshots.size(); ++i) {
            if (i) list += ",";
            list += fmt_short(rc.snapshots[i]);
        }
        rep += "snapshots = " + list + "\n";
        rep += "collapse-error = " + fmt17(err) + "\n";
        write_file(dir / "front-report.txt", rep);
    } else if (what == "ratio") {
        std::size_t iu = rc.probes.size(), iv = rc.probes.size();
        for (std::size_t i = 0; i < rc.probes.size(); ++i) {
            if (rc.probes[i].sub == 'u' && iu == rc.probes.size()) iu = i;
            if (rc.probes[i].sub == 'v' && iv == rc.probes.size()) iv = i;
        }
        if (iu == rc.probes.size() || iv == rc.probes.size())
            throw domain_error(
                "sublattice ratio needs the run to record one u probe and one v probe");
        const ProbeRecord pu = read_probe(dir, iu, rc.probes[iu]);
        const ProbeRecord pv = read_probe(dir, iv, rc.probes[iv]);
        const RatioSeries rs = sublattice_ratio(spec, pu, pv, rc.omega0);
        std::string out = "t,ratio\n";
        for (std::size_t i = 0; i < rs.times.size(); ++i)
            out += fmt17(rs.times[i]) + "," + fmt17(rs.ratios[i]) + "\n";
        write_file(dir / "ratio.csv", out);
    } else {
        throw usage_error("unknown analyze mode '" + what +
                          "'; expected beaming, growth, front or ratio");
    }
    write_file(dir / ("manifest-analyze-" + what + ".txt"),
               manifest_text(rc, "analyze-" + what));
}

// --------------------------------------------------------------------- help

const char* kUsage = R"(usage: latticewave <subcommand> [--key value]...

subcommands:
  dispersion   sample the dispersion surface(s) onto a CSV grid
  contour      extract one equifrequency contour as polylines
  groupvel     sample group-velocity vectors and beam angles
  resonances   list the resonance catalog of a family
  lpw          construct and verify a localized primitive waveform
  simulate     run a monochromatic point-source simulation
  analyze      post-process a simulate run: beaming | growth | front | ratio

common keys:
  --family msl1d|scl|srcl|rcl|hcl|etl|rtl   (required)
  --l --gx --gy --gamma --mass              lattice parameters
  --source-kind kinematic|force  --omega0 --amplitude
  --source-m --source-n --source-sub u|v
  --dt --t-end --threads --energy-stride
  --window auto|m_lo,m_hi,n_lo,n_hi  --allow-small-window true|false
  --probe m,n[,u|v]   (repeatable)   --snapshot t[,t...]
  --res N  --branch auto|i|ii  --target-omega W  --verify true|false
  --orientation K  --mode line|line-acoustic|line-optical|conical|band-edge
  --threshold F  --fit-begin T  --fit-end auto|T
  --config path    read key = value lines (# comments) before later flags
  --out dir        output directory (default: out)

exit codes: 0 success, 2 usage error, 3 domain error, 4 consistency failure
)";

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    try {
        if (args.empty()) throw usage_error("no subcommand given");
        const std::string sub = args[0];
        if (sub == "help" || sub == "--help" || sub == "-h") {
            out << kUsage;
            return 0;
        }
        static const char* kSubs[] = {"dispersion", "contour",  "groupvel", "resonances",
                                      "lpw",        "simulate", "analyze"};
        if (std::find_if(std::begin(kSubs), std::end(kSubs),
                         [&](const char* s) { return sub == s; }) == std::end(kSubs))
            throw usage_error("unknown subcommand '" + sub + "'");

        std::size_t i = 1;
        std::string what;
        if (sub == "analyze") {
            if (args.size() < 2 || args[1].rfind("--", 0) == 0)
                throw usage_error("analyze needs a mode: beaming, growth, front or ratio");
            what = args[1];
            i = 2;
        }

        std::string out_dir = "out";
        KeyValues kvs;
        for (; i < args.size(); ++i) {
            std::string a = args[i];
            if (a.rfind("--", 0) != 0)
                throw usage_error("expected a --key, got '" + a + "'");
            a = a.substr(2);
            std::string value;
            const auto eq = a.find('=');
            if (eq != std::string::npos) {
                value = a.substr(eq + 1);
                a = a.substr(0, eq);
            } else {
                if (i + 1 >= args.size())
                    throw usage_error("key '--" + a + "' is missing its value");
                value = args[++i];
            }
            if (a == "out") {
                out_dir = value;
            } else if (a == "config") {
                const KeyValues file_kvs = parse_config_text(read_file(value), value);
                kvs.insert(kvs.end(), file_kvs.begin(), file_kvs.end());
            } else {
                kvs.emplace_back(a, value);
            }
        }

        fs::create_directories(out_dir);
        if (sub == "analyze") {
            run_analyze(what, kvs, out_dir);
        } else {
            const RunConfig cfg = config_from_pairs(kvs);
            if (sub == "dispersion") run_dispersion(cfg, out_dir);
            else if (sub == "contour") run_contour(cfg, out_dir);
            else if (sub == "groupvel") run_groupvel(cfg, out_dir);
            else if (sub == "resonances") run_resonances(cfg, out_dir);
            else if (sub == "lpw") run_lpw(cfg, out_dir);
            else run_simulate(cfg, out_dir);
        }
        return 0;
    } catch (const usage_error& e) {
        err << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const consistency_error& e) {
        err << "consistency error: " << e.what() << "\n";
        return 4;
    } catch (const domain_error& e) {
        err << "domain error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 3;
    }
}

}  // namespace lattice::cli
