#pragma once
// Command-line surface: textual run configuration, deterministic CSV
// serialization of every library operation, and the subcommand dispatcher
// behind the `latticewave` binary.
//
// Subcommands: dispersion, contour, groupvel, resonances, lpw, simulate,
// analyze {beaming, growth, front, ratio}. Every option is a `--key value`
// pair drawn from one flat key space (RunConfig); a config file given via
// `--config path` holds the same `key = value` lines with `#` comments.
// Outputs land in the `--out` directory together with a manifest that echoes
// the configuration and reparses to the identical RunConfig.

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "lattice/core.hpp"

namespace lattice::cli {

inline constexpr const char* kToolName = "latticewave";
inline constexpr const char* kToolVersion = "1.0.0";

// Bad flags, unknown keys, malformed values, keys that do not apply to the
// chosen family: exit code 2.
struct usage_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct ProbeKey {
    int m = 0;
    int n = 0;
    char sub = 'u';
    bool operator==(const ProbeKey&) const = default;
};

// Flat, fully defaulted `key = value` mirror of the lattice, source,
// simulation and analysis options. Only `family` has no default.
struct RunConfig {
    // lattice
    std::string family;  // msl1d | scl | srcl | rcl | hcl | etl | rtl
    double l = 1.0;
    double gx = 1.0;
    bool gy_auto = true;  // gy = auto resolves per family (rcl: 1/l, else gx)
    double gy = 1.0;
    double gamma = 1.0;
    double mass = 1.0;

    // source
    std::string source_kind = "kinematic";  // kinematic | force
    double omega0 = 1.0;
    double amplitude = 1.0;
    int source_m = 0;
    int source_n = 0;
    std::string source_sub = "u";  // u | v

    // simulation
    double dt = 0.01;
    double t_end = 100.0;
    int threads = 1;
    int energy_stride = 0;
    bool window_auto = true;  // window = auto | "m_lo,m_hi,n_lo,n_hi"
    int window_m_lo = 0, window_m_hi = 0, window_n_lo = 0, window_n_hi = 0;
    bool allow_small_window = false;
    std::vector<ProbeKey> probes;    // probe = m,n[,u|v]   (repeatable)
    std::vector<double> snapshots;   // snapshot = t[,t...] (repeatable)

    // sampling and analysis
    int res = 64;
    std::string branch = "auto";  // auto | i | ii
    double target_omega = 1.0;
    int orientation = 0;
    std::string mode = "line";  // line | line-acoustic | line-optical | conical | band-edge
    double threshold = 0.1;
    double fit_begin = 0.0;
    bool fit_end_auto = true;  // fit-end = auto | t
    double fit_end = 0.0;
    bool verify = false;

    bool operator==(const RunConfig&) const = default;
};

using KeyValues = std::vector<std::pair<std::string, std::string>>;

// Set one key on the config; throws usage_error naming any unknown key or
// malformed value.
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value);

// Parse `key = value` lines (blank lines and `#` comments allowed); `origin`
// names the source in error messages.
KeyValues parse_config_text(const std::string& text, const std::string& origin);

// Fold key-value pairs onto a base config (defaults unless given).
RunConfig config_from_pairs(const KeyValues& kvs, RunConfig base = {});

// The lattice described by the config. Throws usage_error when a key that
// does not apply to the family carries a non-default value.
LatticeSpec build_spec(const RunConfig& cfg);

// Canonical manifest: a config echo that reparses to the identical RunConfig,
// with tool version and subcommand recorded as comments.
std::string manifest_text(const RunConfig& cfg, const std::string& subcommand);

// Dispatch a full command line (without argv[0]); returns the process exit
// code: 0 success, 2 usage error, 3 domain error, 4 numerical-consistency
// failure. Human-readable diagnostics go to `err`, progress notes to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lattice::cli
