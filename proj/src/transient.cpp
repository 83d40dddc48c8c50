#include "lattice/transient.hpp"

#include <algorithm>
#include <barrier>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "lattice/dispersion.hpp"

namespace lattice {
namespace {

struct Bounds {
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
};

// Index half-widths that cover a physical disk of radius r around a node,
// given each family's node coordinates.
std::pair<int, int> index_half_widths(const LatticeSpec& spec, double r) {
    const double s3 = std::sqrt(3.0);
    switch (spec.family) {
        case Family::MSL1D:
            return {static_cast<int>(std::ceil(r)), 0};
        case Family::RCL:
            return {static_cast<int>(std::ceil(r)), static_cast<int>(std::ceil(r / spec.l))};
        case Family::RTL:
            return {static_cast<int>(std::ceil(r)), static_cast<int>(std::ceil(r))};
        case Family::ETL:
            return {static_cast<int>(std::ceil(r * (1.0 + 1.0 / s3))),
                    static_cast<int>(std::ceil(r * 2.0 / s3))};
        case Family::HCL: {
            const int w = static_cast<int>(std::ceil(r * (1.0 + 1.0 / s3)));
            return {w, w};
        }
    }
    return {0, 0};
}

void validate_node(const LatticeSpec& spec, const NodeIndex& node, const char* what) {
    if (node.sub == Sub::V && sublattice_count(spec) != 2) {
        std::ostringstream os;
        os << what << " addresses the v sublattice, which this family does not have";
        throw domain_error(os.str());
    }
    if (spec.family == Family::MSL1D && node.n != 0) {
        std::ostringstream os;
        os << what << " must have n == 0 on the 1D chain";
        throw domain_error(os.str());
    }
}

// Scalar stencil acceleration at one interior node (same dynamics as the row
// kernels below); used for the force-source fixup.
double node_accel(const LatticeSpec& spec, const double* pu, const double* pv,
                  std::ptrdiff_t st, std::size_t j, Sub sub, double invM) {
    switch (spec.family) {
        case Family::MSL1D:
            return (spec.gx * (pu[j - st] + pu[j + st]) - 2.0 * spec.gx * pu[j]) * invM;
        case Family::RCL:
            return (spec.gx * (pu[j - st] + pu[j + st]) + spec.gy * (pu[j - 1] + pu[j + 1]) -
                    2.0 * (spec.gx + spec.gy) * pu[j]) *
                   invM;
        case Family::ETL:
            return (spec.gx * (pu[j - st] + pu[j + st] + pu[j - 1] + pu[j + 1] + pu[j + st - 1] +
                               pu[j - st + 1]) -
                    6.0 * spec.gx * pu[j]) *
                   invM;
        case Family::RTL:
            return (spec.gx * (pu[j - st] + pu[j + st] + pu[j - 1] + pu[j + 1]) +
                    spec.gamma * (pu[j + st + 1] + pu[j - st - 1]) -
                    (4.0 * spec.gx + 2.0 * spec.gamma) * pu[j]) *
                   invM;
        case Family::HCL:
            if (sub == Sub::U)
                return (spec.gx * (pv[j] + pv[j - st] + pv[j - 1]) - 3.0 * spec.gx * pu[j]) * invM;
            return (spec.gx * (pu[j] + pu[j + st] + pu[j + 1]) - 3.0 * spec.gx * pv[j]) * invM;
    }
    return 0.0;
}

}  // namespace

double max_group_speed(const LatticeSpec& spec, int res) {
    spec.validate();
    if (res < 2) throw domain_error("group-speed sweep needs a grid resolution of at least 2");
    const Vec2 half = zone_half_widths(spec);
    std::vector<Branch> branches;
    if (spec.family == Family::HCL)
        branches = {Branch::AcousticI, Branch::OpticalII};
    else
        branches = {Branch::Single};
    double best = 0.0;
    const int ny = spec.family == Family::MSL1D ? 1 : res;
    for (Branch b : branches) {
        for (int iy = 0; iy < ny; ++iy) {
            const double ky =
                ny == 1 ? 0.0 : -half.y + 2.0 * half.y * static_cast<double>(iy) / (res - 1);
            for (int ix = 0; ix < res; ++ix) {
                const double kx = -half.x + 2.0 * half.x * static_cast<double>(ix) / (res - 1);
                const GroupVelocity gv = group_velocity(spec, {kx, ky}, b);
                best = std::max(best, std::hypot(gv.cg.x, gv.cg.y));
            }
        }
    }
    return best;
}

SimResult simulate(const LatticeSpec& spec, const SourceSpec& source, const SimConfig& config) {
    spec.validate();
    if (!(source.omega0 > 0.0)) throw domain_error("source frequency omega0 must be positive");
    if (!std::isfinite(source.amplitude)) throw domain_error("source amplitude must be finite");
    validate_node(spec, source.node, "source node");
    if (!(config.dt > 0.0)) throw domain_error("time step dt must be positive");
    if (config.dt > 0.01)
        throw domain_error("time step dt must not exceed 0.01 (stability/accuracy contract)");
    if (!(config.t_end > 0.0)) throw domain_error("t_end must be positive");
    if (config.t_end < config.dt) throw domain_error("t_end must cover at least one step");
    if (config.threads < 1 || config.threads > 256)
        throw domain_error("thread count must be between 1 and 256");
    if (config.energy_stride < 0) throw domain_error("energy_stride must be non-negative");
    for (double ts : config.snapshot_times)
        if (!(ts >= 0.0) || ts > config.t_end + 1e-9)
            throw domain_error("snapshot times must lie in [0, t_end]");
    for (const NodeIndex& p : config.probes) validate_node(spec, p, "probe node");

    const double cg_max = max_group_speed(spec);
    Bounds bounds;
    if (config.window.automatic) {
        const double radius = cg_max * config.t_end + 10.0;
        const auto [wm, wn] = index_half_widths(spec, radius);
        bounds = {source.node.m - wm, source.node.m + wm, source.node.n - wn, source.node.n + wn};
    } else {
        bounds = {config.window.m_lo, config.window.m_hi, config.window.n_lo,
                  config.window.n_hi};
        if (bounds.m_lo > bounds.m_hi || bounds.n_lo > bounds.n_hi)
            throw domain_error("window index ranges are inverted");
        if (spec.family == Family::MSL1D && (bounds.n_lo != 0 || bounds.n_hi != 0))
            throw domain_error("1D chain windows must use n_lo == n_hi == 0");
        const auto [rm, rn] = index_half_widths(spec, cg_max * config.t_end);
        const bool roomy = source.node.m - bounds.m_lo >= rm && bounds.m_hi - source.node.m >= rm &&
                           source.node.n - bounds.n_lo >= rn && bounds.n_hi - source.node.n >= rn;
        if (!roomy && !config.allow_small_window) {
            std::ostringstream os;
            os << "window too small: the wavefront (group speed bound " << cg_max
               << ") would reach the boundary before t_end = " << config.t_end
               << "; need at least +-(" << rm << ", " << rn << ") index cells around the source"
               << " (set allow_small_window to run anyway)";
            throw domain_error(os.str());
        }
    }

    auto inside = [&bounds](const NodeIndex& p) {
        return p.m >= bounds.m_lo && p.m <= bounds.m_hi && p.n >= bounds.n_lo && p.n <= bounds.n_hi;
    };
    if (!inside(source.node)) throw domain_error("source node lies outside the window");
    for (const NodeIndex& p : config.probes)
        if (!inside(p)) throw domain_error("a probe node lies outside the window");

    const int nsub = sublattice_count(spec);
    const int rows = bounds.m_hi - bounds.m_lo + 1;
    const int cols = bounds.n_hi - bounds.n_lo + 1;
    const std::ptrdiff_t st = cols + 2;
    const std::size_t total = static_cast<std::size_t>(rows + 2) * static_cast<std::size_t>(st);
    auto flat = [&](int m, int n) {
        return static_cast<std::size_t>(m - bounds.m_lo + 1) * static_cast<std::size_t>(st) +
               static_cast<std::size_t>(n - bounds.n_lo + 1);
    };

    const double dt = config.dt;
    const double dt2 = dt * dt;
    const long k_end = std::lround(config.t_end / dt);
    const long nsteps = k_end + 1;  // one extra step for final centred velocities

    // Buffers (three time levels per sublattice).
    std::vector<double> bu[3], bv[3];
    for (int i = 0; i < 3; ++i) {
        bu[i].assign(total, 0.0);
        if (nsub == 2) bv[i].assign(total, 0.0);
    }

    // Snapshot plan: step index -> output slot, plus an envelope collector
    // covering the trailing source period of each snapshot.
    struct Collector {
        long k_begin = 0, k_cap = 0;
        int out = 0;
        std::vector<double> env_u, env_v;
    };
    const double period = 2.0 * M_PI / source.omega0;
    const long period_steps = std::max<long>(1, std::lround(std::ceil(period / dt)));
    std::vector<Collector> collectors;
    SimResult result;
    result.cg_max = cg_max;
    result.window_used = {false, bounds.m_lo, bounds.m_hi, bounds.n_lo, bounds.n_hi};
    result.snapshots.resize(config.snapshot_times.size());
    for (std::size_t i = 0; i < config.snapshot_times.size(); ++i) {
        const long k = std::min(k_end, std::lround(config.snapshot_times[i] / dt));
        Collector c;
        c.k_cap = k;
        c.k_begin = std::max<long>(0, k - period_steps);
        c.out = static_cast<int>(i);
        c.env_u.assign(total, 0.0);
        if (nsub == 2) c.env_v.assign(total, 0.0);
        collectors.push_back(std::move(c));
        Snapshot& snap = result.snapshots[i];
        snap.t = static_cast<double>(k) * dt;
        snap.field = FieldState::zeros(spec, bounds.m_lo, bounds.m_hi, bounds.n_lo, bounds.n_hi);
        snap.env_u.assign(total, 0.0);
        if (nsub == 2) snap.env_v.assign(total, 0.0);
    }

    result.probes.resize(config.probes.size());
    std::vector<std::size_t> probe_idx(config.probes.size());
    for (std::size_t i = 0; i < config.probes.size(); ++i) {
        result.probes[i].node = config.probes[i];
        result.probes[i].displacements.reserve(static_cast<std::size_t>(nsteps));
        probe_idx[i] = flat(config.probes[i].m, config.probes[i].n);
    }
    if (config.energy_stride > 0)
        result.energy.reserve(static_cast<std::size_t>(nsteps / config.energy_stride + 2));

    // Scratch field for energy samples (filled on demand).
    FieldState scratch;
    if (config.energy_stride > 0)
        scratch = FieldState::zeros(spec, bounds.m_lo, bounds.m_hi, bounds.n_lo, bounds.n_hi);

    const std::size_t src = flat(source.node.m, source.node.n);
    const bool src_is_v = source.node.sub == Sub::V;
    const double invM = 1.0 / spec.mass;
    const double w0 = source.omega0;
    const double amp = source.amplitude;

    // Shared rotating pointers.
    struct Shared {
        double *up_u, *uc_u, *un_u;
        double *up_v, *uc_v, *un_v;
    } sh{bu[0].data(), bu[1].data(), bu[2].data(),
         nsub == 2 ? bv[0].data() : nullptr, nsub == 2 ? bv[1].data() : nullptr,
         nsub == 2 ? bv[2].data() : nullptr};

    const int workers = std::max(1, std::min(config.threads, rows));
    // Row blocks: worker w owns field rows [row_of(w), row_of(w+1)).
    auto row_of = [&](int w) { return bounds.m_lo + static_cast<int>((static_cast<long>(rows) * w) / workers); };

    // Precomputed kernel coefficients.
    const double kx = spec.gx * invM;
    const double ky = spec.gy * invM;
    const double kd = spec.gamma * invM;
    double k0 = 0.0;
    switch (spec.family) {
        case Family::MSL1D: k0 = 2.0 * spec.gx * invM; break;
        case Family::RCL:   k0 = 2.0 * (spec.gx + spec.gy) * invM; break;
        case Family::ETL:   k0 = 6.0 * spec.gx * invM; break;
        case Family::RTL:   k0 = (4.0 * spec.gx + 2.0 * spec.gamma) * invM; break;
        case Family::HCL:   k0 = 3.0 * spec.gx * invM; break;
    }

    long s_done = 0;  // completed steps, maintained by the barrier completion

    auto completion = [&]() noexcept {
        const long s = s_done;
        const double t_now = static_cast<double>(s) * dt;
        // Source fixup on the freshly computed level (time s+1).
        if (amp != 0.0) {
            double* un_arr = src_is_v ? sh.un_v : sh.un_u;
            if (source.kind == SourceKind::Kinematic) {
                un_arr[src] = amp * std::sin(w0 * (static_cast<double>(s + 1) * dt));
            } else {
                const double a = node_accel(spec, sh.uc_u, sh.uc_v, st, src,
                                            source.node.sub, invM) +
                                 amp * std::sin(w0 * t_now) * invM;
                const double* uc_arr = src_is_v ? sh.uc_v : sh.uc_u;
                const double* up_arr = src_is_v ? sh.up_v : sh.up_u;
                un_arr[src] = s == 0 ? uc_arr[src] + 0.5 * dt2 * a
                                     : 2.0 * uc_arr[src] - up_arr[src] + dt2 * a;
            }
        }
        // Captures at time index s (uc = u(t_s), centred v from un/up).
        for (std::size_t i = 0; i < probe_idx.size(); ++i) {
            const double* arr = result.probes[i].node.sub == Sub::V ? sh.uc_v : sh.uc_u;
            result.probes[i].displacements.push_back(arr[probe_idx[i]]);
        }
        for (Collector& c : collectors) {
            if (c.k_cap != s) continue;
            Snapshot& snap = result.snapshots[static_cast<std::size_t>(c.out)];
            std::copy(sh.uc_u, sh.uc_u + total, snap.field.u.begin());
            const double inv2dt = 1.0 / (2.0 * dt);
            for (std::size_t j = 0; j < total; ++j)
                snap.field.du[j] = (sh.un_u[j] - sh.up_u[j]) * inv2dt;
            if (nsub == 2) {
                std::copy(sh.uc_v, sh.uc_v + total, snap.field.v_sub.begin());
                for (std::size_t j = 0; j < total; ++j)
                    snap.field.dv_sub[j] = (sh.un_v[j] - sh.up_v[j]) * inv2dt;
            }
            snap.field.t = t_now;
            std::copy(c.env_u.begin(), c.env_u.end(), snap.env_u.begin());
            if (nsub == 2) std::copy(c.env_v.begin(), c.env_v.end(), snap.env_v.begin());
        }
        if (config.energy_stride > 0 && s % config.energy_stride == 0) {
            const double inv2dt = 1.0 / (2.0 * dt);
            std::copy(sh.uc_u, sh.uc_u + total, scratch.u.begin());
            for (std::size_t j = 0; j < total; ++j)
                scratch.du[j] = (sh.un_u[j] - sh.up_u[j]) * inv2dt;
            if (nsub == 2) {
                std::copy(sh.uc_v, sh.uc_v + total, scratch.v_sub.begin());
                for (std::size_t j = 0; j < total; ++j)
                    scratch.dv_sub[j] = (sh.un_v[j] - sh.up_v[j]) * inv2dt;
            }
            result.energy.emplace_back(t_now, total_energy(spec, scratch));
        }
        // Rotate buffers: prev <- cur <- next <- (old prev).
        double* tmp = sh.up_u; sh.up_u = sh.uc_u; sh.uc_u = sh.un_u; sh.un_u = tmp;
        if (nsub == 2) { tmp = sh.up_v; sh.up_v = sh.uc_v; sh.uc_v = sh.un_v; sh.un_v = tmp; }
        ++s_done;
    };

    std::barrier bar(workers, completion);

    auto worker = [&](int w) {
        const int m0 = row_of(w);
        const int m1 = row_of(w + 1);
        for (long it = 0; it < nsteps; ++it) {
            const double* up_u = sh.up_u;
            const double* uc_u = sh.uc_u;
            double* un_u = sh.un_u;
            const double* up_v = sh.up_v;
            const double* uc_v = sh.uc_v;
            double* un_v = sh.un_v;
            // Leapfrog coefficients; the first step is seeded from u = v = 0.
            const double c2 = it == 0 ? 1.0 : 2.0;
            const double c1 = it == 0 ? 0.0 : 1.0;
            const double cd = it == 0 ? 0.5 * dt2 : dt2;
            for (int m = m0; m < m1; ++m) {
                const std::size_t r0 = flat(m, bounds.n_lo);
                const std::size_t r1 = r0 + static_cast<std::size_t>(cols);
                switch (spec.family) {
                    case Family::MSL1D:
                    case Family::RCL:
                        for (std::size_t j = r0; j < r1; ++j) {
                            const double a = kx * (uc_u[j - st] + uc_u[j + st]) +
                                             ky * (uc_u[j - 1] + uc_u[j + 1]) - k0 * uc_u[j];
                            un_u[j] = c2 * uc_u[j] - c1 * up_u[j] + cd * a;
                        }
                        break;
                    case Family::ETL:
                        for (std::size_t j = r0; j < r1; ++j) {
                            const double a = kx * (uc_u[j - st] + uc_u[j + st] + uc_u[j - 1] +
                                                   uc_u[j + 1] + uc_u[j + st - 1] +
                                                   uc_u[j - st + 1]) -
                                             k0 * uc_u[j];
                            un_u[j] = c2 * uc_u[j] - c1 * up_u[j] + cd * a;
                        }
                        break;
                    case Family::RTL:
                        for (std::size_t j = r0; j < r1; ++j) {
                            const double a = kx * (uc_u[j - st] + uc_u[j + st] + uc_u[j - 1] +
                                                   uc_u[j + 1]) +
                                             kd * (uc_u[j + st + 1] + uc_u[j - st - 1]) -
                                             k0 * uc_u[j];
                            un_u[j] = c2 * uc_u[j] - c1 * up_u[j] + cd * a;
                        }
                        break;
                    case Family::HCL:
                        for (std::size_t j = r0; j < r1; ++j) {
                            const double au =
                                kx * (uc_v[j] + uc_v[j - st] + uc_v[j - 1]) - k0 * uc_u[j];
                            const double av =
                                kx * (uc_u[j] + uc_u[j + st] + uc_u[j + 1]) - k0 * uc_v[j];
                            un_u[j] = c2 * uc_u[j] - c1 * up_u[j] + cd * au;
                            un_v[j] = c2 * uc_v[j] - c1 * up_v[j] + cd * av;
                        }
                        break;
                }
            }
            // Envelope collectors sample |u| at the current time level.
            for (Collector& c : collectors) {
                if (it < c.k_begin || it > c.k_cap) continue;
                double* eu = c.env_u.data();
                for (int m = m0; m < m1; ++m) {
                    const std::size_t r0 = flat(m, bounds.n_lo);
                    const std::size_t r1 = r0 + static_cast<std::size_t>(cols);
                    for (std::size_t j = r0; j < r1; ++j)
                        eu[j] = std::max(eu[j], std::abs(uc_u[j]));
                }
                if (nsub == 2) {
                    double* ev = c.env_v.data();
                    for (int m = m0; m < m1; ++m) {
                        const std::size_t r0 = flat(m, bounds.n_lo);
                        const std::size_t r1 = r0 + static_cast<std::size_t>(cols);
                        for (std::size_t j = r0; j < r1; ++j)
                            ev[j] = std::max(ev[j], std::abs(uc_v[j]));
                    }
                }
            }
            bar.arrive_and_wait();
        }
    };

    if (workers == 1) {
        worker(0);
    } else {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers) - 1);
        for (int w = 1; w < workers; ++w) pool.emplace_back(worker, w);
        worker(0);
    }

    std::vector<double> times(static_cast<std::size_t>(nsteps));
    for (long k = 0; k < nsteps; ++k) times[static_cast<std::size_t>(k)] = static_cast<double>(k) * dt;
    for (ProbeRecord& rec : result.probes) rec.times = times;
    return result;
}

FieldState& step(const LatticeSpec& spec, FieldState& state, const SourceSpec& source, double dt) {
    spec.validate();
    if (!(dt > 0.0)) throw domain_error("time step dt must be positive");
    if (!(source.omega0 > 0.0)) throw domain_error("source frequency omega0 must be positive");
    validate_node(spec, source.node, "source node");
    if (source.amplitude != 0.0 && !state.contains(source.node.m, source.node.n))
        throw domain_error("source node lies outside the field window");

    thread_local std::vector<double> a0u, a0v, a1u, a1v;
    const double invM = 1.0 / spec.mass;
    const double t0 = state.t;
    const double t1 = state.t + dt;
    const bool src_v = source.node.sub == Sub::V;
    const std::size_t src = source.amplitude != 0.0 ? state.idx(source.node.m, source.node.n) : 0;

    acceleration(spec, state, a0u, a0v);
    if (source.amplitude != 0.0 && source.kind == SourceKind::Force)
        (src_v ? a0v : a0u)[src] += source.amplitude * std::sin(source.omega0 * t0) * invM;

    for (std::size_t j = 0; j < state.u.size(); ++j)
        state.u[j] += dt * state.du[j] + 0.5 * dt * dt * a0u[j];
    for (std::size_t j = 0; j < state.v_sub.size(); ++j)
        state.v_sub[j] += dt * state.dv_sub[j] + 0.5 * dt * dt * a0v[j];
    if (source.amplitude != 0.0 && source.kind == SourceKind::Kinematic)
        (src_v ? state.v_sub : state.u)[src] = source.amplitude * std::sin(source.omega0 * t1);

    acceleration(spec, state, a1u, a1v);
    if (source.amplitude != 0.0 && source.kind == SourceKind::Force)
        (src_v ? a1v : a1u)[src] += source.amplitude * std::sin(source.omega0 * t1) * invM;

    for (std::size_t j = 0; j < state.du.size(); ++j)
        state.du[j] += 0.5 * dt * (a0u[j] + a1u[j]);
    for (std::size_t j = 0; j < state.dv_sub.size(); ++j)
        state.dv_sub[j] += 0.5 * dt * (a1v[j] + a0v[j]);
    if (source.amplitude != 0.0 && source.kind == SourceKind::Kinematic)
        (src_v ? state.dv_sub : state.du)[src] =
            source.amplitude * source.omega0 * std::cos(source.omega0 * t1);

    state.t = t1;
    return state;
}

}  // namespace lattice
