#include "lattice/lpw.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace lattice {
namespace {

int par(int j) { return j % 2 == 0 ? 1 : -1; }

bool is_line_mode(LpwMode mode) {
    return mode == LpwMode::Line || mode == LpwMode::LineAcoustic || mode == LpwMode::LineOptical;
}

int hcl_sigma(LpwMode mode) { return mode == LpwMode::LineAcoustic ? 1 : -1; }

// Closed-form amplitude of the generated (infinite) pattern.
int generated_amplitude(const LpwPattern& p, const NodeIndex& node) {
    const int m = node.m, n = node.n;
    switch (p.mode) {
        case LpwMode::BandEdgeForm:
            return node.sub == Sub::U ? 1 : -1;
        case LpwMode::ConicalForm: {
            if (node.sub == Sub::U) return 0;
            const int r = ((m - n) % 3 + 3) % 3;
            return r == 0 ? 1 : (r == 1 ? -1 : 0);
        }
        default:
            break;
    }
    switch (p.spec.family) {
        case Family::RCL:
            if (p.orientation == 0) return m == n ? par(m) : 0;
            return n == -m ? par(m) : 0;
        case Family::RTL:
            return m == n ? par(m) : 0;
        case Family::ETL:
            if (p.orientation == 0) return n == 0 ? par(m) : 0;
            if (p.orientation == 1) return m == 0 ? par(n) : 0;
            return n == -m ? par(m) : 0;
        case Family::HCL: {
            const int s = hcl_sigma(p.mode);
            if (p.orientation == 0) {
                if (n != -m) return 0;
                return node.sub == Sub::U ? par(m) : s * par(m);
            }
            if (p.orientation == 1) {
                if (node.sub == Sub::U) return n == 0 ? par(m) : 0;
                return n == -1 ? s * par(m) : 0;
            }
            if (node.sub == Sub::U) return m == 0 ? par(n) : 0;
            return m == -1 ? s * par(n) : 0;
        }
        default:
            return 0;
    }
}

struct BBox {
    int m_lo = 0, m_hi = 0, n_lo = 0, n_hi = 0;
};

BBox bounding_box(const AmplitudeMap& map) {
    BBox b;
    bool first = true;
    for (const auto& [node, amp] : map) {
        (void)amp;
        if (first) {
            b = {node.m, node.m, node.n, node.n};
            first = false;
        } else {
            b.m_lo = std::min(b.m_lo, node.m);
            b.m_hi = std::max(b.m_hi, node.m);
            b.n_lo = std::min(b.n_lo, node.n);
            b.n_hi = std::max(b.n_hi, node.n);
        }
    }
    return b;
}

// ---------------------------------------------------------------------------
// Periodic quotient of a line pattern.
//
// The generated line patterns repeat under an index translation p (with a sign
// flip). Fields with that symmetry satisfy f(x + p) = -f(x), so the dynamics
// reduces exactly to a small 1D problem over the transverse coordinate
// d = pn*m - pm*n. With a Bezout pair gam*pm + del*pn = 1 the chart
// (m, n) -> (d, c = gam*m + del*n) is unimodular; the representative of d is
// (del*d, -gam*d) and a neighbour offset (dm, dn) moves (dd, dc) =
// (pn*dm - pm*dn, gam*dm + del*dn), picking up the twist sign (-1)^dc.
// ---------------------------------------------------------------------------

struct Bond {
    int dm = 0, dn = 0;
    Sub to = Sub::U;
    double g = 0.0;
};

struct Stencil {
    std::vector<Bond> bonds_u, bonds_v;
    double self_u = 0.0, self_v = 0.0;
};

Stencil family_stencil(const LatticeSpec& spec) {
    Stencil st;
    switch (spec.family) {
        case Family::RCL:
            st.bonds_u = {{1, 0, Sub::U, spec.gx},
                          {-1, 0, Sub::U, spec.gx},
                          {0, 1, Sub::U, spec.gy},
                          {0, -1, Sub::U, spec.gy}};
            st.self_u = -2.0 * (spec.gx + spec.gy);
            break;
        case Family::RTL:
            st.bonds_u = {{1, 0, Sub::U, spec.gx},  {-1, 0, Sub::U, spec.gx},
                          {0, 1, Sub::U, spec.gx},  {0, -1, Sub::U, spec.gx},
                          {1, 1, Sub::U, spec.gamma}, {-1, -1, Sub::U, spec.gamma}};
            st.self_u = -(4.0 * spec.gx + 2.0 * spec.gamma);
            break;
        case Family::ETL:
            st.bonds_u = {{1, 0, Sub::U, spec.gx},  {-1, 0, Sub::U, spec.gx},
                          {0, 1, Sub::U, spec.gx},  {0, -1, Sub::U, spec.gx},
                          {1, -1, Sub::U, spec.gx}, {-1, 1, Sub::U, spec.gx}};
            st.self_u = -6.0 * spec.gx;
            break;
        case Family::HCL:
            st.bonds_u = {{0, 0, Sub::V, spec.gx}, {-1, 0, Sub::V, spec.gx}, {0, -1, Sub::V, spec.gx}};
            st.bonds_v = {{0, 0, Sub::U, spec.gx}, {1, 0, Sub::U, spec.gx}, {0, 1, Sub::U, spec.gx}};
            st.self_u = -3.0 * spec.gx;
            st.self_v = -3.0 * spec.gx;
            break;
        default:
            throw domain_error("no interior standing waveform for this family");
    }
    return st;
}

struct LineChart {
    int pm = 1, pn = 1;   // translation period of the pattern (sign flips per step)
    int gam = 1, del = 0; // Bezout pair: gam*pm + del*pn == 1
};

LineChart line_chart(const LpwPattern& p) {
    LineChart c;
    int pm = 1, pn = 1;
    switch (p.spec.family) {
        case Family::RCL:
            pm = 1;
            pn = (p.orientation == 0) ? 1 : -1;
            break;
        case Family::RTL:
            pm = 1;
            pn = 1;
            break;
        case Family::ETL:
            if (p.orientation == 0) { pm = 1; pn = 0; }
            else if (p.orientation == 1) { pm = 0; pn = 1; }
            else { pm = 1; pn = -1; }
            break;
        case Family::HCL:
            if (p.orientation == 0) { pm = 1; pn = -1; }
            else if (p.orientation == 1) { pm = 1; pn = 0; }
            else { pm = 0; pn = 1; }
            break;
        default:
            throw domain_error("no interior standing waveform for this family");
    }
    c.pm = pm;
    c.pn = pn;
    if (pm == 0) { c.gam = 0; c.del = 1; }
    else { c.gam = 1; c.del = 0; }
    return c;
}

struct ZeroTracker {
    std::vector<std::size_t> zero_sites;
    std::size_t ref_site = 0;
    bool have_ref = false;
    double max_drift = 0.0;

    void observe(const std::vector<double>& f) {
        for (std::size_t s : zero_sites) max_drift = std::max(max_drift, std::abs(f[s]));
    }
};

double crossing_frequency(const std::vector<double>& series, double dt) {
    std::vector<double> crossings;
    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const double a = series[i], b = series[i + 1];
        if (a == 0.0 || a * b >= 0.0) continue;
        crossings.push_back(static_cast<double>(i) * dt + dt * a / (a - b));
    }
    if (crossings.size() < 2) return 0.0;
    const double span = crossings.back() - crossings.front();
    if (span <= 0.0) return 0.0;
    return M_PI * static_cast<double>(crossings.size() - 1) / span;
}

LpwEvolutionReport evolve_quotient_line(const LatticeSpec& spec, const LpwPattern& p, long steps,
                                        double dt) {
    const Stencil st = family_stencil(spec);
    const LineChart ch = line_chart(p);
    const int ns = sublattice_count(spec);

    int d_lo = 0, d_hi = 0;
    bool first = true;
    for (const auto& [node, amp] : p.amplitudes) {
        (void)amp;
        const int d = ch.pn * node.m - ch.pm * node.n;
        if (first) { d_lo = d_hi = d; first = false; }
        d_lo = std::min(d_lo, d);
        d_hi = std::max(d_hi, d);
    }
    d_lo -= 2;
    d_hi += 2;
    const int nd = d_hi - d_lo + 1;
    const std::size_t nsites = static_cast<std::size_t>(nd) * static_cast<std::size_t>(ns);
    auto site = [&](int d, int sub) {
        return static_cast<std::size_t>(d - d_lo) * static_cast<std::size_t>(ns) +
               static_cast<std::size_t>(sub);
    };

    // Compile per-sublattice couplings, merged by (dd, target sublattice) so
    // that exactly cancelling bond pairs drop out in exact arithmetic.
    const double invM = 1.0 / spec.mass;
    std::array<std::map<std::pair<int, int>, double>, 2> coup;
    for (int sub = 0; sub < ns; ++sub) {
        const auto& bonds = (sub == 0) ? st.bonds_u : st.bonds_v;
        const double self = (sub == 0) ? st.self_u : st.self_v;
        for (const Bond& b : bonds) {
            const int dd = ch.pn * b.dm - ch.pm * b.dn;
            const int dc = ch.gam * b.dm + ch.del * b.dn;
            const double ph = (dc % 2 != 0) ? -1.0 : 1.0;
            coup[sub][{dd, static_cast<int>(b.to)}] += b.g * ph * invM;
        }
        coup[sub][{0, sub}] += self * invM;
    }

    // Initial data from the pattern at the chart representatives.
    std::vector<double> f_prev(nsites, 0.0), f_cur(nsites, 0.0), f_next(nsites, 0.0),
        accel(nsites, 0.0);
    ZeroTracker track;
    for (int d = d_lo; d <= d_hi; ++d) {
        const NodeIndex rep_u{ch.del * d, -ch.gam * d, Sub::U};
        for (int sub = 0; sub < ns; ++sub) {
            NodeIndex rep = rep_u;
            rep.sub = static_cast<Sub>(sub);
            const int a = lpw_amplitude(p, rep);
            f_cur[site(d, sub)] = static_cast<double>(a);
            if (a == 0) track.zero_sites.push_back(site(d, sub));
            else if (a == 1 && !track.have_ref) { track.ref_site = site(d, sub); track.have_ref = true; }
        }
    }
    if (!track.have_ref)
        throw domain_error("pattern has no +1 node to serve as the oscillation reference");

    auto compute_accel = [&](const std::vector<double>& f) {
        for (int d = d_lo; d <= d_hi; ++d) {
            for (int sub = 0; sub < ns; ++sub) {
                double a = 0.0;
                for (const auto& [key, c] : coup[sub]) {
                    const int dt_ = d + key.first;
                    if (dt_ < d_lo || dt_ > d_hi) continue;
                    a += c * f[site(dt_, key.second)];
                }
                accel[site(d, sub)] = a;
            }
        }
    };

    std::vector<double> ref_series;
    ref_series.reserve(static_cast<std::size_t>(steps) + 1);
    ref_series.push_back(f_cur[track.ref_site]);
    for (long step = 0; step < steps; ++step) {
        compute_accel(f_cur);
        if (step == 0) {
            for (std::size_t i = 0; i < nsites; ++i)
                f_next[i] = f_cur[i] + 0.5 * dt * dt * accel[i];
        } else {
            for (std::size_t i = 0; i < nsites; ++i)
                f_next[i] = 2.0 * f_cur[i] - f_prev[i] + dt * dt * accel[i];
        }
        std::swap(f_prev, f_cur);
        std::swap(f_cur, f_next);
        track.observe(f_cur);
        ref_series.push_back(f_cur[track.ref_site]);
    }

    LpwEvolutionReport rep;
    rep.max_zero_drift = track.max_drift;
    rep.frequency = crossing_frequency(ref_series, dt);
    return rep;
}

// The two extended honeycomb forms reduce to three-cell / one-cell quotients.
LpwEvolutionReport evolve_quotient_conical(const LatticeSpec& spec, const LpwPattern& p, long steps,
                                           double dt) {
    const double c = spec.gx / spec.mass;
    double u[3], v[3];
    for (int d = 0; d < 3; ++d) {
        u[d] = static_cast<double>(lpw_amplitude(p, {d, 0, Sub::U}));
        v[d] = static_cast<double>(lpw_amplitude(p, {d, 0, Sub::V}));
    }
    double up[3], vp[3], un[3], vn[3];
    std::copy(u, u + 3, up);
    std::copy(v, v + 3, vp);
    std::vector<double> ref_series;
    int ref_kind = -1, ref_d = 0;
    std::vector<std::pair<int, int>> zeros;  // (kind 0=u/1=v, d)
    for (int d = 0; d < 3; ++d) {
        if (u[d] == 0.0) zeros.push_back({0, d});
        else if (u[d] == 1.0 && ref_kind < 0) { ref_kind = 0; ref_d = d; }
        if (v[d] == 0.0) zeros.push_back({1, d});
        else if (v[d] == 1.0 && ref_kind < 0) { ref_kind = 1; ref_d = d; }
    }
    if (ref_kind < 0) throw domain_error("pattern has no +1 node to serve as the oscillation reference");
    ref_series.push_back(ref_kind == 0 ? u[ref_d] : v[ref_d]);
    double drift = 0.0;
    for (long step = 0; step < steps; ++step) {
        double au[3], av[3];
        for (int d = 0; d < 3; ++d) {
            au[d] = c * (v[d] + v[(d + 2) % 3] + v[(d + 1) % 3] - 3.0 * u[d]);
            av[d] = c * (u[d] + u[(d + 1) % 3] + u[(d + 2) % 3] - 3.0 * v[d]);
        }
        for (int d = 0; d < 3; ++d) {
            if (step == 0) {
                un[d] = u[d] + 0.5 * dt * dt * au[d];
                vn[d] = v[d] + 0.5 * dt * dt * av[d];
            } else {
                un[d] = 2.0 * u[d] - up[d] + dt * dt * au[d];
                vn[d] = 2.0 * v[d] - vp[d] + dt * dt * av[d];
            }
        }
        std::copy(u, u + 3, up);
        std::copy(v, v + 3, vp);
        std::copy(un, un + 3, u);
        std::copy(vn, vn + 3, v);
        for (const auto& [kind, d] : zeros)
            drift = std::max(drift, std::abs(kind == 0 ? u[d] : v[d]));
        ref_series.push_back(ref_kind == 0 ? u[ref_d] : v[ref_d]);
    }
    LpwEvolutionReport rep;
    rep.max_zero_drift = drift;
    rep.frequency = crossing_frequency(ref_series, dt);
    return rep;
}

LpwEvolutionReport evolve_quotient_band_edge(const LatticeSpec& spec, const LpwPattern& p,
                                             long steps, double dt) {
    const double c = spec.gx / spec.mass;
    double u = static_cast<double>(lpw_amplitude(p, {0, 0, Sub::U}));
    double v = static_cast<double>(lpw_amplitude(p, {0, 0, Sub::V}));
    double up = u, vp = v;
    std::vector<double> ref_series{u};
    for (long step = 0; step < steps; ++step) {
        const double au = c * 3.0 * (v - u);
        const double av = c * 3.0 * (u - v);
        double un, vn;
        if (step == 0) {
            un = u + 0.5 * dt * dt * au;
            vn = v + 0.5 * dt * dt * av;
        } else {
            un = 2.0 * u - up + dt * dt * au;
            vn = 2.0 * v - vp + dt * dt * av;
        }
        up = u; vp = v; u = un; v = vn;
        ref_series.push_back(u);
    }
    LpwEvolutionReport rep;
    rep.max_zero_drift = 0.0;  // the uniform anti-phase form has no zero nodes
    rep.frequency = crossing_frequency(ref_series, dt);
    return rep;
}

LpwEvolutionReport evolve_finite_window(const LatticeSpec& spec, const LpwPattern& p, long steps,
                                        double dt) {
    const BBox bb = bounding_box(p.amplitudes);
    const bool chain = spec.family == Family::MSL1D;
    FieldState f = FieldState::zeros(spec, bb.m_lo - 2, bb.m_hi + 2, chain ? 0 : bb.n_lo - 2,
                                     chain ? 0 : bb.n_hi + 2);
    const int ns = sublattice_count(spec);
    for (const auto& [node, amp] : p.amplitudes) f.at(node.m, node.n, node.sub) = amp;

    std::vector<std::size_t> zero_u, zero_v;
    std::size_t ref_idx = 0;
    Sub ref_sub = Sub::U;
    bool have_ref = false;
    for (const auto& [node, amp] : p.amplitudes) {
        const std::size_t i = f.idx(node.m, node.n);
        if (amp == 0) (node.sub == Sub::U ? zero_u : zero_v).push_back(i);
        else if (amp == 1 && !have_ref) { ref_idx = i; ref_sub = node.sub; have_ref = true; }
    }
    if (!have_ref)
        throw domain_error("pattern has no +1 node to serve as the oscillation reference");

    std::vector<double> u_prev = f.u, v_prev = f.v_sub, au, av;
    std::vector<double> u_next(f.u.size()), v_next(f.v_sub.size());
    std::vector<double> ref_series;
    ref_series.reserve(static_cast<std::size_t>(steps) + 1);
    auto ref_val = [&]() { return ref_sub == Sub::U ? f.u[ref_idx] : f.v_sub[ref_idx]; };
    ref_series.push_back(ref_val());
    double drift = 0.0;
    for (long step = 0; step < steps; ++step) {
        acceleration(spec, f, au, av);
        if (step == 0) {
            for (std::size_t i = 0; i < f.u.size(); ++i)
                u_next[i] = f.u[i] + 0.5 * dt * dt * au[i];
            for (std::size_t i = 0; i < f.v_sub.size(); ++i)
                v_next[i] = f.v_sub[i] + 0.5 * dt * dt * av[i];
        } else {
            for (std::size_t i = 0; i < f.u.size(); ++i)
                u_next[i] = 2.0 * f.u[i] - u_prev[i] + dt * dt * au[i];
            for (std::size_t i = 0; i < f.v_sub.size(); ++i)
                v_next[i] = 2.0 * f.v_sub[i] - v_prev[i] + dt * dt * av[i];
        }
        std::swap(u_prev, f.u);
        std::swap(f.u, u_next);
        if (ns == 2) {
            std::swap(v_prev, f.v_sub);
            std::swap(f.v_sub, v_next);
        }
        for (std::size_t i : zero_u) drift = std::max(drift, std::abs(f.u[i]));
        for (std::size_t i : zero_v) drift = std::max(drift, std::abs(f.v_sub[i]));
        ref_series.push_back(ref_val());
    }
    LpwEvolutionReport rep;
    rep.max_zero_drift = drift;
    rep.frequency = crossing_frequency(ref_series, dt);
    return rep;
}

}  // namespace

int lpw_amplitude(const LpwPattern& pattern, const NodeIndex& node) {
    auto it = pattern.amplitudes.find(node);
    if (it != pattern.amplitudes.end()) return it->second;
    if (pattern.extension == LpwExtension::Generated) return generated_amplitude(pattern, node);
    return 0;
}

LpwPattern construct_lpw(const LatticeSpec& spec, int orientation, LpwMode mode) {
    spec.validate();
    LpwPattern p;
    p.spec = spec;
    p.orientation = orientation;
    p.mode = mode;
    p.extension = LpwExtension::Generated;
    const double invM = 1.0 / spec.mass;
    constexpr int J = 8;  // half-length of the stored representative window

    auto add = [&p](int m, int n, Sub sub) {
        NodeIndex node{m, n, sub};
        p.amplitudes[node] = generated_amplitude(p, node);
    };

    switch (spec.family) {
        case Family::MSL1D:
            throw domain_error(
                "the monatomic chain has no localized standing waveform: a chain node "
                "has no transverse neighbours against which its force could cancel");
        case Family::RCL: {
            if (spec.gx != spec.gy)
                throw domain_error(
                    "no localized waveform for unequal axis stiffnesses: a node flanking "
                    "the diagonal feels gx from one carrier neighbour and gy from the "
                    "other, so its net force vanishes only when gx == gy");
            if (mode != LpwMode::Line)
                throw domain_error("this family only supports the Line waveform mode");
            if (orientation != 0 && orientation != 1)
                throw domain_error("orientation must be 0 (diagonal m==n) or 1 (diagonal m==-n)");
            p.omega = 2.0 * std::sqrt(spec.gx * invM);
            const int dir = orientation == 0 ? 1 : -1;
            for (int j = -J; j <= J; ++j) {
                add(j, dir * j, Sub::U);
                add(j, dir * j + 1, Sub::U);
                add(j, dir * j - 1, Sub::U);
            }
            break;
        }
        case Family::RTL: {
            if (mode != LpwMode::Line)
                throw domain_error("this family only supports the Line waveform mode");
            if (orientation == 1)
                throw domain_error(
                    "the unbonded diagonal admits no localized waveform: the diagonal "
                    "springs couple nodes at m+n = +-1 straight to the carrier line, so "
                    "those flanking nodes cannot stay at rest");
            if (orientation != 0)
                throw domain_error("orientation must be 0 (the diagonal carrying the extra bonds)");
            p.omega = 2.0 * std::sqrt((spec.gx + spec.gamma) * invM);
            for (int j = -J; j <= J; ++j) {
                add(j, j, Sub::U);
                add(j, j + 1, Sub::U);
                add(j, j - 1, Sub::U);
            }
            break;
        }
        case Family::ETL: {
            if (mode != LpwMode::Line)
                throw domain_error("this family only supports the Line waveform mode");
            if (orientation < 0 || orientation > 2)
                throw domain_error("orientation must be a bond-line index 0, 1 or 2");
            p.omega = std::sqrt(8.0 * spec.gx * invM);
            for (int j = -J; j <= J; ++j) {
                if (orientation == 0) {
                    add(j, 0, Sub::U);
                    add(j, 1, Sub::U);
                    add(j, -1, Sub::U);
                } else if (orientation == 1) {
                    add(0, j, Sub::U);
                    add(1, j, Sub::U);
                    add(-1, j, Sub::U);
                } else {
                    add(j, -j, Sub::U);
                    add(j, -j + 1, Sub::U);
                    add(j, -j - 1, Sub::U);
                }
            }
            break;
        }
        case Family::HCL: {
            if (mode == LpwMode::Line)
                throw domain_error(
                    "the honeycomb lattice needs an explicit mode: LineAcoustic, "
                    "LineOptical, ConicalForm or BandEdgeForm");
            if (orientation < 0 || orientation > 2)
                throw domain_error("orientation must be a bond-direction index 0, 1 or 2");
            if (mode == LpwMode::ConicalForm) {
                p.omega = std::sqrt(3.0 * spec.gx * invM);
                for (int m = -4; m <= 4; ++m)
                    for (int n = -4; n <= 4; ++n) {
                        add(m, n, Sub::U);
                        add(m, n, Sub::V);
                    }
                break;
            }
            if (mode == LpwMode::BandEdgeForm) {
                p.omega = std::sqrt(6.0 * spec.gx * invM);
                for (int m = -3; m <= 3; ++m)
                    for (int n = -3; n <= 3; ++n) {
                        add(m, n, Sub::U);
                        add(m, n, Sub::V);
                    }
                break;
            }
            const int s = hcl_sigma(mode);
            p.omega = std::sqrt((3.0 - s) * spec.gx * invM);
            for (int j = -J; j <= J; ++j) {
                if (orientation == 0) {
                    add(j, -j, Sub::U);
                    add(j, -j, Sub::V);
                    add(j, -j + 1, Sub::U);
                    add(j, -j - 1, Sub::U);
                    add(j, -j + 1, Sub::V);
                    add(j, -j - 1, Sub::V);
                } else if (orientation == 1) {
                    add(j, 0, Sub::U);
                    add(j, -1, Sub::V);
                    add(j, -1, Sub::U);
                    add(j, 1, Sub::U);
                    add(j, 0, Sub::V);
                    add(j, -2, Sub::V);
                } else {
                    add(0, j, Sub::U);
                    add(-1, j, Sub::V);
                    add(-1, j, Sub::U);
                    add(1, j, Sub::U);
                    add(0, j, Sub::V);
                    add(-2, j, Sub::V);
                }
            }
            break;
        }
    }
    return p;
}

double verify_lpw(const LatticeSpec& spec, const LpwPattern& pattern) {
    spec.validate();
    if (pattern.amplitudes.empty()) throw domain_error("pattern has no stored nodes to verify");
    const BBox bb = bounding_box(pattern.amplitudes);
    const bool chain = spec.family == Family::MSL1D;
    if (chain) {
        for (const auto& [node, amp] : pattern.amplitudes) {
            (void)amp;
            if (node.n != 0) throw domain_error("chain patterns must have n == 0");
        }
    }
    FieldState f = FieldState::zeros(spec, bb.m_lo - 1, bb.m_hi + 1, chain ? 0 : bb.n_lo - 1,
                                     chain ? 0 : bb.n_hi + 1);
    const int ns = sublattice_count(spec);
    // Fill the window and its halo ring from the (possibly generated) pattern,
    // so the stencil at every stored node sees exact neighbour amplitudes.
    for (int m = f.m_lo - 1; m <= f.m_hi + 1; ++m)
        for (int n = f.n_lo - 1; n <= f.n_hi + 1; ++n) {
            f.u[f.idx(m, n)] = static_cast<double>(lpw_amplitude(pattern, {m, n, Sub::U}));
            if (ns == 2)
                f.v_sub[f.idx(m, n)] = static_cast<double>(lpw_amplitude(pattern, {m, n, Sub::V}));
        }
    std::vector<double> au, av;
    acceleration(spec, f, au, av);
    const double w2 = pattern.omega * pattern.omega;
    double residual = 0.0;
    for (const auto& [node, amp] : pattern.amplitudes) {
        const std::size_t i = f.idx(node.m, node.n);
        const double a = node.sub == Sub::U ? au[i] : av[i];
        residual = std::max(residual, std::abs(a + w2 * static_cast<double>(amp)));
    }
    return residual;
}

LpwEvolutionReport lpw_time_evolution_check(const LatticeSpec& spec, const LpwPattern& pattern,
                                            long steps, double dt) {
    spec.validate();
    if (steps < 1) throw domain_error("evolution check needs at least one step");
    if (!(dt > 0.0)) throw domain_error("time step must be positive");
    if (pattern.amplitudes.empty()) throw domain_error("pattern has no stored nodes to evolve");
    if (pattern.extension == LpwExtension::Generated) {
        if (pattern.mode == LpwMode::ConicalForm) return evolve_quotient_conical(spec, pattern, steps, dt);
        if (pattern.mode == LpwMode::BandEdgeForm)
            return evolve_quotient_band_edge(spec, pattern, steps, dt);
        return evolve_quotient_line(spec, pattern, steps, dt);
    }
    return evolve_finite_window(spec, pattern, steps, dt);
}

}  // namespace lattice
