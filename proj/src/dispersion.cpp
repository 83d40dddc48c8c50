#include "lattice/dispersion.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>

namespace lattice {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
const double kSqrt3 = std::sqrt(3.0);

void check_branch(const LatticeSpec& spec, Branch branch) {
    if (spec.family == Family::HCL) {
        if (branch == Branch::Single)
            throw domain_error("honeycomb lattice needs an explicit branch (AcousticI or OpticalII)");
    } else if (branch != Branch::Single) {
        throw domain_error("branch selectors AcousticI/OpticalII apply to the honeycomb lattice only");
    }
}

// |S|^2 for the honeycomb structure factor S = 1 + exp(-i k.a1) + exp(-i k.a2);
// written through half angles, valid for every k (trig identity, fully periodic).
double hcl_s2(double kx, double ky) {
    const double ct = std::cos(0.5 * kSqrt3 * kx);
    const double c = std::cos(0.5 * ky);
    return 1.0 + 4.0 * c * (ct + c);
}

double omega2(const LatticeSpec& spec, WaveVector k, Branch branch) {
    switch (spec.family) {
    case Family::MSL1D:
        return 2.0 * spec.gx * (1.0 - std::cos(k.kx)) / spec.mass;
    case Family::RCL:
        return (2.0 * spec.gx * (1.0 - std::cos(k.kx)) +
                2.0 * spec.gy * (1.0 - std::cos(spec.l * k.ky))) / spec.mass;
    case Family::ETL: {
        const double c = std::cos(0.5 * k.kx);
        const double d = std::cos(0.5 * kSqrt3 * k.ky);
        return spec.gx * (8.0 - 4.0 * c * (c + d)) / spec.mass;
    }
    case Family::RTL:
        return (2.0 * spec.gx * (2.0 - std::cos(k.kx) - std::cos(k.ky)) +
                2.0 * spec.gamma * (1.0 - std::cos(k.kx + k.ky))) / spec.mass;
    case Family::HCL: {
        const double s = std::sqrt(std::max(0.0, hcl_s2(k.kx, k.ky)));
        const double w2 = spec.gx * (3.0 + (branch == Branch::OpticalII ? s : -s)) / spec.mass;
        return std::max(0.0, w2);
    }
    }
    throw domain_error("unknown lattice family");
}

} // namespace

double omega(const LatticeSpec& spec, WaveVector k, Branch branch) {
    spec.validate();
    check_branch(spec, branch);
    return std::sqrt(omega2(spec, k, branch));
}

GroupVelocity group_velocity(const LatticeSpec& spec, WaveVector k, Branch branch) {
    spec.validate();
    check_branch(spec, branch);

    const double w = std::sqrt(omega2(spec, k, branch));
    const double wscale = std::sqrt(spec.gx / spec.mass);
    const double vscale = wscale;

    GroupVelocity gv;
    if (w < 1e-12 * wscale) {
        gv.smooth = false; // apex of the acoustic cone
        return gv;
    }

    switch (spec.family) {
    case Family::MSL1D: {
        const double half = 0.5 * k.kx;
        const double sgn = std::sin(half) >= 0.0 ? 1.0 : -1.0;
        gv.cg.x = wscale * std::cos(half) * sgn;
        gv.cg.y = 0.0;
        break;
    }
    case Family::RCL:
        gv.cg.x = spec.gx * std::sin(k.kx) / (spec.mass * w);
        gv.cg.y = spec.gy * spec.l * std::sin(spec.l * k.ky) / (spec.mass * w);
        break;
    case Family::ETL: {
        const double c = std::cos(0.5 * k.kx);
        const double d = std::cos(0.5 * kSqrt3 * k.ky);
        const double f = spec.gx / spec.mass;
        gv.cg.x = f * (2.0 * c + d) * std::sin(0.5 * k.kx) / w;
        gv.cg.y = f * kSqrt3 * c * std::sin(0.5 * kSqrt3 * k.ky) / w;
        break;
    }
    case Family::RTL: {
        const double sd = std::sin(k.kx + k.ky);
        gv.cg.x = (spec.gx * std::sin(k.kx) + spec.gamma * sd) / (spec.mass * w);
        gv.cg.y = (spec.gx * std::sin(k.ky) + spec.gamma * sd) / (spec.mass * w);
        break;
    }
    case Family::HCL: {
        const double s2 = hcl_s2(k.kx, k.ky);
        const double s = std::sqrt(std::max(0.0, s2));
        if (s < 1e-9) {
            gv.smooth = false; // conical apex: the two sheets meet, gradient undefined
            return gv;
        }
        const double ct = std::cos(0.5 * kSqrt3 * k.kx);
        const double st = std::sin(0.5 * kSqrt3 * k.kx);
        const double c = std::cos(0.5 * k.ky);
        const double sy = std::sin(0.5 * k.ky);
        const double f = spec.gx / spec.mass;
        const double sign = branch == Branch::OpticalII ? -1.0 : 1.0;
        gv.cg.x = sign * f * kSqrt3 * c * st / (2.0 * s * w);
        gv.cg.y = sign * f * sy * (ct + 2.0 * c) / (2.0 * s * w);
        break;
    }
    }

    const double speed = std::hypot(gv.cg.x, gv.cg.y);
    if (speed < 1e-9 * vscale) {
        gv.smooth = false; // stationary point of the branch
        gv.beta = 0.0;
        return gv;
    }
    gv.beta = std::atan2(gv.cg.y, gv.cg.x);
    return gv;
}

std::vector<DispersionSample> group_velocity_field(const LatticeSpec& spec,
                                                   Branch branch, int res) {
    spec.validate();
    check_branch(spec, branch);
    if (res < 2) throw domain_error("sampling resolution must be at least 2");
    const Vec2 hw = zone_half_widths(spec);

    std::vector<DispersionSample> out;
    const bool oned = spec.family == Family::MSL1D;
    const int ny = oned ? 1 : res;
    out.reserve(static_cast<std::size_t>(res) * ny);
    for (int i = 0; i < res; ++i) {
        const double kx = -hw.x + 2.0 * hw.x * i / (res - 1);
        for (int j = 0; j < ny; ++j) {
            const double ky = oned ? 0.0 : -hw.y + 2.0 * hw.y * j / (res - 1);
            DispersionSample smp;
            smp.k = {kx, ky};
            smp.branch = branch;
            smp.omega = omega(spec, smp.k, branch);
            const GroupVelocity gv = group_velocity(spec, smp.k, branch);
            smp.cg = gv.cg;
            smp.beta = gv.beta;
            smp.smooth = gv.smooth;
            out.push_back(smp);
        }
    }
    return out;
}

Band band_edges(const LatticeSpec& spec) {
    spec.validate();
    const double invM = 1.0 / spec.mass;
    Band b;
    switch (spec.family) {
    case Family::MSL1D:
        b.hi = 2.0 * std::sqrt(spec.gx * invM);
        break;
    case Family::RCL:
        b.hi = std::sqrt((4.0 * spec.gx + 4.0 * spec.gy) * invM);
        break;
    case Family::HCL:
        b.hi = std::sqrt(6.0 * spec.gx * invM);
        break;
    case Family::ETL:
        b.hi = 3.0 * std::sqrt(spec.gx * invM);
        break;
    case Family::RTL:
        if (spec.gamma <= 0.5 * spec.gx)
            b.hi = std::sqrt(8.0 * spec.gx * invM);
        else
            b.hi = std::sqrt((4.0 * spec.gx + 4.0 * spec.gamma +
                              spec.gx * spec.gx / spec.gamma) * invM);
        break;
    }
    return b;
}

namespace {

std::vector<double> four_rays(double beta) {
    return {beta, kPi - beta, kPi + beta, 2.0 * kPi - beta};
}

std::vector<double> six_rays(double offset) {
    std::vector<double> r(6);
    for (int j = 0; j < 6; ++j) r[j] = offset + j * kPi / 3.0;
    return r;
}

} // namespace

std::vector<ResonanceEntry> resonance_catalog(const LatticeSpec& spec) {
    spec.validate();
    const double invM = 1.0 / spec.mass;
    const double w0 = std::sqrt(spec.gx * invM);
    std::vector<ResonanceEntry> cat;

    switch (spec.family) {
    case Family::MSL1D:
        cat.push_back({2.0 * w0, ResonanceKind::BandEdge, {{kPi, 0.0}, {-kPi, 0.0}}, {}});
        break;

    case Family::RCL: {
        const double hy = kPi / spec.l;
        // Straight-contour slopes at the angular points: the frequency surface
        // opens as a cone gx*qx^2 = gy*l^2*qy^2 there, so the normals (and the
        // energy rays) make the angle atan(l*sqrt(gy/gx)) with the x axis.
        const double beta = std::atan(spec.l * std::sqrt(spec.gy / spec.gx));
        const double wx = 2.0 * std::sqrt(spec.gx * invM);
        const double wy = 2.0 * std::sqrt(spec.gy * invM);
        if (std::abs(spec.gx - spec.gy) < 1e-12 * spec.gx) {
            cat.push_back({wx, ResonanceKind::InteriorLPW,
                           {{kPi, 0.0}, {-kPi, 0.0}, {0.0, hy}, {0.0, -hy}},
                           four_rays(beta)});
        } else {
            ResonanceEntry ex{wx, ResonanceKind::InteriorLPW, {{kPi, 0.0}, {-kPi, 0.0}}, four_rays(beta)};
            ResonanceEntry ey{wy, ResonanceKind::InteriorLPW, {{0.0, hy}, {0.0, -hy}}, four_rays(beta)};
            if (wy < wx) { cat.push_back(ey); cat.push_back(ex); }
            else { cat.push_back(ex); cat.push_back(ey); }
        }
        cat.push_back({std::sqrt((4.0 * spec.gx + 4.0 * spec.gy) * invM), ResonanceKind::BandEdge,
                       {{kPi, hy}, {-kPi, hy}, {kPi, -hy}, {-kPi, -hy}}, {}});
        break;
    }

    case Family::HCL: {
        const double hx = 2.0 * kPi / kSqrt3;
        const std::vector<WaveVector> hex = {
            {hx / 2.0, kPi},  {-hx / 2.0, kPi},  {hx / 2.0, -kPi},
            {-hx / 2.0, -kPi}, {hx, 0.0}, {-hx, 0.0}};
        const std::vector<WaveVector> cones = {
            {hx, 2.0 * kPi / 3.0}, {hx, -2.0 * kPi / 3.0},
            {-hx, 2.0 * kPi / 3.0}, {-hx, -2.0 * kPi / 3.0}};
        cat.push_back({std::sqrt(2.0) * w0, ResonanceKind::InteriorLPW, hex, six_rays(kPi / 6.0)});
        cat.push_back({std::sqrt(3.0) * w0, ResonanceKind::ConicalPoint, cones, {}});
        cat.push_back({2.0 * w0, ResonanceKind::InteriorLPW, hex, six_rays(kPi / 6.0)});
        cat.push_back({std::sqrt(6.0) * w0, ResonanceKind::BandEdge, {{0.0, 0.0}}, {}});
        break;
    }

    case Family::ETL: {
        const double hy = 2.0 * kPi / kSqrt3;
        const std::vector<WaveVector> hex = {
            {kPi, hy / 2.0},  {-kPi, hy / 2.0},  {kPi, -hy / 2.0},
            {-kPi, -hy / 2.0}, {0.0, hy}, {0.0, -hy}};
        cat.push_back({std::sqrt(8.0) * w0, ResonanceKind::InteriorLPW, hex, six_rays(0.0)});
        cat.push_back({3.0 * w0, ResonanceKind::BandEdge,
                       {{2.0 * kPi / 3.0, hy}, {-2.0 * kPi / 3.0, hy},
                        {2.0 * kPi / 3.0, -hy}, {-2.0 * kPi / 3.0, -hy}}, {}});
        break;
    }

    case Family::RTL: {
        const double wd = 2.0 * std::sqrt((spec.gx + spec.gamma) * invM);
        std::vector<double> beams;
        if (spec.gamma == 0.0)
            beams = four_rays(kPi / 4.0);                 // plain square lattice
        else if (std::abs(spec.gamma - spec.gx) < 1e-12 * spec.gx)
            beams = {0.0, kPi / 4.0, kPi / 2.0, kPi, 5.0 * kPi / 4.0, 3.0 * kPi / 2.0};
        else
            beams = {kPi / 4.0, 5.0 * kPi / 4.0};         // only the main diagonal carries flat contours
        cat.push_back({wd, ResonanceKind::InteriorLPW,
                       {{kPi, 0.0}, {-kPi, 0.0}, {0.0, kPi}, {0.0, -kPi}}, beams});
        if (spec.gamma <= 0.5 * spec.gx) {
            cat.push_back({std::sqrt(8.0 * spec.gx * invM), ResonanceKind::BandEdge,
                           {{kPi, kPi}, {-kPi, kPi}, {kPi, -kPi}, {-kPi, -kPi}}, {}});
        } else {
            const double th = std::acos(-spec.gx / (2.0 * spec.gamma));
            cat.push_back({band_edges(spec).hi, ResonanceKind::BandEdge,
                           {{th, th}, {-th, -th}}, {}});
        }
        break;
    }
    }
    return cat;
}

std::vector<double> beaming_directions(const LatticeSpec& spec, double omega_target) {
    const auto cat = resonance_catalog(spec);
    const double scale = band_edges(spec).hi;
    for (const auto& e : cat)
        if (e.kind == ResonanceKind::InteriorLPW &&
            std::abs(e.omega - omega_target) <= 1e-9 * std::max(1.0, scale))
            return e.beaming;
    throw domain_error("frequency does not match an interior resonance of this family");
}

// --- equifrequency contour extraction -------------------------------------
//
// Marching squares over the zone rectangle extended by one cell on every side,
// so contours hugging (or lying exactly on) the zone boundary are still seen as
// sign changes. Grid values exactly at the target count as the negative side,
// which keeps the case table consistent when the level set passes through grid
// points. Saddle cells are disambiguated by the sign at the cell centre, and
// every edge crossing is refined by bisection along the grid edge.

namespace {

struct Segment {
    std::int64_t a, b; // edge ids
};

WaveVector lerp(WaveVector A, WaveVector B, double t) {
    return {A.kx + (B.kx - A.kx) * t, A.ky + (B.ky - A.ky) * t};
}

WaveVector refine_crossing(const LatticeSpec& spec, Branch branch, double target,
                           WaveVector A, WaveVector B, bool pa) {
    // invariant: pos(A) == pa, pos(B) == !pa, pos(x) := omega(x) > target
    double lo = 0.0, hi = 1.0;
    for (int it = 0; it < 60; ++it) {
        const double mid = 0.5 * (lo + hi);
        const WaveVector km = lerp(A, B, mid);
        const bool pm = omega(spec, km, branch) > target;
        if (pm == pa) lo = mid; else hi = mid;
    }
    return lerp(A, B, 0.5 * (lo + hi));
}

} // namespace

std::vector<ContourPolyline> equifrequency_contour(const LatticeSpec& spec, double target,
                                                   Branch branch, int res) {
    spec.validate();
    check_branch(spec, branch);
    if (!(target >= 0.0) || !std::isfinite(target))
        throw domain_error("contour frequency must be finite and nonnegative");
    if (res < 8) throw domain_error("contour resolution must be at least 8");

    const Band band = band_edges(spec);
    const double tol = 1e-9 * std::max(1.0, band.hi);

    // Degenerate levels: at a band edge or a conical-point frequency the level
    // set on a touching branch collapses to isolated points.
    {
        std::vector<ContourPolyline> degen;
        for (const auto& e : resonance_catalog(spec)) {
            if (e.kind == ResonanceKind::InteriorLPW) continue;
            if (std::abs(e.omega - target) > tol) continue;
            for (const auto& kp : e.kpoints) {
                if (std::abs(omega(spec, kp, branch) - target) < 1e-6) {
                    ContourPolyline p;
                    p.omega = target;
                    p.branch = branch;
                    p.closed = false;
                    p.vertices = {kp};
                    degen.push_back(std::move(p));
                }
            }
        }
        if (!degen.empty()) return degen;
    }
    if (target > band.hi + tol) return {};

    const Vec2 hw = zone_half_widths(spec);

    if (spec.family == Family::MSL1D) {
        std::vector<ContourPolyline> out;
        if (target < tol) {
            out.push_back({target, branch, false, {{0.0, 0.0}}});
            return out;
        }
        const double arg = target / (2.0 * std::sqrt(spec.gx / spec.mass));
        const double kc = 2.0 * std::asin(std::min(1.0, arg));
        out.push_back({target, branch, false, {{kc, 0.0}}});
        out.push_back({target, branch, false, {{-kc, 0.0}}});
        return out;
    }

    const double hx = 2.0 * hw.x / res;
    const double hy = 2.0 * hw.y / res;
    const int nx = res + 3; // grid point indices ix in [-1, res+1]
    const int ny = res + 3;

    auto kxat = [&](int ix) { return -hw.x + ix * hx; };
    auto kyat = [&](int iy) { return -hw.y + iy * hy; };

    std::vector<double> f(static_cast<std::size_t>(nx) * ny);
    for (int ix = -1; ix <= res + 1; ++ix)
        for (int iy = -1; iy <= res + 1; ++iy)
            f[static_cast<std::size_t>(ix + 1) * ny + (iy + 1)] =
                omega(spec, {kxat(ix), kyat(iy)}, branch) - target;

    auto pos = [&](int ix, int iy) {
        return f[static_cast<std::size_t>(ix + 1) * ny + (iy + 1)] > 0.0;
    };

    // edge ids: vertical edge (ix,iy)-(ix,iy+1) -> 2*key, horizontal -> 2*key+1
    auto vkey = [&](int ix, int iy) {
        return 2 * (static_cast<std::int64_t>(ix + 1) * (res + 4) + (iy + 1));
    };
    auto hkey = [&](int ix, int iy) {
        return 2 * (static_cast<std::int64_t>(ix + 1) * (res + 4) + (iy + 1)) + 1;
    };

    std::unordered_map<std::int64_t, int> vert_of_edge;
    std::vector<WaveVector> verts;
    std::vector<std::int64_t> vert_edge_id;
    std::vector<Segment> segs;

    auto vertex_on = [&](std::int64_t key, int ix0, int iy0, int ix1, int iy1) {
        auto it = vert_of_edge.find(key);
        if (it != vert_of_edge.end()) return it->second;
        const WaveVector A{kxat(ix0), kyat(iy0)};
        const WaveVector B{kxat(ix1), kyat(iy1)};
        const WaveVector r = refine_crossing(spec, branch, target, A, B, pos(ix0, iy0));
        const int id = static_cast<int>(verts.size());
        verts.push_back(r);
        vert_edge_id.push_back(key);
        vert_of_edge.emplace(key, id);
        return id;
    };

    for (int ix = -1; ix <= res; ++ix) {
        for (int iy = -1; iy <= res; ++iy) {
            const bool p00 = pos(ix, iy), p10 = pos(ix + 1, iy);
            const bool p01 = pos(ix, iy + 1), p11 = pos(ix + 1, iy + 1);
            int ncross = (p00 != p10) + (p10 != p11) + (p01 != p11) + (p00 != p01);
            if (ncross == 0) continue;

            // crossing vertex on each crossed cell edge
            int vb = -1, vr = -1, vt = -1, vl = -1;
            if (p00 != p10) vb = vertex_on(hkey(ix, iy), ix, iy, ix + 1, iy);
            if (p10 != p11) vr = vertex_on(vkey(ix + 1, iy), ix + 1, iy, ix + 1, iy + 1);
            if (p01 != p11) vt = vertex_on(hkey(ix, iy + 1), ix, iy + 1, ix + 1, iy + 1);
            if (p00 != p01) vl = vertex_on(vkey(ix, iy), ix, iy, ix, iy + 1);

            if (ncross == 2) {
                int a = -1, b = -1;
                for (int v : {vb, vr, vt, vl})
                    if (v >= 0) { if (a < 0) a = v; else b = v; }
                segs.push_back({a, b});
            } else { // saddle: pair crossings using the centre sign
                const WaveVector c{kxat(ix) + 0.5 * hx, kyat(iy) + 0.5 * hy};
                const bool pc = omega(spec, c, branch) - target > 0.0;
                // corners (p00,p11) vs (p10,p01) carry opposite signs here
                if (p00 == pc) {
                    // cut off the bottom-right and top-left corners
                    segs.push_back({vb, vr});
                    segs.push_back({vt, vl});
                } else {
                    segs.push_back({vl, vb});
                    segs.push_back({vr, vt});
                }
            }
        }
    }

    // assemble polylines: vertices are graph nodes, segments are graph edges
    std::vector<std::vector<int>> adj(verts.size());
    for (int si = 0; si < static_cast<int>(segs.size()); ++si) {
        adj[segs[si].a].push_back(si);
        adj[segs[si].b].push_back(si);
    }
    std::vector<char> seg_used(segs.size(), 0);

    auto walk = [&](int start) {
        std::vector<int> chain{start};
        int cur = start;
        while (true) {
            int next_seg = -1;
            for (int si : adj[cur])
                if (!seg_used[si]) { next_seg = si; break; }
            if (next_seg < 0) break;
            seg_used[next_seg] = 1;
            cur = segs[next_seg].a == cur ? segs[next_seg].b : segs[next_seg].a;
            if (cur == start) return std::make_pair(chain, true);
            chain.push_back(cur);
        }
        return std::make_pair(chain, false);
    };

    std::vector<ContourPolyline> out;
    auto emit = [&](const std::vector<int>& chain, bool closed) {
        ContourPolyline p;
        p.omega = target;
        p.branch = branch;
        p.closed = closed;
        for (int v : chain) p.vertices.push_back(verts[v]);
        // clip stray out-of-zone tails picked up in the margin cells
        auto outside = [&](const WaveVector& k) { return !in_zone(spec, k, 1e-9); };
        while (!p.vertices.empty() && outside(p.vertices.front()))
            p.vertices.erase(p.vertices.begin());
        while (!p.vertices.empty() && outside(p.vertices.back()))
            p.vertices.pop_back();
        if (p.vertices.size() >= 2) out.push_back(std::move(p));
    };

    // open chains first (their ends have an odd number of free segments)
    for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
        int free_deg = 0;
        for (int si : adj[v]) if (!seg_used[si]) ++free_deg;
        if (free_deg == 1) {
            auto [chain, closed] = walk(v);
            if (chain.size() >= 2) emit(chain, closed);
        }
    }
    for (int v = 0; v < static_cast<int>(verts.size()); ++v) {
        for (int si : adj[v])
            if (!seg_used[si]) {
                auto [chain, closed] = walk(v);
                if (chain.size() >= 2) emit(chain, closed);
            }
    }
    return out;
}

} // namespace lattice
