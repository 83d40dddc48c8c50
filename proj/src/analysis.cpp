#include "lattice/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numeric>

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

namespace lattice {

namespace {

double probe_step(const ProbeRecord& probe) {
    if (probe.times.size() < 2) throw domain_error("probe series too short to analyse");
    if (probe.times.size() != probe.displacements.size())
        throw domain_error("probe series has mismatched time and displacement lengths");
    const double dt = probe.times[1] - probe.times[0];
    if (!(dt > 0.0)) throw domain_error("probe series must advance in time");
    return dt;
}

// Recursive half of the adaptive Simpson rule.
template <class F>
double simpson_refine(const F& f, double a, double m, double b, double fa, double fm, double fb,
                      double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = f(lm), frm = f(rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (depth <= 0 || std::abs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    return simpson_refine(f, a, lm, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson_refine(f, m, rm, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

template <class F>
double integrate(const F& f, double a, double b, double tol) {
    const double m = 0.5 * (a + b);
    const double fa = f(a), fm = f(m), fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson_refine(f, a, m, b, fa, fm, fb, whole, tol, 48);
}

}  // namespace

EnvelopeSeries envelope(const ProbeRecord& probe, double omega0) {
    if (!(omega0 > 0.0)) throw domain_error("envelope extraction needs omega0 > 0");
    const double dt = probe_step(probe);
    const double samples_per_period = 2.0 * kPi / omega0 / dt;
    if (samples_per_period < 20.0 - 1e-9)
        throw domain_error("envelope extraction needs at least 20 samples per drive period");
    const std::size_t P = static_cast<std::size_t>(std::llround(samples_per_period));

    EnvelopeSeries out;
    out.node = probe.node;
    const std::size_t N = probe.times.size();
    for (std::size_t j = 0; (j + 1) * P <= N; ++j) {
        const std::size_t lo = j * P, hi = (j + 1) * P - 1;
        double peak = 0.0;
        for (std::size_t k = lo; k <= hi; ++k)
            peak = std::max(peak, std::abs(probe.displacements[k]));
        out.times.push_back(0.5 * (probe.times[lo] + probe.times[hi]));
        out.amplitudes.push_back(peak);
    }
    return out;
}

GrowthFit growth_exponent(const EnvelopeSeries& series, double t_begin, double t_end) {
    if (!(t_begin < t_end)) throw domain_error("growth fit needs t_begin < t_end");
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < series.times.size(); ++i) {
        const double t = series.times[i];
        if (t < t_begin || t > t_end) continue;
        if (!(t > 0.0)) throw domain_error("growth fit needs positive window times");
        const double a = series.amplitudes[i];
        if (!(a > 0.0))
            throw domain_error("growth fit needs strictly positive envelope amplitudes");
        xs.push_back(std::log(t));
        ys.push_back(std::log(a));
    }
    if (xs.size() < 10)
        throw domain_error("growth fit needs at least ten envelope periods in range");

    const double n = static_cast<double>(xs.size());
    const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / n;
    const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double dx = xs[i] - mx, dy = ys[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (!(sxx > 0.0)) throw domain_error("growth fit needs a spread of window times");

    GrowthFit fit;
    fit.node = series.node;
    fit.t_begin = t_begin;
    fit.t_end = t_end;
    fit.exponent = sxy / sxx;
    fit.r_squared = 1.0;
    // A variance at rounding-noise level means the series is constant: the
    // degenerate fit is exact, not meaningless.
    const double y_scale = std::abs(my) + 1.0;
    if (syy > 1e-26 * n * y_scale * y_scale) {
        const double ss_res = std::max(0.0, syy - fit.exponent * sxy);
        fit.r_squared = 1.0 - ss_res / syy;
    }
    return fit;
}

bool BeamingMap::above(NodeIndex node) const {
    if (node.m < m_lo || node.m > m_hi || node.n < n_lo || node.n > n_hi) return false;
    const int s = node.sub == Sub::V ? 1 : 0;
    if (s >= nsub) return false;
    const std::size_t j =
        (static_cast<std::size_t>(s) * rows() + static_cast<std::size_t>(node.m - m_lo)) * cols() +
        static_cast<std::size_t>(node.n - n_lo);
    return mask[j] != 0;
}

std::size_t BeamingMap::count_above() const {
    return static_cast<std::size_t>(
        std::count_if(mask.begin(), mask.end(), [](unsigned char c) { return c != 0; }));
}

BeamingMap beaming_map(const LatticeSpec& spec, const Snapshot& snap, double threshold,
                       double source_amplitude, Vec2 origin) {
    spec.validate();
    if (!(threshold > 0.0 && threshold < 1.0))
        throw domain_error("beaming threshold must lie strictly between 0 and 1");
    if (!(source_amplitude > 0.0))
        throw domain_error("beaming analysis needs a positive source amplitude");
    const FieldState& f = snap.field;
    if (snap.env_u.size() != f.u.size())
        throw domain_error("snapshot carries no envelope data");
    if (f.nsub == 2 && snap.env_v.size() != f.v_sub.size())
        throw domain_error("snapshot carries no envelope data");

    BeamingMap bm;
    bm.t = snap.t;
    bm.threshold = threshold;
    bm.m_lo = f.m_lo;
    bm.m_hi = f.m_hi;
    bm.n_lo = f.n_lo;
    bm.n_hi = f.n_hi;
    bm.nsub = f.nsub;
    bm.mask.assign(static_cast<std::size_t>(f.nsub) * bm.rows() * bm.cols(), 0);

    // One-degree angular histogram over masked nodes beyond a hard inner
    // exclusion radius. The isotropic near field that surrounds any point
    // source would otherwise fill every bin and drown genuine beams; beams
    // are precisely the structures that keep nodes masked far out.
    constexpr int kBins = 360;
    constexpr double kInnerRadius = 10.0;
    const double cut = threshold * source_amplitude;
    struct MaskedNode {
        double e, dx, dy, r;
    };
    std::vector<MaskedNode> nodes;
    double r_max = 0.0;

    for (int s = 0; s < f.nsub; ++s) {
        const auto& env = (s == 0) ? snap.env_u : snap.env_v;
        const Sub sub = (s == 0) ? Sub::U : Sub::V;
        for (int m = f.m_lo; m <= f.m_hi; ++m)
            for (int n = f.n_lo; n <= f.n_hi; ++n) {
                const double e = env[f.idx(m, n)];
                if (e < cut) continue;
                const std::size_t j =
                    (static_cast<std::size_t>(s) * bm.rows() +
                     static_cast<std::size_t>(m - bm.m_lo)) * bm.cols() +
                    static_cast<std::size_t>(n - bm.n_lo);
                bm.mask[j] = 1;
                const Vec2 p = node_position(spec, {m, n, sub});
                const double dx = p.x - origin.x, dy = p.y - origin.y;
                const double r = std::sqrt(dx * dx + dy * dy);
                if (r <= kInnerRadius) continue;  // hard near-field exclusion
                nodes.push_back({e, dx, dy, r});
                r_max = std::max(r_max, r);
            }
    }

    // Two per-bin signals, both of which a beam bin must carry:
    //  * reach  — farthest masked radius in the bin. Beams keep nodes masked
    //    far beyond the isotropic background, so their reach stands out; an
    //    anisotropic but merely elongated blob varies smoothly and stays
    //    within the 2x-median bar.
    //  * far mean envelope — mean envelope among nodes beyond the adaptive
    //    cut. This rejects bins whose large reach comes from in-band focusing
    //    (caustic directions brighten by well under 2x).
    std::vector<double> env_sum(kBins, 0.0), reach(kBins, 0.0);
    std::vector<double> far_sum(kBins, 0.0);
    std::vector<int> far_count(kBins, 0);
    std::vector<std::complex<double>> zdir(kBins, {0.0, 0.0});
    const double r_cut = std::max(kInnerRadius, r_max / 3.0);
    for (const MaskedNode& nd : nodes) {
        const double th = std::atan2(nd.dy, nd.dx);
        int b = static_cast<int>(std::floor((th + kPi) / (2.0 * kPi) * kBins));
        b = std::clamp(b, 0, kBins - 1);
        env_sum[b] += nd.e;
        reach[b] = std::max(reach[b], nd.r);
        zdir[b] += nd.e * std::complex<double>(nd.dx, nd.dy) / nd.r;
        if (nd.r > r_cut) {
            far_sum[b] += nd.e;
            far_count[b] += 1;
        }
    }
    std::vector<double> far_mean(kBins, 0.0);
    for (int b = 0; b < kBins; ++b)
        if (far_count[b] > 0) far_mean[b] = far_sum[b] / far_count[b];

    const auto median_of = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        return 0.5 * (v[v.size() / 2 - 1] + v[v.size() / 2]);
    };
    const double med_reach = median_of(reach);
    const double med_far = median_of(far_mean);

    // A beam-bearing bin must clear both relative bars AND extend to at least
    // twice the inner exclusion radius. The absolute floor matters when the
    // masked set barely crosses the inner radius (a compact growing spot whose
    // fringe pokes past it): most bins are then empty, both medians collapse
    // to zero, and the relative bars alone would bless every occupied bin.
    std::vector<char> sig(kBins, 0);
    int nsig = 0;
    for (int b = 0; b < kBins; ++b)
        if (reach[b] >= 2.0 * kInnerRadius && reach[b] > 2.0 * med_reach &&
            far_mean[b] > 0.0 && far_mean[b] > 2.0 * med_far) {
            sig[b] = 1;
            ++nsig;
        }
    if (nsig == 0 || nsig == kBins) return bm;  // empty or isotropic

    // Group significant bins into arcs, tolerating gaps of up to kGapBins
    // insignificant bins inside one arc: a beam's angular footprint thins
    // with radius, so its fringes can dip below significance without marking
    // a new beam. The sweep starts after the widest circular gap; if no gap
    // exceeds the tolerance the significant bins ring the whole circle and
    // carry no direction.
    constexpr int kGapBins = 8;
    std::vector<int> sig_bins;
    for (int b = 0; b < kBins; ++b)
        if (sig[b]) sig_bins.push_back(b);
    const int nbins = static_cast<int>(sig_bins.size());
    int widest_gap = -1, start_idx = 0;
    for (int i = 0; i < nbins; ++i) {
        const int next = sig_bins[(i + 1) % nbins];
        int gap = (next - sig_bins[i] + kBins) % kBins;
        if (gap == 0) gap = kBins;  // lone bin: the gap is the full circle
        if (gap > widest_gap) {
            widest_gap = gap;
            start_idx = (i + 1) % nbins;
        }
    }
    if (widest_gap <= kGapBins) return bm;  // spread around the circle

    struct Arc {
        std::complex<double> z{0.0, 0.0};
        double w = 0.0;
    };
    std::vector<Arc> arcs;
    int prev_bin = -1;
    for (int i = 0; i < nbins; ++i) {
        const int b = sig_bins[(start_idx + i) % nbins];
        const int gap = prev_bin < 0 ? kBins : (b - prev_bin + kBins) % kBins;
        if (gap > kGapBins) arcs.emplace_back();
        arcs.back().z += zdir[b];
        arcs.back().w += env_sum[b];
        prev_bin = b;
    }

    double wmax = 0.0;
    for (const Arc& a : arcs) wmax = std::max(wmax, a.w);
    struct Ray {
        double angle, weight;
    };
    std::vector<Ray> rays;
    for (const Arc& a : arcs) {
        if (a.w < 0.05 * wmax) continue;  // stray speckle, not a beam
        rays.push_back({std::atan2(a.z.imag(), a.z.real()), a.w});
    }
    std::sort(rays.begin(), rays.end(),
              [](const Ray& a, const Ray& b) { return a.angle < b.angle; });
    for (const Ray& r : rays) {
        bm.ray_angles.push_back(r.angle);
        bm.ray_weights.push_back(r.weight);
    }
    return bm;
}

double fresnel_c(double x) {
    if (x == 0.0) return 0.0;
    const double s = x < 0.0 ? -1.0 : 1.0;
    return s * integrate([](double t) { return std::cos(0.5 * kPi * t * t); }, 0.0,
                         std::abs(x), 1e-12);
}

double fresnel_s(double x) {
    if (x == 0.0) return 0.0;
    const double s = x < 0.0 ? -1.0 : 1.0;
    return s * integrate([](double t) { return std::sin(0.5 * kPi * t * t); }, 0.0,
                         std::abs(x), 1e-12);
}

double front_profile_f1(double lambda) {
    if (lambda < 0.0) throw domain_error("front profile takes a non-negative argument");
    const double xi = lambda / std::sqrt(2.0 * kPi);
    const double C = fresnel_c(xi), S = fresnel_s(xi);
    return 0.5 * (-(0.5 * lambda) * (C - S) +
                  std::cos(0.25 * kPi - 0.25 * lambda * lambda) / std::sqrt(kPi));
}

double front_profile_f2(double lambda) {
    if (lambda < 0.0) throw domain_error("front profile takes a non-negative argument");
    const double xi = lambda / std::sqrt(2.0 * kPi);
    const double C = fresnel_c(xi), S = fresnel_s(xi);
    return 0.5 * ((0.5 * lambda) * (1.0 - C - S) -
                  std::sin(0.25 * kPi - 0.25 * lambda * lambda) / std::sqrt(kPi));
}

double asymptotic_1d(int m, double t) {
    if (!(t > 0.0)) throw domain_error("asymptotic chain response needs t > 0");
    const double lambda = 2.0 * std::abs(m) / std::sqrt(t);
    const double phase = 2.0 * t - kPi * m;
    return std::sqrt(t) * (front_profile_f2(lambda) * std::sin(phase) -
                           front_profile_f1(lambda) * std::cos(phase));
}

double asymptotic_amplitude_1d(int m, double t) {
    if (!(t > 0.0)) throw domain_error("asymptotic chain response needs t > 0");
    const double lambda = 2.0 * std::abs(m) / std::sqrt(t);
    return std::sqrt(t) * std::hypot(front_profile_f1(lambda), front_profile_f2(lambda));
}

double front_scaling(const LatticeSpec& spec, const std::vector<Snapshot>& snaps) {
    spec.validate();
    if (spec.family != Family::MSL1D)
        throw domain_error("front-collapse analysis applies to chain snapshots");
    if (snaps.size() < 2)
        throw domain_error("front-collapse analysis needs at least two snapshots");

    constexpr int kPts = 81;
    constexpr double kLMax = 4.0;
    std::vector<std::vector<double>> profiles;
    for (const Snapshot& s : snaps) {
        if (!(s.t > 0.0)) throw domain_error("front-collapse snapshots need t > 0");
        if (s.env_u.size() != s.field.u.size())
            throw domain_error("snapshot carries no envelope data");
        const double rt = std::sqrt(s.t);
        std::vector<double> e(kPts);
        for (int i = 0; i < kPts; ++i) {
            const double lam = kLMax * i / (kPts - 1.0);
            const double mr = 0.5 * lam * rt;
            const int m0 = static_cast<int>(std::floor(mr));
            const int m1 = m0 + 1;
            if (m1 > s.field.m_hi || -m1 < s.field.m_lo)
                throw domain_error("snapshot window too small for front-collapse sampling");
            const double frac = mr - m0;
            const auto sym = [&](int m) {
                return 0.5 * (s.env_u[s.field.idx(m, 0)] + s.env_u[s.field.idx(-m, 0)]);
            };
            e[i] = ((1.0 - frac) * sym(m0) + frac * sym(m1)) / rt;
        }
        double norm = 0.0;
        for (double v : e) norm += v * v;
        norm = std::sqrt(norm);
        if (!(norm > 0.0)) throw domain_error("snapshot envelope vanishes on the front grid");
        for (double& v : e) v /= norm;
        profiles.push_back(std::move(e));
    }

    double worst = 0.0;
    for (std::size_t i = 0; i < profiles.size(); ++i)
        for (std::size_t j = i + 1; j < profiles.size(); ++j) {
            double d2 = 0.0;
            for (int k = 0; k < kPts; ++k) {
                const double d = profiles[i][k] - profiles[j][k];
                d2 += d * d;
            }
            worst = std::max(worst, std::sqrt(d2));
        }
    return worst;
}

RatioSeries sublattice_ratio(const LatticeSpec& spec, const ProbeRecord& u_probe,
                             const ProbeRecord& v_probe, double omega0) {
    spec.validate();
    if (spec.family != Family::HCL)
        throw domain_error("sublattice ratio applies to the honeycomb lattice only");
    if (u_probe.node.sub != Sub::U || v_probe.node.sub != Sub::V)
        throw domain_error("sublattice ratio needs one u-sublattice and one v-sublattice probe");
    const EnvelopeSeries eu = envelope(u_probe, omega0);
    const EnvelopeSeries ev = envelope(v_probe, omega0);
    if (eu.times.size() != ev.times.size())
        throw domain_error("sublattice ratio needs probes on the same time grid");

    RatioSeries out;
    out.node_u = u_probe.node;
    out.node_v = v_probe.node;
    for (std::size_t i = 0; i < eu.times.size(); ++i) {
        if (std::abs(eu.times[i] - ev.times[i]) > 1e-9)
            throw domain_error("sublattice ratio needs probes on the same time grid");
        if (!(ev.amplitudes[i] > 0.0)) continue;  // nothing has arrived yet
        out.times.push_back(eu.times[i]);
        out.ratios.push_back(eu.amplitudes[i] / ev.amplitudes[i]);
    }
    return out;
}

}  // namespace lattice
