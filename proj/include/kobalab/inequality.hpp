#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "curve.hpp"
#include "domain.hpp"
#include "geodesic.hpp"
#include "goldilocks.hpp"
#include "metric.hpp"
#include "util.hpp"

namespace kobalab {

// ---------------------------------------------------------------------------
// Records

struct VerificationRecord {
    std::string id;
    std::string domain;
    double m = 0.0;
    Point x, y;
    double lhs = 0.0;
    double rhs = 0.0;
    /// Constant used in rhs.
    double constant = 0.0;
    double measured_constant = 0.0;
    bool pass = true;
    std::string notes;

    // optional per-pair quantities for the CSV projection
    std::optional<double> dist_euclid, delta_x, delta_y, D, L_e, k_up, k_low_best, g_xy, c_vis, C_gh, lambda_cert;
};

inline constexpr double kRecordRelTol = 1e-6;

/// pass iff lhs <= rhs (1 + 1e-6).
inline bool holds(double lhs, double rhs) { return lhs <= rhs + kRecordRelTol * std::abs(rhs); }

// ---------------------------------------------------------------------------
// Shell decomposition

struct ShellPiece {
    int index = 0;
    double D_i = 0.0;
    Curve curve;
    /// Arc-length window of the piece in the input curve.
    double s0 = 0.0, s1 = 0.0;
    bool starts_at_cut = false;
    bool ends_at_cut = false;
};

struct ShellDecomposition {
    double D = 0.0;
    Point argmax;
    int N_x = 0, N_y = 0;
    std::vector<ShellPiece> pieces;
    double total_length = 0.0;
};

namespace detail {

/// Arc-length position of the first point (scanning from the start) with
/// delta >= level, using concavity of delta along each segment.
inline std::optional<double> first_crossing(const Curve& c, const DomainModel& d, double level, bool from_end) {
    const std::size_t S = c.segments();
    for (std::size_t k = 0; k < S; ++k) {
        const std::size_t i = from_end ? S - 1 - k : k;
        const Point a = from_end ? c[i + 1] : c[i];
        const Point b = from_end ? c[i] : c[i + 1];
        const double seg = c.cum_param()[i + 1] - c.cum_param()[i];
        auto pos = [&](double t) { return from_end ? c.cum_param()[i + 1] - t * seg : c.cum_param()[i] + t * seg; };
        auto delta = [&](double t) { return boundary_distance(d, lerp(a, b, t)); };
        if (delta(0.0) >= level) return pos(0.0);
        // maximum of the concave profile on [0, 1]
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = 0.0, hi = 1.0;
        double t1 = hi - kInvPhi, t2 = kInvPhi, f1 = delta(t1), f2 = delta(t2);
        double tmax = 1.0, fmax = delta(1.0);
        for (int it = 0; it < 80 && fmax < level; ++it) {
            if (f1 >= level) { tmax = t1; fmax = f1; break; }
            if (f2 >= level) { tmax = t2; fmax = f2; break; }
            if (f1 < f2) { lo = t1; t1 = t2; f1 = f2; t2 = lo + kInvPhi * (hi - lo); f2 = delta(t2); }
            else { hi = t2; t2 = t1; f2 = f1; t1 = hi - kInvPhi * (hi - lo); f1 = delta(t1); }
        }
        if (fmax < level) continue;
        // delta increases on [0, tmax]; bisect to the level, keeping delta >= level
        double l = 0.0, h = tmax;
        for (int it = 0; it < 200 && h - l > 0; ++it) {
            const double m = 0.5 * (l + h);
            if (m <= l || m >= h) break;
            (delta(m) >= level ? h : l) = m;
        }
        return pos(h);
    }
    return std::nullopt;
}

}  // namespace detail

inline constexpr double kShellLogSlack = 1e-4;

/// Shells of a curve from x to y with penetration depth D: x_i is the first
/// point with delta = D e^i (i = -N_x+1..0), y_i the last with delta = D e^-i
/// (i = 0..N_y-1); N is the least integer with D e^-N <= delta(endpoint).
inline ShellDecomposition shell_decompose(const Curve& c, const DomainModel& d) {
    ShellDecomposition out;
    const auto pen = penetration_depth(c, d);
    out.D = pen.D;
    out.argmax = pen.argmax;
    out.total_length = c.length();
    const double L = c.length();
    // log slack absorbs the chord sagitta of polyline arcs
    auto count = [&](double de) {
        const double r = std::log(out.D / de);
        return r <= kShellLogSlack ? 0 : static_cast<int>(std::ceil(r - kShellLogSlack));
    };
    out.N_x = count(boundary_distance(d, c.front()));
    out.N_y = count(boundary_distance(d, c.back()));
    if (c.degenerate()) {
        out.N_x = out.N_y = 0;
        out.pieces.push_back({0, out.D, c, 0.0, 0.0, false, false});
        return out;
    }
    // cut positions: xs[k] for i = -N_x + k (k = 0..N_x), x_{-N_x} = start
    std::vector<double> xs{0.0}, ys;
    for (int i = -out.N_x + 1; i <= 0; ++i) {
        const double level = i == 0 ? out.D * (1 - 1e-13) : out.D * std::exp(static_cast<double>(i));
        xs.push_back(detail::first_crossing(c, d, level, false).value_or(0.0));
    }
    for (int i = 0; i <= out.N_y - 1; ++i) {
        const double level = i == 0 ? out.D * (1 - 1e-13) : out.D * std::exp(-static_cast<double>(i));
        ys.push_back(detail::first_crossing(c, d, level, true).value_or(L));
    }
    ys.push_back(L);
    // y_0 cannot precede x_0
    const double x0 = xs.back();
    double y0 = ys.front();
    if (y0 < x0) y0 = x0;
    ys.front() = out.N_y == 0 ? L : y0;
    if (out.N_x == 0) xs.back() = 0.0;

    for (int k = 0; k < out.N_x; ++k) {
        const int i = -out.N_x + k;
        out.pieces.push_back({i, out.D * std::exp(static_cast<double>(i)), c.restrict(xs[k], xs[k + 1]), xs[k], xs[k + 1],
                              k > 0, true});
    }
    out.pieces.push_back({0, out.D, c.restrict(xs.back(), ys.front()), xs.back(), ys.front(), out.N_x > 0, out.N_y > 0});
    for (int i = 1; i <= out.N_y; ++i)
        out.pieces.push_back({i, out.D * std::exp(-static_cast<double>(i)), c.restrict(ys[i - 1], ys[i]), ys[i - 1], ys[i],
                              true, i < out.N_y});
    return out;
}

struct ShellCheck {
    bool ok = true;
    /// Largest relative excess of delta over e D_i on samples, and largest
    /// relative miss of the cut-point band [D_i, e D_i].
    double worst_upper = 0.0;
    double worst_cut = 0.0;
    double concat_error = 0.0;
    std::size_t samples = 0;
};

/// Checks delta <= e D_i on each piece sampled at 10 points per segment,
/// D_i <= delta <= e D_i at cut points, and that piece lengths add up.
inline ShellCheck check_shell_invariants(const ShellDecomposition& s, const DomainModel& d, double tol = 1e-9) {
    ShellCheck r;
    double total = 0;
    for (const auto& p : s.pieces) {
        total += p.curve.length();
        const double cap = std::exp(1.0) * p.D_i;
        auto sample = [&](const Point& q) {
            r.worst_upper = std::max(r.worst_upper, (boundary_distance(d, q) - cap) / cap);
            ++r.samples;
        };
        if (p.curve.size() == 1) sample(p.curve[0]);
        for (std::size_t k = 0; k + 1 < p.curve.size(); ++k)
            for (int j = 0; j <= 10; ++j) sample(lerp(p.curve[k], p.curve[k + 1], j / 10.0));
        auto cut = [&](const Point& q) {
            const double dq = boundary_distance(d, q);
            r.worst_cut = std::max({r.worst_cut, (p.D_i - dq) / p.D_i, (dq - cap) / cap});
        };
        if (p.starts_at_cut) cut(p.curve.front());
        if (p.ends_at_cut) cut(p.curve.back());
    }
    r.concat_error = std::abs(total - s.total_length);
    r.ok = r.worst_upper <= tol && r.worst_cut <= tol && r.concat_error <= 1e-9;
    return r;
}

struct ShellOptions {
    /// Constant in L_e(piece) <= C omega(D_i) log(omega(D_i)/D_i).
    double C_shell = 10.0;
    /// Constant in min{L_e(x..z), L_e(z..y)} <= C g(D_i).
    double C_half = 10.0;
};

/// Per-shell length records and the cumulative-half record per shell.
inline std::vector<VerificationRecord> verify_shells(const ShellDecomposition& s, const GoldilocksProfile& prof,
                                                     const std::string& domain_label = "", double m = 0.0,
                                                     const ShellOptions& opt = {}) {
    std::vector<VerificationRecord> out;
    for (const auto& p : s.pieces) {
        VerificationRecord r;
        r.id = "shell." + std::to_string(p.index);
        r.domain = domain_label;
        r.m = m;
        r.x = p.curve.front();
        r.y = p.curve.back();
        r.D = p.D_i;
        r.L_e = p.curve.length();
        const double w = prof.omega_at(std::min(p.D_i, prof.omega().t_max));
        const double lg = std::log(w / p.D_i);
        if (!(lg > 0)) {
            r.notes = "log_degenerate";
            r.measured_constant = std::nan("");
            r.lhs = p.curve.length();
            r.rhs = std::nan("");
            r.constant = opt.C_shell;
            r.pass = true;
        } else {
            r.lhs = p.curve.length();
            r.constant = opt.C_shell;
            r.rhs = opt.C_shell * w * lg;
            r.measured_constant = r.lhs / (w * lg);
            r.pass = holds(r.lhs, r.rhs);
        }
        out.push_back(r);

        // min of the lengths to either end over the piece's vertices
        VerificationRecord h;
        h.id = "shell_half." + std::to_string(p.index);
        h.domain = domain_label;
        h.m = m;
        h.x = r.x;
        h.y = r.y;
        h.D = p.D_i;
        double worst = 0;
        for (std::size_t k = 0; k < p.curve.size(); ++k) {
            const double sz = p.s0 + p.curve.cum_param()[k];
            worst = std::max(worst, std::min(sz, s.total_length - sz));
        }
        const double g = prof.g(std::min(p.D_i, prof.omega().t_max));
        h.lhs = worst;
        h.constant = opt.C_half;
        h.rhs = opt.C_half * g;
        h.measured_constant = worst / g;
        h.pass = holds(h.lhs, h.rhs);
        out.push_back(h);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Visibility and Gehring-Hayman

namespace detail {

inline void fill_pair(VerificationRecord& r, const DomainModel& d, const GeodesicResult& g) {
    r.domain = d.label();
    r.m = d.type_exponent();
    r.x = g.curve.front();
    r.y = g.curve.back();
    r.dist_euclid = distance(r.x, r.y);
    r.delta_x = boundary_distance(d, r.x);
    r.delta_y = boundary_distance(d, r.y);
    r.L_e = g.curve.length();
    r.k_up = g.upper_length;
    r.k_low_best = g.lower_distance;
    r.lambda_cert = g.lambda_cert;
}

/// g^{-1} with saturation at the peak of g.
inline double g_inverse_saturating(const GoldilocksProfile& p, double s, bool& saturated) {
    saturated = s >= p.g_max();
    return saturated ? p.t_peak() : p.g_inverse(s);
}

}  // namespace detail

/// D >= c g^{-1}(|x-y|): pass iff c_measured = D / g^{-1}(|x-y|) >= floor.
inline std::optional<VerificationRecord> verify_visibility(const DomainModel& d, const GeodesicResult& g,
                                                           const GoldilocksProfile& p, double floor = 1e-3) {
    if (g.curve.degenerate() || distance(g.curve.front(), g.curve.back()) < 1e-9) return std::nullopt;
    VerificationRecord r;
    r.id = "visibility";
    detail::fill_pair(r, d, g);
    const double s = *r.dist_euclid;
    const auto pen = penetration_depth(g.curve, d);
    bool sat = false;
    const double gi = detail::g_inverse_saturating(p, s, sat);
    r.D = pen.D;
    r.g_xy = p.g(std::min(s, p.omega().t_max));
    r.c_vis = pen.D / gi;
    r.lhs = floor * gi;
    r.rhs = pen.D;
    r.constant = floor;
    r.measured_constant = *r.c_vis;
    r.pass = holds(r.lhs, r.rhs);
    if (sat) r.notes = "g_inverse saturated";
    return r;
}

struct GhOptions {
    /// Constant in L_e <= C g(|x-y|).
    double C_gh = 5.0;
    /// Constant in D <= C |x-y| + sqrt(delta(x) delta(y)).
    double C_depth = 2.0;
};

/// L_e(curve) <= C g(|x-y|), plus the depth bound D <= C |x-y| + sqrt(delta(x) delta(y)).
inline std::vector<VerificationRecord> verify_gehring_hayman(const DomainModel& d, const GeodesicResult& g,
                                                             const GoldilocksProfile& p, const GhOptions& opt = {}) {
    std::vector<VerificationRecord> out;
    if (g.curve.degenerate() || distance(g.curve.front(), g.curve.back()) < 1e-9) return out;
    VerificationRecord r;
    r.id = "gehring_hayman";
    detail::fill_pair(r, d, g);
    const double s = *r.dist_euclid;
    if (s > p.omega().t_max) {
        r.notes = "g saturated: |x-y| beyond t_max";
        r.pass = false;
        out.push_back(r);
        return out;
    }
    const auto pen = penetration_depth(g.curve, d);
    r.D = pen.D;
    r.g_xy = p.g(s);
    r.C_gh = *r.L_e / *r.g_xy;
    r.lhs = *r.L_e;
    r.constant = opt.C_gh;
    r.rhs = opt.C_gh * *r.g_xy;
    r.measured_constant = *r.C_gh;
    r.pass = holds(r.lhs, r.rhs);
    if (s > p.t_peak()) r.notes = "|x-y| beyond the peak of g";
    out.push_back(r);

    VerificationRecord q = r;
    q.id = "gehring_hayman.depth";
    const double root = std::sqrt(*r.delta_x * *r.delta_y);
    q.lhs = pen.D;
    q.constant = opt.C_depth;
    q.rhs = opt.C_depth * s + root;
    q.measured_constant = std::max(0.0, (pen.D - root) / s);
    q.pass = holds(q.lhs, q.rhs);
    q.notes.clear();
    out.push_back(q);
    return out;
}

// ---------------------------------------------------------------------------
// Lower bounds

enum class ReferenceKind { Oracle, CurveUpper };

struct MaxConstants {
    double ntr = 0.0;
    double good1 = 0.0;
    double ugly1 = 0.0;
    double final_h = 0.0;
};

struct PisaStats {
    double min = 0.0, median = 0.0, max = 0.0;
    std::size_t n = 0;
};

struct LowerBoundReport {
    std::vector<VerificationRecord> records;
    std::size_t skipped_degenerate = 0;
    std::size_t violations = 0;
    std::optional<MaxConstants> max_c;
    std::optional<PisaStats> pisa;
};

struct LowerBoundOptions {
    LowerBoundParams params;
    /// Also check every lower bound against the Dini upper bound.
    bool compare_dini = true;
    /// Bisect for the largest passing constant of each parameterized bound.
    bool measure_max_c = false;
    /// Exponent for the pisa comparison; 0 disables it.
    double pisa_m = 0.0;
    double pisa_c = 1.0;
};

namespace detail {

inline double bound_with_c(const std::string& id, const DomainModel& d, const GoldilocksProfile* p, const Point& x,
                           const Point& y, double c) {
    if (id == "ntr") return ntr_bound(d, x, y, c);
    if (id == "good1") return std::max(good1_bound(*p, d, x, y, c), good1_bound(*p, d, y, x, c));
    if (id == "ugly1") return std::max(ugly1_bound(*p, d, x, y, c), ugly1_bound(*p, d, y, x, c));
    return final_h_bound(*p, d, x, y, c);
}

/// Largest c in (0, c_cap] with bound(c) <= ref + tol on every pair; bounds
/// are nondecreasing in c.
inline double max_passing_c(const std::string& id, const DomainModel& d, const GoldilocksProfile* p,
                            const std::vector<std::pair<Point, Point>>& pairs, const std::vector<double>& ref,
                            double c_cap = 1e6) {
    auto ok = [&](double c) {
        for (std::size_t i = 0; i < pairs.size(); ++i)
            if (distance(pairs[i].first, pairs[i].second) >= 1e-9 &&
                bound_with_c(id, d, p, pairs[i].first, pairs[i].second, c) > ref[i] + 1e-6)
                return false;
        return true;
    };
    double lo = 0.0, hi = 1.0;
    while (ok(hi) && hi < c_cap) {
        lo = hi;
        hi *= 2;
    }
    if (ok(hi)) return hi;
    for (int it = 0; it < 50; ++it) {
        const double mid = 0.5 * (lo + hi);
        (ok(mid) ? lo : hi) = mid;
    }
    return lo;
}

}  // namespace detail

/// Each lower bound of the bundle against the reference distance of each pair.
/// With ReferenceKind::CurveUpper the reference is an upper estimate and a
/// pass is a genuine check of the bound.
inline LowerBoundReport verify_lower_bounds(const DomainModel& d, const GoldilocksProfile* p,
                                            const std::vector<std::pair<Point, Point>>& pairs,
                                            const std::vector<double>& reference, ReferenceKind kind,
                                            const LowerBoundOptions& opt = {}) {
    if (reference.size() != pairs.size()) throw std::invalid_argument("verify_lower_bounds: one reference per pair");
    LowerBoundReport rep;
    const std::string ref_label = kind == ReferenceKind::Oracle ? "reference=oracle" : "reference=curve_upper";
    std::vector<double> pisa_ratio;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [x, y] = pairs[i];
        if (distance(x, y) < 1e-9) {
            ++rep.skipped_degenerate;
            continue;
        }
        const auto b = lower_distance_bundle(d, p, x, y, opt.params);
        const double dini = d.is_dini_smooth() ? dini_upper_distance(d, x, y) : kInf;
        for (const auto& l : b.lower) {
            if (!l.applicable) continue;
            VerificationRecord r;
            r.id = "lower." + l.id;
            r.domain = d.label();
            r.m = d.type_exponent();
            r.x = x;
            r.y = y;
            r.dist_euclid = distance(x, y);
            r.delta_x = boundary_distance(d, x);
            r.delta_y = boundary_distance(d, y);
            r.k_up = reference[i];
            r.k_low_best = b.best_lower();
            r.lhs = l.value;
            r.rhs = reference[i];
            r.constant = l.constant;
            r.measured_constant = l.value > 0 ? reference[i] / l.value : kInf;
            r.pass = l.value <= reference[i] + 1e-6;
            r.notes = ref_label + (l.reason.empty() ? "" : "; " + l.reason);
            rep.records.push_back(r);
            if (opt.compare_dini && std::isfinite(dini)) {
                VerificationRecord q = r;
                q.id = "lower_vs_dini." + l.id;
                q.rhs = dini;
                q.k_up = dini;
                q.measured_constant = l.value > 0 ? dini / l.value : kInf;
                q.pass = l.value <= dini + 1e-9;
                q.notes = "reference=dini";
                rep.records.push_back(q);
            }
        }
        if (opt.pisa_m >= 1 && p) {
            const double fh = b.find("final_h")->value;
            const double pb = pisa_bound(d, opt.pisa_m, x, y, opt.pisa_c);
            if (fh > 0) pisa_ratio.push_back(pb / fh);
        }
    }
    for (const auto& r : rep.records) rep.violations += r.pass ? 0 : 1;
    if (opt.measure_max_c) {
        MaxConstants mc;
        mc.ntr = detail::max_passing_c("ntr", d, p, pairs, reference);
        if (p) {
            mc.good1 = detail::max_passing_c("good1", d, p, pairs, reference);
            mc.ugly1 = detail::max_passing_c("ugly1", d, p, pairs, reference);
            mc.final_h = detail::max_passing_c("final_h", d, p, pairs, reference);
        }
        rep.max_c = mc;
    }
    if (!pisa_ratio.empty()) {
        PisaStats ps;
        ps.n = pisa_ratio.size();
        ps.min = *std::min_element(pisa_ratio.begin(), pisa_ratio.end());
        ps.max = *std::max_element(pisa_ratio.begin(), pisa_ratio.end());
        ps.median = median(pisa_ratio);
        rep.pisa = ps;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Sweep statistics

/// Least-squares slope of log D against log |x-y| over visibility records.
inline LineFit visibility_slope(const std::vector<VerificationRecord>& recs) {
    std::vector<double> lx, ly;
    for (const auto& r : recs)
        if (r.dist_euclid && r.D && *r.dist_euclid > 0 && *r.D > 0) {
            lx.push_back(std::log(*r.dist_euclid));
            ly.push_back(std::log(*r.D));
        }
    return fit_line(lx, ly);
}

struct ConstantSpread {
    double min = 0.0, median = 0.0, max = 0.0;
    std::size_t n = 0;
};

inline ConstantSpread spread(const std::vector<double>& v) {
    ConstantSpread s;
    std::vector<double> f;
    for (double x : v)
        if (std::isfinite(x)) f.push_back(x);
    s.n = f.size();
    if (f.empty()) return s;
    s.min = *std::min_element(f.begin(), f.end());
    s.max = *std::max_element(f.begin(), f.end());
    s.median = median(f);
    return s;
}

}  // namespace kobalab
