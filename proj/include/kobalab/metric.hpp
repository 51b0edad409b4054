#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "curve.hpp"
#include "domain.hpp"
#include "goldilocks.hpp"

namespace kobalab {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Estimator { ExactDisc, ExactBall, ConvexSandwich, SGLowerConvexUpper };
enum class Side { Lower, Upper };

inline const char* to_string(Estimator e) {
    switch (e) {
        case Estimator::ExactDisc: return "exact_disc";
        case Estimator::ExactBall: return "exact_ball";
        case Estimator::ConvexSandwich: return "convex_sandwich";
        case Estimator::SGLowerConvexUpper: return "sg_lower_convex_upper";
    }
    return "?";
}

/// Source of infinitesimal Kobayashi-Royden estimates on one domain.
class MetricField {
public:
    /// Exact disc/ball formula; the model must be a unit ball.
    static MetricField exact(const DomainModel& d) {
        if (!d.is_ball()) throw std::invalid_argument("MetricField: exact estimator needs the unit disc or ball");
        return MetricField(d, d.dim() == 1 ? Estimator::ExactDisc : Estimator::ExactBall, std::nullopt);
    }
    /// Two-sided bounds 1/(2 delta(z;v)) <= kappa <= 1/delta(z;v), optionally
    /// sharpened below by c |v| / omega(delta(z)).
    static MetricField convex(const DomainModel& d, std::optional<GoldilocksProfile> profile = std::nullopt) {
        if (!d.is_convex()) throw std::invalid_argument("MetricField: sandwich needs a convex model");
        const auto e = profile ? Estimator::SGLowerConvexUpper : Estimator::ConvexSandwich;
        return MetricField(d, e, std::move(profile));
    }
    /// Exact field where available, sandwich otherwise.
    static MetricField best(const DomainModel& d, std::optional<GoldilocksProfile> profile = std::nullopt) {
        return d.is_ball() ? exact(d) : convex(d, std::move(profile));
    }

    const DomainModel& domain() const { return domain_; }
    Estimator estimator() const { return est_; }
    bool is_exact() const { return est_ == Estimator::ExactDisc || est_ == Estimator::ExactBall; }
    const std::optional<GoldilocksProfile>& profile() const { return profile_; }
    /// Relative tolerance of segment quadrature.
    double quad_tol = 1e-9;

private:
    MetricField(DomainModel d, Estimator e, std::optional<GoldilocksProfile> p)
        : domain_(std::move(d)), est_(e), profile_(std::move(p)) {}

    DomainModel domain_;
    Estimator est_;
    std::optional<GoldilocksProfile> profile_;
};

struct MetricEstimate {
    double lower = 0.0;
    double upper = kInf;
    std::string provenance;
    bool inconsistent = false;  // a supplied lower bound exceeded the upper one
};

/// kappa on the unit ball of C^n:
/// sqrt((1-|z|^2)|v|^2 + |<v,z>|^2) / (1-|z|^2).
inline double kappa_ball_formula(const Point& z, const Direction& v) {
    const double s = 1.0 - norm2(z);
    return std::sqrt(s * norm2(v) + std::norm(hdot(v, z))) / s;
}

inline double kappa_exact(const MetricField& f, const Point& z, const Direction& v) {
    if (!f.is_exact()) throw std::invalid_argument("kappa_exact: field has no exact estimator");
    if (!contains(f.domain(), z)) throw std::domain_error("kappa_exact: point outside domain");
    detail::check_dim(f.domain(), v);
    return kappa_ball_formula(z, v);
}

inline MetricEstimate kappa_bounds(const MetricField& f, const Point& z, const Direction& v) {
    if (f.is_exact()) {
        const double k = kappa_exact(f, z, v);
        return {k, k, to_string(f.estimator())};
    }
    const double nv = norm(v);
    if (nv == 0) return {0.0, 0.0, "zero_vector"};
    const double dv = directional_boundary_distance(f.domain(), z, v);
    MetricEstimate m{1.0 / (2.0 * dv), 1.0 / dv, "convex_sandwich"};
    if (f.profile()) {
        const auto& p = *f.profile();
        const double sg = p.c_metric() * nv / p.omega_at(std::min(boundary_distance(f.domain(), z), p.omega().t_max));
        if (sg > m.lower) {
            m.lower = sg;
            m.provenance = "sg_lower+convex_upper";
        }
        if (m.lower > m.upper) {
            m.inconsistent = true;
            m.lower = m.upper;
        }
    }
    return m;
}

inline double kappa_side(const MetricField& f, const Point& z, const Direction& v, Side side) {
    if (f.is_exact()) return kappa_exact(f, z, v);
    if (side == Side::Upper) {
        if (norm2(v) == 0) return 0.0;
        return 1.0 / directional_boundary_distance(f.domain(), z, v);
    }
    return kappa_bounds(f, z, v).lower;
}

/// Integral of kappa_side along the straight segment [a, b]. The Kronrod error
/// estimate is added on the upper side and subtracted on the lower side.
inline double segment_kappa_length(const MetricField& f, const Point& a, const Point& b, Side side) {
    if (!contains(f.domain(), a) || !contains(f.domain(), b))
        throw std::domain_error("curve exits the domain");
    const CVec v = b - a;
    if (norm2(v) == 0) return 0.0;
    auto integrand = [&](double t) { return kappa_side(f, lerp(a, b, t), v, side); };
    double err = 0.0;
    const double val = boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, 12, f.quad_tol, &err);
    return side == Side::Upper ? val + err : std::max(0.0, val - err);
}

inline double curve_kappa_length(const MetricField& f, const Curve& c, Side side) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < c.size(); ++i) total += segment_kappa_length(f, c[i], c[i + 1], side);
    return total;
}

/// Per-segment kappa lengths; prefix sums give any sub-arc between vertices.
inline std::vector<double> segment_lengths(const MetricField& f, const Curve& c, Side side) {
    std::vector<double> out;
    out.reserve(c.segments());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) out.push_back(segment_kappa_length(f, c[i], c[i + 1], side));
    return out;
}

// ---------------------------------------------------------------------------
// Distance oracles and closed-form bounds

/// atanh(r) from 1 - r^2 supplied separately, exact near r = 1.
inline double atanh_from(double r, double one_minus_r2) { return std::log1p(r) - 0.5 * std::log(one_minus_r2); }

/// Kobayashi distance of the unit disc: atanh(|a-b| / |1 - conj(a) b|).
inline double disc_distance_oracle(cplx a, cplx b) {
    const double ra = std::abs(a), rb = std::abs(b);
    const double sa = (1.0 - ra) * (1.0 + ra), sb = (1.0 - rb) * (1.0 + rb);
    if (!(sa > 0) || !(sb > 0)) throw std::domain_error("disc_distance_oracle: inputs must lie in the open disc");
    const double den = std::norm(1.0 - std::conj(a) * b);
    const double r = std::abs(a - b) / std::sqrt(den);
    return atanh_from(std::min(r, 1.0), sa * sb / den);
}

/// Kobayashi distance of the unit ball:
/// atanh sqrt(1 - (1-|z|^2)(1-|w|^2)/|1-<z,w>|^2).
inline double ball_distance_oracle(const Point& z, const Point& w) {
    const double rz = norm(z), rw = norm(w);
    const double sz = (1.0 - rz) * (1.0 + rz), sw = (1.0 - rw) * (1.0 + rw);
    if (!(sz > 0) || !(sw > 0)) throw std::domain_error("ball_distance_oracle: inputs must lie in the open ball");
    const double den = std::norm(1.0 - hdot(z, w));
    const double q = sz * sw / den;
    const double r = std::sqrt(std::max(0.0, 1.0 - q));
    return atanh_from(r, q);
}

/// Exact distance when the field has an oracle.
inline std::optional<double> exact_distance(const MetricField& f, const Point& x, const Point& y) {
    if (!f.is_exact()) return std::nullopt;
    return ball_distance_oracle(x, y);
}

inline double dini_upper_distance(const DomainModel& d, const Point& x, const Point& y) {
    if (!d.is_dini_smooth()) throw std::invalid_argument("dini_upper_distance: model " + d.label() + " is not Dini-smooth");
    const double s = distance(x, y);
    if (s == 0) return 0.0;
    return std::log1p(2.0 * s / std::sqrt(boundary_distance(d, x) * boundary_distance(d, y)));
}

/// (m/2) log(1 + c|x-y|/delta(x)^{1/m})(1 + c|x-y|/delta(y)^{1/m}).
inline double pisa_bound(const DomainModel& d, double m, const Point& x, const Point& y, double c) {
    if (!(m >= 1)) throw std::invalid_argument("pisa_bound: m must be >= 1");
    const double s = c * distance(x, y);
    if (s == 0) return 0.0;
    const double ax = s / std::pow(boundary_distance(d, x), 1.0 / m);
    const double ay = s / std::pow(boundary_distance(d, y), 1.0 / m);
    return 0.5 * m * (std::log1p(ax) + std::log1p(ay));
}

struct LowerBoundParams {
    double c_ntr = 1.0;    // Nikolov-type bound via directional distances
    double c_good = 1.0;   // g^{-1} bound
    double c_ugly = 1.0;   // omega bound
    /// Constant of the combined h bound; defaults to min{1, c_good/4, c_ugly/2}.
    std::optional<double> c_final;

    double final_constant() const { return c_final.value_or(std::min({1.0, c_good / 4.0, c_ugly / 2.0})); }
};

struct Bound {
    std::string id;
    double value = 0.0;
    double constant = 0.0;
    bool applicable = true;
    std::string reason;
};

struct BoundBundle {
    std::vector<Bound> lower;
    std::vector<Bound> upper;

    double best_lower() const {
        double b = 0.0;
        for (const auto& l : lower)
            if (l.applicable) b = std::max(b, l.value);
        return b;
    }
    double best_upper() const {
        double b = kInf;
        for (const auto& u : upper)
            if (u.applicable) b = std::min(b, u.value);
        return b;
    }
    const Bound* find(const std::string& id) const {
        for (const auto& l : lower)
            if (l.id == id) return &l;
        for (const auto& u : upper)
            if (u.id == id) return &u;
        return nullptr;
    }
    /// Every applicable lower bound at most every applicable upper bound.
    bool consistent(double slack = 1e-9) const { return best_lower() <= best_upper() + slack; }
};

/// 1/2 |log(delta(x)/delta(y))|, valid on every convex domain.
inline double convex_ratio_bound(const DomainModel& d, const Point& x, const Point& y) {
    return 0.5 * std::abs(std::log(boundary_distance(d, x) / boundary_distance(d, y)));
}

/// 1/2 log(1 + c / min{delta(y; x-y), delta(x; x-y)}).
inline double ntr_bound(const DomainModel& d, const Point& x, const Point& y, double c) {
    const CVec v = x - y;
    if (norm2(v) == 0) return 0.0;
    const double m = std::min(directional_boundary_distance(d, y, v), directional_boundary_distance(d, x, v));
    return 0.5 * std::log1p(c / m);
}

/// 1/2 log(c g^{-1}(|x-y|) / delta(x)), clamped at 0. g^{-1} saturates at t_peak.
inline double good1_bound(const GoldilocksProfile& p, const DomainModel& d, const Point& x, const Point& y, double c,
                          bool* saturated = nullptr) {
    const double s = distance(x, y);
    if (s == 0) return 0.0;
    double gi;
    if (s > p.g_max()) {
        gi = p.t_peak();
        if (saturated) *saturated = true;
    } else gi = p.g_inverse(s);
    return std::max(0.0, 0.5 * std::log(c * gi / boundary_distance(d, x)));
}

/// 1/2 log(1 + c|x-y| / omega(delta(x))).
inline double ugly1_bound(const GoldilocksProfile& p, const DomainModel& d, const Point& x, const Point& y, double c) {
    const double s = distance(x, y);
    if (s == 0) return 0.0;
    return 0.5 * std::log1p(c * s / p.omega_at(boundary_distance(d, x)));
}

/// 1/2 log (1 + h(x,y,c))(1 + h(y,x,c)).
inline double final_h_bound(const GoldilocksProfile& p, const DomainModel& d, const Point& x, const Point& y, double c,
                            bool* saturated = nullptr) {
    if (distance(x, y) == 0) return 0.0;
    const auto hx = h_eval(p, x, y, c, d);
    const auto hy = h_eval(p, y, x, c, d);
    if (saturated) *saturated = hx.saturated || hy.saturated;
    return 0.5 * (std::log1p(hx.h) + std::log1p(hy.h));
}

/// Every applicable closed-form bound on k(x, y). The one-sided bounds in
/// delta(x) are evaluated in both orders since k is symmetric.
inline BoundBundle lower_distance_bundle(const DomainModel& d, const GoldilocksProfile* profile, const Point& x,
                                         const Point& y, const LowerBoundParams& params = {}) {
    BoundBundle b;
    if (!d.is_convex()) {
        b.lower.push_back({"convex_ratio", 0, 0, false, "model not convex"});
        return b;
    }
    b.lower.push_back({"convex_ratio", convex_ratio_bound(d, x, y), 0.0, true, ""});
    b.lower.push_back({"ntr", ntr_bound(d, x, y, params.c_ntr), params.c_ntr, true, ""});
    if (profile) {
        bool sat = false;
        const double g1 = std::max(good1_bound(*profile, d, x, y, params.c_good, &sat),
                                   good1_bound(*profile, d, y, x, params.c_good, &sat));
        b.lower.push_back({"good1", g1, params.c_good, true, sat ? "g_inverse saturated" : ""});
        const double u1 = std::max(ugly1_bound(*profile, d, x, y, params.c_ugly), ugly1_bound(*profile, d, y, x, params.c_ugly));
        b.lower.push_back({"ugly1", u1, params.c_ugly, true, ""});
        bool fsat = false;
        const double cf = params.final_constant();
        b.lower.push_back({"final_h", final_h_bound(*profile, d, x, y, cf, &fsat), cf, true, fsat ? "h saturated" : ""});
    } else {
        for (const char* id : {"good1", "ugly1", "final_h"}) b.lower.push_back({id, 0, 0, false, "no profile"});
    }
    if (d.is_dini_smooth()) b.upper.push_back({"dini", dini_upper_distance(d, x, y), 2.0, true, ""});
    else b.upper.push_back({"dini", kInf, 2.0, false, "model not Dini-smooth"});
    return b;
}

/// Attach a curve-based upper bound to a bundle.
inline void add_curve_upper(BoundBundle& b, double curve_upper) { b.upper.push_back({"curve_up", curve_upper, 0.0, true, ""}); }

/// Best available lower bound on k(x,y): the exact oracle when present,
/// otherwise the bundle maximum.
inline double best_lower_distance(const MetricField& f, const GoldilocksProfile* profile, const Point& x, const Point& y,
                                  const LowerBoundParams& params = {}) {
    if (auto e = exact_distance(f, x, y)) return *e;
    return lower_distance_bundle(f.domain(), profile, x, y, params).best_lower();
}

// ---------------------------------------------------------------------------
// Gromov four-point estimator

/// max over quadruples and base points of min{(x|z)_o, (z|y)_o} - (x|y)_o.
/// Enumerates all 4-subsets when there are at most 2000, samples otherwise.
inline double gromov_delta_estimate(const std::function<double(const Point&, const Point&)>& dist,
                                    const std::vector<Point>& pts, std::uint64_t seed = 0) {
    const std::size_t n = pts.size();
    if (n < 4) return 0.0;
    std::vector<double> D(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) D[i * n + j] = D[j * n + i] = dist(pts[i], pts[j]);
    auto d = [&](std::size_t i, std::size_t j) { return D[i * n + j]; };
    auto gp = [&](std::size_t x, std::size_t y, std::size_t o) { return 0.5 * (d(x, o) + d(o, y) - d(x, y)); };
    double delta = 0.0;
    auto quad = [&](const std::array<std::size_t, 4>& q) {
        for (int oi = 0; oi < 4; ++oi) {
            std::array<std::size_t, 3> r{};
            int k = 0;
            for (int j = 0; j < 4; ++j)
                if (j != oi) r[k++] = q[j];
            const std::size_t o = q[oi];
            for (int zi = 0; zi < 3; ++zi) {
                const std::size_t z = r[zi], x = r[(zi + 1) % 3], y = r[(zi + 2) % 3];
                delta = std::max(delta, std::min(gp(x, z, o), gp(z, y, o)) - gp(x, y, o));
            }
        }
    };
    const double subsets = static_cast<double>(n) * (n - 1) * (n - 2) * (n - 3) / 24.0;
    if (subsets <= 2000) {
        detail::for_each_subset(n, 4, [&](const std::vector<std::size_t>& s) { quad({s[0], s[1], s[2], s[3]}); });
    } else {
        Rng rng(seed);
        for (int t = 0; t < 2000; ++t) {
            std::array<std::size_t, 4> q{};
            for (int j = 0; j < 4; ++j) {
                bool fresh;
                do {
                    q[j] = static_cast<std::size_t>(rng.uniform() * n);
                    fresh = true;
                    for (int i = 0; i < j; ++i) fresh = fresh && q[i] != q[j];
                } while (!fresh);
            }
            quad(q);
        }
    }
    return delta;
}

}  // namespace kobalab
