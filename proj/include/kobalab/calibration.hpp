#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

#include "domain.hpp"
#include "goldilocks.hpp"
#include "metric.hpp"
#include "util.hpp"

namespace kobalab {

/// Largest directional boundary distance over unit directions: a random
/// direction cloud plus the coordinate axes and the inward normal, followed by
/// a shrinking-step hill climb from the best candidates.
inline double sup_directional_distance(const DomainModel& d, const Point& x, std::uint64_t seed = 0, int n_dirs = 96) {
    const std::size_t n = d.dim();
    if (n == 1) return directional_boundary_distance(d, x, CVec{1.0});
    Rng rng(seed);
    std::vector<std::pair<double, CVec>> cand;
    auto push = [&](const CVec& v) { cand.emplace_back(directional_boundary_distance(d, x, v), v); };
    for (std::size_t k = 0; k < n; ++k) {
        CVec e(n);
        e[k] = 1.0;
        push(e);
    }
    push(nearest_boundary_direction(d, x).v);
    for (int i = 0; i < n_dirs; ++i) push(random_unit(rng, n));
    std::sort(cand.begin(), cand.end(), [](const auto& a, const auto& b) { return a.first > b.first; });
    double best = cand.front().first;
    for (std::size_t s = 0; s < std::min<std::size_t>(3, cand.size()); ++s) {
        auto [val, v] = cand[s];
        for (double step = 0.3; step > 1e-4; step *= 0.5) {
            bool moved = true;
            while (moved) {
                moved = false;
                for (int t = 0; t < 4 * static_cast<int>(n); ++t) {
                    const CVec w = normalized(v + random_unit(rng, n) * step);
                    const double dw = directional_boundary_distance(d, x, w);
                    if (dw > val) {
                        val = dw;
                        v = w;
                        moved = true;
                    }
                }
            }
        }
        best = std::max(best, val);
    }
    return best;
}

struct DeltaBand {
    double lo = 0.0;
    double hi = 0.0;
};

struct BandExponent {
    DeltaBand band;
    double exponent = 0.0;
    double stderr_ = 0.0;
    std::size_t samples = 0;
};

struct CalibrationOptions {
    std::size_t n_samples = 200;
    std::vector<DeltaBand> bands{{1e-6, 1e-5}, {1e-5, 1e-4}, {1e-4, 1e-3}, {1e-3, 1e-2}};
    /// Boundary point whose inward normal carries all samples; global sampling when empty.
    std::optional<Point> anchor;
    std::uint64_t seed = 0;
};

struct Calibration {
    OmegaSpec spec;
    double raw_exponent = 0.0;
    double exponent_stderr = 0.0;
    bool snapped = false;
    int snapped_m = 0;
    std::vector<BandExponent> per_band;
};

/// Snap a to the nearest 1/m (m = 1..8) when within tol.
inline std::optional<int> snap_exponent(double a, double tol = 0.05) {
    int best = 0;
    double err = tol;
    for (int m = 1; m <= 8; ++m)
        if (std::abs(a - 1.0 / m) <= err) {
            err = std::abs(a - 1.0 / m);
            best = m;
        }
    if (best == 0) return std::nullopt;
    return best;
}

/// Fits sup_v delta(x;v) ~ C delta(x)^a. With omega = C t^a every sample
/// satisfies delta(x;v) <= omega(delta(x)), so kappa >= 1/(2 delta(x;v)) gives
/// c_metric = 1/2.
inline Calibration calibrate_omega(const DomainModel& d, const CalibrationOptions& opt = {}) {
    if (!d.is_convex()) throw std::invalid_argument("calibrate_omega: model must be convex");
    if (opt.bands.empty() || opt.n_samples < 4) throw std::invalid_argument("calibrate_omega: needs bands and >= 4 samples");
    double lo = kInf, hi = 0;
    for (const auto& b : opt.bands) {
        if (!(b.lo > 0) || !(b.hi >= b.lo) || !(b.hi < d.inradius()))
            throw std::invalid_argument("calibrate_omega: band outside (0, inradius)");
        lo = std::min(lo, b.lo);
        hi = std::max(hi, b.hi);
    }
    if (hi / lo < 10.0) throw std::invalid_argument("calibrate_omega: insufficient spread in delta (need hi/lo >= 10)");

    Rng rng(opt.seed);
    const std::size_t per_band = std::max<std::size_t>(2, opt.n_samples / opt.bands.size());
    std::vector<std::vector<double>> lx(opt.bands.size()), ly(opt.bands.size());
    std::vector<double> ax, ay;
    std::optional<NearestDirection> normal;
    if (opt.anchor) {
        // move slightly inside to get a well-defined inward normal at the anchor
        const Point inner = *opt.anchor + (d.center() - *opt.anchor) * 1e-3;
        normal = nearest_boundary_direction(d, inner);
    }
    for (std::size_t b = 0; b < opt.bands.size(); ++b) {
        const auto& band = opt.bands[b];
        for (std::size_t i = 0; i < per_band; ++i) {
            Point x;
            if (opt.anchor) {
                const double frac = per_band == 1 ? 0.0 : static_cast<double>(i) / (per_band - 1);
                const double t = band.lo * std::pow(band.hi / band.lo, frac);
                x = *opt.anchor - normal->v * t;
                if (!contains(d, x)) continue;
            } else {
                x = sample_in_band(d, band.lo, band.hi, rng, 10000);
            }
            const double dx = boundary_distance(d, x);
            const double s = sup_directional_distance(d, x, rng.next());
            lx[b].push_back(std::log(dx));
            ly[b].push_back(std::log(s));
            ax.push_back(lx[b].back());
            ay.push_back(ly[b].back());
        }
    }
    if (ax.size() < 4) throw std::invalid_argument("calibrate_omega: too few usable samples");
    const auto fit = fit_line(ax, ay);
    Calibration out;
    out.raw_exponent = fit.slope;
    out.exponent_stderr = fit.slope_stderr;
    for (std::size_t b = 0; b < opt.bands.size(); ++b) {
        const auto f = fit_line(lx[b], ly[b]);
        out.per_band.push_back({opt.bands[b], f.slope, f.slope_stderr, f.n});
    }
    double a = fit.slope;
    if (auto m = snap_exponent(a)) {
        out.snapped = true;
        out.snapped_m = *m;
        a = 1.0 / *m;
    }
    a = std::clamp(a, 1e-3, 1.0);
    double C = 0.0;
    for (std::size_t i = 0; i < ax.size(); ++i) C = std::max(C, std::exp(ay[i] - a * ax[i]));
    out.spec = OmegaSpec::power(C, a, 0.5);
    out.spec.allow_steep = a > 0.5;
    return out;
}

/// M(r) = sup {1/kappa(x;v) : |v| = 1, delta(x) <= r}, estimated from the
/// lower side of the field on deterministic delta levels r 2^{-j}, j = 0..levels-1.
/// The value is a running max over levels, hence nondecreasing in r.
inline double m_sup_estimate(const MetricField& f, double r, std::size_t n_samples, std::uint64_t seed = 0, int levels = 8) {
    const auto& d = f.domain();
    if (!(r > 0) || !(r < d.inradius())) throw std::invalid_argument("m_sup_estimate: r must lie in (0, inradius)");
    if (n_samples == 0) throw std::invalid_argument("m_sup_estimate: no samples in band");
    Rng rng(seed);
    const std::size_t per_level = std::max<std::size_t>(1, n_samples / levels);
    double M = 0.0;
    for (int j = levels - 1; j >= 0; --j) {
        const double t = r * std::ldexp(1.0, -j);
        for (std::size_t i = 0; i < per_level; ++i) {
            const Point p = sample_interior(d, rng);
            const auto nd = nearest_boundary_direction(d, p);
            const Point x = p + nd.v * (boundary_distance(d, p) - t);
            if (!contains(d, x) || boundary_distance(d, x) > r) continue;
            for (const CVec& v : {random_unit(rng, d.dim()), nd.v}) {
                const double k = kappa_bounds(f, x, v).lower;
                if (k > 0) M = std::max(M, 1.0 / k);
            }
            if (d.dim() > 1) {
                // complex-tangential direction
                CVec tv(d.dim());
                tv[0] = -std::conj(nd.v[1]);
                tv[1] = std::conj(nd.v[0]);
                if (norm2(tv) > 0) M = std::max(M, 1.0 / kappa_bounds(f, x, normalized(tv)).lower);
            }
        }
    }
    return M;
}

struct AlphaGrowth {
    double alpha_fit = 0.0;
    double alpha_stderr = 0.0;
    double sup_residual = 0.0;
    bool residual_finite = false;
    std::size_t samples = 0;
};

/// Fits k_up(x0, z) ~ alpha log(1/delta(z)) over near-boundary z. k_up is the
/// exact distance when the field has one, otherwise the upper kappa-length of
/// the segment [x0, z].
inline AlphaGrowth alpha_growth_probe(const MetricField& f, const Point& x0, std::size_t n_samples, std::uint64_t seed = 0,
                                      DeltaBand band = {1e-6, 1e-2}) {
    const auto& d = f.domain();
    Rng rng(seed);
    std::vector<double> lx, ky;
    for (std::size_t i = 0; i < n_samples; ++i) {
        const Point z = sample_in_band(d, band.lo, band.hi, rng, 10000);
        const double k = f.is_exact() ? *exact_distance(f, x0, z) : curve_kappa_length(f, Curve({x0, z}), Side::Upper);
        lx.push_back(std::log(1.0 / boundary_distance(d, z)));
        ky.push_back(k);
    }
    AlphaGrowth out;
    out.samples = lx.size();
    const auto fit = fit_line(lx, ky);
    out.alpha_fit = fit.slope;
    out.alpha_stderr = fit.slope_stderr;
    out.sup_residual = -kInf;
    for (std::size_t i = 0; i < lx.size(); ++i) out.sup_residual = std::max(out.sup_residual, ky[i] - fit.slope * lx[i]);
    out.residual_finite = std::isfinite(out.sup_residual);
    return out;
}

}  // namespace kobalab
