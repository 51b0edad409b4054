#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/math/interpolators/pchip.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "domain.hpp"

namespace kobalab {

/// omega(t) = C t^a.
struct PowerLaw {
    double C = 1.0;
    double a = 0.5;
};

/// Positive nondecreasing samples of omega; interpolated shape-preservingly in
/// log-log coordinates and extrapolated below the first sample by the power
/// law through the first two samples.
struct Tabulated {
    std::vector<double> t;
    std::vector<double> w;
};

/// The weight omega of a strongly Goldilocks estimate kappa >= c |v| / omega(delta).
struct OmegaSpec {
    std::variant<PowerLaw, Tabulated> form = PowerLaw{};
    double c_metric = 0.5;
    /// Upper end of the evaluation range of omega and g.
    double t_max = 4.0;
    /// Permit exponents above 1/2 (omega not dominating sqrt(t)).
    bool allow_steep = false;

    static OmegaSpec power(double C, double a, double c_metric = 0.5) {
        OmegaSpec s;
        s.form = PowerLaw{C, a};
        s.c_metric = c_metric;
        return s;
    }
};

inline void validate(const OmegaSpec& s) {
    if (!(s.c_metric > 0)) throw std::invalid_argument("omega: c_metric must be positive");
    if (!(s.t_max > 0)) throw std::invalid_argument("omega: t_max must be positive");
    if (const auto* p = std::get_if<PowerLaw>(&s.form)) {
        if (!(p->C > 0) || !std::isfinite(p->C)) throw std::invalid_argument("omega: power law needs C > 0");
        if (!(p->a > 0) || p->a > 1.0) throw std::invalid_argument("omega: power law exponent must lie in (0, 1]");
        if (p->a > 0.5 && !s.allow_steep)
            throw std::invalid_argument("omega: exponent above 1/2 contradicts omega >= sqrt(t); set allow_steep to override");
    } else {
        const auto& tb = std::get<Tabulated>(s.form);
        if (tb.t.size() != tb.w.size() || tb.t.size() < 4) throw std::invalid_argument("omega: table needs >= 4 (t, w) samples");
        for (std::size_t i = 0; i < tb.t.size(); ++i) {
            if (!(tb.t[i] > 0) || !(tb.w[i] > 0)) throw std::invalid_argument("omega: table entries must be positive");
            if (i && !(tb.t[i] > tb.t[i - 1])) throw std::invalid_argument("omega: table abscissae must increase");
            if (i && tb.w[i] < tb.w[i - 1]) throw std::invalid_argument("omega: table values must be nondecreasing");
        }
    }
}

namespace detail {

/// Closed-form integral over [0, x] of (C t^{a-1}) log(C t^{a-1}).
inline double power_g(double C, double a, double x) {
    if (x <= 0) return 0.0;
    return C * std::pow(x, a) / a * (std::log(C) + (1.0 - a) * (1.0 / a - std::log(x)));
}

/// Where the power-law integrand changes sign: C t^{a-1} = 1.
inline double power_peak(double C, double a) {
    if (a >= 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(C, 1.0 / (1.0 - a));
}

class TableOmega {
public:
    explicit TableOmega(const Tabulated& tb) {
        std::vector<double> lt, lw;
        for (std::size_t i = 0; i < tb.t.size(); ++i) {
            lt.push_back(std::log(tb.t[i]));
            lw.push_back(std::log(tb.w[i]));
        }
        t0_ = tb.t.front();
        t1_ = tb.t.back();
        w0_ = tb.w.front();
        head_a_ = (lw[1] - lw[0]) / (lt[1] - lt[0]);
        if (!(head_a_ > 0)) head_a_ = 1e-6;
        interp_ = std::make_shared<boost::math::interpolators::pchip<std::vector<double>>>(std::move(lt), std::move(lw));
    }
    double operator()(double t) const {
        if (t < t0_) return w0_ * std::pow(t / t0_, head_a_);
        return std::exp((*interp_)(std::log(std::min(t, t1_))));
    }
    double first_abscissa() const { return t0_; }
    /// Power law matching the table below its first sample.
    PowerLaw head() const { return {w0_ * std::pow(t0_, -head_a_), head_a_}; }

private:
    double t0_ = 0, t1_ = 0, w0_ = 0, head_a_ = 0.5;
    std::shared_ptr<boost::math::interpolators::pchip<std::vector<double>>> interp_;
};

}  // namespace detail

/// omega(t) for t in (0, t_max].
inline double omega_eval(const OmegaSpec& s, double t) {
    if (!(t > 0)) throw std::domain_error("omega_eval: t must be positive");
    if (t > s.t_max * (1 + 1e-12)) throw std::domain_error("omega_eval: t beyond t_max");
    if (const auto* p = std::get_if<PowerLaw>(&s.form)) return p->C * std::pow(t, p->a);
    return detail::TableOmega(std::get<Tabulated>(s.form))(t);
}

struct AdmissibilityReport {
    bool a_decreasing = false;     // omega(x)/x nonincreasing
    bool b_increasing = false;     // omega(x) log(omega(x)/x) nondecreasing
    bool c_integrable = false;     // (omega/x) log(omega/x) integrable at 0
    bool dominates_sqrt = false;   // omega >= const * sqrt(x) toward 0
    bool degenerate = false;       // integrand vanishes identically
    bool extrapolated = true;      // integrability is judged from the tail slope
    double tail_exponent = 0.0;    // fitted exponent p of the integrand ~ t^p
    double omega_exponent = 0.0;   // fitted exponent of omega near 0

    bool passed() const { return a_decreasing && b_increasing && c_integrable && dominates_sqrt && !degenerate; }
};

/// 128 log-spaced points on [1e-12, min(t_max, 1e-4)]: the conditions are
/// asymptotic at 0 and every shipped weight satisfies them there.
inline std::vector<double> default_admissibility_grid(const OmegaSpec& s) {
    const double hi = std::min(s.t_max, 1e-4), lo = 1e-12;
    std::vector<double> g(128);
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (g.size() - 1));
    return g;
}

inline AdmissibilityReport check_admissibility(const OmegaSpec& s, const std::vector<double>& grid) {
    validate(s);
    if (grid.size() < 64) throw std::invalid_argument("check_admissibility: grid needs >= 64 points");
    AdmissibilityReport r;
    std::vector<double> w(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) w[i] = omega_eval(s, grid[i]);
    constexpr double tol = 1e-12;
    r.a_decreasing = r.b_increasing = true;
    for (std::size_t i = 1; i < grid.size(); ++i) {
        const double q0 = w[i - 1] / grid[i - 1], q1 = w[i] / grid[i];
        if (q1 > q0 * (1 + tol)) r.a_decreasing = false;
        const double b0 = w[i - 1] * std::log(q0), b1 = w[i] * std::log(q1);
        if (b1 < b0 - tol * std::abs(b0)) r.b_increasing = false;
    }
    std::vector<double> lx, lf, lw;
    bool all_zero = true;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double q = w[i] / grid[i];
        const double f = q * std::log(q);
        if (std::abs(f) > 1e-300 && std::abs(std::log(q)) > 1e-12) all_zero = false;
        lx.push_back(std::log(grid[i]));
        lw.push_back(std::log(w[i]));
        lf.push_back(std::log(std::max(std::abs(f), 1e-300)));
    }
    r.degenerate = all_zero;
    const std::size_t tail = grid.size() / 4;
    const auto sub = [&](const std::vector<double>& v) { return std::vector<double>(v.begin(), v.begin() + tail); };
    r.omega_exponent = fit_line(sub(lx), sub(lw)).slope;
    r.tail_exponent = fit_line(sub(lx), sub(lf)).slope;
    r.c_integrable = r.degenerate || r.tail_exponent > -1.0 + 1e-9;
    r.dominates_sqrt = r.omega_exponent <= 0.5 + 1e-6;
    return r;
}

/// The gauge g(x) = int_0^x (omega/t) log(omega/t) dt, with its inverse on the
/// increasing branch. Constructed once; immutable afterwards.
class GoldilocksProfile {
public:
    explicit GoldilocksProfile(OmegaSpec spec, std::string domain_link = "")
        : spec_(std::move(spec)), domain_link_(std::move(domain_link)) {
        validate(spec_);
        admissibility_ = check_admissibility(spec_, default_admissibility_grid(spec_));
        if (const auto* p = std::get_if<PowerLaw>(&spec_.form)) {
            power_ = *p;
            peak_ = std::min(spec_.t_max, detail::power_peak(p->C, p->a));
        } else {
            table_ = detail::TableOmega(std::get<Tabulated>(spec_.form));
            peak_ = spec_.t_max;
            // g increases while omega(t) > t
            const double hi = spec_.t_max;
            constexpr int kScan = 400;
            for (int i = 0; i <= kScan; ++i) {
                const double t = table_->first_abscissa() * std::pow(hi / table_->first_abscissa(), double(i) / kScan);
                if ((*table_)(t) <= t) { peak_ = t; break; }
            }
        }
        build_table();
    }

    const OmegaSpec& omega() const { return spec_; }
    const AdmissibilityReport& admissibility() const { return admissibility_; }
    const std::string& domain_link() const { return domain_link_; }
    double c_metric() const { return spec_.c_metric; }
    bool has_closed_form() const { return power_.has_value(); }
    /// End of the increasing branch of g.
    double t_peak() const { return peak_; }
    double g_max() const { return g_peak_; }
    const std::vector<double>& table_x() const { return tab_x_; }
    const std::vector<double>& table_g() const { return tab_g_; }

    double omega_at(double t) const { return omega_eval(spec_, t); }

    /// g via the closed form when available, quadrature otherwise.
    double g(double x) const {
        if (!(x > 0)) {
            if (x == 0) return 0.0;
            throw std::domain_error("g_eval: x must be positive");
        }
        if (x > spec_.t_max * (1 + 1e-12)) throw std::domain_error("g_eval: x beyond t_max");
        if (admissibility_.degenerate) throw std::domain_error("g_eval: inadmissible weight (degenerate integrand)");
        if (power_) return detail::power_g(power_->C, power_->a, x);
        return g_quadrature(x);
    }

    /// g by adaptive quadrature in log t. The singular head [0, eps] is
    /// integrated analytically from the power-law majorant.
    double g_quadrature(double x) const {
        if (x <= 0) return 0.0;
        double eps;
        PowerLaw head;
        if (power_) { eps = 1e-6 * x; head = *power_; }
        else { eps = std::min(x, table_->first_abscissa()); head = table_->head(); }
        double total = detail::power_g(head.C, head.a, eps);
        if (x > eps) {
            auto f = [&](double u) {
                const double t = std::exp(u);
                const double q = omega_at(t) / t;
                return q * std::log(q) * t;
            };
            // split per decade for accuracy over many scales
            const double u0 = std::log(eps), u1 = std::log(x);
            const int pieces = std::max(1, static_cast<int>(std::ceil((u1 - u0) / std::log(10.0))));
            for (int k = 0; k < pieces; ++k) {
                const double a = u0 + (u1 - u0) * k / pieces, b = u0 + (u1 - u0) * (k + 1) / pieces;
                total += boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, 1e-13);
            }
        }
        return total;
    }

    /// x in [0, t_peak] with g(x) = y.
    double g_inverse(double y) const {
        if (y < 0 || !std::isfinite(y)) throw std::domain_error("g_inverse: y out of range");
        if (y == 0) return 0.0;
        if (y > g_peak_ * (1 + 1e-12)) throw std::domain_error("g_inverse: y exceeds g(t_peak)");
        // g'(t_peak) = 0, so the top of the range is resolved only to sqrt(eps) in x
        if (y >= g_peak_ * (1 - 4 * std::numeric_limits<double>::epsilon())) return peak_;
        // bracket from the table, then bisect in log x
        double lo = std::log(tab_x_.front()) - 40.0, hi = std::log(peak_);
        auto it = std::lower_bound(tab_g_.begin(), tab_g_.end(), y);
        if (it != tab_g_.end()) {
            const auto i = static_cast<std::size_t>(it - tab_g_.begin());
            hi = std::log(tab_x_[i]);
            if (i > 0) lo = std::log(tab_x_[i - 1]);
        }
        for (int it2 = 0; it2 < 200 && hi - lo > 1e-16 * std::max(1.0, std::abs(hi)); ++it2) {
            const double mid = 0.5 * (lo + hi);
            if (g(std::exp(mid)) < y) lo = mid; else hi = mid;
        }
        return std::exp(0.5 * (lo + hi));
    }

private:
    void build_table() {
        constexpr int kN = 256;
        const double lo = 1e-12 * peak_;
        tab_x_.resize(kN);
        tab_g_.resize(kN);
        for (int i = 0; i < kN; ++i) {
            tab_x_[i] = lo * std::pow(peak_ / lo, double(i) / (kN - 1));
            tab_g_[i] = admissibility_.degenerate ? 0.0 : g(tab_x_[i]);
        }
        g_peak_ = tab_g_.back();
    }

    OmegaSpec spec_;
    std::string domain_link_;
    AdmissibilityReport admissibility_;
    std::optional<PowerLaw> power_;
    std::optional<detail::TableOmega> table_;
    double peak_ = 1.0;
    double g_peak_ = 0.0;
    std::vector<double> tab_x_, tab_g_;
};

inline double g_eval(const GoldilocksProfile& p, double x) { return p.g(x); }
inline double g_inverse(const GoldilocksProfile& p, double y) { return p.g_inverse(y); }

struct ProfileInvariants {
    bool g_increasing = true;
    bool g_over_x_nonincreasing = true;
    bool g_vanishes_at_zero = true;
    double min_g_over_omega = std::numeric_limits<double>::infinity();
};

inline ProfileInvariants check_profile_invariants(const GoldilocksProfile& p) {
    ProfileInvariants r;
    const auto& x = p.table_x();
    const auto& g = p.table_g();
    for (std::size_t i = 1; i < x.size(); ++i) {
        if (!(g[i] > g[i - 1])) r.g_increasing = false;
        if (g[i] / x[i] > g[i - 1] / x[i - 1] * (1 + 1e-12)) r.g_over_x_nonincreasing = false;
    }
    for (std::size_t i = 0; i < x.size(); ++i) r.min_g_over_omega = std::min(r.min_g_over_omega, g[i] / p.omega_at(x[i]));
    r.g_vanishes_at_zero = p.g(1e-200) < 1e-6 * g.back();
    return r;
}

/// Extremes of g(x) / (x^{1/m} log(1/x)) on a log grid over [lo, hi];
/// K = max(max, 1/min).
struct RatioBand {
    double min_ratio = 0, max_ratio = 0, K = 0;
};

inline RatioBand mconvex_ratio_band(const GoldilocksProfile& p, double m, double lo, double hi, std::size_t n_grid) {
    RatioBand b{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (std::size_t i = 0; i < n_grid; ++i) {
        const double x = lo * std::pow(hi / lo, double(i) / double(n_grid - 1));
        const double r = p.g(x) / (std::pow(x, 1.0 / m) * std::log(1.0 / x));
        b.min_ratio = std::min(b.min_ratio, r);
        b.max_ratio = std::max(b.max_ratio, r);
    }
    b.K = std::max(b.max_ratio, 1.0 / b.min_ratio);
    return b;
}

struct HValues {
    double h1 = 0, h2 = 0, h = 0;
    bool h1_attains = true;
    bool saturated = false;
};

/// h1 = c|x-y| / g(delta(x)), h2 = g^{-1}(c|x-y|) / delta(x), h = max.
inline HValues h_eval(const GoldilocksProfile& p, const Point& x, const Point& y, double c, const DomainModel& d) {
    if (!(c > 0)) throw std::invalid_argument("h_eval: c must be positive");
    HValues r;
    const double dx = boundary_distance(d, x);
    (void)boundary_distance(d, y);
    const double s = c * distance(x, y);
    if (s == 0) return r;
    double dx_eff = dx;
    if (dx_eff > p.t_peak()) { dx_eff = p.t_peak(); r.saturated = true; }
    double ginv;
    if (s > p.g_max()) { ginv = p.t_peak(); r.saturated = true; }
    else ginv = p.g_inverse(s);
    r.h1 = s / p.g(dx_eff);
    r.h2 = ginv / dx;
    r.h1_attains = r.h1 >= r.h2;
    r.h = std::max(r.h1, r.h2);
    return r;
}

}  // namespace kobalab
