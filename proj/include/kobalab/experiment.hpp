#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <boost/version.hpp>
#include <Eigen/Core>

#include "report.hpp"

namespace kobalab {

inline constexpr const char* kVersion = "0.1.0";

enum class ExperimentKind { MetricEval, Geodesic, Visibility, GehringHayman, LowerBounds, Shells, Sweep };

inline const char* to_string(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::MetricEval: return "metric-eval";
        case ExperimentKind::Geodesic: return "geodesic";
        case ExperimentKind::Visibility: return "visibility";
        case ExperimentKind::GehringHayman: return "gehring-hayman";
        case ExperimentKind::LowerBounds: return "lower-bounds";
        case ExperimentKind::Shells: return "shells";
        case ExperimentKind::Sweep: return "sweep";
    }
    return "?";
}

inline ExperimentKind kind_from_string(const std::string& s) {
    for (auto k : {ExperimentKind::MetricEval, ExperimentKind::Geodesic, ExperimentKind::Visibility, ExperimentKind::GehringHayman,
                   ExperimentKind::LowerBounds, ExperimentKind::Shells, ExperimentKind::Sweep})
        if (s == to_string(k)) return k;
    throw ConfigError("unknown experiment kind '" + s + "'");
}

// ---------------------------------------------------------------------------
// Config

struct PairRule {
    enum class Kind { Random, Arc, List };
    Kind kind = Kind::Random;

    // random
    std::size_t count = 20;
    double delta_lo = 1e-3;
    double delta_hi = 0.5;
    SeparationLaw separation = SeparationLaw::Independent;
    double max_separation = 0.0;

    // arc: x, y = radius * R(u) u for u = cos(t) base +- sin(t) tangent,
    // with R(u) the exit distance of the ray through u
    double radius = 0.99;
    double theta_lo = 0.01;
    double theta_hi = 1.0;
    bool log_spacing = true;
    std::optional<CVec> base, tangent;

    std::vector<std::pair<Point, Point>> list;
};

struct ExperimentConfig {
    ExperimentKind kind = ExperimentKind::Visibility;
    json domain = {{"kind", "disc"}};
    /// Profile descriptor; empty selects the default for the domain.
    json profile;
    SolverConfig solver;
    PairRule pairs;
    std::uint64_t seed = 0;

    std::filesystem::path out_dir = "out";
    std::string stem = "report";
    bool plots = true;

    double lambda_max = 1.1;
    double oracle_tol = 0.02;
    double visibility_floor = 1e-3;
    GhOptions gh;
    ShellOptions shells;
    double shell_tol = 1e-9;
    LowerBoundOptions lower;
    /// "auto", "oracle" or "curve_upper".
    std::string reference = "auto";
    std::size_t calibration_samples = 200;

    std::vector<ExperimentKind> sweep_kinds;
    std::vector<json> sweep_domains;

    std::filesystem::path base_dir;
    /// Effective config, hashed for provenance.
    json raw;
};

namespace detail {

inline PairRule pairs_from_json(const json& j) {
    PairRule r;
    if (j.is_null()) return r;
    const auto rule = get_or<std::string>(j, "rule", "random");
    if (rule == "random") {
        r.kind = PairRule::Kind::Random;
        r.count = get_or(j, "count", r.count);
        r.delta_lo = get_or(j, "delta_lo", r.delta_lo);
        r.delta_hi = get_or(j, "delta_hi", r.delta_hi);
        const auto sep = get_or<std::string>(j, "separation", "independent");
        if (sep == "bounded") r.separation = SeparationLaw::Bounded;
        else if (sep != "independent") throw ConfigError("pairs: separation must be 'independent' or 'bounded'");
        r.max_separation = get_or(j, "max_separation", r.max_separation);
    } else if (rule == "arc") {
        r.kind = PairRule::Kind::Arc;
        r.count = get_or(j, "count", r.count);
        r.radius = get_or(j, "radius", r.radius);
        r.theta_lo = get_or(j, "theta_lo", r.theta_lo);
        r.theta_hi = get_or(j, "theta_hi", r.theta_hi);
        const auto sp = get_or<std::string>(j, "spacing", "log");
        if (sp != "log" && sp != "linear") throw ConfigError("pairs: spacing must be 'log' or 'linear'");
        r.log_spacing = sp == "log";
        if (j.contains("base")) r.base = point_from_json(j.at("base"));
        if (j.contains("tangent")) r.tangent = point_from_json(j.at("tangent"));
        if (!(r.radius > 0 && r.radius < 1)) throw ConfigError("pairs: arc radius must lie in (0, 1)");
        if (!(r.theta_lo > 0 && r.theta_hi >= r.theta_lo && r.theta_hi < M_PI / 2))
            throw ConfigError("pairs: need 0 < theta_lo <= theta_hi < pi/2");
    } else if (rule == "list") {
        r.kind = PairRule::Kind::List;
        for (const auto& it : j.at("items")) r.list.emplace_back(point_from_json(it.at("x")), point_from_json(it.at("y")));
    } else {
        throw ConfigError("pairs: unknown rule '" + rule + "'");
    }
    if (r.kind != PairRule::Kind::List && r.count == 0) throw ConfigError("pairs: count must be positive");
    return r;
}

inline std::uint64_t splitmix(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

}  // namespace detail

/// Seed of row i under the run seed.
inline std::uint64_t row_seed(std::uint64_t seed, std::size_t i) { return detail::splitmix(seed ^ detail::splitmix(i + 1)); }

inline std::uint64_t fnv1a(const std::string& s) {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

inline ExperimentConfig config_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    ExperimentConfig c;
    c.base_dir = base_dir;
    try {
        c.kind = kind_from_string(get_or<std::string>(j, "kind", "visibility"));
        if (j.contains("domain")) c.domain = j.at("domain");
        domain_from_json(c.domain);
        if (j.contains("profile") && !(j.at("profile").is_string() && j.at("profile") == "auto")) {
            c.profile = j.at("profile");
            profile_from_json(c.profile, base_dir);
        }
        c.solver = solver_from_json(j.value("solver", json()));
        c.pairs = detail::pairs_from_json(j.value("pairs", json()));
        c.seed = get_or<std::uint64_t>(j, "seed", 0);
        if (j.contains("output")) {
            const auto& o = j.at("output");
            c.out_dir = get_or<std::string>(o, "dir", "out");
            c.stem = get_or<std::string>(o, "stem", "report");
            c.plots = get_or(o, "plots", true);
        }
        if (j.contains("geodesic")) {
            c.lambda_max = get_or(j["geodesic"], "lambda_max", c.lambda_max);
            c.oracle_tol = get_or(j["geodesic"], "oracle_tol", c.oracle_tol);
        }
        if (j.contains("visibility")) c.visibility_floor = get_or(j["visibility"], "floor", c.visibility_floor);
        if (j.contains("gehring_hayman")) {
            c.gh.C_gh = get_or(j["gehring_hayman"], "C", c.gh.C_gh);
            c.gh.C_depth = get_or(j["gehring_hayman"], "C_depth", c.gh.C_depth);
        }
        if (j.contains("shells")) {
            c.shells.C_shell = get_or(j["shells"], "C", c.shells.C_shell);
            c.shells.C_half = get_or(j["shells"], "C_half", c.shells.C_half);
            c.shell_tol = get_or(j["shells"], "tol", c.shell_tol);
        }
        if (j.contains("lower_bounds")) {
            const auto& l = j.at("lower_bounds");
            c.lower.params.c_ntr = get_or(l, "c_ntr", c.lower.params.c_ntr);
            c.lower.params.c_good = get_or(l, "c_good", c.lower.params.c_good);
            c.lower.params.c_ugly = get_or(l, "c_ugly", c.lower.params.c_ugly);
            if (l.contains("c_final")) c.lower.params.c_final = l.at("c_final").get<double>();
            c.lower.compare_dini = get_or(l, "compare_dini", c.lower.compare_dini);
            c.lower.measure_max_c = get_or(l, "measure_max_c", c.lower.measure_max_c);
            c.lower.pisa_m = get_or(l, "pisa_m", c.lower.pisa_m);
            c.lower.pisa_c = get_or(l, "pisa_c", c.lower.pisa_c);
            c.reference = get_or<std::string>(l, "reference", c.reference);
            if (c.reference != "auto" && c.reference != "oracle" && c.reference != "curve_upper")
                throw ConfigError("lower_bounds: reference must be auto, oracle or curve_upper");
            for (double v : {c.lower.params.c_ntr, c.lower.params.c_good, c.lower.params.c_ugly, c.lower.params.final_constant()})
                if (!(v > 0)) throw ConfigError("lower_bounds: constants must be positive");
        }
        if (j.contains("calibration")) c.calibration_samples = get_or(j["calibration"], "n_samples", c.calibration_samples);
        if (j.contains("sweep")) {
            const auto& s = j.at("sweep");
            for (const auto& k : s.value("kinds", json::array())) {
                const auto kk = kind_from_string(k.get<std::string>());
                if (kk == ExperimentKind::Sweep) throw ConfigError("sweep: nested sweep");
                c.sweep_kinds.push_back(kk);
            }
            for (const auto& dj : s.value("domains", json::array())) {
                domain_from_json(dj);
                c.sweep_domains.push_back(dj);
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    c.raw = j;
    c.raw["seed"] = c.seed;
    c.raw["kind"] = to_string(c.kind);
    return c;
}

inline ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("config: cannot open " + path.string());
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config: " + path.string() + ": " + e.what());
    }
    return config_from_json(j, path.parent_path());
}

/// Applies a seed override and keeps the hashed config in step.
inline void set_seed(ExperimentConfig& c, std::uint64_t seed) {
    c.seed = seed;
    c.raw["seed"] = seed;
}

inline void set_kind(ExperimentConfig& c, ExperimentKind k) {
    c.kind = k;
    c.raw["kind"] = to_string(k);
}

// ---------------------------------------------------------------------------
// Pairs

namespace detail {

/// sup{t : t u in the domain} for unit u.
inline double ray_exit_from_origin(const DomainModel& d, const CVec& u) {
    if (d.is_ball()) return 1.0;
    double lo = 0.0, hi = 2.0 * d.circumradius() + 1.0;
    for (int i = 0; i < 200 && hi - lo > 0; ++i) {
        const double m = 0.5 * (lo + hi);
        if (m <= lo || m >= hi) break;
        (contains(d, u * m) ? lo : hi) = m;
    }
    return lo;
}

}  // namespace detail

inline std::vector<std::pair<Point, Point>> make_pairs(const DomainModel& d, const PairRule& r, std::uint64_t seed) {
    switch (r.kind) {
        case PairRule::Kind::List:
            for (const auto& [x, y] : r.list)
                if (x.dim() != d.dim() || y.dim() != d.dim() || !contains(d, x) || !contains(d, y))
                    throw ConfigError("pairs: listed point outside the domain or of the wrong dimension");
            return r.list;
        case PairRule::Kind::Random: {
            SampleRule s;
            s.count = r.count;
            s.delta_lo = r.delta_lo;
            s.delta_hi = r.delta_hi;
            s.separation = r.separation;
            s.max_separation = r.max_separation;
            s.seed = seed;
            try {
                return sample_pairs(d, s);
            } catch (const std::exception& e) {
                throw ConfigError(e.what());
            }
        }
        case PairRule::Kind::Arc: {
            CVec base(d.dim()), tangent(d.dim());
            base[0] = 1.0;
            tangent[0] = cplx(0, 1);
            if (r.base) base = *r.base;
            if (r.tangent) tangent = *r.tangent;
            if (base.dim() != d.dim() || tangent.dim() != d.dim()) throw ConfigError("pairs: arc base/tangent dimension mismatch");
            if (!(norm(base) > 0) || !(norm(tangent) > 0)) throw ConfigError("pairs: arc base/tangent must be nonzero");
            base *= 1.0 / norm(base);
            tangent *= 1.0 / norm(tangent);
            std::vector<std::pair<Point, Point>> out;
            for (std::size_t k = 0; k < r.count; ++k) {
                const double s = r.count == 1 ? 0.0 : double(k) / double(r.count - 1);
                const double th = r.log_spacing ? r.theta_lo * std::pow(r.theta_hi / r.theta_lo, s)
                                                : r.theta_lo + (r.theta_hi - r.theta_lo) * s;
                auto at = [&](double t) {
                    CVec u = base * std::cos(t) + tangent * std::sin(t);
                    u *= 1.0 / norm(u);
                    return u * (r.radius * detail::ray_exit_from_origin(d, u));
                };
                out.emplace_back(at(th), at(-th));
            }
            return out;
        }
    }
    return {};
}

// ---------------------------------------------------------------------------
// Bundle

struct ReportBundle {
    std::string kind;
    std::vector<VerificationRecord> rows;
    /// Recomputable from rows (see summarize).
    json summary;
    /// Kind-specific results that are not row data (measured maxima, calibration, ...).
    json extras = json::object();
    json provenance;

    std::size_t violations() const { return summary.value("violations", std::size_t{0}); }
};

namespace detail {

inline json stats_json(const ConstantSpread& s) { return {{"min", s.min}, {"median", s.median}, {"max", s.max}, {"n", s.n}}; }

struct Series {
    std::string name;
    std::string xlabel, ylabel;
    std::vector<double> x, y;
};

/// Log-log series for the plots: D against |x-y| on visibility rows and
/// L_e against g(|x-y|) on Gehring-Hayman rows, one per domain.
inline std::vector<Series> plot_series(const std::vector<VerificationRecord>& rows) {
    std::map<std::string, Series> m;
    for (const auto& r : rows) {
        if (r.id == "visibility" && r.dist_euclid && r.D && *r.dist_euclid > 0 && *r.D > 0) {
            auto& s = m["visibility/" + r.domain];
            s.xlabel = "|x-y|";
            s.ylabel = "D";
            s.x.push_back(*r.dist_euclid);
            s.y.push_back(*r.D);
        } else if (r.id == "gehring_hayman" && r.g_xy && r.L_e && *r.g_xy > 0 && *r.L_e > 0) {
            auto& s = m["gehring_hayman/" + r.domain];
            s.xlabel = "g(|x-y|)";
            s.ylabel = "L_e";
            s.x.push_back(*r.g_xy);
            s.y.push_back(*r.L_e);
        }
    }
    std::vector<Series> out;
    for (auto& [name, s] : m) {
        s.name = name;
        out.push_back(std::move(s));
    }
    return out;
}

inline LineFit loglog_fit(const Series& s) {
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
        lx.push_back(std::log(s.x[i]));
        ly.push_back(std::log(s.y[i]));
    }
    return fit_line(lx, ly);
}

}  // namespace detail

/// Violation count, per-domain spreads of c_vis, C_gh and lambda_cert, and
/// log-log fits; everything here is computable from the CSV projection.
inline json summarize(const std::vector<VerificationRecord>& rows) {
    json s;
    std::size_t viol = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> by_id;
    std::map<std::string, std::map<std::string, std::vector<double>>> cols;
    for (const auto& r : rows) {
        viol += r.pass ? 0 : 1;
        auto& b = by_id[r.id];
        ++b.first;
        b.second += r.pass ? 0 : 1;
        if (r.c_vis) cols["c_vis"][r.domain].push_back(*r.c_vis);
        if (r.C_gh) cols["C_gh"][r.domain].push_back(*r.C_gh);
        if (r.lambda_cert) cols["lambda_cert"][r.domain].push_back(*r.lambda_cert);
    }
    s["rows"] = rows.size();
    s["violations"] = viol;
    s["by_id"] = json::object();
    for (const auto& [id, b] : by_id) s["by_id"][id] = {{"n", b.first}, {"violations", b.second}};
    s["constants"] = json::object();
    for (const auto& [col, per] : cols)
        for (const auto& [dom, v] : per) s["constants"][col][dom] = detail::stats_json(spread(v));
    s["fits"] = json::object();
    s["notes"] = json::array();
    for (const auto& series : detail::plot_series(rows)) {
        if (series.x.size() < 3) {
            s["notes"].push_back(series.name + ": fewer than 3 rows, fit and plot skipped");
            continue;
        }
        const auto f = detail::loglog_fit(series);
        s["fits"][series.name] = {{"slope", f.slope}, {"stderr", f.slope_stderr}, {"intercept", f.intercept}, {"n", f.n}};
    }
    if (s["fits"].empty() && s["notes"].empty()) s["notes"].push_back("no log-log series in this report; no plots");
    return s;
}

// ---------------------------------------------------------------------------
// Running

namespace detail {

inline std::optional<GoldilocksProfile> resolve_profile(const ExperimentConfig& c, const DomainModel& d, json& extras) {
    if (!c.profile.is_null()) return GoldilocksProfile(profile_from_json(c.profile, c.base_dir), d.label());
    if (d.is_ball()) return GoldilocksProfile(OmegaSpec::power(1.0, 0.5, 0.5), d.label());
    if (d.is_ellipsoid()) {
        CalibrationOptions opt;
        opt.n_samples = c.calibration_samples;
        opt.seed = c.seed;
        const auto cal = calibrate_omega(d, opt);
        extras["calibration"][d.label()] = {{"profile", profile_to_json(cal.spec)},
                                            {"raw_exponent", cal.raw_exponent},
                                            {"stderr", cal.exponent_stderr},
                                            {"snapped_m", cal.snapped ? json(cal.snapped_m) : json(nullptr)}};
        return GoldilocksProfile(cal.spec, d.label());
    }
    return std::nullopt;
}

inline const GoldilocksProfile& need_profile(const std::optional<GoldilocksProfile>& p, ExperimentKind k) {
    if (!p) throw ConfigError(std::string(to_string(k)) + ": this domain has no default profile; give one in 'profile'");
    return *p;
}

/// Solves every pair in parallel; result i depends only on (seed, i).
inline std::vector<GeodesicResult> solve_all(const MetricField& f, const std::vector<std::pair<Point, Point>>& pairs,
                                             const ExperimentConfig& c, const GoldilocksProfile* prof) {
    const Lattice lattice = build_lattice(f, c.solver);
    std::vector<GeodesicResult> out(pairs.size());
    std::vector<std::string> errors(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t i) {
        SolverConfig sc = c.solver;
        sc.seed = row_seed(c.seed, i);
        try {
            out[i] = solve_geodesic(f, pairs[i].first, pairs[i].second, sc, prof, &lattice, c.lower.params);
        } catch (const std::exception& e) {
            errors[i] = e.what();
        }
    });
    for (std::size_t i = 0; i < errors.size(); ++i)
        if (!errors[i].empty()) throw ConfigError("pair " + std::to_string(i) + ": " + errors[i]);
    return out;
}

inline void run_metric_eval(const DomainModel& d, const std::optional<GoldilocksProfile>& prof,
                            const std::vector<std::pair<Point, Point>>& pairs, std::vector<VerificationRecord>& rows) {
    const auto f = MetricField::best(d, prof);
    for (const auto& [z, w] : pairs) {
        const CVec v = w - z;
        if (norm(v) < 1e-9) continue;
        const auto est = kappa_bounds(f, z, v);
        const double dv = directional_boundary_distance(d, z, v);
        const double dz = boundary_distance(d, z);
        VerificationRecord r;
        r.domain = d.label();
        r.m = d.type_exponent();
        r.x = z;
        r.y = w;
        r.dist_euclid = norm(v);
        r.delta_x = dz;
        r.delta_y = boundary_distance(d, w);
        r.k_up = est.upper;
        r.k_low_best = est.lower;
        r.notes = est.provenance;

        VerificationRecord lo = r;
        lo.id = "metric.sandwich_lower";
        lo.lhs = 1.0 / (2.0 * dv);
        lo.rhs = est.lower;
        lo.constant = 0.5;
        lo.measured_constant = est.lower * dv;
        lo.pass = lo.lhs <= lo.rhs * (1 + 1e-12) + 1e-12;
        rows.push_back(lo);

        VerificationRecord up = r;
        up.id = "metric.sandwich_upper";
        up.lhs = est.upper;
        up.rhs = 1.0 / dv + 1e-9;
        up.constant = 1.0;
        up.measured_constant = est.upper * dv;
        up.pass = up.lhs <= up.rhs;
        rows.push_back(up);

        if (prof) {
            VerificationRecord sg = r;
            sg.id = "metric.sg_lower";
            const double w_d = prof->omega_at(std::min(dz, prof->omega().t_max));
            sg.lhs = prof->c_metric() * norm(v) / w_d;
            sg.rhs = est.upper;
            sg.constant = prof->c_metric();
            sg.measured_constant = est.upper * w_d / norm(v);
            sg.pass = holds(sg.lhs, sg.rhs);
            rows.push_back(sg);
        }
    }
}

inline void fill_geodesic_row(VerificationRecord& r, const DomainModel& d, const GeodesicResult& g) {
    r.domain = d.label();
    r.m = d.type_exponent();
    r.x = g.curve.front();
    r.y = g.curve.back();
    r.dist_euclid = distance(r.x, r.y);
    r.delta_x = boundary_distance(d, r.x);
    r.delta_y = boundary_distance(d, r.y);
    r.D = penetration_depth(g.curve, d).D;
    r.L_e = g.curve.length();
    r.k_up = g.upper_length;
    r.k_low_best = g.lower_distance;
    r.lambda_cert = g.lambda_infinite ? kInf : g.lambda_cert;
}

inline void run_one(ExperimentKind kind, const DomainModel& d, const ExperimentConfig& c, std::vector<VerificationRecord>& rows,
                    json& extras) {
    const auto prof = resolve_profile(c, d, extras);
    const auto pairs = make_pairs(d, c.pairs, c.seed);
    const GoldilocksProfile* pp = prof ? &*prof : nullptr;
    switch (kind) {
        case ExperimentKind::MetricEval:
            run_metric_eval(d, prof, pairs, rows);
            return;
        case ExperimentKind::LowerBounds: {
            const bool exact = d.is_ball();
            const std::string ref = c.reference == "auto" ? (exact ? "oracle" : "curve_upper") : c.reference;
            if (ref == "oracle" && !exact) throw ConfigError("lower-bounds: no exact oracle on " + d.label());
            std::vector<double> reference;
            if (ref == "oracle") {
                const auto f = MetricField::exact(d);
                for (const auto& [x, y] : pairs) reference.push_back(*exact_distance(f, x, y));
            } else {
                for (const auto& g : solve_all(MetricField::best(d, prof), pairs, c, pp)) reference.push_back(g.upper_length);
            }
            const auto rep = verify_lower_bounds(d, pp, pairs, reference,
                                                 ref == "oracle" ? ReferenceKind::Oracle : ReferenceKind::CurveUpper, c.lower);
            rows.insert(rows.end(), rep.records.begin(), rep.records.end());
            auto& e = extras["lower_bounds"][d.label()];
            e["reference"] = ref;
            e["skipped_degenerate"] = rep.skipped_degenerate;
            e["c_final"] = c.lower.params.final_constant();
            if (rep.max_c)
                e["max_c"] = {{"ntr", rep.max_c->ntr}, {"good1", rep.max_c->good1}, {"ugly1", rep.max_c->ugly1}, {"final_h", rep.max_c->final_h}};
            if (rep.pisa) e["pisa_over_final_h"] = stats_json({rep.pisa->min, rep.pisa->median, rep.pisa->max, rep.pisa->n});
            return;
        }
        default: break;
    }

    const auto f = MetricField::best(d, prof);
    const auto results = solve_all(f, pairs, c, pp);
    std::size_t skipped = 0;
    for (const auto& g : results) {
        switch (kind) {
            case ExperimentKind::Geodesic: {
                if (g.curve.degenerate()) { ++skipped; break; }
                VerificationRecord r;
                fill_geodesic_row(r, d, g);
                r.id = "geodesic.lambda";
                r.lhs = *r.lambda_cert;
                r.rhs = c.lambda_max;
                r.constant = c.lambda_max;
                r.measured_constant = *r.lambda_cert;
                r.pass = r.lhs <= r.rhs;
                rows.push_back(r);
                if (const auto o = exact_distance(f, r.x, r.y)) {
                    VerificationRecord q = r;
                    q.id = "geodesic.oracle";
                    q.lhs = g.upper_length;
                    q.rhs = (1 + c.oracle_tol) * *o;
                    q.constant = c.oracle_tol;
                    q.measured_constant = g.upper_length / *o;
                    q.pass = q.lhs <= q.rhs;
                    rows.push_back(q);
                }
                break;
            }
            case ExperimentKind::Visibility: {
                auto r = verify_visibility(d, g, need_profile(prof, kind), c.visibility_floor);
                if (!r) { ++skipped; break; }
                r->lambda_cert = g.lambda_infinite ? kInf : g.lambda_cert;
                rows.push_back(*r);
                break;
            }
            case ExperimentKind::GehringHayman: {
                auto rs = verify_gehring_hayman(d, g, need_profile(prof, kind), c.gh);
                if (rs.empty()) ++skipped;
                if (!rs.empty()) rs.front().lambda_cert = g.lambda_infinite ? kInf : g.lambda_cert;
                for (std::size_t k = 1; k < rs.size(); ++k) rs[k].lambda_cert.reset();
                rows.insert(rows.end(), rs.begin(), rs.end());
                break;
            }
            case ExperimentKind::Shells: {
                if (g.curve.degenerate()) { ++skipped; break; }
                const auto s = shell_decompose(g.curve, d);
                const auto chk = check_shell_invariants(s, d, c.shell_tol);
                VerificationRecord r;
                fill_geodesic_row(r, d, g);
                r.id = "shell.invariants";
                r.lhs = std::max(chk.worst_upper, chk.worst_cut);
                r.rhs = c.shell_tol;
                r.constant = c.shell_tol;
                r.measured_constant = r.lhs;
                r.pass = r.lhs <= r.rhs;
                r.notes = "pieces=" + std::to_string(s.pieces.size()) + "; N_x=" + std::to_string(s.N_x) + "; N_y=" + std::to_string(s.N_y);
                rows.push_back(r);
                VerificationRecord q = r;
                q.id = "shell.concat";
                q.lhs = chk.concat_error;
                q.rhs = 1e-9;
                q.constant = 1e-9;
                q.measured_constant = chk.concat_error;
                q.pass = q.lhs <= q.rhs;
                q.lambda_cert.reset();
                rows.push_back(q);
                for (auto& sr : verify_shells(s, need_profile(prof, kind), d.label(), d.type_exponent(), c.shells)) rows.push_back(sr);
                break;
            }
            default: break;
        }
    }
    if (skipped) extras["skipped_degenerate"][d.label()] = skipped;
}

inline json provenance(const ExperimentConfig& c) {
    json hashed = c.raw;
    hashed.erase("output");
    char hex[17];
    std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(fnv1a(hashed.dump())));
    return {{"config_hash", hex},
            {"seed", c.seed},
            {"versions",
             {{"kobalab", kVersion},
              {"compiler", __VERSION__},
              {"eigen", std::to_string(EIGEN_WORLD_VERSION) + "." + std::to_string(EIGEN_MAJOR_VERSION) + "." +
                            std::to_string(EIGEN_MINOR_VERSION)},
              {"boost", BOOST_LIB_VERSION},
              {"json", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." + std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                           std::to_string(NLOHMANN_JSON_VERSION_PATCH)}}}};
}

}  // namespace detail

/// Runs the configured experiment. Rows are ordered by id (stable).
inline ReportBundle run(const ExperimentConfig& c) {
    ReportBundle b;
    b.kind = to_string(c.kind);
    std::vector<json> domains = c.sweep_domains.empty() ? std::vector<json>{c.domain} : c.sweep_domains;
    std::vector<ExperimentKind> kinds{c.kind};
    if (c.kind == ExperimentKind::Sweep) {
        kinds = c.sweep_kinds;
        if (kinds.empty()) kinds = {ExperimentKind::Visibility, ExperimentKind::GehringHayman};
    } else {
        domains = {c.domain};
    }
    for (const auto& dj : domains) {
        const auto d = domain_from_json(dj);
        for (auto k : kinds) detail::run_one(k, d, c, b.rows, b.extras);
    }
    std::stable_sort(b.rows.begin(), b.rows.end(), [](const auto& a, const auto& z) { return a.id < z.id; });
    b.summary = summarize(b.rows);
    b.provenance = detail::provenance(c);
    return b;
}

// ---------------------------------------------------------------------------
// Emission

inline constexpr const char* kCsvTail[] = {"dist_euclid", "delta_x", "delta_y", "D",     "L_e",   "k_up",        "k_low_best",
                                           "g_xy",        "c_vis",   "C_gh",    "lambda_cert"};

inline std::size_t max_dim(const std::vector<VerificationRecord>& rows) {
    std::size_t n = 1;
    for (const auto& r : rows) n = std::max({n, r.x.dim(), r.y.dim()});
    return n;
}

inline std::string csv_header(std::size_t n) {
    std::string h = "id,domain,m";
    for (const char* p : {"x", "y"})
        for (std::size_t i = 0; i < n; ++i) {
            const std::string base = n == 1 ? p : p + std::to_string(i + 1);
            h += "," + base + "_re," + base + "_im";
        }
    for (const char* c : kCsvTail) h += std::string(",") + c;
    return h + ",pass";
}

inline std::string csv_text(const std::vector<VerificationRecord>& rows) {
    const std::size_t n = max_dim(rows);
    std::string out = csv_header(n) + "\n";
    auto opt = [](const std::optional<double>& v) { return v ? format_double(*v) : std::string(); };
    for (const auto& r : rows) {
        std::string line = r.id + "," + r.domain + "," + format_double(r.m);
        for (const Point* p : {&r.x, &r.y})
            for (std::size_t i = 0; i < n; ++i)
                line += i < p->dim() ? "," + format_double((*p)[i].real()) + "," + format_double((*p)[i].imag()) : std::string(",,");
        for (const auto& v : {r.dist_euclid, r.delta_x, r.delta_y, r.D, r.L_e, r.k_up, r.k_low_best, r.g_xy, r.c_vis, r.C_gh, r.lambda_cert})
            line += "," + opt(v);
        line += r.pass ? ",true" : ",false";
        out += line + "\n";
    }
    return out;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

inline void emit_csv(const ReportBundle& b, const std::filesystem::path& path) { write_file(path, csv_text(b.rows)); }

inline json report_json(const ReportBundle& b) {
    json rows = json::array();
    for (const auto& r : b.rows) rows.push_back(to_json(r));
    return {{"kind", b.kind}, {"summary", b.summary}, {"extras", b.extras}, {"provenance", b.provenance}, {"rows", rows}};
}

inline void emit_json(const ReportBundle& b, const std::filesystem::path& path) { write_file(path, report_json(b).dump(2) + "\n"); }

namespace detail {

inline std::string fixed(double v, int digits = 2) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string svg_escape(const std::string& s) {
    std::string o;
    for (char ch : s) {
        if (ch == '<') o += "&lt;";
        else if (ch == '>') o += "&gt;";
        else if (ch == '&') o += "&amp;";
        else o += ch;
    }
    return o;
}

}  // namespace detail

/// Static log-log scatter with the least-squares line and its slope.
inline std::string loglog_svg(const std::string& title, const std::string& xlabel, const std::string& ylabel,
                              const std::vector<double>& xs, const std::vector<double>& ys, const LineFit& fit) {
    constexpr double W = 520, H = 380, ml = 70, mr = 20, mt = 40, mb = 55;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        lx.push_back(std::log10(xs[i]));
        ly.push_back(std::log10(ys[i]));
    }
    auto pad = [](double lo, double hi) {
        const double p = hi > lo ? 0.05 * (hi - lo) : 0.5;
        return std::pair{lo - p, hi + p};
    };
    const auto [x0, x1] = pad(*std::min_element(lx.begin(), lx.end()), *std::max_element(lx.begin(), lx.end()));
    const auto [y0, y1] = pad(*std::min_element(ly.begin(), ly.end()), *std::max_element(ly.begin(), ly.end()));
    auto X = [&](double v) { return ml + (v - x0) / (x1 - x0) * (W - ml - mr); };
    auto Y = [&](double v) { return H - mb - (v - y0) / (y1 - y0) * (H - mt - mb); };
    using detail::fixed;
    std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fixed(W, 0) + "\" height=\"" + fixed(H, 0) + "\" viewBox=\"0 0 " +
                    fixed(W, 0) + " " + fixed(H, 0) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    s += "<text x=\"" + fixed(W / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" + detail::svg_escape(title) + "</text>\n";
    s += "<path d=\"M" + fixed(ml) + " " + fixed(mt) + " L" + fixed(ml) + " " + fixed(H - mb) + " L" + fixed(W - mr) + " " + fixed(H - mb) +
         "\" fill=\"none\" stroke=\"black\"/>\n";
    // decade ticks
    for (int k = static_cast<int>(std::ceil(x0)); k <= static_cast<int>(std::floor(x1)); ++k)
        s += "<text x=\"" + fixed(X(k)) + "\" y=\"" + fixed(H - mb + 16) + "\" text-anchor=\"middle\">1e" + std::to_string(k) + "</text>\n";
    for (int k = static_cast<int>(std::ceil(y0)); k <= static_cast<int>(std::floor(y1)); ++k)
        s += "<text x=\"" + fixed(ml - 6) + "\" y=\"" + fixed(Y(k) + 4) + "\" text-anchor=\"end\">1e" + std::to_string(k) + "</text>\n";
    s += "<text x=\"" + fixed((ml + W - mr) / 2) + "\" y=\"" + fixed(H - 12) + "\" text-anchor=\"middle\">" + detail::svg_escape(xlabel) +
         "</text>\n";
    s += "<text x=\"16\" y=\"" + fixed((mt + H - mb) / 2) + "\" text-anchor=\"middle\" transform=\"rotate(-90 16 " + fixed((mt + H - mb) / 2) +
         ")\">" + detail::svg_escape(ylabel) + "</text>\n";
    for (std::size_t i = 0; i < lx.size(); ++i)
        s += "<circle cx=\"" + fixed(X(lx[i])) + "\" cy=\"" + fixed(Y(ly[i])) + "\" r=\"3\" fill=\"steelblue\"/>\n";
    // natural-log fit drawn in log10 coordinates: same slope
    const double b10 = fit.intercept / std::log(10.0);
    s += "<path d=\"M" + fixed(X(x0)) + " " + fixed(Y(fit.slope * x0 + b10)) + " L" + fixed(X(x1)) + " " + fixed(Y(fit.slope * x1 + b10)) +
         "\" stroke=\"firebrick\" fill=\"none\"/>\n";
    s += "<text x=\"" + fixed(ml + 10) + "\" y=\"" + fixed(mt + 14) + "\" fill=\"firebrick\">slope " + fixed(fit.slope) + " ± " +
         fixed(fit.slope_stderr) + " (n = " + std::to_string(fit.n) + ")</text>\n";
    return s + "</svg>\n";
}

/// One SVG per log-log series with at least 3 rows; returns the files written.
inline std::vector<std::filesystem::path> emit_plots(const ReportBundle& b, const std::filesystem::path& dir, const std::string& stem = "report") {
    std::vector<std::filesystem::path> out;
    for (const auto& series : detail::plot_series(b.rows)) {
        if (series.x.size() < 3) continue;
        std::string name = series.name;
        std::replace(name.begin(), name.end(), '/', '_');
        const auto path = dir / (stem + "_" + name + ".svg");
        write_file(path, loglog_svg(series.name, series.xlabel, series.ylabel, series.x, series.y, detail::loglog_fit(series)));
        out.push_back(path);
    }
    return out;
}

/// CSV, JSON and plots under the configured output directory.
inline std::vector<std::filesystem::path> emit_all(const ReportBundle& b, const ExperimentConfig& c) {
    std::vector<std::filesystem::path> files{c.out_dir / (c.stem + ".csv"), c.out_dir / (c.stem + ".json")};
    emit_csv(b, files[0]);
    emit_json(b, files[1]);
    if (c.plots)
        for (auto& p : emit_plots(b, c.out_dir, c.stem)) files.push_back(p);
    return files;
}

}  // namespace kobalab
