#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "calibration.hpp"
#include "domain.hpp"
#include "geodesic.hpp"
#include "goldilocks.hpp"
#include "inequality.hpp"
#include "metric.hpp"

namespace kobalab {

using json = nlohmann::json;

/// Malformed or inconsistent configuration; the CLI maps it to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Shortest decimal that reads back to the same double.
inline std::string format_double(double v) {
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

// ---------------------------------------------------------------------------
// Points

/// Coordinates are numbers (real) or [re, im] pairs.
inline CVec point_from_json(const json& j) {
    if (!j.is_array() || j.empty() || j.size() > kMaxDim) throw ConfigError("point: expected an array of 1..3 coordinates");
    CVec p(j.size());
    for (std::size_t i = 0; i < j.size(); ++i) {
        const auto& c = j[i];
        if (c.is_number()) p[i] = c.get<double>();
        else if (c.is_array() && c.size() == 2 && c[0].is_number() && c[1].is_number()) p[i] = cplx(c[0].get<double>(), c[1].get<double>());
        else throw ConfigError("point: coordinate must be a number or [re, im]");
    }
    return p;
}

inline json to_json(const CVec& p) {
    json a = json::array();
    for (std::size_t i = 0; i < p.dim(); ++i) a.push_back({p[i].real(), p[i].imag()});
    return a;
}

inline json to_json(const Curve& c) {
    json a = json::array();
    for (std::size_t i = 0; i < c.size(); ++i) a.push_back(to_json(c[i]));
    return a;
}

// ---------------------------------------------------------------------------
// Descriptors

template <class T>
T get_or(const json& j, const char* key, T fallback) {
    if (!j.contains(key)) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("field '") + key + "': " + e.what());
    }
}

/// {"kind":"disc"}, {"kind":"ball","n":2}, {"kind":"ellipsoid","m":2},
/// {"kind":"halfspaces","faces":[{"a":[...],"b":1}]}
inline DomainModel domain_from_json(const json& j) {
    if (!j.is_object() || !j.contains("kind")) throw ConfigError("domain: missing 'kind'");
    const auto kind = j.at("kind").get<std::string>();
    try {
        if (kind == "disc") return DomainModel::unit_disc();
        if (kind == "ball") return DomainModel::unit_ball(get_or<std::size_t>(j, "n", 2));
        if (kind == "ellipsoid") return DomainModel::ellipsoid(get_or<double>(j, "m", 2.0));
        if (kind == "halfspaces") {
            std::vector<Face> faces;
            for (const auto& f : j.at("faces")) faces.push_back({point_from_json(f.at("a")), f.at("b").get<double>()});
            return DomainModel::halfspaces(std::move(faces), get_or<std::string>(j, "label", "halfspaces"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    } catch (const json::exception& e) {
        throw ConfigError(std::string("domain: ") + e.what());
    }
    throw ConfigError("domain: unknown kind '" + kind + "'");
}

inline json domain_to_json(const DomainModel& d) {
    json j;
    if (d.is_ball()) {
        j["kind"] = d.dim() == 1 ? "disc" : "ball";
        if (d.dim() > 1) j["n"] = d.dim();
    } else if (d.is_ellipsoid()) {
        j["kind"] = "ellipsoid";
        j["m"] = std::get<Ellipsoid>(d.kind()).m;
    } else {
        j["kind"] = "halfspaces";
        j["faces"] = json::array();
        for (const auto& f : std::get<Halfspaces>(d.kind()).faces()) j["faces"].push_back({{"a", to_json(f.a)}, {"b", f.b}});
    }
    return j;
}

inline Tabulated read_table_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("profile: cannot read table file " + path.string());
    Tabulated tb;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#' || std::isalpha(static_cast<unsigned char>(line[0]))) continue;
        for (auto& ch : line)
            if (ch == ',') ch = ' ';
        std::istringstream ss(line);
        double t, w;
        if (ss >> t >> w) {
            tb.t.push_back(t);
            tb.w.push_back(w);
        }
    }
    return tb;
}

/// {"omega":{"form":"power","C":1,"a":0.5},"c_metric":0.5}, or
/// {"omega":{"form":"table","t":[...],"w":[...]}} with "file" in place of
/// t/w for a two-column CSV relative to base_dir.
inline OmegaSpec profile_from_json(const json& j, const std::filesystem::path& base_dir = {}) {
    if (!j.is_object() || !j.contains("omega")) throw ConfigError("profile: missing 'omega'");
    const auto& o = j.at("omega");
    OmegaSpec s;
    const auto form = get_or<std::string>(o, "form", "power");
    if (form == "power") {
        s.form = PowerLaw{get_or<double>(o, "C", 1.0), get_or<double>(o, "a", 0.5)};
    } else if (form == "table") {
        if (o.contains("file")) s.form = read_table_file(base_dir / o.at("file").get<std::string>());
        else s.form = Tabulated{get_or<std::vector<double>>(o, "t", {}), get_or<std::vector<double>>(o, "w", {})};
    } else {
        throw ConfigError("profile: unknown omega form '" + form + "'");
    }
    s.c_metric = get_or<double>(j, "c_metric", 0.5);
    s.t_max = get_or<double>(j, "t_max", 4.0);
    s.allow_steep = get_or<bool>(j, "allow_steep", false);
    try {
        validate(s);
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return s;
}

inline json profile_to_json(const OmegaSpec& s) {
    json o;
    if (const auto* p = std::get_if<PowerLaw>(&s.form)) {
        o = {{"form", "power"}, {"C", p->C}, {"a", p->a}};
    } else {
        const auto& tb = std::get<Tabulated>(s.form);
        o = {{"form", "table"}, {"t", tb.t}, {"w", tb.w}};
    }
    return {{"omega", o}, {"c_metric", s.c_metric}, {"t_max", s.t_max}};
}

inline SolverConfig solver_from_json(const json& j) {
    SolverConfig c;
    if (j.is_null()) return c;
    c.h0 = get_or(j, "h0", c.h0);
    c.h_min = get_or(j, "h_min", c.h_min);
    c.beta = get_or(j, "beta", c.beta);
    c.k_nearest = get_or(j, "k_nearest", c.k_nearest);
    c.node_cap = get_or(j, "node_cap", c.node_cap);
    c.iterations = get_or(j, "iterations", c.iterations);
    c.segment_target = get_or(j, "segment_target", c.segment_target);
    c.cert_pairs = get_or(j, "cert_pairs", c.cert_pairs);
    c.endpoint_delta_min = get_or(j, "endpoint_delta_min", c.endpoint_delta_min);
    try {
        c.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return c;
}

inline json solver_to_json(const SolverConfig& c) {
    return {{"h0", c.h0},
            {"h_min", c.h_min},
            {"beta", c.beta},
            {"k_nearest", c.k_nearest},
            {"node_cap", c.node_cap},
            {"iterations", c.iterations},
            {"segment_target", c.segment_target},
            {"cert_pairs", c.cert_pairs},
            {"endpoint_delta_min", c.endpoint_delta_min}};
}

// ---------------------------------------------------------------------------
// Results

inline json to_json(const AdmissibilityReport& a) {
    return {{"passed", a.passed()},
            {"a_decreasing", a.a_decreasing},
            {"b_increasing", a.b_increasing},
            {"c_integrable", a.c_integrable},
            {"dominates_sqrt", a.dominates_sqrt},
            {"degenerate", a.degenerate},
            {"extrapolated", a.extrapolated},
            {"tail_exponent", a.tail_exponent},
            {"omega_exponent", a.omega_exponent}};
}

inline json to_json(const MetricEstimate& e) {
    return {{"lower", e.lower}, {"upper", e.upper}, {"provenance", e.provenance}, {"inconsistent", e.inconsistent}};
}

inline json to_json(const BoundBundle& b) {
    auto rows = [](const std::vector<Bound>& v) {
        json a = json::array();
        for (const auto& x : v)
            a.push_back({{"id", x.id}, {"value", x.value}, {"constant", x.constant}, {"applicable", x.applicable}, {"reason", x.reason}});
        return a;
    };
    return {{"lower", rows(b.lower)}, {"upper", rows(b.upper)}, {"best_lower", b.best_lower()}, {"best_upper", b.best_upper()}};
}

/// Timing is left out so that reports are reproducible.
inline json to_json(const GeodesicResult& r) {
    const auto& d = r.diagnostics;
    return {{"curve", to_json(r.curve)},
            {"upper_length", r.upper_length},
            {"lower_distance", r.lower_distance},
            {"lambda_cert", r.lambda_infinite ? json(nullptr) : json(r.lambda_cert)},
            {"lambda_infinite", r.lambda_infinite},
            {"diagnostics",
             {{"lattice_nodes", d.lattice_nodes},
              {"path_vertices", d.path_vertices},
              {"lattice_upper", d.lattice_upper},
              {"lattice_lambda", d.lattice_lambda},
              {"refine_length_in", d.refine.length_in},
              {"refine_length_out", d.refine.length_out},
              {"refine_sweeps", d.refine.sweeps},
              {"lattice_coarsened", d.lattice_coarsened},
              {"warning", d.warning}}}};
}

inline json to_json(const VerificationRecord& r) {
    json j{{"id", r.id},
           {"domain", r.domain},
           {"m", r.m},
           {"x", to_json(r.x)},
           {"y", to_json(r.y)},
           {"lhs", r.lhs},
           {"rhs", r.rhs},
           {"constant", r.constant},
           {"measured_constant", r.measured_constant},
           {"pass", r.pass},
           {"notes", r.notes}};
    auto put = [&](const char* k, const std::optional<double>& v) {
        if (v) j[k] = *v;
    };
    put("dist_euclid", r.dist_euclid);
    put("delta_x", r.delta_x);
    put("delta_y", r.delta_y);
    put("D", r.D);
    put("L_e", r.L_e);
    put("k_up", r.k_up);
    put("k_low_best", r.k_low_best);
    put("g_xy", r.g_xy);
    put("c_vis", r.c_vis);
    put("C_gh", r.C_gh);
    put("lambda_cert", r.lambda_cert);
    return j;
}

inline json domain_info(const DomainModel& d) {
    const auto diam = diameter(d);
    return {{"label", d.label()},
            {"descriptor", domain_to_json(d)},
            {"dim", d.dim()},
            {"type_exponent", d.type_exponent()},
            {"convex", d.is_convex()},
            {"dini_smooth", d.is_dini_smooth()},
            {"inradius", d.inradius()},
            {"circumradius", d.circumradius()},
            {"center", to_json(d.center())},
            {"diameter", diam.value}};
}

}  // namespace kobalab
