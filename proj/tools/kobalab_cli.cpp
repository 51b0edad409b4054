#include <iostream>

#include <CLI11.hpp>

#include <kobalab/experiment.hpp>

using namespace kobalab;

namespace {

enum Exit { kPass = 0, kViolations = 1, kUsage = 2 };

struct Common {
    std::string config;
    std::optional<std::uint64_t> seed;
    std::string out;
};

ExperimentConfig load(const Common& o, bool required) {
    ExperimentConfig c;
    if (o.config.empty()) {
        if (required) throw ConfigError("--config is required");
        c = config_from_json(json::object());
    } else {
        if (!std::filesystem::exists(o.config)) throw ConfigError("config not found: " + o.config);
        c = load_config(o.config);
    }
    if (o.seed) set_seed(c, *o.seed);
    if (!o.out.empty()) c.out_dir = o.out;
    return c;
}

json parse_json_arg(const std::string& s, const char* what) {
    try {
        return json::parse(s);
    } catch (const json::exception& e) {
        throw ConfigError(std::string(what) + ": " + e.what());
    }
}

int finish(const ReportBundle& b, const ExperimentConfig& c) {
    const auto files = emit_all(b, c);
    std::cout << b.summary.dump(2) << "\n";
    for (const auto& f : files) std::cerr << "wrote " << f.string() << "\n";
    return b.violations() == 0 ? kPass : kViolations;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Kobayashi metric lab: metric estimates, geodesics and inequality checks"};
    app.require_subcommand(1);
    Common o;
    auto common = [&](CLI::App* sc) {
        sc->add_option("--config", o.config, "Experiment config (JSON)");
        sc->add_option("--seed", o.seed, "Override the config seed");
        sc->add_option("--out", o.out, "Output directory");
    };

    auto* domain = app.add_subcommand("domain", "Domain models");
    domain->require_subcommand(1);
    auto* info = domain->add_subcommand("info", "Print a domain summary");
    common(info);
    std::string domain_json;
    info->add_option("--domain", domain_json, "Domain descriptor, e.g. '{\"kind\":\"ellipsoid\",\"m\":2}'");

    auto* metric = app.add_subcommand("metric", "Infinitesimal metric");
    metric->require_subcommand(1);
    auto* eval = metric->add_subcommand("eval", "kappa bounds at a point, or the metric-eval experiment");
    common(eval);
    std::string z_json, v_json;
    eval->add_option("--z", z_json, "Point, e.g. '[[0.5,0]]'");
    eval->add_option("--v", v_json, "Direction, e.g. '[1]'");

    auto* geo = app.add_subcommand("geodesic", "Near-geodesics");
    geo->require_subcommand(1);
    auto* solve = geo->add_subcommand("solve", "Solve one pair, or the geodesic experiment");
    common(solve);
    std::string x_json, y_json;
    solve->add_option("--x", x_json, "Start point");
    solve->add_option("--y", y_json, "End point");

    auto* verify = app.add_subcommand("verify", "Run one verification experiment");
    common(verify);
    std::string verify_kind;
    verify->add_option("kind", verify_kind, "metric-eval, geodesic, visibility, gehring-hayman, lower-bounds or shells")->required();

    auto* sweep = app.add_subcommand("sweep", "Run the sweep described in the config");
    common(sweep);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kPass : kUsage;
    }

    try {
        if (*info) {
            json dj;
            if (!domain_json.empty()) dj = parse_json_arg(domain_json, "--domain");
            else dj = load(o, true).domain;
            std::cout << domain_info(domain_from_json(dj)).dump(2) << "\n";
            return kPass;
        }
        if (*eval) {
            if (z_json.empty() != v_json.empty()) throw ConfigError("--z and --v go together");
            auto c = load(o, z_json.empty());
            if (!z_json.empty()) {
                const auto d = domain_from_json(c.domain);
                json extras;
                const auto prof = detail::resolve_profile(c, d, extras);
                const auto f = MetricField::best(d, prof);
                const Point z = point_from_json(parse_json_arg(z_json, "--z"));
                const Direction v = point_from_json(parse_json_arg(v_json, "--v"));
                if (z.dim() != d.dim() || v.dim() != d.dim()) throw ConfigError("--z/--v dimension mismatch");
                if (!contains(d, z)) throw ConfigError("--z lies outside the domain");
                json j = to_json(kappa_bounds(f, z, v));
                j["delta"] = boundary_distance(d, z);
                j["delta_direction"] = directional_boundary_distance(d, z, v);
                std::cout << j.dump(2) << "\n";
                return kPass;
            }
            set_kind(c, ExperimentKind::MetricEval);
            return finish(run(c), c);
        }
        if (*solve) {
            if (x_json.empty() != y_json.empty()) throw ConfigError("--x and --y go together");
            auto c = load(o, x_json.empty());
            if (!x_json.empty()) {
                const auto d = domain_from_json(c.domain);
                json extras;
                const auto prof = detail::resolve_profile(c, d, extras);
                const auto f = MetricField::best(d, prof);
                const Point x = point_from_json(parse_json_arg(x_json, "--x"));
                const Point y = point_from_json(parse_json_arg(y_json, "--y"));
                if (x.dim() != d.dim() || y.dim() != d.dim() || !contains(d, x) || !contains(d, y))
                    throw ConfigError("--x/--y must be points of the domain");
                auto sc = c.solver;
                sc.seed = c.seed;
                const auto r = solve_geodesic(f, x, y, sc, prof ? &*prof : nullptr, nullptr, c.lower.params);
                std::cout << to_json(r).dump(2) << "\n";
                return kPass;
            }
            set_kind(c, ExperimentKind::Geodesic);
            return finish(run(c), c);
        }
        if (*verify) {
            auto c = load(o, true);
            const auto k = kind_from_string(verify_kind);
            if (k == ExperimentKind::Sweep) throw ConfigError("use the sweep subcommand");
            set_kind(c, k);
            return finish(run(c), c);
        }
        if (*sweep) {
            auto c = load(o, true);
            set_kind(c, ExperimentKind::Sweep);
            return finish(run(c), c);
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    }
    return kUsage;
}
