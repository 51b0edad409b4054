#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <numeric>
#include <optional>
#include <queue>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/tools/minima.hpp>

#include "curve.hpp"
#include "domain.hpp"
#include "goldilocks.hpp"
#include "metric.hpp"
#include "util.hpp"

namespace kobalab {

struct SolverConfig {
    /// Base lattice spacing.
    double h0 = 0.1;
    /// Smallest lattice spacing.
    double h_min = 0.02;
    /// Local spacing is max(h_min, beta * delta), capped by h0.
    double beta = 0.5;
    /// Edges per node (k nearest neighbours).
    int k_nearest = 12;
    /// Lattice node cap; exceeding it doubles h0 and h_min.
    std::size_t node_cap = 4000;
    /// Vertex sweeps spent in refine_curve.
    int iterations = 60;
    /// Final kappa-length per segment after refinement.
    double segment_target = 0.2;
    /// Sub-pairs used by certify_lambda.
    int cert_pairs = 64;
    /// Endpoints closer than this to the boundary are rejected.
    double endpoint_delta_min = 1e-9;
    std::uint64_t seed = 0;

    void validate() const {
        if (!(h_min > 0)) throw std::invalid_argument("SolverConfig: h_min must be positive");
        if (!(h0 >= h_min)) throw std::invalid_argument("SolverConfig: h0 must be >= h_min");
        if (!(beta > 0 && beta <= 1)) throw std::invalid_argument("SolverConfig: beta must lie in (0, 1]");
        if (iterations < 0) throw std::invalid_argument("SolverConfig: iterations must be >= 0");
        if (k_nearest < 1) throw std::invalid_argument("SolverConfig: k_nearest must be >= 1");
        if (!(segment_target > 0)) throw std::invalid_argument("SolverConfig: segment_target must be positive");
        if (cert_pairs < 10) throw std::invalid_argument("SolverConfig: cert_pairs must be >= 10");
    }
};

namespace detail {

/// Fixed 7-point Gauss rule on the upper kappa density; used for graph weights
/// and as the objective inside refinement. Certified lengths use
/// curve_kappa_length.
inline double fast_segment_upper(const MetricField& f, const Point& a, const Point& b) {
    const CVec v = b - a;
    if (norm2(v) == 0) return 0.0;
    return boost::math::quadrature::gauss<double, 7>::integrate(
        [&](double t) { return kappa_side(f, lerp(a, b, t), v, Side::Upper); }, 0.0, 1.0);
}

}  // namespace detail

struct Edge {
    std::uint32_t to;
    double w;
};

struct Lattice {
    std::vector<Point> nodes;
    std::vector<std::vector<Edge>> adj;
    double h0 = 0.0;
    double h_min = 0.0;
    bool coarsened = false;
    std::string warning;

    std::size_t edge_count() const {
        std::size_t e = 0;
        for (const auto& a : adj) e += a.size();
        return e / 2;
    }
};

namespace detail {

struct CellRefiner {
    const DomainModel& d;
    double h_min, beta;
    std::size_t cap;
    std::size_t dims;
    std::vector<Point> out;
    bool overflow = false;

    void refine(const Eigen::VectorXd& c, double size) {
        if (overflow) return;
        const Point p = from_real(c);
        if (!contains(d, p)) return;
        const double target = std::max(h_min, beta * boundary_distance(d, p));
        if (size <= target || size * 0.5 < h_min) {
            out.push_back(p);
            if (out.size() > cap) overflow = true;
            return;
        }
        const std::size_t children = std::size_t{1} << dims;
        for (std::size_t m = 0; m < children && !overflow; ++m) {
            Eigen::VectorXd cc = c;
            for (std::size_t k = 0; k < dims; ++k) cc[k] += ((m >> k) & 1u ? 0.25 : -0.25) * size;
            refine(cc, size * 0.5);
        }
    }
};

inline std::vector<std::size_t> k_nearest(const std::vector<Point>& pts, const Point& q, std::size_t k, std::size_t skip) {
    std::vector<std::pair<double, std::size_t>> d;
    d.reserve(pts.size());
    for (std::size_t i = 0; i < pts.size(); ++i)
        if (i != skip) d.emplace_back(norm2(pts[i] - q), i);
    k = std::min(k, d.size());
    std::partial_sort(d.begin(), d.begin() + static_cast<std::ptrdiff_t>(k), d.end());
    std::vector<std::size_t> out(k);
    for (std::size_t i = 0; i < k; ++i) out[i] = d[i].second;
    return out;
}

struct DisjointSets {
    std::vector<std::size_t> parent;
    explicit DisjointSets(std::size_t n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    void unite(std::size_t a, std::size_t b) { parent[find(a)] = find(b); }
};

}  // namespace detail

/// Adaptive 2^d-tree lattice with k-nearest-neighbour edges weighted by upper
/// kappa-length of the straight segment.
inline Lattice build_lattice(const MetricField& f, const SolverConfig& cfg) {
    cfg.validate();
    const auto& d = f.domain();
    const std::size_t dims = 2 * d.dim();
    Lattice L;
    L.h0 = cfg.h0;
    L.h_min = cfg.h_min;
    const double R = d.circumradius();
    for (;;) {
        // base grid size check before enumerating it
        const double per_axis = std::ceil(2.0 * R / L.h0);
        if (std::pow(per_axis, static_cast<double>(dims)) > 64.0 * static_cast<double>(cfg.node_cap)) {
            L.h0 *= 2;
            L.h_min = std::min(L.h_min * 2, L.h0);
            L.coarsened = true;
            continue;
        }
        detail::CellRefiner cr{d, L.h_min, cfg.beta, cfg.node_cap, dims, {}, false};
        const auto n_axis = static_cast<std::size_t>(per_axis);
        std::size_t total = 1;
        for (std::size_t k = 0; k < dims; ++k) total *= n_axis;
        const Eigen::VectorXd c0 = detail::to_real(d.center());
        for (std::size_t idx = 0; idx < total && !cr.overflow; ++idx) {
            Eigen::VectorXd c = c0;
            std::size_t r = idx;
            for (std::size_t k = 0; k < dims; ++k) {
                c[k] += -R + (static_cast<double>(r % n_axis) + 0.5) * L.h0;
                r /= n_axis;
            }
            cr.refine(c, L.h0);
        }
        if (!cr.overflow && !cr.out.empty()) {
            L.nodes = std::move(cr.out);
            break;
        }
        L.h0 *= 2;
        L.h_min = std::min(L.h_min * 2, L.h0);
        L.coarsened = true;
    }
    if (L.coarsened)
        L.warning = "lattice coarsened to h0=" + std::to_string(L.h0) + ", h_min=" + std::to_string(L.h_min) +
                    " to respect node_cap=" + std::to_string(cfg.node_cap);

    const std::size_t N = L.nodes.size();
    std::vector<std::pair<std::uint32_t, std::uint32_t>> pairs;
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j : detail::k_nearest(L.nodes, L.nodes[i], static_cast<std::size_t>(cfg.k_nearest), i))
            pairs.emplace_back(static_cast<std::uint32_t>(std::min(i, j)), static_cast<std::uint32_t>(std::max(i, j)));
    // join components through their closest node pairs
    for (;;) {
        detail::DisjointSets ds(N);
        for (const auto& [a, b] : pairs) ds.unite(a, b);
        const std::size_t root0 = ds.find(0);
        std::optional<std::pair<std::size_t, std::size_t>> link;
        double best = kInf;
        for (std::size_t i = 0; i < N; ++i) {
            if (ds.find(i) == root0) continue;
            for (std::size_t j = 0; j < N; ++j) {
                if (ds.find(j) != root0) continue;
                const double dd = norm2(L.nodes[i] - L.nodes[j]);
                if (dd < best) {
                    best = dd;
                    link = {std::min(i, j), std::max(i, j)};
                }
            }
        }
        if (!link) break;
        pairs.emplace_back(static_cast<std::uint32_t>(link->first), static_cast<std::uint32_t>(link->second));
    }
    std::sort(pairs.begin(), pairs.end());
    pairs.erase(std::unique(pairs.begin(), pairs.end()), pairs.end());
    std::vector<double> w(pairs.size());
    parallel_for(pairs.size(), [&](std::size_t e) {
        w[e] = detail::fast_segment_upper(f, L.nodes[pairs[e].first], L.nodes[pairs[e].second]);
    });
    L.adj.assign(N, {});
    for (std::size_t e = 0; e < pairs.size(); ++e) {
        L.adj[pairs[e].first].push_back({pairs[e].second, w[e]});
        L.adj[pairs[e].second].push_back({pairs[e].first, w[e]});
    }
    return L;
}

// ---------------------------------------------------------------------------
// Refinement

namespace detail {

inline std::vector<Point> subdivide(const MetricField& f, const std::vector<Point>& V, double target, std::size_t cap) {
    std::vector<Point> out{V.front()};
    auto rec = [&](auto&& self, const Point& a, const Point& b, int depth) -> void {
        if (depth < 40 && out.size() < cap && fast_segment_upper(f, a, b) > target) {
            const Point m = lerp(a, b, 0.5);
            self(self, a, m, depth + 1);
            self(self, m, b, depth + 1);
            return;
        }
        out.push_back(b);
    };
    for (std::size_t i = 0; i + 1 < V.size(); ++i) rec(rec, V[i], V[i + 1], 0);
    return out;
}

/// Greedy shortcut: from each kept vertex jump to the farthest later vertex
/// whose chord is strictly shorter than the path between them.
inline std::vector<Point> shortcut(const MetricField& f, const std::vector<Point>& V) {
    if (V.size() <= 2) return V;
    std::vector<double> seg(V.size() - 1);
    for (std::size_t i = 0; i + 1 < V.size(); ++i) seg[i] = fast_segment_upper(f, V[i], V[i + 1]);
    std::vector<Point> out{V.front()};
    std::size_t i = 0;
    while (i + 1 < V.size()) {
        std::size_t jump = i + 1;
        double path = seg[i];
        for (std::size_t j = i + 2; j < V.size(); ++j) {
            path += seg[j - 1];
            if (fast_segment_upper(f, V[i], V[j]) < path) jump = j;
        }
        out.push_back(V[jump]);
        i = jump;
    }
    return out;
}

struct VertexOptimizer {
    const MetricField& f;
    std::vector<Point>& V;
    std::vector<double> step;

    double local(std::size_t i, const Point& z) const {
        return fast_segment_upper(f, V[i - 1], z) + fast_segment_upper(f, z, V[i + 1]);
    }

    /// One finite-difference gradient step on vertex i; returns the decrease.
    double move(std::size_t i) {
        const auto& d = f.domain();
        Point& z = V[i];
        const double dz = boundary_distance(d, z);
        const double f0 = local(i, z);
        const std::size_t dims = 2 * d.dim();
        const double h = 1e-5 * dz;
        std::array<double, 2 * kMaxDim> g{};
        double gn = 0;
        for (std::size_t k = 0; k < dims; ++k) {
            Point zp = z, zm = z;
            zp.set_real_coord(k, z.real_coord(k) + h);
            zm.set_real_coord(k, z.real_coord(k) - h);
            g[k] = (local(i, zp) - local(i, zm)) / (2 * h);
            gn += g[k] * g[k];
        }
        gn = std::sqrt(gn);
        if (!(gn > 0) || !std::isfinite(gn)) return 0.0;
        double s = std::min(step[i], 0.5 * dz);
        for (int tries = 0; tries < 10; ++tries, s *= 0.5) {
            Point zt = z;
            for (std::size_t k = 0; k < dims; ++k) zt.set_real_coord(k, z.real_coord(k) - s * g[k] / gn);
            if (!contains(d, zt)) continue;
            const double ft = local(i, zt);
            if (ft < f0) {
                z = zt;
                step[i] = std::min(1.5 * s, 0.5 * dz);
                return f0 - ft;
            }
        }
        step[i] = s;
        return 0.0;
    }
};

}  // namespace detail

struct RefineStats {
    double length_in = 0.0;
    double length_out = 0.0;
    int sweeps = 0;
    bool accepted = false;
};

/// Shortcut removal, then three levels of subdivision to kappa-length targets
/// 4s, 2s, s (s = segment_target), each followed by vertex gradient sweeps.
/// Moves are kept only on strict decrease; the input is returned when the
/// certified upper length did not drop.
inline Curve refine_curve(const Curve& c, const MetricField& f, int iterations, double segment_target = 0.2,
                          RefineStats* stats = nullptr) {
    RefineStats st;
    if (c.degenerate()) {
        if (stats) *stats = st;
        return c;
    }
    st.length_in = curve_kappa_length(f, c, Side::Upper);
    std::vector<Point> V = detail::shortcut(f, c.vertices());
    constexpr int kLevels = 3;
    constexpr std::size_t kVertexCap = 4000;
    int budget = iterations;
    for (int level = 0; level < kLevels; ++level) {
        const double target = segment_target * std::ldexp(1.0, kLevels - 1 - level);
        V = detail::subdivide(f, V, target, kVertexCap);
        detail::VertexOptimizer opt{f, V, std::vector<double>(V.size())};
        for (std::size_t i = 0; i < V.size(); ++i) opt.step[i] = 0.1 * boundary_distance(f.domain(), V[i]);
        const int sweeps = level == kLevels - 1 ? budget : iterations / kLevels;
        double total = 0;
        for (std::size_t i = 0; i + 1 < V.size(); ++i) total += detail::fast_segment_upper(f, V[i], V[i + 1]);
        for (int s = 0; s < sweeps; ++s) {
            double gain = 0;
            if (s % 2 == 0)
                for (std::size_t i = 1; i + 1 < V.size(); ++i) gain += opt.move(i);
            else
                for (std::size_t i = V.size() - 2; i >= 1; --i) gain += opt.move(i);
            --budget;
            ++st.sweeps;
            if (gain <= 1e-7 * total) break;
        }
    }
    Curve out(std::move(V));
    st.length_out = curve_kappa_length(f, out, Side::Upper);
    st.accepted = st.length_out < st.length_in;
    if (!st.accepted) st.length_out = st.length_in;
    if (stats) *stats = st;
    return st.accepted ? out : c;
}

// ---------------------------------------------------------------------------
// Certification

struct LambdaCert {
    double lambda = 1.0;
    bool infinite = false;
    std::size_t pairs = 0;
    std::size_t worst_i = 0, worst_j = 0;
};

/// sup over sampled vertex pairs (u, w) of L_up(curve between u and w) / k_low(u, w).
/// Pairs: the endpoints, every dyadic split, then seeded random pairs up to n_pairs.
/// k_low is the exact distance when the field has one, else the bound bundle.
inline LambdaCert certify_lambda(const Curve& c, const MetricField& f, const GoldilocksProfile* profile, int n_pairs,
                                 std::uint64_t seed = 0, const LowerBoundParams& params = {}) {
    LambdaCert out;
    if (c.degenerate()) return out;
    const std::size_t N = c.size();
    const auto seg = segment_lengths(f, c, Side::Upper);
    std::vector<double> cum(N, 0.0);
    for (std::size_t i = 1; i < N; ++i) cum[i] = cum[i - 1] + seg[i - 1];

    std::vector<std::pair<std::size_t, std::size_t>> P{{0, N - 1}};
    for (std::size_t parts = 2; parts <= N - 1; parts *= 2)
        for (std::size_t k = 0; k < parts; ++k) {
            const std::size_t i = k * (N - 1) / parts, j = (k + 1) * (N - 1) / parts;
            if (i < j) P.emplace_back(i, j);
        }
    Rng rng(seed);
    while (P.size() < static_cast<std::size_t>(n_pairs) && N > 2) {
        std::size_t i = static_cast<std::size_t>(rng.uniform() * N), j = static_cast<std::size_t>(rng.uniform() * N);
        if (i == j) continue;
        P.emplace_back(std::min(i, j), std::max(i, j));
    }
    std::sort(P.begin(), P.end());
    P.erase(std::unique(P.begin(), P.end()), P.end());
    out.pairs = P.size();
    out.lambda = 0.0;
    for (const auto& [i, j] : P) {
        if (c[i] == c[j]) continue;
        const double up = cum[j] - cum[i];
        const double lo = best_lower_distance(f, profile, c[i], c[j], params);
        if (!(lo > 0)) {
            out.infinite = true;
            out.lambda = kInf;
            out.worst_i = i;
            out.worst_j = j;
            return out;
        }
        if (up / lo > out.lambda) {
            out.lambda = up / lo;
            out.worst_i = i;
            out.worst_j = j;
        }
    }
    if (out.lambda == 0.0) out.lambda = 1.0;
    return out;
}

// ---------------------------------------------------------------------------
// Depth

struct Penetration {
    double D = 0.0;
    Point argmax;
    std::size_t segment = 0;
    double t = 0.0;
};

/// max of delta along the polyline. On convex models delta is concave along
/// each segment, so golden-section search finds each segment maximum, kinks
/// included.
inline Penetration penetration_depth(const Curve& c, const DomainModel& d) {
    Penetration p;
    p.argmax = c.front();
    p.D = boundary_distance(d, c.front());
    for (std::size_t i = 0; i + 1 < c.size(); ++i) {
        const Point a = c[i], b = c[i + 1];
        auto delta = [&](double t) { return boundary_distance(d, lerp(a, b, t)); };
        constexpr double kInvPhi = 0.6180339887498949;
        double lo = 0.0, hi = 1.0;
        double t1 = hi - kInvPhi * (hi - lo), t2 = lo + kInvPhi * (hi - lo);
        double f1 = delta(t1), f2 = delta(t2);
        for (int it = 0; it < 80; ++it) {
            if (f1 < f2) {
                lo = t1;
                t1 = t2;
                f1 = f2;
                t2 = lo + kInvPhi * (hi - lo);
                f2 = delta(t2);
            } else {
                hi = t2;
                t2 = t1;
                f2 = f1;
                t1 = hi - kInvPhi * (hi - lo);
                f1 = delta(t1);
            }
        }
        const double tm = 0.5 * (lo + hi);
        for (const auto& [t, v] : {std::pair{0.0, delta(0.0)}, std::pair{tm, delta(tm)}, std::pair{1.0, delta(1.0)}})
            if (v > p.D) {
                p.D = v;
                p.argmax = lerp(a, b, t);
                p.segment = i;
                p.t = t;
            }
    }
    return p;
}

// ---------------------------------------------------------------------------
// Reference geodesics

/// Hyperbolic geodesic of the disc through a and b, sampled at equal
/// hyperbolic spacing: the pullback of the radius [0, phi_a(b)] under
/// z -> (w + a) / (1 + conj(a) w).
inline Curve exact_disc_geodesic(cplx a, cplx b, std::size_t n_vertices) {
    if (!(std::abs(a) < 1) || !(std::abs(b) < 1)) throw std::domain_error("exact_disc_geodesic: points must lie in the disc");
    if (a == b) return Curve({CVec{a}});
    if (n_vertices < 2) throw std::invalid_argument("exact_disc_geodesic: needs >= 2 vertices");
    const cplx w = (b - a) / (1.0 - std::conj(a) * b);
    const double r = std::abs(w);
    const double H = std::atanh(r);
    std::vector<Point> V;
    V.reserve(n_vertices);
    for (std::size_t k = 0; k < n_vertices; ++k) {
        if (k == 0) { V.push_back(CVec{a}); continue; }
        if (k + 1 == n_vertices) { V.push_back(CVec{b}); continue; }
        const double s = std::tanh(H * static_cast<double>(k) / static_cast<double>(n_vertices - 1));
        const cplx u = w * (s / r);
        V.push_back(CVec{(u + a) / (1.0 + std::conj(a) * u)});
    }
    return Curve(std::move(V));
}

// ---------------------------------------------------------------------------
// Solver

struct GeodesicDiagnostics {
    std::size_t lattice_nodes = 0;
    std::size_t path_vertices = 0;
    double lattice_upper = 0.0;
    double lattice_lambda = 1.0;
    RefineStats refine;
    bool lattice_coarsened = false;
    std::string warning;
    double seconds = 0.0;
};

struct GeodesicResult {
    Curve curve;
    double upper_length = 0.0;
    double lower_distance = 0.0;
    double lambda_cert = 1.0;
    bool lambda_infinite = false;
    GeodesicDiagnostics diagnostics;
};

namespace detail {

/// Points on the inward normal of p at geometrically growing depth.
inline std::vector<Point> funnel(const DomainModel& d, const Point& p, double stop_depth) {
    std::vector<Point> out;
    const double dp = boundary_distance(d, p);
    const auto nd = nearest_boundary_direction(d, p);
    for (int k = 1; k <= 40; ++k) {
        const double t = dp * std::exp(0.5 * k);
        if (t > stop_depth) break;
        const Point q = p - nd.v * (t - dp);
        if (!contains(d, q)) break;
        out.push_back(q);
    }
    return out;
}

inline std::vector<Point> shortest_path(const MetricField& f, const Lattice& L, const Point& x, const Point& y, int k,
                                       double beta) {
    const std::size_t N = L.nodes.size();
    // below this depth the lattice no longer resolves spacing beta * delta
    const double stop = 2.0 * L.h_min / beta;
    std::vector<Point> extra{x};
    for (const auto& q : funnel(f.domain(), x, stop)) extra.push_back(q);
    const std::size_t y_idx = N + extra.size();
    extra.push_back(y);
    for (const auto& q : funnel(f.domain(), y, stop)) extra.push_back(q);
    const std::size_t E = extra.size();

    std::vector<std::vector<Edge>> xadj(E);
    std::vector<std::vector<Edge>> back(N);
    for (std::size_t i = 0; i < E; ++i)
        for (std::size_t j = i + 1; j < E; ++j) {
            const double w = fast_segment_upper(f, extra[i], extra[j]);
            xadj[i].push_back({static_cast<std::uint32_t>(N + j), w});
            xadj[j].push_back({static_cast<std::uint32_t>(N + i), w});
        }
    for (std::size_t i = 0; i < E; ++i)
        for (std::size_t j : k_nearest(L.nodes, extra[i], static_cast<std::size_t>(k), N)) {
            const double w = fast_segment_upper(f, extra[i], L.nodes[j]);
            xadj[i].push_back({static_cast<std::uint32_t>(j), w});
            back[j].push_back({static_cast<std::uint32_t>(N + i), w});
        }

    // Dijkstra ordered by (weight, hops, node id)
    const std::size_t T = N + E;
    std::vector<double> dist(T, kInf);
    std::vector<std::uint32_t> hops(T, std::numeric_limits<std::uint32_t>::max());
    std::vector<std::uint32_t> prev(T, std::numeric_limits<std::uint32_t>::max());
    using Key = std::tuple<double, std::uint32_t, std::uint32_t>;
    std::priority_queue<Key, std::vector<Key>, std::greater<>> pq;
    const auto src = static_cast<std::uint32_t>(N);
    dist[src] = 0;
    hops[src] = 0;
    pq.emplace(0.0, 0u, src);
    while (!pq.empty()) {
        const auto [du, hu, u] = pq.top();
        pq.pop();
        if (du > dist[u] || (du == dist[u] && hu > hops[u])) continue;
        if (u == y_idx) break;
        auto relax = [&](const Edge& e) {
            const double nd = du + e.w;
            const std::uint32_t nh = hu + 1;
            if (std::tie(nd, nh, u) < std::tie(dist[e.to], hops[e.to], prev[e.to])) {
                dist[e.to] = nd;
                hops[e.to] = nh;
                prev[e.to] = u;
                pq.emplace(nd, nh, e.to);
            }
        };
        if (u < N) {
            for (const auto& e : L.adj[u]) relax(e);
            for (const auto& e : back[u]) relax(e);
        } else {
            for (const auto& e : xadj[u - N]) relax(e);
        }
    }
    if (!std::isfinite(dist[y_idx])) throw std::runtime_error("solve_geodesic: endpoints disconnected in lattice");
    std::vector<Point> path;
    for (std::uint32_t v = static_cast<std::uint32_t>(y_idx);; v = prev[v]) {
        path.push_back(v < N ? L.nodes[v] : extra[v - N]);
        if (v == src) break;
    }
    std::reverse(path.begin(), path.end());
    return path;
}

/// Lexicographic order on real coordinates; used to canonicalize endpoint order.
inline bool coord_less(const Point& a, const Point& b) {
    for (std::size_t k = 0; k < 2 * a.dim(); ++k) {
        if (a.real_coord(k) < b.real_coord(k)) return true;
        if (a.real_coord(k) > b.real_coord(k)) return false;
    }
    return false;
}

}  // namespace detail

/// Near-geodesic from x to y: lattice shortest path by upper weights, then
/// refine_curve. The pair is solved in canonical order so that swapping the
/// endpoints yields the reversed curve.
inline GeodesicResult solve_geodesic(const MetricField& f, const Point& x, const Point& y, const SolverConfig& cfg,
                                     const GoldilocksProfile* profile = nullptr, const Lattice* lattice = nullptr,
                                     const LowerBoundParams& params = {}) {
    cfg.validate();
    const auto t0 = std::chrono::steady_clock::now();
    const auto& d = f.domain();
    for (const auto* p : {&x, &y})
        if (boundary_distance(d, *p) < cfg.endpoint_delta_min)
            throw std::runtime_error("solve_geodesic: endpoint too close to the boundary for this config");
    GeodesicResult r;
    if (x == y) {
        r.curve = Curve({x});
        return r;
    }
    const bool swap = detail::coord_less(y, x);
    const Point& a = swap ? y : x;
    const Point& b = swap ? x : y;

    std::optional<Lattice> own;
    if (!lattice) {
        own = build_lattice(f, cfg);
        lattice = &*own;
    }
    r.diagnostics.lattice_nodes = lattice->nodes.size();
    r.diagnostics.lattice_coarsened = lattice->coarsened;
    r.diagnostics.warning = lattice->warning;

    const Curve raw(detail::shortest_path(f, *lattice, a, b, cfg.k_nearest, cfg.beta));
    r.diagnostics.path_vertices = raw.size();
    r.diagnostics.lattice_upper = curve_kappa_length(f, raw, Side::Upper);
    const auto raw_cert = certify_lambda(raw, f, profile, cfg.cert_pairs, cfg.seed, params);
    r.diagnostics.lattice_lambda = raw_cert.lambda;

    Curve refined = refine_curve(raw, f, cfg.iterations, cfg.segment_target, &r.diagnostics.refine);
    r.curve = swap ? refined.reversed() : refined;
    r.upper_length = r.diagnostics.refine.length_out;
    r.lower_distance = best_lower_distance(f, profile, x, y, params);
    const auto cert = certify_lambda(refined, f, profile, cfg.cert_pairs, cfg.seed, params);
    r.lambda_cert = cert.lambda;
    r.lambda_infinite = cert.infinite;
    r.diagnostics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return r;
}

}  // namespace kobalab
