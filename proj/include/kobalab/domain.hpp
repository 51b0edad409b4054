#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <memory>
#include <array>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>
#include <boost/math/tools/minima.hpp>

#include "cvec.hpp"
#include "util.hpp"

namespace kobalab {

/// The unit ball of C^n; n = 1 is the unit disc.
struct UnitBall {
    std::size_t n = 1;
};

/// {|z1|^2 + |z2|^(2m) < 1} in C^2, m >= 1.
struct Ellipsoid {
    double m = 2.0;
    /// Samples (x, y) of the profile curve x^2 + y^(2m) = 1 on a uniform angle grid.
    std::shared_ptr<const std::vector<std::array<double, 2>>> scan;

    /// a^k for a >= 0 and k = m or m - 1; integer exponents avoid std::pow.
    static double ipow(double a, double k) {
        if (k == std::floor(k) && k <= 64) {
            double r = 1.0, b = a;
            for (auto e = static_cast<unsigned>(k); e; e >>= 1, b *= b)
                if (e & 1u) r *= b;
            return r;
        }
        return a > 0 ? std::pow(a, k) : (k == 0 ? 1.0 : 0.0);
    }
    double pow_m(double a) const { return ipow(a, m); }
    double pow_m1(double a) const { return ipow(a, m - 1.0); }
};

/// One face Re<z, a> <= b with a a unit co-vector.
struct Face {
    CVec a;
    double b = 0.0;
};

/// Bounded intersection of real half-spaces in C^n. Construction verifies
/// boundedness and precomputes vertices, the largest inscribed ball and the
/// diameter.
class Halfspaces {
public:
    explicit Halfspaces(std::vector<Face> faces);

    std::size_t dim() const { return n_; }
    const std::vector<Face>& faces() const { return faces_; }
    const std::vector<CVec>& vertices() const { return vertices_; }
    const CVec& chebyshev_center() const { return center_; }
    double inradius() const { return inradius_; }
    double diameter() const { return diameter_; }
    double circumradius() const { return circumradius_; }

    /// b_j - Re<p, a_j>.
    double slack(const CVec& p, std::size_t j) const { return faces_[j].b - hdot(p, faces_[j].a).real(); }

private:
    std::vector<Face> faces_;
    std::size_t n_ = 0;
    std::vector<CVec> vertices_;
    CVec center_;
    double inradius_ = 0.0;
    double diameter_ = 0.0;
    double circumradius_ = 0.0;
};

namespace detail {
inline constexpr int kProfileScan = 512;

inline std::shared_ptr<const std::vector<std::array<double, 2>>> ellipsoid_scan(double m) {
    auto out = std::make_shared<std::vector<std::array<double, 2>>>(kProfileScan + 1);
    for (int k = 0; k <= kProfileScan; ++k) {
        const double th = 0.5 * M_PI * k / kProfileScan;
        (*out)[k] = {k == kProfileScan ? 0.0 : std::cos(th), std::pow(k == 0 ? 0.0 : std::sin(th), 1.0 / m)};
    }
    return out;
}
}  // namespace detail

class DomainModel {
public:
    using Kind = std::variant<UnitBall, Ellipsoid, Halfspaces>;

    static DomainModel unit_disc() { return DomainModel(UnitBall{1}, "disc"); }
    static DomainModel unit_ball(std::size_t n) {
        if (n < 1 || n > kMaxDim) throw std::invalid_argument("unit_ball: n must be 1..3");
        return DomainModel(UnitBall{n}, n == 1 ? "disc" : "ball" + std::to_string(n));
    }
    static DomainModel ellipsoid(double m) {
        if (!(m >= 1.0) || m > 64.0) throw std::invalid_argument("ellipsoid: exponent m must lie in [1, 64]");
        return DomainModel(Ellipsoid{m, detail::ellipsoid_scan(m)}, "ellipsoid_m" + trimmed(m));
    }
    static DomainModel halfspaces(std::vector<Face> faces, std::string label = "halfspaces") {
        return DomainModel(Halfspaces(std::move(faces)), std::move(label));
    }

    const Kind& kind() const { return kind_; }
    const std::string& label() const { return label_; }
    std::size_t dim() const;

    bool is_ball() const { return std::holds_alternative<UnitBall>(kind_); }
    bool is_ellipsoid() const { return std::holds_alternative<Ellipsoid>(kind_); }
    bool is_halfspaces() const { return std::holds_alternative<Halfspaces>(kind_); }
    /// Every shipped model is convex.
    bool is_convex() const { return true; }
    /// Dini smoothness is a property of the model, asserted analytically:
    /// balls and ellipsoids are real-analytic away from a measure zero set and
    /// C^{1,1} everywhere; polytopes have corners.
    bool is_dini_smooth() const { return !is_halfspaces(); }
    /// Finite type exponent m (1 for the ball, m for the ellipsoid, 0 if none).
    double type_exponent() const {
        if (is_ball()) return 1.0;
        if (is_ellipsoid()) return std::get<Ellipsoid>(kind_).m;
        return 0.0;
    }

    /// Largest boundary distance attained in the domain.
    double inradius() const;
    /// Sup of the Euclidean norm over the domain.
    double circumradius() const;
    /// A point where the inradius is attained.
    Point center() const;

private:
    DomainModel(Kind k, std::string label) : kind_(std::move(k)), label_(std::move(label)) {}
    static std::string trimmed(double m) {
        if (m == std::floor(m)) return std::to_string(static_cast<long>(m));
        return std::to_string(m);
    }

    Kind kind_;
    std::string label_;
};

// ---------------------------------------------------------------------------
// Halfspaces construction

namespace detail {

inline Eigen::VectorXd to_real(const CVec& a) {
    Eigen::VectorXd r(2 * a.dim());
    for (std::size_t k = 0; k < 2 * a.dim(); ++k) r[k] = a.real_coord(k);
    return r;
}

inline CVec from_real(const Eigen::VectorXd& r) {
    CVec a(static_cast<std::size_t>(r.size() / 2));
    for (Eigen::Index k = 0; k < r.size(); ++k) a.set_real_coord(static_cast<std::size_t>(k), r[k]);
    return a;
}

/// Calls fn(indices) for every k-subset of {0..n-1} in lexicographic order.
template <class Fn>
void for_each_subset(std::size_t n, std::size_t k, Fn&& fn) {
    if (k > n) return;
    std::vector<std::size_t> idx(k);
    std::iota(idx.begin(), idx.end(), 0);
    for (;;) {
        fn(idx);
        std::size_t i = k;
        while (i > 0 && idx[i - 1] == n - k + i - 1) --i;
        if (i == 0) return;
        ++idx[i - 1];
        for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
    }
}

}  // namespace detail

inline Halfspaces::Halfspaces(std::vector<Face> faces) : faces_(std::move(faces)) {
    if (faces_.empty()) throw std::invalid_argument("halfspaces: no faces");
    n_ = faces_.front().a.dim();
    if (n_ < 1 || n_ > kMaxDim) throw std::invalid_argument("halfspaces: dimension must be 1..3");
    if (faces_.size() > 24) throw std::invalid_argument("halfspaces: at most 24 faces supported");
    for (auto& f : faces_) {
        if (f.a.dim() != n_) throw std::invalid_argument("halfspaces: inconsistent co-vector dimension");
        if (!is_finite(f.a) || !std::isfinite(f.b)) throw std::invalid_argument("halfspaces: non-finite face");
        const double r = norm(f.a);
        if (!(r > 0)) throw std::invalid_argument("halfspaces: zero co-vector");
        f.a = f.a * (1.0 / r);
        f.b /= r;
    }
    const std::size_t d = 2 * n_;
    const std::size_t nf = faces_.size();
    Eigen::MatrixXd A(nf, d);
    Eigen::VectorXd b(nf);
    for (std::size_t j = 0; j < nf; ++j) {
        A.row(j) = detail::to_real(faces_[j].a).transpose();
        b[j] = faces_[j].b;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu_all(A);
    if (lu_all.rank() < static_cast<Eigen::Index>(d))
        throw std::invalid_argument("halfspaces: co-vectors do not span, domain is unbounded");

    // The recession cone {u : A u <= 0} is pointed (full rank); it is nonzero
    // iff it has an extreme ray cut out by d-1 independent active faces.
    bool unbounded = false;
    detail::for_each_subset(nf, d - 1, [&](const std::vector<std::size_t>& s) {
        if (unbounded) return;
        Eigen::MatrixXd M(d - 1, d);
        for (std::size_t i = 0; i < s.size(); ++i) M.row(i) = A.row(s[i]);
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (lu.rank() != static_cast<Eigen::Index>(d - 1)) return;
        Eigen::VectorXd u = lu.kernel().col(0);
        u.normalize();
        for (double sign : {1.0, -1.0}) {
            const Eigen::VectorXd w = sign * (A * u);
            if (w.maxCoeff() <= 1e-12) unbounded = true;
        }
    });
    if (unbounded) throw std::invalid_argument("halfspaces: domain is unbounded");

    auto feasible = [&](const Eigen::VectorXd& x, double tol) { return ((A * x - b).array() <= tol).all(); };

    detail::for_each_subset(nf, d, [&](const std::vector<std::size_t>& s) {
        Eigen::MatrixXd M(d, d);
        Eigen::VectorXd rhs(d);
        for (std::size_t i = 0; i < d; ++i) { M.row(i) = A.row(s[i]); rhs[i] = b[s[i]]; }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) return;
        const Eigen::VectorXd x = lu.solve(rhs);
        if (!feasible(x, 1e-9)) return;
        const CVec v = detail::from_real(x);
        for (const auto& w : vertices_)
            if (distance(w, v) < 1e-9) return;
        vertices_.push_back(v);
    });
    if (vertices_.size() < d + 1) throw std::invalid_argument("halfspaces: degenerate polytope");

    // Chebyshev center: maximize r subject to A x + r <= b, attained at a vertex
    // of the lifted polyhedron.
    inradius_ = -1.0;
    detail::for_each_subset(nf, d + 1, [&](const std::vector<std::size_t>& s) {
        Eigen::MatrixXd M(d + 1, d + 1);
        Eigen::VectorXd rhs(d + 1);
        for (std::size_t i = 0; i < d + 1; ++i) {
            M.row(i).head(d) = A.row(s[i]);
            M(i, d) = 1.0;
            rhs[i] = b[s[i]];
        }
        Eigen::FullPivLU<Eigen::MatrixXd> lu(M);
        if (!lu.isInvertible()) return;
        const Eigen::VectorXd xr = lu.solve(rhs);
        const double r = xr[d];
        if (r <= inradius_) return;
        const Eigen::VectorXd x = xr.head(d);
        if (!((A * x).array() + r - b.array() <= 1e-9).all()) return;
        inradius_ = r;
        center_ = detail::from_real(x);
    });
    if (!(inradius_ > 0)) throw std::invalid_argument("halfspaces: empty interior");

    for (std::size_t i = 0; i < vertices_.size(); ++i) {
        circumradius_ = std::max(circumradius_, norm(vertices_[i]));
        for (std::size_t j = i + 1; j < vertices_.size(); ++j)
            diameter_ = std::max(diameter_, distance(vertices_[i], vertices_[j]));
    }
}

// ---------------------------------------------------------------------------
// DomainModel basics

inline std::size_t DomainModel::dim() const {
    return std::visit(
        [](const auto& k) -> std::size_t {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UnitBall>) return k.n;
            else if constexpr (std::is_same_v<T, Ellipsoid>) return 2;
            else return k.dim();
        },
        kind_);
}

inline double DomainModel::inradius() const {
    if (const auto* h = std::get_if<Halfspaces>(&kind_)) return h->inradius();
    return 1.0;
}

inline Point DomainModel::center() const {
    if (const auto* h = std::get_if<Halfspaces>(&kind_)) return h->chebyshev_center();
    return CVec(dim());
}

inline double DomainModel::circumradius() const {
    if (const auto* h = std::get_if<Halfspaces>(&kind_)) return h->circumradius();
    if (const auto* e = std::get_if<Ellipsoid>(&kind_)) {
        // max of |z1|^2 + |z2|^2 on |z1|^2 + |z2|^(2m) = 1 is at |z2|^(2m-2) = 1/m.
        if (e->m == 1.0) return 1.0;
        const double y = std::pow(e->m, -1.0 / (2.0 * e->m - 2.0));
        return std::sqrt(1.0 - std::pow(y, 2.0 * e->m) + y * y);
    }
    return 1.0;
}

namespace detail {

inline void check_dim(const DomainModel& d, const CVec& p) {
    if (p.dim() != d.dim())
        throw std::invalid_argument("dimension mismatch: domain " + d.label() + " has n=" + std::to_string(d.dim()) +
                                    ", point has n=" + std::to_string(p.dim()));
}

inline double ellipsoid_defining(const Ellipsoid& e, const CVec& p) {
    return std::norm(p[0]) + e.pow_m(std::norm(p[1]));
}

/// Nearest point of the real curve x^2 + y^(2m) = 1 (x, y >= 0) to (r1, r2).
/// Returns (x, y, squared distance). Coarse scan over the angular
/// parametrization, then Brent refinement in whichever graph chart is regular
/// at the located minimum.
struct CurvePoint {
    double x, y, d2;
};

inline CurvePoint ellipsoid_profile_projection(const Ellipsoid& e, double r1, double r2) {
    const double m = e.m;
    auto d2 = [&](double x, double y) { return (x - r1) * (x - r1) + (y - r2) * (y - r2); };
    constexpr int kScan = kProfileScan;
    const auto& table = e.scan ? *e.scan : *ellipsoid_scan(m);
    std::array<CurvePoint, kScan + 1> scan;
    for (int k = 0; k <= kScan; ++k) scan[k] = {table[k][0], table[k][1], d2(table[k][0], table[k][1])};
    // Refine each local minimum of the scan; keep the best.
    CurvePoint best = scan[0];
    for (const auto& s : scan)
        if (s.d2 < best.d2) best = s;
    const double kBits = std::numeric_limits<double>::digits;
    for (int k = 0; k <= kScan; ++k) {
        const bool left_ok = k == 0 || scan[k].d2 <= scan[k - 1].d2;
        const bool right_ok = k == kScan || scan[k].d2 <= scan[k + 1].d2;
        if (!left_ok || !right_ok) continue;
        if (scan[k].d2 > best.d2 * 1.5 + 1e-12) continue;
        const auto& lo = scan[std::max(k - 1, 0)];
        const auto& hi = scan[std::min(k + 1, kScan)];
        CurvePoint c{};
        if (scan[k].y <= scan[k].x) {
            // chart y -> x = sqrt(1 - y^(2m)); regular while x is bounded away from 0
            auto f = [&](double y) { return d2(std::sqrt(std::max(0.0, 1.0 - e.pow_m(y * y))), y); };
            const auto r = boost::math::tools::brent_find_minima(f, std::min(lo.y, hi.y), std::max(lo.y, hi.y), static_cast<int>(kBits));
            c = {std::sqrt(std::max(0.0, 1.0 - e.pow_m(r.first * r.first))), r.first, r.second};
        } else {
            auto f = [&](double x) { return d2(x, std::pow(std::max(0.0, 1.0 - x * x), 0.5 / m)); };
            const auto r = boost::math::tools::brent_find_minima(f, std::min(lo.x, hi.x), std::max(lo.x, hi.x), static_cast<int>(kBits));
            c = {r.first, std::pow(std::max(0.0, 1.0 - r.first * r.first), 0.5 / m), r.second};
        }
        if (c.d2 < best.d2) best = c;
    }
    return best;
}

inline cplx unit_phase(cplx z) {
    const double r = std::abs(z);
    return r > 0 ? z / r : cplx(1.0, 0.0);
}

/// Largest r with p + r w inside the ellipsoid. The defining function is
/// convex along the ray, so a Newton step from any point with positive slope
/// lands at or beyond the root and later iterates decrease monotonically onto it.
inline double ellipsoid_ray_exit(const Ellipsoid& e, const CVec& p, const CVec& w, double guess, double r_cap) {
    auto phi = [&](double r, double& dphi) {
        const cplx z1 = p[0] + r * w[0];
        const cplx z2 = p[1] + r * w[1];
        const double a2 = std::norm(z2);
        const double pw = e.pow_m1(a2);
        dphi = 2.0 * (z1 * std::conj(w[0])).real() + e.m * pw * 2.0 * (z2 * std::conj(w[1])).real();
        return std::norm(z1) + pw * a2 - 1.0;
    };
    double r = guess > 0 && guess < r_cap ? guess : r_cap;
    double lo = 0.0, hi = r_cap, dphi = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double f = phi(r, dphi);
        if (f == 0) return r;
        if (f > 0) hi = std::min(hi, r); else lo = std::max(lo, r);
        double next = dphi > 0 ? r - f / dphi : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::abs(next - r) <= 4e-16 * r || hi - lo <= 4e-16 * hi) return next;
        r = next;
    }
    return r;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Operations

inline bool contains(const DomainModel& d, const Point& p) {
    detail::check_dim(d, p);
    if (!is_finite(p)) return false;
    return std::visit(
        [&](const auto& k) -> bool {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UnitBall>) return norm2(p) < 1.0;
            else if constexpr (std::is_same_v<T, Ellipsoid>) return detail::ellipsoid_defining(k, p) < 1.0;
            else {
                for (std::size_t j = 0; j < k.faces().size(); ++j)
                    if (!(k.slack(p, j) > 0)) return false;
                return true;
            }
        },
        d.kind());
}

namespace detail {
inline void require_inside(const DomainModel& d, const Point& p) {
    if (!contains(d, p)) throw std::domain_error("point " + to_string(p) + " lies outside " + d.label());
}
}  // namespace detail

/// Euclidean distance to the boundary.
inline double boundary_distance(const DomainModel& d, const Point& p) {
    detail::require_inside(d, p);
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UnitBall>) return 1.0 - norm(p);
            else if constexpr (std::is_same_v<T, Ellipsoid>) {
                if (k.m == 1.0) return 1.0 - norm(p);
                return std::sqrt(detail::ellipsoid_profile_projection(k, std::abs(p[0]), std::abs(p[1])).d2);
            } else {
                double s = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k.faces().size(); ++j) s = std::min(s, k.slack(p, j));
                return s;
            }
        },
        d.kind());
}

namespace detail {

/// Minimal |lambda| over complex lambda with p + lambda v on the boundary, for
/// unit v with canonical phase.
inline double directional_unit(const DomainModel& d, const Point& p, const Direction& v) {
    return std::visit(
        [&](const auto& k) -> double {
            using T = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<T, UnitBall>) {
                // slice {lambda : |p + lambda v| < 1} is the disc centered at -<p,v>
                const cplx c = hdot(p, v);
                const double rho2 = 1.0 - norm2(p) + std::norm(c);
                const double ac = std::abs(c);
                // rho - |c| written without cancellation
                return (1.0 - norm2(p)) / (std::sqrt(rho2) + ac);
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                const double r_cap = d.circumradius() + norm(p) + 1.0;
                constexpr int kAngles = 24;
                std::array<double, kAngles> R{};
                double guess = 0.0;
                for (int j = 0; j < kAngles; ++j) {
                    const double th = 2.0 * M_PI * j / kAngles;
                    guess = detail::ellipsoid_ray_exit(k, p, v * std::polar(1.0, th), guess, r_cap);
                    R[j] = guess;
                }
                double warm = 0.0;
                auto radial = [&](double th) { return detail::ellipsoid_ray_exit(k, p, v * std::polar(1.0, th), warm, r_cap); };
                double best = *std::min_element(R.begin(), R.end());
                const double floor = best;
                for (int j = 0; j < kAngles; ++j) {
                    const double l = R[(j + kAngles - 1) % kAngles], r = R[(j + 1) % kAngles];
                    if (R[j] > l || R[j] >= r) continue;
                    // the slice is convex, so its nearest boundary point is within this factor of some scan value
                    if (R[j] > floor / std::cos(M_PI / kAngles)) continue;
                    const double th0 = 2.0 * M_PI * (j - 1) / kAngles, th1 = 2.0 * M_PI * (j + 1) / kAngles;
                    warm = R[j];
                    const auto res = boost::math::tools::brent_find_minima(radial, th0, th1, 24);
                    best = std::min(best, res.second);
                }
                return best;
            } else {
                double s = std::numeric_limits<double>::infinity();
                for (std::size_t j = 0; j < k.faces().size(); ++j) {
                    const double proj = std::abs(hdot(v, k.faces()[j].a));
                    if (proj <= 1e-15) continue;
                    s = std::min(s, k.slack(p, j) / proj);
                }
                if (!std::isfinite(s)) throw std::logic_error("directional_boundary_distance: unbounded complex line");
                return s;
            }
        },
        d.kind());
}

}  // namespace detail

/// inf{|lambda| : p + lambda v in boundary, lambda complex}.
inline double directional_boundary_distance(const DomainModel& d, const Point& p, const Direction& v) {
    detail::require_inside(d, p);
    detail::check_dim(d, v);
    const double r = norm(v);
    if (!(r > 0) || !std::isfinite(r)) throw std::invalid_argument("directional_boundary_distance: zero direction");
    // Scaling by a complex c only rescales the answer; reduce to a canonical
    // representative so the scaling law holds to rounding.
    std::size_t big = 0;
    for (std::size_t i = 1; i < v.dim(); ++i)
        if (std::abs(v[i]) > std::abs(v[big]) * (1.0 + 1e-12)) big = i;
    const CVec u = v * (std::conj(detail::unit_phase(v[big])) / r);
    return detail::directional_unit(d, p, u) / r;
}

struct NearestDirection {
    Direction v;
    bool non_unique = false;
};

/// Unit direction toward a nearest boundary point.
inline NearestDirection nearest_boundary_direction(const DomainModel& d, const Point& p) {
    detail::require_inside(d, p);
    return std::visit(
        [&](const auto& k) -> NearestDirection {
            using T = std::decay_t<decltype(k)>;
            const std::size_t n = d.dim();
            if constexpr (std::is_same_v<T, UnitBall>) {
                const double r = norm(p);
                if (r < 1e-14) {
                    CVec e(n);
                    e[0] = 1.0;
                    return {e, true};
                }
                return {p * (1.0 / r), false};
            } else if constexpr (std::is_same_v<T, Ellipsoid>) {
                const auto c = detail::ellipsoid_profile_projection(k, std::abs(p[0]), std::abs(p[1]));
                CVec q(2);
                q[0] = c.x * detail::unit_phase(p[0]);
                q[1] = c.y * detail::unit_phase(p[1]);
                const bool tie = (std::abs(p[0]) == 0 && c.x > 1e-12) || (std::abs(p[1]) == 0 && c.y > 1e-12);
                return {normalized(q - p), tie};
            } else {
                std::size_t arg = 0;
                double s = std::numeric_limits<double>::infinity();
                int ties = 0;
                for (std::size_t j = 0; j < k.faces().size(); ++j) {
                    const double sj = k.slack(p, j);
                    if (sj < s - 1e-12) { s = sj; arg = j; ties = 1; }
                    else if (std::abs(sj - s) <= 1e-12) ++ties;
                }
                return {k.faces()[arg].a, ties > 1};
            }
        },
        d.kind());
}

/// Nearest boundary point p + delta(p) v_near.
inline Point boundary_projection(const DomainModel& d, const Point& p) {
    const auto nd = nearest_boundary_direction(d, p);
    return p + nd.v * boundary_distance(d, p);
}

struct Diameter {
    double value = 0.0;
    bool upper_bound_only = false;
};

inline Diameter diameter(const DomainModel& d) {
    if (const auto* h = std::get_if<Halfspaces>(&d.kind())) return {h->diameter(), false};
    // Both remaining models are symmetric under z -> -z.
    return {2.0 * d.circumradius(), false};
}

// ---------------------------------------------------------------------------
// Sampling

enum class SeparationLaw { Independent, Bounded };

struct SampleRule {
    std::size_t count = 1;
    double delta_lo = 0.0;
    double delta_hi = 0.0;
    SeparationLaw separation = SeparationLaw::Independent;
    double max_separation = 0.0;  // used by SeparationLaw::Bounded
    std::uint64_t seed = 0;
    int max_attempts = 10000;
};

/// Uniform point of the domain by rejection from the circumscribed cube.
inline Point sample_interior(const DomainModel& d, Rng& rng) {
    const double R = d.circumradius();
    const std::size_t n = d.dim();
    for (;;) {
        CVec p(n);
        for (std::size_t k = 0; k < 2 * n; ++k) p.set_real_coord(k, rng.uniform(-R, R));
        if (contains(d, p)) return p;
    }
}

/// Point with boundary distance in [lo, hi]: an interior sample is projected
/// to the boundary and pushed back inward along the normal.
inline Point sample_in_band(const DomainModel& d, double lo, double hi, Rng& rng, int max_attempts,
                            const Point* anchor = nullptr, double radius = 0.0) {
    for (int a = 0; a < max_attempts; ++a) {
        Point p = anchor ? *anchor + random_unit(rng, d.dim()) * (radius * rng.uniform()) : sample_interior(d, rng);
        if (anchor && !contains(d, p)) continue;
        const double t = lo > 0 ? lo * std::pow(hi / lo, rng.uniform()) : rng.uniform(lo, hi);
        const auto nd = nearest_boundary_direction(d, p);
        const Point q = p + nd.v * boundary_distance(d, p);
        const Point c = q - nd.v * t;
        if (!contains(d, c)) continue;
        const double dc = boundary_distance(d, c);
        if (dc < lo || dc > hi) continue;
        if (anchor && distance(c, *anchor) > radius) continue;
        return c;
    }
    throw std::runtime_error("sample_pairs: band [" + std::to_string(lo) + ", " + std::to_string(hi) +
                             "] infeasible after bounded rejection attempts");
}

inline std::vector<std::pair<Point, Point>> sample_pairs(const DomainModel& d, const SampleRule& rule) {
    if (!(rule.delta_lo > 0) || !(rule.delta_hi >= rule.delta_lo) || !(rule.delta_hi < d.inradius()))
        throw std::invalid_argument("sample_pairs: band must lie within (0, inradius)");
    if (rule.separation == SeparationLaw::Bounded && !(rule.max_separation > 0))
        throw std::invalid_argument("sample_pairs: bounded separation needs max_separation > 0");
    Rng rng(rule.seed);
    std::vector<std::pair<Point, Point>> out;
    out.reserve(rule.count);
    for (std::size_t i = 0; i < rule.count; ++i) {
        Point x = sample_in_band(d, rule.delta_lo, rule.delta_hi, rng, rule.max_attempts);
        Point y = rule.separation == SeparationLaw::Bounded
                      ? sample_in_band(d, rule.delta_lo, rule.delta_hi, rng, rule.max_attempts, &x, rule.max_separation)
                      : sample_in_band(d, rule.delta_lo, rule.delta_hi, rng, rule.max_attempts);
        out.emplace_back(x, y);
    }
    return out;
}

}  // namespace kobalab
