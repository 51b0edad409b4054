#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "cvec.hpp"

namespace kobalab {

/// Polyline in C^n with cumulative Euclidean arc length.
class Curve {
public:
    Curve() = default;
    explicit Curve(std::vector<Point> vertices) : v_(std::move(vertices)) {
        if (v_.empty()) throw std::invalid_argument("Curve: needs at least one vertex");
        cum_.assign(v_.size(), 0.0);
        for (std::size_t i = 1; i < v_.size(); ++i) {
            if (v_[i].dim() != v_[0].dim()) throw std::invalid_argument("Curve: mixed dimensions");
            cum_[i] = cum_[i - 1] + distance(v_[i - 1], v_[i]);
        }
    }

    std::size_t size() const { return v_.size(); }
    std::size_t segments() const { return v_.empty() ? 0 : v_.size() - 1; }
    bool degenerate() const { return v_.size() < 2 || length() == 0.0; }
    const std::vector<Point>& vertices() const { return v_; }
    const Point& operator[](std::size_t i) const { return v_[i]; }
    const Point& front() const { return v_.front(); }
    const Point& back() const { return v_.back(); }
    const std::vector<double>& cum_param() const { return cum_; }
    double length() const { return cum_.empty() ? 0.0 : cum_.back(); }

    /// Point at arc length s (clamped to [0, length]).
    Point at(double s) const {
        if (v_.size() == 1 || s <= 0) return v_.front();
        if (s >= length()) return v_.back();
        const auto it = std::upper_bound(cum_.begin(), cum_.end(), s);
        const std::size_t i = static_cast<std::size_t>(it - cum_.begin()) - 1;
        const double seg = cum_[i + 1] - cum_[i];
        return seg > 0 ? lerp(v_[i], v_[i + 1], (s - cum_[i]) / seg) : v_[i];
    }

    /// Restriction to arc-length window [s0, s1], cut points included.
    Curve restrict(double s0, double s1) const {
        s0 = std::clamp(s0, 0.0, length());
        s1 = std::clamp(s1, s0, length());
        std::vector<Point> out{at(s0)};
        for (std::size_t i = 0; i < v_.size(); ++i)
            if (cum_[i] > s0 && cum_[i] < s1) out.push_back(v_[i]);
        if (s1 > s0) out.push_back(at(s1));
        return Curve(std::move(out));
    }

    Curve reversed() const { return Curve(std::vector<Point>(v_.rbegin(), v_.rend())); }

private:
    std::vector<Point> v_;
    std::vector<double> cum_;
};

inline double curve_euclid_length(const Curve& c) { return c.length(); }

}  // namespace kobalab
