#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace kobalab {

using cplx = std::complex<double>;

inline constexpr std::size_t kMaxDim = 3;

/// Fixed-capacity vector in C^n, n in {1,2,3}. Used for both points and
/// tangent directions.
class CVec {
public:
    CVec() = default;
    explicit CVec(std::size_t n) : n_(n) {
        if (n == 0 || n > kMaxDim) throw std::invalid_argument("CVec: dimension must be 1..3");
    }
    CVec(std::initializer_list<cplx> xs) : CVec(xs.size()) {
        std::size_t i = 0;
        for (const auto& x : xs) c_[i++] = x;
    }

    std::size_t dim() const { return n_; }
    cplx& operator[](std::size_t i) { return c_[i]; }
    const cplx& operator[](std::size_t i) const { return c_[i]; }

    /// Real coordinate k of the underlying R^{2n} (re, im interleaved).
    double real_coord(std::size_t k) const { return k % 2 == 0 ? c_[k / 2].real() : c_[k / 2].imag(); }
    void set_real_coord(std::size_t k, double v) {
        if (k % 2 == 0) c_[k / 2].real(v); else c_[k / 2].imag(v);
    }

    CVec& operator+=(const CVec& o) { for (std::size_t i = 0; i < n_; ++i) c_[i] += o.c_[i]; return *this; }
    CVec& operator-=(const CVec& o) { for (std::size_t i = 0; i < n_; ++i) c_[i] -= o.c_[i]; return *this; }
    CVec& operator*=(cplx s) { for (std::size_t i = 0; i < n_; ++i) c_[i] *= s; return *this; }
    CVec& operator*=(double s) { for (std::size_t i = 0; i < n_; ++i) c_[i] *= s; return *this; }

    friend CVec operator+(CVec a, const CVec& b) { return a += b; }
    friend CVec operator-(CVec a, const CVec& b) { return a -= b; }
    friend CVec operator*(CVec a, cplx s) { return a *= s; }
    friend CVec operator*(cplx s, CVec a) { return a *= s; }
    friend CVec operator*(CVec a, double s) { return a *= s; }
    friend CVec operator*(double s, CVec a) { return a *= s; }
    friend CVec operator-(CVec a) { return a *= -1.0; }

    friend bool operator==(const CVec& a, const CVec& b) {
        if (a.n_ != b.n_) return false;
        for (std::size_t i = 0; i < a.n_; ++i)
            if (a.c_[i] != b.c_[i]) return false;
        return true;
    }

private:
    std::array<cplx, kMaxDim> c_{};
    std::size_t n_ = 0;
};

using Point = CVec;
using Direction = CVec;

/// Hermitian product <a, b> = sum a_k conj(b_k).
inline cplx hdot(const CVec& a, const CVec& b) {
    cplx s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += a[i] * std::conj(b[i]);
    return s;
}

inline double norm2(const CVec& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.dim(); ++i) s += std::norm(a[i]);
    return s;
}

inline double norm(const CVec& a) { return std::sqrt(norm2(a)); }

inline double distance(const CVec& a, const CVec& b) { return norm(a - b); }

inline bool is_finite(const CVec& a) {
    for (std::size_t i = 0; i < a.dim(); ++i)
        if (!std::isfinite(a[i].real()) || !std::isfinite(a[i].imag())) return false;
    return true;
}

inline CVec normalized(const CVec& a) {
    const double r = norm(a);
    if (!(r > 0.0)) throw std::invalid_argument("normalized: zero vector");
    return a * (1.0 / r);
}

inline CVec lerp(const CVec& a, const CVec& b, double t) { return a + (b - a) * t; }

inline std::string to_string(const CVec& a) {
    std::string s = "(";
    for (std::size_t i = 0; i < a.dim(); ++i) {
        if (i) s += ", ";
        s += std::to_string(a[i].real()) + (a[i].imag() < 0 ? "-" : "+") + std::to_string(std::abs(a[i].imag())) + "i";
    }
    return s + ")";
}

}  // namespace kobalab
