#ifndef MPD_DUAL_HPP
#define MPD_DUAL_HPP

#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "mpd/errors.hpp"
#include "mpd/linalg.hpp"

namespace mpd {

// Forward-mode dual number carrying a W-wide tangent. W is the parameter
// dimension of the model, fixed at compile time, so mixing tangent widths is
// a type error rather than a runtime state. Cost per op is ~(1 + W) flops;
// W <= 4 for everything in this project.
template <int W>
struct Dual {
    double v = 0.0;
    std::array<double, W> t{};

    Dual() = default;
    Dual(double value) : v(value) {}  // constants lift with zero tangent
    Dual(double value, const std::array<double, W>& tangent) : v(value), t(tangent) {}

    static Dual seeded(double value, int j) {
        Dual d(value);
        d.t[static_cast<std::size_t>(j)] = 1.0;
        return d;
    }
};

template <int W>
Dual<W> operator+(const Dual<W>& a, const Dual<W>& b) {
    Dual<W> r(a.v + b.v);
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] + b.t[i];
    return r;
}

template <int W>
Dual<W> operator-(const Dual<W>& a, const Dual<W>& b) {
    Dual<W> r(a.v - b.v);
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] - b.t[i];
    return r;
}

template <int W>
Dual<W> operator-(const Dual<W>& a) {
    Dual<W> r(-a.v);
    for (int i = 0; i < W; ++i) r.t[i] = -a.t[i];
    return r;
}

template <int W>
Dual<W> operator*(const Dual<W>& a, const Dual<W>& b) {
    Dual<W> r(a.v * b.v);
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] * b.v + a.v * b.t[i];
    return r;
}

template <int W>
Dual<W> operator/(const Dual<W>& a, const Dual<W>& b) {
    double inv = 1.0 / b.v;
    Dual<W> r(a.v * inv);
    for (int i = 0; i < W; ++i) r.t[i] = (a.t[i] - r.v * b.t[i]) * inv;
    return r;
}

// double <-> Dual mixed forms (avoid materialising zero tangents)
template <int W> Dual<W> operator+(const Dual<W>& a, double b) { Dual<W> r = a; r.v += b; return r; }
template <int W> Dual<W> operator+(double a, const Dual<W>& b) { return b + a; }
template <int W> Dual<W> operator-(const Dual<W>& a, double b) { Dual<W> r = a; r.v -= b; return r; }
template <int W> Dual<W> operator-(double a, const Dual<W>& b) { return -b + a; }
template <int W>
Dual<W> operator*(const Dual<W>& a, double b) {
    Dual<W> r(a.v * b);
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] * b;
    return r;
}
template <int W> Dual<W> operator*(double a, const Dual<W>& b) { return b * a; }
template <int W> Dual<W> operator/(const Dual<W>& a, double b) { return a * (1.0 / b); }
template <int W>
Dual<W> operator/(double a, const Dual<W>& b) {
    double inv = 1.0 / b.v;
    Dual<W> r(a * inv);
    for (int i = 0; i < W; ++i) r.t[i] = -r.v * b.t[i] * inv;
    return r;
}

template <int W> bool operator<(const Dual<W>& a, const Dual<W>& b) { return a.v < b.v; }
template <int W> bool operator<(const Dual<W>& a, double b) { return a.v < b; }
template <int W> bool operator>(const Dual<W>& a, double b) { return a.v > b; }

template <int W>
Dual<W> exp(const Dual<W>& a) {
    double e = std::exp(a.v);
    Dual<W> r(e);
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] * e;
    return r;
}

template <int W>
Dual<W> log(const Dual<W>& a) {
    if (!(a.v > 0.0)) throw DomainError("log of non-positive value");
    Dual<W> r(std::log(a.v));
    double inv = 1.0 / a.v;
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] * inv;
    return r;
}

template <int W>
Dual<W> sqrt(const Dual<W>& a) {
    if (a.v < 0.0) throw DomainError("sqrt of negative value");
    double s = std::sqrt(a.v);
    Dual<W> r(s);
    double g = 0.5 / s;
    for (int i = 0; i < W; ++i) r.t[i] = a.t[i] * g;
    return r;
}

template <int W>
Dual<W> powi(const Dual<W>& a, int n) {
    if (n == 0) return Dual<W>(1.0);
    bool neg = n < 0;
    long m = neg ? -static_cast<long>(n) : n;
    Dual<W> acc(1.0), base = a;
    while (m > 0) {
        if (m & 1) acc = acc * base;
        base = base * base;
        m >>= 1;
    }
    return neg ? 1.0 / acc : acc;
}

// scalar passthroughs so templated kernels compile for plain double
inline double exp(double a) { return std::exp(a); }
inline double log(double a) {
    if (!(a > 0.0)) throw DomainError("log of non-positive value");
    return std::log(a);
}
inline double sqrt(double a) {
    if (a < 0.0) throw DomainError("sqrt of negative value");
    return std::sqrt(a);
}
inline double powi(double a, int n) { return std::pow(a, n); }

template <int W> double value_of(const Dual<W>& a) { return a.v; }
inline double value_of(double a) { return a; }

template <int W>
bool is_finite(const Dual<W>& a) {
    if (!std::isfinite(a.v)) return false;
    for (int i = 0; i < W; ++i)
        if (!std::isfinite(a.t[i])) return false;
    return true;
}
inline bool is_finite(double a) { return std::isfinite(a); }

// --- parameter vectors ------------------------------------------------------

// Unconstrained parameter point; P = d_theta.
template <int P>
using Params = Vec<double, P>;

// Identity-seeded lift: component j carries unit tangent e_j.
template <int P>
Vec<Dual<P>, P> lift(const Params<P>& theta) {
    Vec<Dual<P>, P> r;
    for (int j = 0; j < P; ++j) r[j] = Dual<P>::seeded(theta[j], j);
    return r;
}

template <int P>
Params<P> values(const Vec<Dual<P>, P>& lifted) {
    Params<P> r;
    for (int j = 0; j < P; ++j) r[j] = lifted[j].v;
    return r;
}

// Plain copy so code templated on scalar can "lift" into double as well.
template <int P>
const Params<P>& lift_plain(const Params<P>& theta) {
    return theta;
}

// Max relative error of the AD gradient of f against central differences.
template <int P, class F>
double grad_check(F&& f, const Params<P>& theta, double h) {
    auto lifted = lift(theta);
    Dual<P> ad = f(lifted);
    double worst = 0.0;
    for (int j = 0; j < P; ++j) {
        Params<P> lo = theta, hi = theta;
        lo[j] -= h;
        hi[j] += h;
        double fd = (f(hi) - f(lo)) / (2.0 * h);
        double err = std::abs(ad.t[static_cast<std::size_t>(j)] - fd) /
                     std::max(1.0, std::abs(fd));
        worst = std::max(worst, err);
    }
    return worst;
}

}  // namespace mpd

#endif
