#ifndef MPD_LINALG_HPP
#define MPD_LINALG_HPP

#include <array>
#include <cstddef>

namespace mpd {

// Fixed-size dense vector/matrix over an arbitrary arithmetic scalar
// (double or Dual). Diffusion state dimensions here are 1 or 2, so these
// stay trivially small; no dynamic allocation anywhere on the hot path.

template <class S, int D>
struct Vec {
    std::array<S, D> e{};

    S& operator[](int i) { return e[static_cast<std::size_t>(i)]; }
    const S& operator[](int i) const { return e[static_cast<std::size_t>(i)]; }
    static constexpr int size() { return D; }

    Vec& operator+=(const Vec& o) {
        for (int i = 0; i < D; ++i) e[i] = e[i] + o.e[i];
        return *this;
    }
};

template <class S, int D>
struct Mat {
    std::array<S, static_cast<std::size_t>(D) * D> e{};

    S& operator()(int r, int c) { return e[static_cast<std::size_t>(r) * D + c]; }
    const S& operator()(int r, int c) const { return e[static_cast<std::size_t>(r) * D + c]; }
    static constexpr int rows() { return D; }

    static Mat zero() { return Mat{}; }
};

template <class S, int D>
Vec<S, D> operator+(Vec<S, D> a, const Vec<S, D>& b) {
    for (int i = 0; i < D; ++i) a[i] = a[i] + b[i];
    return a;
}

template <class S, int D>
Vec<S, D> operator-(Vec<S, D> a, const Vec<S, D>& b) {
    for (int i = 0; i < D; ++i) a[i] = a[i] - b[i];
    return a;
}

template <class S, int D, class T>
Vec<S, D> operator*(Vec<S, D> a, const T& c) {
    for (int i = 0; i < D; ++i) a[i] = a[i] * c;
    return a;
}

template <class S, int D>
Mat<S, D> operator-(Mat<S, D> a, const Mat<S, D>& b) {
    for (std::size_t i = 0; i < a.e.size(); ++i) a.e[i] = a.e[i] - b.e[i];
    return a;
}

template <class S, int D>
Mat<S, D> operator+(Mat<S, D> a, const Mat<S, D>& b) {
    for (std::size_t i = 0; i < a.e.size(); ++i) a.e[i] = a.e[i] + b.e[i];
    return a;
}

template <class S, int D, class T>
Mat<S, D> operator*(Mat<S, D> a, const T& c) {
    for (auto& v : a.e) v = v * c;
    return a;
}

template <class S, int D>
Vec<S, D> matvec(const Mat<S, D>& m, const Vec<S, D>& v) {
    Vec<S, D> r;
    for (int i = 0; i < D; ++i) {
        S acc = m(i, 0) * v[0];
        for (int j = 1; j < D; ++j) acc = acc + m(i, j) * v[j];
        r[i] = acc;
    }
    return r;
}

template <class S, int D>
S dot(const Vec<S, D>& a, const Vec<S, D>& b) {
    S acc = a[0] * b[0];
    for (int i = 1; i < D; ++i) acc = acc + a[i] * b[i];
    return acc;
}

template <class S, int D>
Mat<S, D> matmul(const Mat<S, D>& a, const Mat<S, D>& b) {
    Mat<S, D> r;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            S acc = a(i, 0) * b(0, j);
            for (int k = 1; k < D; ++k) acc = acc + a(i, k) * b(k, j);
            r(i, j) = acc;
        }
    return r;
}

template <class S, int D>
Mat<S, D> transpose(const Mat<S, D>& a) {
    Mat<S, D> r;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) r(i, j) = a(j, i);
    return r;
}

// a b^T
template <class S, int D>
Mat<S, D> outer(const Vec<S, D>& a, const Vec<S, D>& b) {
    Mat<S, D> r;
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) r(i, j) = a[i] * b[j];
    return r;
}

// Tr(A B)
template <class S, int D>
S trace_product(const Mat<S, D>& a, const Mat<S, D>& b) {
    S acc = a(0, 0) * b(0, 0);
    for (int i = 0; i < D; ++i)
        for (int j = 0; j < D; ++j) {
            if (i == 0 && j == 0) continue;
            acc = acc + a(i, j) * b(j, i);
        }
    return acc;
}

// x^T A y
template <class S, int D>
S quad_form(const Vec<S, D>& x, const Mat<S, D>& a, const Vec<S, D>& y) {
    return dot(x, matvec(a, y));
}

}  // namespace mpd

#endif
