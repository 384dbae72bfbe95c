#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "dtfim/types.hpp"

namespace dtfim {

/// Dense complex 3x3 matrix, row-major. Small enough that everything is by value.
struct Mat3 {
    std::array<cplx, 9> a{};

    cplx& operator()(int r, int c) { return a[3 * r + c]; }
    const cplx& operator()(int r, int c) const { return a[3 * r + c]; }

    static Mat3 identity() {
        Mat3 m;
        m(0, 0) = m(1, 1) = m(2, 2) = 1.0;
        return m;
    }

    Mat3 transpose() const {
        Mat3 t;
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) t(r, c) = (*this)(c, r);
        return t;
    }

    Mat3 conj() const {
        Mat3 t;
        for (int i = 0; i < 9; ++i) t.a[i] = std::conj(a[i]);
        return t;
    }

    double max_abs() const {
        double m = 0.0;
        for (const auto& x : a) m = std::max(m, std::abs(x));
        return m;
    }
};

inline Mat3 operator+(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] + y.a[i];
    return r;
}

inline Mat3 operator-(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = x.a[i] - y.a[i];
    return r;
}

inline Mat3 operator*(cplx s, const Mat3& x) {
    Mat3 r;
    for (int i = 0; i < 9; ++i) r.a[i] = s * x.a[i];
    return r;
}

inline Mat3 operator*(const Mat3& x, const Mat3& y) {
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < 3; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

inline cplx det3(const Mat3& m) {
    return m(0, 0) * (m(1, 1) * m(2, 2) - m(1, 2) * m(2, 1)) -
           m(0, 1) * (m(1, 0) * m(2, 2) - m(1, 2) * m(2, 0)) +
           m(0, 2) * (m(1, 0) * m(2, 1) - m(1, 1) * m(2, 0));
}

/// Real symmetric / general 3x3 companion of Mat3.
struct RMat3 {
    std::array<double, 9> a{};

    double& operator()(int r, int c) { return a[3 * r + c]; }
    const double& operator()(int r, int c) const { return a[3 * r + c]; }

    double max_abs() const {
        double m = 0.0;
        for (double x : a) m = std::max(m, std::abs(x));
        return m;
    }
};

using RVec3 = std::array<double, 3>;

inline RVec3 mul(const RMat3& m, const RVec3& v) {
    RVec3 r{};
    for (int i = 0; i < 3; ++i)
        r[i] = m(i, 0) * v[0] + m(i, 1) * v[1] + m(i, 2) * v[2];
    return r;
}

inline double dot(const RVec3& x, const RVec3& y) {
    return x[0] * y[0] + x[1] * y[1] + x[2] * y[2];
}

inline double norm(const RVec3& x) { return std::sqrt(dot(x, x)); }

/// Index swap 1<->2. conj(A) = swap12(A) for all drift/diffusion/covariance
/// matrices in the (v, v*, m) basis; used to verify conjugation structure.
inline Mat3 swap12(const Mat3& m) {
    static constexpr int p[3] = {1, 0, 2};
    Mat3 r;
    for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) r(i, j) = m(p[i], p[j]);
    return r;
}

/// Max-norm deviation from the conjugation structure conj(M) = S M S.
inline double conj_structure_deviation(const Mat3& m) {
    return (m.conj() - swap12(m)).max_abs();
}

}  // namespace dtfim
