#include <doctest.h>

#include <algorithm>
#include <complex>
#include <random>

#include "dtfim/smalleig.hpp"

using namespace dtfim;

namespace {

// Characteristic-polynomial residual: an eigenvalue claim is checked against
// det(M - lambda I) rather than against the solver's own machinery.
double charpoly_residual(const Mat3& m, cplx lambda) {
    Mat3 shifted = m;
    for (int i = 0; i < 3; ++i) shifted(i, i) -= lambda;
    const double scale = std::max(1.0, std::pow(m.max_abs() + std::abs(lambda), 3.0));
    return std::abs(det3(shifted)) / scale;
}

Mat3 random_mat(std::mt19937_64& rng, double scale = 3.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    Mat3 m;
    for (auto& x : m.a) x = cplx(u(rng), u(rng));
    return m;
}

}  // namespace

TEST_CASE("eigenvalues3 on diagonal and triangular matrices") {
    Mat3 d;
    d(0, 0) = cplx(1.0, 2.0);
    d(1, 1) = cplx(-3.0, 0.5);
    d(2, 2) = cplx(0.0, -1.0);
    auto ev = eigenvalues3(d);
    std::array<cplx, 3> expect = {cplx(1, 2), cplx(-3, 0.5), cplx(0, -1)};
    for (const auto& e : expect) {
        const bool found = std::any_of(ev.begin(), ev.end(),
                                       [&](cplx x) { return std::abs(x - e) < 1e-12; });
        CHECK(found);
    }

    d(0, 1) = cplx(5.0, -1.0);
    d(0, 2) = 2.0;
    d(1, 2) = cplx(0.0, 7.0);
    ev = eigenvalues3(d);
    for (const auto& e : expect) {
        const bool found = std::any_of(ev.begin(), ev.end(),
                                       [&](cplx x) { return std::abs(x - e) < 1e-11; });
        CHECK(found);
    }
}

TEST_CASE("eigenvalues3 satisfies trace, determinant and charpoly residual") {
    std::mt19937_64 rng(12345);
    for (int trial = 0; trial < 200; ++trial) {
        const Mat3 m = random_mat(rng);
        const auto ev = eigenvalues3(m);
        const cplx tr = m(0, 0) + m(1, 1) + m(2, 2);
        const cplx sum = ev[0] + ev[1] + ev[2];
        const cplx prod = ev[0] * ev[1] * ev[2];
        CHECK(std::abs(sum - tr) < 1e-12 * std::max(1.0, std::abs(tr)));
        CHECK(std::abs(prod - det3(m)) < 1e-11 * std::max(1.0, std::abs(det3(m))));
        for (const auto& e : ev) CHECK(charpoly_residual(m, e) < 1e-12);
    }
}

TEST_CASE("eigenvalues3 handles a defective Jordan block") {
    // [[2, 1, 0], [0, 2, 1], [0, 0, 2]]: triple eigenvalue 2.
    Mat3 m;
    m(0, 0) = m(1, 1) = m(2, 2) = 2.0;
    m(0, 1) = m(1, 2) = 1.0;
    const auto ev = eigenvalues3(m);
    for (const auto& e : ev) CHECK(std::abs(e - cplx(2.0)) < 1e-4);  // cube-root sensitivity
}

TEST_CASE("sym_eigen3 reconstructs the matrix") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int trial = 0; trial < 100; ++trial) {
        RMat3 m;
        for (int r = 0; r < 3; ++r)
            for (int c = r; c < 3; ++c) m(r, c) = m(c, r) = u(rng);
        RVec3 w;
        RMat3 v;
        sym_eigen3(m, w, v);
        CHECK(w[0] <= w[1]);
        CHECK(w[1] <= w[2]);
        // V diag(w) V^T == M
        for (int r = 0; r < 3; ++r)
            for (int c = 0; c < 3; ++c) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += v(r, k) * w[k] * v(c, k);
                CHECK(std::abs(s - m(r, c)) < 1e-13);
            }
        // orthonormal columns
        for (int a = 0; a < 3; ++a)
            for (int b = 0; b < 3; ++b) {
                double s = 0.0;
                for (int k = 0; k < 3; ++k) s += v(k, a) * v(k, b);
                CHECK(std::abs(s - (a == b ? 1.0 : 0.0)) < 1e-13);
            }
    }
}

TEST_CASE("lu_solve solves and flags singular systems") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 9;
        std::vector<cplx> m(n * n), x(n);
        for (auto& v : m) v = cplx(u(rng), u(rng));
        for (auto& v : x) v = cplx(u(rng), u(rng));
        std::vector<cplx> b(n, cplx(0));
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) b[r] += m[r * n + c] * x[c];
        auto mcopy = m;
        lu_solve(mcopy, n, b);
        for (int i = 0; i < n; ++i) CHECK(std::abs(b[i] - x[i]) < 1e-10);
    }
    std::vector<cplx> sing = {1.0, 2.0, 2.0, 4.0};  // rank 1
    std::vector<cplx> rhs = {1.0, 1.0};
    CHECK_THROWS_AS(lu_solve(sing, 2, rhs), SingularLyapunov);
}

TEST_CASE("jacobi_svd factorizes and resolves null spaces") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 12;
    std::vector<cplx> a(n * n);
    for (auto& v : a) v = cplx(u(rng), u(rng));
    const auto svd = jacobi_svd(a, n);
    CHECK(std::is_sorted(svd.sigma.rbegin(), svd.sigma.rend()));
    // ||A v_k|| == sigma_k for every right singular vector.
    for (int k = 0; k < n; ++k) {
        double nrm = 0.0;
        for (int r = 0; r < n; ++r) {
            cplx s = 0.0;
            for (int c = 0; c < n; ++c) s += a[r * n + c] * svd.v_at(c, k);
            nrm += std::norm(s);
        }
        CHECK(std::sqrt(nrm) == doctest::Approx(svd.sigma[k]).epsilon(1e-11));
    }

    // Rank-deficient: last column is a combination of the first two.
    for (int r = 0; r < n; ++r)
        a[r * n + (n - 1)] = 2.0 * a[r * n + 0] - cplx(0, 1) * a[r * n + 1];
    const auto svd2 = jacobi_svd(a, n);
    CHECK(svd2.sigma.back() < 1e-13 * svd2.sigma.front());
    double nrm = 0.0;
    for (int r = 0; r < n; ++r) {
        cplx s = 0.0;
        for (int c = 0; c < n; ++c) s += a[r * n + c] * svd2.v_at(c, n - 1);
        nrm += std::norm(s);
    }
    CHECK(std::sqrt(nrm) < 1e-12);
}

TEST_CASE("herm_eigenvalues matches known spectra") {
    // Pauli y embedded in 2x2: eigenvalues -1, 1.
    std::vector<cplx> sy = {0.0, cplx(0, -1), cplx(0, 1), 0.0};
    auto w = herm_eigenvalues(sy, 2);
    CHECK(w[0] == doctest::Approx(-1.0).epsilon(1e-14));
    CHECK(w[1] == doctest::Approx(1.0).epsilon(1e-14));

    std::mt19937_64 rng(55);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int n = 16;
    std::vector<cplx> h(n * n);
    for (int r = 0; r < n; ++r)
        for (int c = r; c < n; ++c) {
            const cplx v = (r == c) ? cplx(u(rng), 0.0) : cplx(u(rng), u(rng));
            h[r * n + c] = v;
            h[c * n + r] = std::conj(v);
        }
    auto spec = herm_eigenvalues(h, n);
    double tr = 0.0, trs = 0.0;
    for (int r = 0; r < n; ++r) tr += h[r * n + r].real();
    for (double x : spec) trs += x;
    CHECK(trs == doctest::Approx(tr).epsilon(1e-12));
    // tr(H^2) = sum of squared eigenvalues for Hermitian H
    double h2 = 0.0, s2 = 0.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) h2 += std::norm(h[r * n + c]);
    for (double x : spec) s2 += x * x;
    CHECK(s2 == doctest::Approx(h2).epsilon(1e-12));
}
