#include "dtfim/smalleig.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>

namespace dtfim {

namespace {

// Eigenvalues of a complex 2x2 [[a, b], [c, d]].
std::array<cplx, 2> eig2(cplx a, cplx b, cplx c, cplx d) {
    const cplx mid = 0.5 * (a + d);
    const cplx disc = std::sqrt(0.25 * (a - d) * (a - d) + b * c);
    return {mid + disc, mid - disc};
}

// One implicit single-shift QR sweep on a 3x3 upper-Hessenberg matrix,
// restricted to the active window [0, hi]. Two Givens rotations.
struct Givens {
    cplx c;  // cos, real in exact arithmetic but kept complex for simplicity
    cplx s;
};

Givens make_givens(cplx f, cplx g) {
    const double af = std::abs(f), ag = std::abs(g);
    if (ag == 0.0) return {1.0, 0.0};
    if (af == 0.0) return {0.0, std::conj(g) / ag};
    const double r = std::hypot(af, ag);
    const cplx fs = f / af;
    return {af / r, fs * std::conj(g) / r};
}

}  // namespace

std::array<cplx, 3> eigenvalues3(const Mat3& m) {
    // Scale to unit max-norm; shifts then stay well conditioned.
    const double scale = m.max_abs();
    if (scale == 0.0 || !std::isfinite(scale)) {
        if (scale == 0.0) return {cplx(0), cplx(0), cplx(0)};
        throw NonFinite("eigenvalues3: matrix contains non-finite entries");
    }
    Mat3 h = (1.0 / scale) * m;

    // Hessenberg: one rotation of rows/cols (1,2) kills h(2,0).
    {
        Givens g = make_givens(h(1, 0), h(2, 0));
        for (int j = 0; j < 3; ++j) {
            const cplx x = h(1, j), y = h(2, j);
            h(1, j) = g.c * x + g.s * y;
            h(2, j) = -std::conj(g.s) * x + std::conj(g.c) * y;
        }
        for (int i = 0; i < 3; ++i) {
            const cplx x = h(i, 1), y = h(i, 2);
            h(i, 1) = x * std::conj(g.c) + y * std::conj(g.s);
            h(i, 2) = -x * g.s + y * g.c;
        }
        h(2, 0) = 0.0;
    }

    std::array<cplx, 3> ev{};
    int hi = 2;  // active trailing index
    const double eps = std::numeric_limits<double>::epsilon();
    int iter = 0;
    while (hi > 0) {
        // Deflation test on the last subdiagonal of the active block.
        const double sub = std::abs(h(hi, hi - 1));
        if (sub <= eps * (std::abs(h(hi - 1, hi - 1)) + std::abs(h(hi, hi)) + eps)) {
            ev[hi] = h(hi, hi);
            --hi;
            iter = 0;
            continue;
        }
        if (hi == 1) {
            auto e = eig2(h(0, 0), h(0, 1), h(1, 0), h(1, 1));
            ev[0] = e[0];
            ev[1] = e[1];
            hi = -1;
            break;
        }
        // Wilkinson shift from the trailing 2x2 of the active 3x3 block.
        auto tr = eig2(h(1, 1), h(1, 2), h(2, 1), h(2, 2));
        cplx mu = (std::abs(tr[0] - h(2, 2)) < std::abs(tr[1] - h(2, 2))) ? tr[0] : tr[1];
        if (++iter % 12 == 0) mu += cplx(std::abs(h(2, 1)), 0.0);  // exceptional shift
        if (iter > 200) break;  // fall through to direct 2x2+1 split below

        // QR step: H - mu I = Q R, H <- R Q + mu I, with Q = G1 G2.
        for (int i = 0; i < 3; ++i) h(i, i) -= mu;
        Givens g1 = make_givens(h(0, 0), h(1, 0));
        for (int j = 0; j < 3; ++j) {
            const cplx x = h(0, j), y = h(1, j);
            h(0, j) = g1.c * x + g1.s * y;
            h(1, j) = -std::conj(g1.s) * x + std::conj(g1.c) * y;
        }
        Givens g2 = make_givens(h(1, 1), h(2, 1));
        for (int j = 0; j < 3; ++j) {
            const cplx x = h(1, j), y = h(2, j);
            h(1, j) = g2.c * x + g2.s * y;
            h(2, j) = -std::conj(g2.s) * x + std::conj(g2.c) * y;
        }
        for (int i = 0; i < 3; ++i) {
            const cplx x = h(i, 0), y = h(i, 1);
            h(i, 0) = x * std::conj(g1.c) + y * std::conj(g1.s);
            h(i, 1) = -x * g1.s + y * g1.c;
        }
        for (int i = 0; i < 3; ++i) {
            const cplx x = h(i, 1), y = h(i, 2);
            h(i, 1) = x * std::conj(g2.c) + y * std::conj(g2.s);
            h(i, 2) = -x * g2.s + y * g2.c;
        }
        for (int i = 0; i < 3; ++i) h(i, i) += mu;
        h(2, 0) = 0.0;
    }
    if (hi == 0) ev[0] = h(0, 0);
    if (hi > 0) {
        // QR failed to converge (essentially unreachable at n = 3); fall back
        // to the 2x2 solve ignoring the stuck subdiagonal.
        auto e = eig2(h(0, 0), h(0, 1), h(1, 0), h(1, 1));
        ev[0] = e[0];
        ev[1] = e[1];
    }
    for (auto& e : ev) e *= scale;
    return ev;
}

void sym_eigen3(const RMat3& m, RVec3& values, RMat3& vectors) {
    RMat3 a = m;
    // Symmetrize defensively; callers pass symmetric data.
    for (int r = 0; r < 3; ++r)
        for (int c = r + 1; c < 3; ++c) {
            const double s = 0.5 * (a(r, c) + a(c, r));
            a(r, c) = a(c, r) = s;
        }
    RMat3 v{};
    v(0, 0) = v(1, 1) = v(2, 2) = 1.0;

    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < 3; ++p)
            for (int q = p + 1; q < 3; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-300) break;
        for (int p = 0; p < 3; ++p) {
            for (int q = p + 1; q < 3; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-30 * (std::abs(a(p, p)) + std::abs(a(q, q)) + 1e-300)) continue;
                const double theta = 0.5 * (a(q, q) - a(p, p)) / apq;
                const double t = (theta >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (int k = 0; k < 3; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (int k = 0; k < 3; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (int k = 0; k < 3; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }
    // Sort ascending, permuting vector columns alongside.
    std::array<int, 3> idx{0, 1, 2};
    std::sort(idx.begin(), idx.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
    RMat3 vs;
    for (int k = 0; k < 3; ++k) {
        values[k] = a(idx[k], idx[k]);
        for (int r = 0; r < 3; ++r) vs(r, k) = v(r, idx[k]);
    }
    vectors = vs;
}

RVec3 sym_eigenvalues3(const RMat3& m) {
    RVec3 w;
    RMat3 v;
    sym_eigen3(m, w, v);
    return w;
}

void lu_solve(std::vector<cplx>& m, int n, std::vector<cplx>& b) {
    double scale = 0.0;
    for (const auto& x : m) scale = std::max(scale, std::abs(x));
    const double tiny = 1e-13 * (scale > 0.0 ? scale : 1.0);

    std::vector<int> piv(n);
    for (int i = 0; i < n; ++i) piv[i] = i;
    auto at = [&](int r, int c) -> cplx& { return m[static_cast<size_t>(r) * n + c]; };

    for (int k = 0; k < n; ++k) {
        int p = k;
        double best = std::abs(at(k, k));
        for (int r = k + 1; r < n; ++r) {
            const double v = std::abs(at(r, k));
            if (v > best) {
                best = v;
                p = r;
            }
        }
        if (best < tiny)
            throw SingularLyapunov("linear system singular to working precision");
        if (p != k) {
            for (int c = 0; c < n; ++c) std::swap(at(k, c), at(p, c));
            std::swap(b[k], b[p]);
        }
        const cplx pivot = at(k, k);
        for (int r = k + 1; r < n; ++r) {
            const cplx f = at(r, k) / pivot;
            at(r, k) = f;
            for (int c = k + 1; c < n; ++c) at(r, c) -= f * at(k, c);
            b[r] -= f * b[k];
        }
    }
    for (int r = n - 1; r >= 0; --r) {
        cplx s = b[r];
        for (int c = r + 1; c < n; ++c) s -= at(r, c) * b[c];
        b[r] = s / at(r, r);
    }
}

namespace {

// Rotation of two complex columns held in split re/im storage, with real
// cosine c and complex sine (sre, sim):
//   p' = c p - conj(s) q,  q' = s p + c q.
// Plain double loops so the compiler can vectorize them.
void rotate_cols(double* pre, double* pim, double* qre, double* qim, int n, double c,
                 double sre, double sim) {
    for (int k = 0; k < n; ++k) {
        const double xr = pre[k], xi = pim[k];
        const double yr = qre[k], yi = qim[k];
        pre[k] = c * xr - (sre * yr + sim * yi);
        pim[k] = c * xi - (sre * yi - sim * yr);
        qre[k] = sre * xr - sim * xi + c * yr;
        qim[k] = sre * xi + sim * xr + c * yi;
    }
}

}  // namespace

SvdResult jacobi_svd(std::vector<cplx> a, int n) {
    // One-sided Jacobi: orthogonalize the columns of A; A V = U Sigma.
    // High relative accuracy on small singular values, which is what the
    // null-space extraction needs.
    const size_t nn = static_cast<size_t>(n);
    std::vector<double> wre(nn * nn), wim(nn * nn), vre(nn * nn, 0.0), vim(nn * nn, 0.0);
    for (int i = 0; i < n; ++i) vre[static_cast<size_t>(i) * nn + i] = 1.0;
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c) {
            wre[static_cast<size_t>(c) * nn + r] = a[static_cast<size_t>(r) * n + c].real();
            wim[static_cast<size_t>(c) * nn + r] = a[static_cast<size_t>(r) * n + c].imag();
        }
    auto col = [&](std::vector<double>& m, int c) { return m.data() + static_cast<size_t>(c) * nn; };

    const double eps = 1e-15;
    std::vector<double> colsq(nn);
    for (int sweep = 0; sweep < 60; ++sweep) {
        // Refresh the cached column norms each sweep; the closed-form updates
        // below keep them current within a sweep but accumulation drifts.
        for (int c = 0; c < n; ++c) {
            double s2 = 0.0;
            const double* cr = col(wre, c);
            const double* ci = col(wim, c);
            for (int k = 0; k < n; ++k) s2 += cr[k] * cr[k] + ci[k] * ci[k];
            colsq[c] = s2;
        }
        bool rotated = false;
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                double* pr = col(wre, p);
                double* pi_ = col(wim, p);
                double* qr = col(wre, q);
                double* qi = col(wim, q);
                const double app = colsq[p], aqq = colsq[q];
                double dot_re = 0.0, dot_im = 0.0;  // conj(p) . q
                for (int k = 0; k < n; ++k) {
                    dot_re += pr[k] * qr[k] + pi_[k] * qi[k];
                    dot_im += pr[k] * qi[k] - pi_[k] * qr[k];
                }
                const double offd = std::hypot(dot_re, dot_im);
                if (offd <= eps * std::sqrt(app * aqq)) continue;
                rotated = true;
                // Complex Jacobi rotation diagonalizing [[app, apq], [apq*, aqq]].
                const double phr = dot_re / offd, phi_ = dot_im / offd;
                const double tau = (aqq - app) / (2.0 * offd);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double sr = t * c;
                colsq[p] = c * c * app + sr * sr * aqq - 2.0 * c * sr * offd;
                colsq[q] = sr * sr * app + c * c * aqq + 2.0 * c * sr * offd;
                rotate_cols(pr, pi_, qr, qi, n, c, phr * sr, phi_ * sr);
                rotate_cols(col(vre, p), col(vim, p), col(vre, q), col(vim, q), n, c,
                            phr * sr, phi_ * sr);
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sigma(nn);
    std::vector<int> order(n);
    for (int c = 0; c < n; ++c) {
        double s2 = 0.0;
        const double* cr = col(wre, c);
        const double* ci = col(wim, c);
        for (int k = 0; k < n; ++k) s2 += cr[k] * cr[k] + ci[k] * ci[k];
        sigma[c] = std::sqrt(s2);
        order[c] = c;
    }
    std::sort(order.begin(), order.end(), [&](int i, int j) { return sigma[i] > sigma[j]; });
    SvdResult out;
    out.n = n;
    out.sigma.resize(nn);
    out.v.resize(nn * nn);
    for (int c = 0; c < n; ++c) {
        out.sigma[c] = sigma[order[c]];
        const double* sr_ = col(vre, order[c]);
        const double* si_ = col(vim, order[c]);
        for (int k = 0; k < n; ++k)
            out.v[static_cast<size_t>(c) * nn + k] = cplx(sr_[k], si_[k]);
    }
    return out;
}

std::vector<double> herm_eigenvalues(std::vector<cplx> a, int n) {
    const size_t nn = static_cast<size_t>(n);
    auto at = [&](int r, int c) -> cplx& { return a[static_cast<size_t>(r) * nn + c]; };
    // Enforce Hermiticity so rotations stay real on the diagonal.
    for (int r = 0; r < n; ++r) {
        at(r, r) = cplx(at(r, r).real(), 0.0);
        for (int c = r + 1; c < n; ++c) {
            const cplx s = 0.5 * (at(r, c) + std::conj(at(c, r)));
            at(r, c) = s;
            at(c, r) = std::conj(s);
        }
    }
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < n; ++p)
            for (int q = p + 1; q < n; ++q) off += std::norm(at(p, q));
        double diag = 0.0;
        for (int p = 0; p < n; ++p) diag += std::norm(at(p, p));
        if (off <= 1e-30 * (diag + 1e-300)) break;
        for (int p = 0; p < n; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = at(p, q);
                const double offd = std::abs(apq);
                if (offd == 0.0) continue;
                const double app = at(p, p).real(), aqq = at(q, q).real();
                const cplx phase = apq / offd;
                const double tau = (aqq - app) / (2.0 * offd);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) /
                                 (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const cplx s = phase * (t * c);
                // Rows p,q then columns p,q of the unitary similarity.
                for (int k = 0; k < n; ++k) {
                    const cplx xp = at(p, k), xq = at(q, k);
                    at(p, k) = c * xp - s * xq;
                    at(q, k) = std::conj(s) * xp + c * xq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx xp = at(k, p), xq = at(k, q);
                    at(k, p) = c * xp - std::conj(s) * xq;
                    at(k, q) = s * xp + c * xq;
                }
            }
        }
    }
    std::vector<double> w(nn);
    for (int i = 0; i < n; ++i) w[i] = at(i, i).real();
    std::sort(w.begin(), w.end());
    return w;
}

}  // namespace dtfim
