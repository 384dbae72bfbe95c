#include <doctest.h>

#include <cmath>
#include <random>

#include "dtfim/fluctuations.hpp"
#include "dtfim/oracle.hpp"
#include "dtfim/smalleig.hpp"

using namespace dtfim;

namespace {

SystemParams make(double d, double o, double v, double g = 1.0, long n = 100) {
    SystemParams p;
    p.delta = d;
    p.omega = o;
    p.vint = v;
    p.gamma = g;
    p.natoms = n;
    return p;
}

// Literal site-by-site construction of the Hamiltonian double sum, including
// the m = n self-interaction term. Independent of build_hamiltonian's
// collective shortcut.
std::vector<cplx> hamiltonian_sitewise(const SystemParams& p, int n) {
    const int d = 1 << n;
    std::vector<cplx> h(static_cast<size_t>(d) * d, cplx(0));
    const double zc = -0.5 * p.delta + 0.25 * p.vint;
    for (int a = 0; a < n; ++a) {
        const auto sz = site_operator(pauli_z(), a, n);
        const auto sx = site_operator(pauli_x(), a, n);
        for (size_t k = 0; k < h.size(); ++k) h[k] += zc * sz[k] + 0.5 * p.omega * sx[k];
    }
    const double qc = p.vint / (8.0 * n);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            const auto prod =
                mat_mul(site_operator(pauli_z(), a, n), site_operator(pauli_z(), b, n), d);
            for (size_t k = 0; k < h.size(); ++k) h[k] += qc * prod[k];
        }
    return h;
}

DensityMatrix random_density(std::mt19937_64& rng, int n) {
    const int d = 1 << n;
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<cplx> x(static_cast<size_t>(d) * d);
    for (auto& v : x) v = cplx(u(rng), u(rng));
    DensityMatrix dm;
    dm.natoms = n;
    dm.dim = d;
    dm.rho.assign(x.size(), cplx(0));
    // rho = X X^dagger / tr
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) {
            cplx s = 0.0;
            for (int k = 0; k < d; ++k)
                s += x[static_cast<size_t>(i) * d + k] * std::conj(x[static_cast<size_t>(j) * d + k]);
            dm.at(i, j) = s;
        }
    cplx tr = 0.0;
    for (int i = 0; i < d; ++i) tr += dm.at(i, i);
    for (auto& v : dm.rho) v /= tr;
    return dm;
}

// Swap the basis bits of atoms a and b in both row and column indices.
DensityMatrix swap_atoms(const DensityMatrix& dm, int a, int b) {
    auto permute = [&](int idx) {
        const int ba = (idx >> a) & 1, bb = (idx >> b) & 1;
        int out = idx & ~((1 << a) | (1 << b));
        out |= ba << b;
        out |= bb << a;
        return out;
    };
    DensityMatrix out = dm;
    for (int i = 0; i < dm.dim; ++i)
        for (int j = 0; j < dm.dim; ++j) out.at(permute(i), permute(j)) = dm.at(i, j);
    return out;
}

}  // namespace

TEST_CASE("hamiltonian: single atom at V = 0") {
    const auto h = build_hamiltonian(make(3, 2, 0), 1);
    // basis (g, e): H = (-delta/2) sz + (omega/2) sx with sz = diag(-1, 1)
    CHECK(std::abs(h[0] - cplx(1.5)) < 1e-15);
    CHECK(std::abs(h[3] - cplx(-1.5)) < 1e-15);
    CHECK(std::abs(h[1] - cplx(1.0)) < 1e-15);
    CHECK(std::abs(h[2] - cplx(1.0)) < 1e-15);
}

TEST_CASE("hamiltonian: collective form equals the sitewise double sum at N = 3") {
    const auto p = make(1.3, 0.7, 5.5);
    const auto ha = build_hamiltonian(p, 3);
    const auto hb = hamiltonian_sitewise(p, 3);
    double dev = 0.0;
    for (size_t k = 0; k < ha.size(); ++k) dev = std::max(dev, std::abs(ha[k] - hb[k]));
    CHECK(dev < 1e-13);
}

TEST_CASE("hamiltonian: N = 2 against an independent hand expansion") {
    // H = (V/4)(s1z + s2z) + (V/16)(s1z + s2z)^2 at Delta = Omega = 0, V = 8:
    // diagonal with entries from jz in {-2, 0, 2}: 2 jz/4... evaluated directly.
    const double v = 8.0;
    const auto h = build_hamiltonian(make(0, 0, v), 2);
    const int d = 4;
    for (int i = 0; i < d; ++i) {
        const int pop = ((i >> 0) & 1) + ((i >> 1) & 1);
        const double jz = 2.0 * pop - 2.0;
        const double expect = (v / 4.0) * jz + (v / 16.0) * jz * jz;
        for (int j = 0; j < d; ++j) {
            const cplx want = (i == j) ? cplx(expect) : cplx(0);
            CHECK(std::abs(h[static_cast<size_t>(i) * d + j] - want) < 1e-14);
        }
    }
}

TEST_CASE("hamiltonian is Hermitian and permutation symmetric") {
    const auto p = make(-2.2, 1.9, 13.0);
    for (int n : {2, 3, 4}) {
        const auto h = build_hamiltonian(p, n);
        const int d = 1 << n;
        DensityMatrix asdm;
        asdm.natoms = n;
        asdm.dim = d;
        asdm.rho = h;
        CHECK(asdm.hermiticity_deviation() < 1e-14);
        for (int a = 0; a < n; ++a)
            for (int b = a + 1; b < n; ++b) {
                const DensityMatrix swapped = swap_atoms(asdm, a, b);
                double dev = 0.0;
                for (size_t k = 0; k < h.size(); ++k)
                    dev = std::max(dev, std::abs(swapped.rho[k] - h[k]));
                CHECK(dev == 0.0);
            }
    }
    CHECK_THROWS_AS(build_hamiltonian(p, 9), TooLarge);
}

TEST_CASE("liouvillian: trace preservation on random Hermitian inputs") {
    std::mt19937_64 rng(606);
    const auto l = build_liouvillian(make(0.7, 1.1, 3.0), 3);
    for (int trial = 0; trial < 20; ++trial) {
        const DensityMatrix rho = random_density(rng, 3);
        const auto out = l.apply(rho.rho);
        cplx tr = 0.0;
        double herm = 0.0;
        for (int i = 0; i < 8; ++i) tr += out[static_cast<size_t>(i) * 8 + i];
        for (int i = 0; i < 8; ++i)
            for (int j = 0; j < 8; ++j)
                herm = std::max(herm, std::abs(out[static_cast<size_t>(i) * 8 + j] -
                                               std::conj(out[static_cast<size_t>(j) * 8 + i])));
        CHECK(std::abs(tr) < 1e-12);
        CHECK(herm < 1e-12);
    }
}

TEST_CASE("liouvillian: single-atom decay rate and Bloch steady state") {
    // Omega = 0: excited population decays at gamma.
    const auto l = build_liouvillian(make(1.0, 0.0, 0.0, 1.0), 1);
    std::vector<cplx> rho = {0, 0, 0, 1};  // |e><e| (bit 1 = excited)
    const auto drho = l.apply(rho);
    CHECK(std::abs(drho[3] - cplx(-1.0)) < 1e-15);  // d rho_ee/dt = -gamma
    CHECK(std::abs(drho[0] - cplx(1.0)) < 1e-15);   // feeds the ground state

    // Driven atom (V = 0): the steady state is the optical Bloch point.
    const auto l2 = build_liouvillian(make(2.0, 2.0, 0.0), 1);
    const DensityMatrix ss = steady_state(l2);
    const cplx sminus = ss.at(1, 0);  // <sigma-> = tr(rho |g><e|) = rho_eg
    const double szexp = (ss.at(1, 1) - ss.at(0, 0)).real();
    CHECK(szexp == doctest::Approx(-0.68).epsilon(1e-10));
    CHECK(std::abs(sminus - cplx(0.32, -0.08)) < 1e-10);
}

TEST_CASE("steady state: dark state at Omega = 0 for several N") {
    for (int n : {1, 2, 3, 4}) {
        const auto l = build_liouvillian(make(2.0, 0.0, 7.0), n);
        const DensityMatrix ss = steady_state(l);
        CHECK(std::abs(ss.at(0, 0) - cplx(1.0)) < 1e-10);
        double off = 0.0;
        for (int i = 0; i < ss.dim; ++i)
            for (int j = 0; j < ss.dim; ++j)
                if (i || j) off = std::max(off, std::abs(ss.at(i, j)));
        CHECK(off < 1e-10);
    }
}

TEST_CASE("steady state: SVD and propagation routes agree") {
    for (int n : {2, 3}) {
        const auto l = build_liouvillian(make(0.0, 2.0, 1.0), n);
        const DensityMatrix a = steady_state(l, SteadyStateMethod::svd);
        const DensityMatrix b = steady_state(l, SteadyStateMethod::propagate);
        double dev = 0.0;
        for (size_t k = 0; k < a.rho.size(); ++k)
            dev = std::max(dev, std::abs(a.rho[k] - b.rho[k]));
        CHECK(dev < 1e-10);
    }
}

TEST_CASE("steady state: validity invariants and permutation symmetry at N = 4") {
    const auto l = build_liouvillian(make(0.0, 2.0, 1.0), 4);
    const DensityMatrix ss = steady_state(l);
    CHECK(ss.hermiticity_deviation() < 1e-12);
    CHECK(ss.trace_deviation() < 1e-12);
    CHECK(ss.min_eigenvalue() > -1e-10);
    for (int a = 0; a < 4; ++a)
        for (int b = a + 1; b < 4; ++b) {
            const DensityMatrix swapped = swap_atoms(ss, a, b);
            double dev = 0.0;
            for (size_t k = 0; k < ss.rho.size(); ++k)
                dev = std::max(dev, std::abs(swapped.rho[k] - ss.rho[k]));
            CHECK(dev < 1e-10);
        }
}

TEST_CASE("steady state factorizes into single-atom states at V = 0") {
    const auto single = steady_state(build_liouvillian(make(2.0, 2.0, 0.0), 1));
    const auto full = steady_state(build_liouvillian(make(2.0, 2.0, 0.0), 4));
    // Product state: rho[i, j] = prod_n rho1[bit_n(i), bit_n(j)]
    double frob2 = 0.0;
    for (int i = 0; i < 16; ++i)
        for (int j = 0; j < 16; ++j) {
            cplx prod = 1.0;
            for (int n = 0; n < 4; ++n) prod *= single.at((i >> n) & 1, (j >> n) & 1);
            frob2 += std::norm(full.at(i, j) - prod);
        }
    CHECK(std::sqrt(frob2) < 1e-8);
}

TEST_CASE("collective moments: ground state, mixed single atom, product additivity") {
    DensityMatrix ground;
    ground.natoms = 3;
    ground.dim = 8;
    ground.rho.assign(64, cplx(0));
    ground.at(0, 0) = 1.0;
    const SpinMoments g = collective_moments(ground);
    CHECK(g.mean[0] == 0.0);
    CHECK(g.mean[1] == 0.0);
    CHECK(g.mean[2] == doctest::Approx(-1.0).epsilon(1e-15));
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c) {
            const double expect = (r == c && r < 2) ? 1.0 / 3.0 : 0.0;
            CHECK(std::abs(g.cov_at(r, c) - expect) < 1e-14);
        }

    DensityMatrix mixed;
    mixed.natoms = 1;
    mixed.dim = 2;
    mixed.rho = {0.5, 0.0, 0.0, 0.5};
    const SpinMoments m = collective_moments(mixed);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(m.mean[k]) < 1e-15);
    for (int r = 0; r < 3; ++r)
        for (int c = 0; c < 3; ++c)
            CHECK(std::abs(m.cov_at(r, c) - (r == c ? 1.0 : 0.0)) < 1e-15);

    // V = 0 driven: N-scaled covariances equal the single-atom symmetric ones.
    const auto single = steady_state(build_liouvillian(make(2.0, 2.0, 0.0), 1));
    const auto full = steady_state(build_liouvillian(make(2.0, 2.0, 0.0), 4));
    const SpinMoments s1 = collective_moments(single);
    const SpinMoments s4 = collective_moments(full);
    for (int r = 0; r < 3; ++r) {
        CHECK(s4.mean[r] == doctest::Approx(s1.mean[r]).epsilon(1e-10));
        for (int c = 0; c < 3; ++c)
            CHECK(4.0 * s4.cov_at(r, c) == doctest::Approx(s1.cov_at(r, c)).epsilon(1e-9));
    }
}

TEST_CASE("moment equations: pure-decay value and random-state residuals") {
    // All-excited, Omega = V = 0: d<Jz>/dt = -gamma<Jz> - gamma N = -2 gamma N.
    const int n = 3;
    DensityMatrix rho;
    rho.natoms = n;
    rho.dim = 8;
    rho.rho.assign(64, cplx(0));
    rho.at(7, 7) = 1.0;
    const auto l = build_liouvillian(make(0, 0, 0), n);
    const auto jz = collective_operator(pauli_z(), n);
    const auto lrho = l.apply(rho.rho);
    CHECK(trace_product(jz, lrho, 8).real() == doctest::Approx(-2.0 * n).epsilon(1e-14));

    std::mt19937_64 rng(1337);
    std::uniform_real_distribution<double> ud(-3.0, 3.0), uo(0.0, 3.0), uv(-5.0, 5.0),
        ug(0.5, 2.0);
    double worst17 = 0.0;
    for (int trial = 0; trial < 20; ++trial) {
        const auto p = make(ud(rng), uo(rng), uv(rng), ug(rng), n);
        const DensityMatrix state = random_density(rng, n);
        const MomentResiduals res = moment_rhs_check(state, p);
        CHECK(res.max_first_five() <= 1e-10);
        worst17 = std::max(worst17, res.jpmjz);
    }
    // The (1/3)<J+-> coefficient of the J+-Jz equation is exact.
    MESSAGE("max residual of the J+-Jz equation over 20 random states: ", worst17);
    CHECK(worst17 <= 1e-10);
}

TEST_CASE("exact squeezing: ground state and V = 0 product isotropy") {
    DensityMatrix ground;
    ground.natoms = 4;
    ground.dim = 16;
    ground.rho.assign(256, cplx(0));
    ground.at(0, 0) = 1.0;
    CHECK(exact_squeezing(ground).xi2 == doctest::Approx(1.0).epsilon(1e-12));

    const auto full = steady_state(build_liouvillian(make(2.0, 2.0, 0.0), 4));
    CHECK(exact_squeezing(full).xi2 == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("convergence study: V = 0 closure and the interacting trend") {
    const std::vector<int> ns = {2, 3, 4};
    const auto closed = convergence_study(make(2.0, 2.0, 0.0, 1.0, 64), ns);
    for (const auto& row : closed.rows) {
        CHECK(row.dev_xi2 <= 1e-8);
        CHECK(row.dev_ncov <= 1e-8);
    }

    const auto trend = convergence_study(make(0.0, 2.0, 1.0, 1.0, 64), ns);
    REQUIRE(trend.rows.size() == 3);
    CHECK(trend.rows[0].dev_xi2 > trend.rows[1].dev_xi2);
    CHECK(trend.rows[1].dev_xi2 > trend.rows[2].dev_xi2);

    // Omega = 0: exact and analytic agree at 1 for every N.
    const auto dark = convergence_study(make(2.0, 0.0, 7.0, 1.0, 64), ns);
    for (const auto& row : dark.rows) {
        CHECK(row.xi2_exact == doctest::Approx(1.0).epsilon(1e-9));
        CHECK(row.xi2_analytic == doctest::Approx(1.0).epsilon(1e-12));
    }

    // Bistable parameter points are rejected.
    CHECK_THROWS_AS(convergence_study(make(7.0, 2.0, 20.0), ns), InvalidParams);
}

TEST_CASE("memory guard") {
    CHECK_THROWS_AS(build_liouvillian(make(0, 1, 0), 8), TooLarge);
    CHECK(oracle_memory_estimate(7) < (size_t{1} << 26));  // matrix-free: a few MiB
}
