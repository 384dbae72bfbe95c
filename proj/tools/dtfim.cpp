// Command-line front end: steady-state tables, bifurcation/correlation scans,
// squeezing maps, exact-versus-linearized comparisons and finite-size
// convergence studies, all as reproducible CSV or JSON.

#include <cstdio>
#include <iostream>
#include <limits>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtfim/csvio.hpp"
#include "dtfim/fluctuations.hpp"
#include "dtfim/meanfield.hpp"
#include "dtfim/oracle.hpp"
#include "dtfim/squeezing.hpp"

namespace {

using namespace dtfim;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNoStable = 2;
constexpr int kExitResource = 3;

struct Cli {
    SystemParams params;
    std::string sweep_spec;
    std::string grid_spec;
    long n_paths = 100000;
    unsigned long long seed = 1;
    std::string out_path;
    std::string format = "csv";
    bool force = false;
};

SweepSpec parse_sweep(const std::string& s) {
    SweepSpec sw;
    char axis[16];
    int n = 0;
    if (std::sscanf(s.c_str(), "%15[a-z]:%lf:%lf:%d%n", axis, &sw.lo, &sw.hi, &sw.steps, &n) != 4 ||
        n != static_cast<int>(s.size()))
        throw InvalidParams("bad --sweep spec '" + s + "' (want axis:min:max:steps)");
    sw.axis = axis_from_string(axis);
    if (sw.steps < 2) throw InvalidParams("--sweep needs steps >= 2");
    if (!(sw.lo <= sw.hi)) throw InvalidParams("--sweep needs min <= max");
    return sw;
}

MapSpec parse_grid(const std::string& s) {
    MapSpec g;
    int n = 0;
    if (std::sscanf(s.c_str(), "%lf:%lf:%d,%lf:%lf:%d%n", &g.v_lo, &g.v_hi, &g.v_steps,
                    &g.omega_lo, &g.omega_hi, &g.omega_steps, &n) != 6 ||
        n != static_cast<int>(s.size()))
        throw InvalidParams("bad --grid spec '" + s +
                            "' (want vmin:vmax:steps,omin:omax:steps)");
    if (g.v_steps < 2 || g.omega_steps < 2) throw InvalidParams("--grid needs steps >= 2");
    return g;
}

void meta_params(TableWriter& t, const Cli& cli) {
    t.meta("delta", cli.params.delta);
    t.meta("omega", cli.params.omega);
    t.meta("vint", cli.params.vint);
    t.meta("gamma", cli.params.gamma);
    t.meta("natoms", static_cast<long>(cli.params.natoms));
    t.meta("seed", std::to_string(cli.seed));
}

void emit(const TableWriter& t, const Cli& cli, const std::string& subcommand) {
    write_output(cli.out_path,
                 cli.format == "json" ? t.to_json(subcommand) : t.to_csv(subcommand));
}

int cmd_fixed_points(const Cli& cli) {
    const BranchSet bs = steady_states(cli.params);
    TableWriter t({"branch", "m", "re_v", "im_v", "stable", "marginal", "re_eig1", "im_eig1",
                   "re_eig2", "im_eig2", "re_eig3", "im_eig3"});
    meta_params(t, cli);
    bool any_stable = false;
    for (const auto& fp : bs.fixed_points) {
        any_stable = any_stable || fp.stable;
        t.add_row({std::string(to_string(fp.branch)), fp.state.m, fp.state.v.real(),
                   fp.state.v.imag(), static_cast<long>(fp.stable),
                   static_cast<long>(fp.marginal), fp.eigenvalues[0].real(),
                   fp.eigenvalues[0].imag(), fp.eigenvalues[1].real(), fp.eigenvalues[1].imag(),
                   fp.eigenvalues[2].real(), fp.eigenvalues[2].imag()});
    }
    emit(t, cli, "fixed-points");
    return any_stable ? kExitOk : kExitNoStable;
}

int cmd_scan(const Cli& cli) {
    if (cli.sweep_spec.empty()) throw InvalidParams("scan requires --sweep");
    const SweepSpec sweep = parse_sweep(cli.sweep_spec);
    TableWriter t({"sweep_value", "branch", "m", "re_v", "im_v", "stable", "n_var_jz",
                   "n_cov_jpjm", "xi2", "flags"});
    meta_params(t, cli);
    t.meta("sweep", cli.sweep_spec);
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& ev : evaluate_sweep(cli.params, sweep)) {
        const FixedPoint& fp = ev.fixed_point;
        if (ev.flags & kFlagSolverError) {
            t.add_row({ev.sweep_value, std::string("-"), nan, nan, nan, 0L, nan, nan, nan,
                       flags_to_string(ev.flags)});
            continue;
        }
        double nvar = nan, ncov = nan, xi2 = nan;
        std::string flags = "unstable";
        if (fp.stable) {
            flags = flags_to_string(ev.flags);
            if (ev.has_model) {
                const double n = static_cast<double>(ev.model.natoms);
                nvar = n * ev.model.c(2, 2).real();
                ncov = n * ev.model.c(0, 1).real();
                if (!(ev.flags & kFlagNearCritical))
                    xi2 = squeezing_parameter(covariances_xyz(ev.model), ev.model.natoms).xi2;
            }
        }
        t.add_row({ev.sweep_value, std::string(to_string(fp.branch)), fp.state.m,
                   fp.state.v.real(), fp.state.v.imag(), static_cast<long>(fp.stable), nvar,
                   ncov, xi2, flags});
    }
    emit(t, cli, "scan");
    return kExitOk;
}

int cmd_squeeze_map(const Cli& cli) {
    if (cli.grid_spec.empty()) throw InvalidParams("squeeze-map requires --grid");
    const MapSpec grid = parse_grid(cli.grid_spec);
    TableWriter t({"vint", "omega", "xi2", "flags"});
    meta_params(t, cli);
    t.meta("grid", cli.grid_spec);
    for (const auto& cell : squeezing_map(cli.params, grid))
        t.add_row({cell.vint, cell.omega, cell.xi2, flags_to_string(cell.flags)});
    emit(t, cli, "squeeze-map");
    return kExitOk;
}

int cmd_oracle(const Cli& cli) {
    const int n_max = cli.force ? 12 : kOracleNMax;
    if (cli.params.natoms > n_max) {
        std::fprintf(stderr, "oracle: N = %ld exceeds the size guard (%d); estimated need %zu MiB\n",
                     cli.params.natoms, n_max,
                     oracle_memory_estimate(static_cast<int>(cli.params.natoms)) >> 20);
        return kExitResource;
    }
    const BranchSet bs = steady_states(cli.params);
    if (bs.fixed_points.size() != 1 || !bs.fixed_points.front().stable)
        throw InvalidParams(
            "oracle comparison needs a unique stable mean-field branch (bistable or marginal "
            "parameters are ill-posed at finite N)");
    const FluctuationModel model = make_fluctuation_model(cli.params, bs.fixed_points.front());
    const SpinMoments analytic = covariances_xyz(model);
    const double xi2_analytic = squeezing_parameter(analytic, cli.params.natoms).xi2;

    const int n = static_cast<int>(cli.params.natoms);
    const Liouvillian l(cli.params, n, n_max);
    const DensityMatrix rho = steady_state(l);
    const SpinMoments exact = collective_moments(rho);
    const double xi2_exact = exact_squeezing(rho).xi2;

    TableWriter t({"quantity", "exact", "analytic", "abs_dev"});
    meta_params(t, cli);
    const char* names[3] = {"x", "y", "z"};
    for (int a = 0; a < 3; ++a)
        t.add_row({std::string("mean_j") + names[a], exact.mean[a], analytic.mean[a],
                   std::abs(exact.mean[a] - analytic.mean[a])});
    for (int a = 0; a < 3; ++a)
        for (int b = a; b < 3; ++b)
            t.add_row({std::string("ncov_") + names[a] + names[b],
                       n * exact.cov_at(a, b), cli.params.natoms * analytic.cov_at(a, b),
                       std::abs(n * exact.cov_at(a, b) - cli.params.natoms * analytic.cov_at(a, b))});
    t.add_row({std::string("xi2"), xi2_exact, xi2_analytic, std::abs(xi2_exact - xi2_analytic)});
    emit(t, cli, "oracle");
    return kExitOk;
}

int cmd_converge(const Cli& cli) {
    const int n_max = cli.force ? 12 : kOracleNMax;
    const int n_top = static_cast<int>(cli.params.natoms);
    if (n_top > n_max) {
        std::fprintf(stderr, "converge: N = %d exceeds the size guard (%d); use --force to override\n",
                     n_top, n_max);
        return kExitResource;
    }
    std::fprintf(stderr, "converge: largest solve N = %d needs about %zu KiB\n", n_top,
                 oracle_memory_estimate(n_top) >> 10);
    std::vector<int> n_list;
    for (int n = 2; n <= n_top; ++n) n_list.push_back(n);
    if (n_list.size() < 2) throw InvalidParams("converge needs --natoms >= 3");
    const ConvergenceStudy study = convergence_study(cli.params, n_list, n_max);

    TableWriter t({"natoms", "xi2_exact", "xi2_analytic", "dev_xi2", "dev_ncov"});
    meta_params(t, cli);
    for (const auto& row : study.rows)
        t.add_row({static_cast<long>(row.natoms), row.xi2_exact, row.xi2_analytic, row.dev_xi2,
                   row.dev_ncov});
    t.footnote("fitted_exponent", study.fitted_exponent);
    emit(t, cli, "converge");
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"dissipative transverse-field Ising model: steady states, fluctuations and "
                 "spin squeezing"};
    app.fallthrough();

    Cli cli;
    app.add_option("--delta", cli.params.delta, "detuning (units of gamma)");
    app.add_option("--omega", cli.params.omega, "Rabi frequency");
    app.add_option("--vint", cli.params.vint, "Ising interaction strength");
    app.add_option("--gamma", cli.params.gamma, "decay rate (> 0)");
    app.add_option("--natoms", cli.params.natoms, "ensemble size N");
    app.add_option("--sweep", cli.sweep_spec, "sweep spec axis:min:max:steps");
    app.add_option("--grid", cli.grid_spec, "grid spec vmin:vmax:steps,omin:omax:steps");
    app.add_option("--n-paths", cli.n_paths, "paths for stochastic verification");
    app.add_option("--seed", cli.seed, "random seed");
    app.add_option("--out", cli.out_path, "output file (default stdout)");
    app.add_option("--format", cli.format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_flag("--force", cli.force, "override the oracle size guard");
    app.set_config("--config", "", "flat key=value config file; flags win");

    auto* fixed_points = app.add_subcommand("fixed-points", "mean-field branches and stability");
    auto* scan = app.add_subcommand("scan", "parameter sweep: branches, correlations, xi^2");
    auto* squeeze_map = app.add_subcommand("squeeze-map", "xi^2 over a (V, Omega) grid");
    auto* oracle = app.add_subcommand("oracle", "exact finite-N versus linearized theory");
    auto* converge = app.add_subcommand("converge", "finite-size convergence study");
    app.require_subcommand(1);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        cli.params.validate();
        if (cli.n_paths < 2) throw InvalidParams("--n-paths must be >= 2");
        if (fixed_points->parsed()) return cmd_fixed_points(cli);
        if (scan->parsed()) return cmd_scan(cli);
        if (squeeze_map->parsed()) return cmd_squeeze_map(cli);
        if (oracle->parsed()) return cmd_oracle(cli);
        if (converge->parsed()) return cmd_converge(cli);
    } catch (const TooLarge& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitResource;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    }
    return kExitConfig;
}
