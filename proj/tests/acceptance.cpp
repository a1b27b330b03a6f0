// Acceptance gate: one PASS/FAIL line per criterion. `--only N` runs a single criterion.
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "netsir/branching.hpp"
#include "netsir/cli.hpp"
#include "netsir/config_graph.hpp"
#include "netsir/deterministic.hpp"
#include "netsir/epidemic_sim.hpp"
#include "netsir/fluctuations.hpp"
#include "netsir/ode.hpp"
#include "netsir/stats.hpp"

using namespace netsir;

namespace {

const ModelParams table_params{1.5, 1.0, 2.0};
const ModelParams modified_params{1.5, 3.0, 0.0};
const ModelParams temporal_params{1.5, 1.0, 1.0};

DegreeDistribution poisson5() { return make_poisson(5.0, 15); }
DegreeDistribution geometric6() { return make_geometric(1.0 / 6.0, 50); }

double seconds_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void info(const char* fmt, ...) __attribute__((format(printf, 1, 2)));
void info(const char* fmt, ...) {
    va_list args;
    va_start(args, fmt);
    std::printf("    ");
    std::vprintf(fmt, args);
    std::printf("\n");
    va_end(args);
}

bool within(double value, double target, double tol) { return std::abs(value - target) <= tol; }

double cli_rho(const std::vector<std::string>& args) {
    std::ostringstream out, err;
    if (run_cli(args, out, err) != 0) return std::nan("");
    const std::string text = out.str();
    const auto pos = text.find("rho: ");
    return pos == std::string::npos ? std::nan("") : std::stod(text.substr(pos + 5));
}

bool criterion1() {
    const auto start = std::chrono::steady_clock::now();
    const double poi = cli_rho({"final-size", "--degree", "poisson:5", "--max-degree", "15", "--beta", "1.5", "--gamma", "1",
                                "--omega", "2"});
    const double geo = cli_rho({"final-size", "--degree", "geometric:0.16666666666666667", "--max-degree", "50", "--beta",
                                "1.5", "--gamma", "1", "--omega", "2"});
    const double elapsed = seconds_since(start);
    info("rho poisson %.6f (target 0.6758 +- 0.0005), geometric %.6f (target 0.5780 +- 0.0005), %.3f s", poi, geo, elapsed);
    return within(poi, 0.6758, 5e-4) && within(geo, 0.5780, 5e-4) && elapsed < 1.0;
}

bool criterion2() {
    const auto start = std::chrono::steady_clock::now();
    struct Case {
        const char* label;
        DegreeDistribution dist;
        ModelParams params;
        double target;
    };
    const Case cases[] = {{"poisson dropping", poisson5(), table_params, 32.0},
                          {"poisson modified", poisson5(), modified_params, 37.1},
                          {"geometric dropping", geometric6(), table_params, 20.0},
                          {"geometric modified", geometric6(), modified_params, 22.6}};
    bool ok = true;
    for (const auto& c : cases) {
        const double scaled = std::sqrt(1000.0 * sigma2_nsw_final(c.dist, c.params).sigma2);
        info("%-19s sqrt(1000) sigma_NSW = %.4f (target %.1f +- 0.2)", c.label, scaled, c.target);
        ok = ok && within(scaled, c.target, 0.2);
    }
    const double elapsed = seconds_since(start);
    info("%.3f s", elapsed);
    return ok && elapsed < 5.0;
}

bool criterion3() {
    const auto start = std::chrono::steady_clock::now();
    struct Case {
        const char* label;
        DegreeDistribution dist;
        OffspringVariant variant;
        double lo, hi;
    };
    const Case cases[] = {{"poisson dropping", poisson5(), OffspringVariant::dropping, 0.592, 0.611},
                          {"poisson modified", poisson5(), OffspringVariant::modified, 0.474, 0.493},
                          {"geometric dropping", geometric6(), OffspringVariant::dropping, 0.519, 0.539},
                          {"geometric modified", geometric6(), OffspringVariant::modified, 0.443, 0.463}};
    bool ok = true;
    for (const auto& c : cases) {
        const OffspringModel model{c.variant, table_params};
        const double five = pmaj(model, c.dist, 5);
        const double one = pmaj(model, c.dist, 1);
        const bool pass = five >= c.lo - 0.01 && five <= c.hi + 0.01;
        info("%-19s p_maj(n_initial=5) = %.4f, allowed [%.3f, %.3f]%s; p_maj(n_initial=1) = %.4f", c.label, five,
             c.lo - 0.01, c.hi + 0.01, pass ? "" : " OUT", one);
        ok = ok && pass;
    }
    const double elapsed = seconds_since(start);
    info("%.3f s", elapsed);
    return ok && elapsed < 1.0;
}

struct MajorStats {
    double p_hat, mean, sd;
};

MajorStats simulate_major(const DegreeDistribution& dist, int i0, std::uint64_t seed) {
    EnsembleConfig cfg;
    cfg.dist = dist;
    cfg.network = NetworkKind::nsw;
    cfg.n = 1000;
    cfg.i0 = i0;
    cfg.params = table_params;
    cfg.grid = {0.0};
    const MajorSplit split = classify_major(run_ensemble(cfg, 10000, seed), 0.15);
    const SummaryStats s = summarize(split.major);
    return {split.p_hat, s.mean, s.sd};
}

bool criterion4() {
    const auto start = std::chrono::steady_clock::now();
    struct Case {
        const char* label;
        DegreeDistribution dist;
        double mean, sd;
        std::uint64_t seed;
    };
    const Case cases[] = {{"poisson", poisson5(), 673.5, 32.4, 4101}, {"geometric", geometric6(), 576.8, 20.3, 4102}};
    bool ok = true;
    for (const auto& c : cases) {
        const MajorStats m = simulate_major(c.dist, 5, c.seed);
        const double mean_gap = std::abs(m.mean / c.mean - 1.0), sd_gap = std::abs(m.sd / c.sd - 1.0);
        const bool pass = mean_gap <= 0.005 && sd_gap <= 0.10;
        info("%-9s i0=5: p_hat %.4f, major mean %.2f (target %.1f, gap %.3f%%), sd %.2f (target %.1f, gap %.1f%%)%s",
             c.label, m.p_hat, m.mean, c.mean, 100 * mean_gap, m.sd, c.sd, 100 * sd_gap, pass ? "" : " OUT");
        const MajorStats one = simulate_major(c.dist, 1, c.seed + 100);
        info("%-9s i0=1 (info): p_hat %.4f, major mean %.2f, sd %.2f", c.label, one.p_hat, one.mean, one.sd);
        ok = ok && pass;
    }
    info("%.1f s", seconds_since(start));
    return ok;
}

// Shared setup for the temporal criteria.
struct TemporalRun {
    std::vector<double> grid;
    std::vector<DeterministicState> ode;
    TrajectorySummary sim;
    int n = 5000;
    double t_rise = 0, t_peak = 0, t_fall = 0;
};

const TemporalRun& temporal_run() {
    static const TemporalRun run = [] {
        TemporalRun r;
        const auto dist = poisson5();
        const auto init = InitialInfection::proportional(dist, 0.05);
        const auto fine_grid = uniform_grid(10.0, 10001);
        const auto fine = solve_realtime(dist, init, temporal_params, fine_grid);
        std::size_t peak = 0;
        for (std::size_t k = 0; k < fine.size(); ++k)
            if (fine[k].y_total() > fine[peak].y_total()) peak = k;
        const double half = 0.5 * fine[peak].y_total();
        std::size_t rise = 0, fall = peak;
        while (rise < peak && fine[rise].y_total() < half) ++rise;
        while (fall + 1 < fine.size() && fine[fall].y_total() > half) ++fall;
        r.t_rise = fine_grid[rise];
        r.t_peak = fine_grid[peak];
        r.t_fall = fine_grid[fall];
        r.grid = uniform_grid(10.0, 101);
        for (double t : {r.t_rise, r.t_peak, r.t_fall}) r.grid.push_back(t);
        std::sort(r.grid.begin(), r.grid.end());
        r.grid.erase(std::unique(r.grid.begin(), r.grid.end()), r.grid.end());
        r.ode = solve_realtime(dist, init, temporal_params, r.grid);

        EnsembleConfig cfg;
        cfg.dist = dist;
        cfg.network = NetworkKind::nsw;
        cfg.n = r.n;
        cfg.i0 = 250;
        cfg.params = temporal_params;
        cfg.grid = r.grid;
        cfg.keep_trajectories = true;
        r.sim = summarize_trajectories(run_ensemble(cfg, 1000, 5005));
        return r;
    }();
    return run;
}

bool criterion5() {
    const auto start = std::chrono::steady_clock::now();
    const TemporalRun& r = temporal_run();
    double worst = 0.0, worst_t = 0.0;
    for (std::size_t k = 0; k < r.grid.size(); ++k) {
        const double gap = std::abs(r.sim.I_mean[k] / r.n - r.ode[k].y_total());
        if (gap > worst) worst = gap, worst_t = r.grid[k];
    }
    info("sup |mean I(t)/N - y(t)| = %.5f at t = %.2f (target < 0.01), %.1f s", worst, worst_t, seconds_since(start));
    return worst < 0.01;
}

bool criterion6() {
    const auto start = std::chrono::steady_clock::now();
    const TemporalRun& r = temporal_run();
    const auto dist = poisson5();
    const auto init = InitialInfection::proportional(dist, 0.05);
    const std::vector<double> times{r.t_rise, r.t_peak, r.t_fall};
    const auto sigma = solve_sigma(dist, init, temporal_params, times, nsw_sigma0(dist, 0.05));
    const char* labels[] = {"early growth", "peak", "post-peak"};
    const double tolerances[] = {0.10, 0.10, 0.25};
    bool ok = true;
    for (std::size_t j = 0; j < times.size(); ++j) {
        const auto k = static_cast<std::size_t>(std::find(r.grid.begin(), r.grid.end(), times[j]) - r.grid.begin());
        const double empirical = r.sim.I_sd[k] / std::sqrt(static_cast<double>(r.n));
        const double predicted = std::sqrt(sigma[j].var_infective);
        const double gap = std::abs(empirical / predicted - 1.0);
        const bool pass = gap <= tolerances[j];
        info("%-12s t = %.3f: empirical sd(I)/sqrt(N) %.4f, predicted %.4f, gap %.1f%% (limit %.0f%%)%s", labels[j], times[j],
             empirical, predicted, 100 * gap, 100 * tolerances[j], pass ? "" : " OUT");
        ok = ok && pass;
    }
    info("%.1f s", seconds_since(start));
    return ok;
}

bool criterion7() {
    const auto start = std::chrono::steady_clock::now();
    bool ok = true;
    const auto check = [&](const char* label, double err, double tol) {
        const bool pass = std::isfinite(err) && err <= tol;
        info("%-44s %.3g (tol %.0e)%s", label, err, tol, pass ? "" : " OUT");
        ok = ok && pass;
    };
    const auto dist = poisson5();
    const auto init = InitialInfection::proportional(dist, 0.05);
    const double mu = moments(dist).mean, a = table_params.edge_rate();

    {
        const double tau = final_size(dist, init, table_params).tau_tilde;
        double worst = 0.0;
        for (const auto& s : solve_transformed(dist, init, table_params, uniform_grid(0.99 * tau, 50)))
            worst = std::max(worst, std::abs(s.eta_E() - mu * std::exp(-2 * a * s.t)));
        check("transformed eta_E vs closed form", worst, 1e-8);
    }
    const auto grid = uniform_grid(5.0, 20);
    const auto xi = solve_xi(dist, init, temporal_params, grid);
    {
        const auto theta = solve_theta(dist, init, temporal_params, grid);
        double worst = 0.0;
        for (std::size_t k = 0; k < grid.size(); ++k) worst = std::max(worst, std::abs(theta[k] - psi(temporal_params, xi[k])));
        check("theta = psi(xi)", worst, 1e-6);
    }
    {
        const auto real = solve_realtime(dist, init, temporal_params, grid);
        const auto trans = solve_transformed(dist, init, temporal_params, xi);
        double worst = trans.size() == real.size() ? 0.0 : INFINITY;
        for (std::size_t k = 0; k < std::min(real.size(), trans.size()); ++k) {
            const auto wr = pack_state(real[k]), wt = pack_state(trans[k]);
            for (std::size_t c = 0; c < wr.size(); ++c) worst = std::max(worst, std::abs(wr[c] - wt[c]));
        }
        check("w(t) = w~(xi(t))", worst, 1e-6);
    }
    check("susceptible invariance (gamma,omega)->(gamma+omega,0)",
          invariance_check(dist, init, table_params, uniform_grid(10.0, 101)).sup_susceptible_gap, 1e-6);

    const auto states = solve_realtime(dist, init, table_params, uniform_grid(6.0, 7));
    {
        double worst = 0.0;
        for (const auto& s : states) {
            const auto w = pack_state(s);
            const auto f1 = drift(w, table_params), f2 = drift_by_enumeration(w, table_params);
            for (std::size_t c = 0; c < f1.size(); ++c) worst = std::max(worst, std::abs(f1[c] - f2[c]));
        }
        check("drift: jump enumeration vs closed form", worst, 1e-12);
    }
    {
        double worst = 0.0;
        for (std::size_t j = 1; j < states.size(); j += 2) {
            const auto w = pack_state(states[j]);
            const Eigen::MatrixXd jac = jacobian(w, table_params);
            const double scale = jac.cwiseAbs().maxCoeff();
            for (std::size_t c = 0; c < w.size(); ++c) {
                const double h = 1e-6 * std::max(1.0, std::abs(w[c]));
                auto up = w, dn = w;
                up[c] += h;
                dn[c] -= h;
                const auto fu = drift(up, table_params), fd = drift(dn, table_params);
                for (std::size_t r = 0; r < w.size(); ++r)
                    worst = std::max(worst, std::abs((fu[r] - fd[r]) / (2 * h) -
                                                     jac(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c))) /
                                                scale);
            }
        }
        check("Jacobian vs central differences (relative)", worst, 1e-5);
    }
    {
        double most_negative = 0.0;
        for (const auto& s : states) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(g_matrix(pack_state(s), table_params), Eigen::EigenvaluesOnly);
            most_negative = std::max(most_negative, -es.eigenvalues().minCoeff());
        }
        for (const auto& p : solve_sigma(dist, init, temporal_params, uniform_grid(8.0, 17), nsw_sigma0(dist, 0.05))) {
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p.sigma, Eigen::EigenvaluesOnly);
            most_negative = std::max(most_negative, -es.eigenvalues().minCoeff());
        }
        check("G and Sigma(t) PSD (most negative eigenvalue)", most_negative, 1e-8);
    }
    {
        const double near = sigma2_nsw_final(dist, ModelParams{1.5, 1.0, 1e-8}).sigma2;
        const double none = sigma2_nsw_nodrop(dist, 1.5, 1.0).sigma2;
        check("omega -> 0 variance continuity (relative)", std::abs(near - none) / none, 1e-5);
    }
    {
        const OffspringModel drop{OffspringVariant::dropping, table_params};
        const OffspringModel mod{OffspringVariant::modified, table_params};
        int violations = 0;
        for (int k = 0; k <= 15; ++k)
            for (int i = 0; i < 100; ++i) {
                const double s = i / 100.0;
                const double gap = offspring_pgf_k(mod, k, s) - offspring_pgf_k(drop, k, s);
                if (k >= 2 ? !(gap > 0.0) : gap < -1e-15) ++violations;
            }
        check("offspring pgf ordering violations on grid", violations, 0.0);
        check("later-generation pgf slope at 1 vs R0",
              std::abs(offspring_pgf_later_derivative(drop, dist, 1.0) - r0(dist, table_params)), 1e-8);
    }
    {
        EnsembleConfig cfg;
        cfg.dist = dist;
        cfg.network = NetworkKind::nsw;
        cfg.n = 500;
        cfg.i0 = 25;
        cfg.params = temporal_params;
        cfg.grid = {0.0};
        const auto gill = run_ensemble(cfg, 5000, 7001);
        cfg.engine = Engine::effective_degree;
        const auto eff = run_ensemble(cfg, 5000, 7002);
        const KsResult ks = ks_two_sample(std::vector<double>(gill.final_sizes.begin(), gill.final_sizes.end()),
                                          std::vector<double>(eff.final_sizes.begin(), eff.final_sizes.end()));
        const bool pass = ks.p_value >= 0.01;
        info("%-44s D = %.4f, p = %.4f (reject below 0.01)%s", "engine equivalence two-sample KS", ks.statistic,
             ks.p_value, pass ? "" : " OUT");
        ok = ok && pass;
    }
    info("%.1f s", seconds_since(start));
    return ok;
}

bool criterion8() {
    const auto start = std::chrono::steady_clock::now();
    const auto dist = poisson5();
    // fixed point of z = f'(z)/mu by iteration
    const double mu = moments(dist).mean;
    double z = 0.0;
    for (int it = 0; it < 500; ++it) z = pgf(dist, z, 1) / mu;
    const double rho_oracle = 1.0 - pgf(dist, z, 0);
    const GiantComponentStats g = giant_component_stats(dist);
    const bool rho_ok = within(g.rho, 0.993023, 1e-4) && within(g.rho, rho_oracle, 1e-4);
    info("rho %.6f, fixed-point oracle %.6f (target 0.993023 +- 1e-4)%s", g.rho, rho_oracle, rho_ok ? "" : " OUT");

    const int n = 10000, graphs = 500;
    std::vector<double> frac(graphs);
    for (int r = 0; r < graphs; ++r)
        frac[static_cast<std::size_t>(r)] =
            static_cast<double>(giant_component_size(build_nsw(dist, n, derive_seed(8008, static_cast<std::uint64_t>(r))))) / n;
    const SummaryStats s = summarize(frac);
    const double scaled_var = n * s.sd * s.sd;
    const bool mean_ok = std::abs(s.mean - g.rho) <= 0.002;
    const bool var_ok = std::abs(scaled_var / g.sigma2_nsw - 1.0) <= 0.15;
    info("mean giant fraction %.5f (within 0.002 of %.5f)%s", s.mean, g.rho, mean_ok ? "" : " OUT");
    info("N-scaled variance %.6f vs sigma2_NSW %.6f, gap %.1f%% (limit 15%%)%s", scaled_var, g.sigma2_nsw,
         100 * std::abs(scaled_var / g.sigma2_nsw - 1.0), var_ok ? "" : " OUT");
    info("%.1f s", seconds_since(start));
    return rho_ok && mean_ok && var_ok;
}

}  // namespace

int main(int argc, char** argv) {
    int only = 0;
    for (int k = 1; k < argc; ++k) {
        const std::string arg = argv[k];
        if (arg == "--only" && k + 1 < argc) {
            only = std::atoi(argv[++k]);
        } else {
            std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
            return 2;
        }
    }
    const std::vector<std::pair<const char*, std::function<bool()>>> criteria = {
        {"final size means", criterion1},
        {"final size standard deviations", criterion2},
        {"major-outbreak probabilities, n_initial=5", criterion3},
        {"simulation vs asymptotics, major outbreaks", criterion4},
        {"temporal law of large numbers", criterion5},
        {"temporal central limit", criterion6},
        {"property suite", criterion7},
        {"giant component", criterion8}};
    if (only < 0 || only > static_cast<int>(criteria.size())) {
        std::fprintf(stderr, "no criterion %d\n", only);
        return 2;
    }
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        if (only != 0 && static_cast<int>(k) + 1 != only) continue;
        bool pass = false;
        try {
            pass = criteria[k].second();
        } catch (const std::exception& e) {
            std::printf("    exception: %s\n", e.what());
        }
        std::printf("%s criterion %zu: %s\n", pass ? "PASS" : "FAIL", k + 1, criteria[k].first);
        std::fflush(stdout);
        failed += !pass;
    }
    return failed == 0 ? 0 : 1;
}
