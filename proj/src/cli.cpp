#include "netsir/cli.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "netsir/branching.hpp"
#include "netsir/config.hpp"
#include "netsir/config_graph.hpp"
#include "netsir/deterministic.hpp"
#include "netsir/errors.hpp"
#include "netsir/fluctuations.hpp"
#include "netsir/io.hpp"
#include "netsir/stats.hpp"

namespace netsir {

namespace {

std::string fmt(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

// Overrides collected from the command line; applied after --config and --set.
struct Overrides {
    std::string config_path;
    std::vector<std::string> settings;
    std::optional<std::string> degree;
    std::optional<int> max_degree;
    std::optional<double> beta, gamma, omega;
    std::optional<std::string> network, engine, out_dir;
    std::optional<int> n, runs, i0, points;
    std::optional<std::uint64_t> seed;
    std::optional<double> threshold, t_end, eps;
};

void add_common(CLI::App& sub, Overrides& o) {
    sub.add_option("--config", o.config_path, "Config file of key = value lines");
    sub.add_option("--set", o.settings, "Override one key, e.g. model.beta=2");
    sub.add_option("--degree", o.degree, "poisson:LAMBDA | geometric:P | empirical:FILE");
    sub.add_option("--max-degree", o.max_degree, "Truncation degree M");
    sub.add_option("--beta", o.beta, "Per-edge infection rate");
    sub.add_option("--gamma", o.gamma, "Recovery rate");
    sub.add_option("--omega", o.omega, "Edge-dropping rate");
    sub.add_option("--network", o.network, "mr | nsw");
    sub.add_option("--engine", o.engine, "gillespie | effective");
    sub.add_option("--n", o.n, "Population size");
    sub.add_option("--runs", o.runs, "Number of simulation runs");
    sub.add_option("--i0", o.i0, "Initial infectives");
    sub.add_option("--seed", o.seed, "Master seed");
    sub.add_option("--threshold", o.threshold, "Major-outbreak threshold fraction");
    sub.add_option("--t-end", o.t_end, "Last grid time");
    sub.add_option("--points", o.points, "Grid points");
    sub.add_option("--eps", o.eps, "Initial infected fraction for the ODE layers (0 = trace)");
    sub.add_option("--out", o.out_dir, "Output directory for CSVs");
}

ExperimentConfig resolve(const Overrides& o) {
    ExperimentConfig c = o.config_path.empty() ? ExperimentConfig{} : load_config(o.config_path);
    for (const auto& s : o.settings) {
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + s + "'");
        apply_setting(c, s.substr(0, eq), s.substr(eq + 1));
    }
    if (o.degree) apply_degree_flag(c, *o.degree);
    if (o.max_degree) c.degree.max_degree = *o.max_degree;
    if (o.beta) c.model.beta = *o.beta;
    if (o.gamma) c.model.gamma = *o.gamma;
    if (o.omega) c.model.omega = *o.omega;
    if (o.network) c.network = *o.network;
    if (o.engine) c.engine = *o.engine;
    if (o.n) c.n = *o.n;
    if (o.runs) c.runs = *o.runs;
    if (o.i0) c.i0 = *o.i0;
    if (o.seed) c.seed = *o.seed;
    if (o.threshold) c.threshold = *o.threshold;
    if (o.t_end) c.t_end = *o.t_end;
    if (o.points) c.grid_points = *o.points;
    if (o.eps) c.eps = *o.eps;
    if (o.out_dir) c.out_dir = *o.out_dir;
    validate_config(c);
    try {
        c.model.validate();
    } catch (const std::exception& e) {
        throw ConfigError(e.what());
    }
    return c;
}

std::ofstream open_output(const ExperimentConfig& c, const std::string& name) {
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    const auto path = std::filesystem::path(c.out_dir) / name;
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path.string() + "'");
    return f;
}

std::string degree_label(const ExperimentConfig& c) {
    if (c.degree.kind == "poisson") return "poisson(" + fmt(c.degree.lambda) + ")";
    if (c.degree.kind == "geometric") return "geometric(" + fmt(c.degree.p) + ")";
    return "empirical(" + c.degree.file + ")";
}

// Fraction of initially infected used by the real-time layers; falls back to i0/n for a trace start.
double ode_eps(const ExperimentConfig& c) { return c.eps > 0.0 ? c.eps : static_cast<double>(c.i0) / c.n; }

void print_summary(std::ostream& out, const std::string& label, const SummaryStats& s) {
    out << label << ": mean " << fmt(s.mean) << " (" << fmt(s.mean_lo) << ", " << fmt(s.mean_hi) << "), sd "
        << fmt(s.sd) << " (" << fmt(s.sd_lo) << ", " << fmt(s.sd_hi) << "), n " << s.count << '\n';
}

int cmd_simulate(const ExperimentConfig& c, std::ostream& out) {
    EnsembleConfig ec = ensemble_config(c);
    ec.keep_trajectories = true;
    const RunEnsemble ens = run_ensemble(ec, c.runs, c.seed);
    const MajorSplit split = classify_major(ens, c.threshold);
    {
        auto f = open_output(c, "ensemble.csv");
        write_ensemble_csv(f, ens);
    }
    {
        auto f = open_output(c, "trajectory.csv");
        write_trajectory_csv(f, summarize_trajectories(ens));
    }
    const double p = split.p_hat;
    const double half = 1.96 * std::sqrt(p * (1.0 - p) / c.runs);
    out << "p_major: " << fmt(p) << " (" << fmt(p - half) << ", " << fmt(p + half) << ")\n";
    if (split.major.size() >= 2) {
        const SummaryStats s = summarize(split.major);
        print_summary(out, "major_final_size", s);
        if (s.sd > 0.0) {
            std::vector<double> fr(split.major.begin(), split.major.end());
            const FinalSizeResult fs = final_size(ec.dist, InitialInfection::none(ec.dist), c.model);
            double sigma2 = 0.0;
            try {
                sigma2 = c.network == "nsw" ? sigma2_nsw_final(ec.dist, c.model).sigma2
                                            : sigma2_mr_final(ec.dist, InitialInfection::none(ec.dist), c.model).sigma2;
            } catch (const std::invalid_argument&) {
                sigma2 = 0.0;
            }
            if (sigma2 > 0.0 && !fs.below_threshold) {
                const double mu = c.n * fs.rho, sd = std::sqrt(c.n * sigma2);
                out << "kolmogorov_distance: " << fmt(kolmogorov_distance(fr, mu, sd)) << '\n';
                auto f = open_output(c, "overlay.csv");
                write_overlay_csv(f, normal_overlay(mu, sd, mu - 4 * sd, mu + 4 * sd, 201));
            }
        }
    } else {
        out << "major_final_size: fewer than 2 major outbreaks\n";
    }
    return exit_ok;
}

int cmd_ode(const ExperimentConfig& c, bool per_degree, bool covariance, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    const InitialInfection init = InitialInfection::proportional(dist, ode_eps(c));
    const auto grid = uniform_grid(c.t_end, c.grid_points);
    const auto series = solve_realtime(dist, init, c.model, grid);
    {
        auto f = open_output(c, "ode.csv");
        write_ode_csv(f, series, per_degree);
    }
    double peak = 0.0, peak_t = 0.0;
    for (const auto& s : series)
        if (s.y_total() > peak) peak = s.y_total(), peak_t = s.t;
    out << "R0: " << fmt(r0(dist, c.model)) << '\n';
    out << "peak_prevalence: " << fmt(peak) << " at t " << fmt(peak_t) << '\n';
    out << "final_susceptible_fraction: " << fmt(series.back().x_total()) << '\n';
    if (covariance) {
        const int m = dist.max_degree();
        const Eigen::MatrixXd sigma0 = c.network == "nsw" ? nsw_sigma0(dist, ode_eps(c))
                                                          : Eigen::MatrixXd::Zero(2 * m + 3, 2 * m + 3);
        const auto cov = solve_sigma(dist, init, c.model, grid, sigma0);
        auto f = open_output(c, "covariance.csv");
        write_covariance_csv(f, cov);
        double peak_var = 0.0;
        for (const auto& p : cov) peak_var = std::max(peak_var, p.var_infective);
        out << "max_scaled_var_I: " << fmt(peak_var) << '\n';
    }
    return exit_ok;
}

int cmd_final_size(const ExperimentConfig& c, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    const InitialInfection init =
        c.eps > 0.0 ? InitialInfection::proportional(dist, c.eps) : InitialInfection::none(dist);
    const FinalSizeResult fs = final_size(dist, init, c.model);
    out << "R0: " << fmt(r0(dist, c.model)) << '\n';
    out << "rho: " << fmt(fs.rho) << '\n';
    out << "z: " << fmt(fs.z) << '\n';
    out << "tau_tilde: " << (fs.tau_infinite ? std::string("inf") : fmt(fs.tau_tilde)) << '\n';
    out << "mean_final_size: " << fmt(c.n * fs.rho) << " (n " << c.n << ")\n";
    if (fs.below_threshold) out << "below_threshold: 1\n";
    return exit_ok;
}

VarianceResult variance_for(const ExperimentConfig& c, const DegreeDistribution& dist, const ModelParams& p) {
    if (c.network == "nsw") return sigma2_nsw_final(dist, p);
    const InitialInfection init =
        c.eps > 0.0 ? InitialInfection::proportional(dist, c.eps) : InitialInfection::none(dist);
    return sigma2_mr_final(dist, init, p);
}

int cmd_variance(const ExperimentConfig& c, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    const VarianceResult v = variance_for(c, dist, c.model);
    out << "rho: " << fmt(v.rho) << '\n';
    out << "sigma2_mr: " << fmt(v.sigma2_mr) << '\n';
    if (c.network == "nsw") out << "sigma2_0: " << fmt(v.sigma2_0) << '\n';
    out << "sigma2_" << c.network << ": " << fmt(v.sigma2) << '\n';
    out << "sd_final_size: " << fmt(std::sqrt(c.n * v.sigma2)) << " (n " << c.n << ")\n";
    auto f = open_output(c, "variance.csv");
    write_variance_csv(f, {{"dropping", degree_label(c), c.model, v}});
    return exit_ok;
}

int cmd_pmajor(const ExperimentConfig& c, int n_initial, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    std::vector<PmajorRow> rows;
    for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
        const OffspringModel model{variant, c.model};
        PmajorRow row;
        row.variant = variant == OffspringVariant::dropping ? "dropping" : "modified";
        row.r0 = offspring_pgf_later_derivative(model, dist, 1.0);
        row.sigma = extinction_probability(model, dist);
        row.p_maj = pmaj(model, dist, n_initial);
        rows.push_back(row);
        out << row.variant << ": R0 " << fmt(row.r0) << ", sigma " << fmt(row.sigma) << ", p_maj " << fmt(row.p_maj)
            << '\n';
    }
    auto f = open_output(c, "pmajor.csv");
    write_pmajor_csv(f, rows);
    return exit_ok;
}

int cmd_giant(const ExperimentConfig& c, int graphs, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    const GiantComponentStats g = giant_component_stats(dist);
    if (g.below_threshold) {
        out << "below_threshold: 1\n";
        return exit_ok;
    }
    out << "rho: " << fmt(g.rho) << '\n';
    out << "sigma2_mr: " << fmt(g.sigma2_mr) << '\n';
    out << "sigma2_nsw: " << fmt(g.sigma2_nsw) << '\n';
    if (graphs > 0) {
        std::vector<double> frac(static_cast<std::size_t>(graphs));
        for (int r = 0; r < graphs; ++r) {
            const auto seed = derive_seed(c.seed, static_cast<std::uint64_t>(r));
            const Graph graph = c.network == "mr" ? build_mr(mr_degree_sequence(dist, c.n), seed)
                                                  : build_nsw(dist, c.n, seed);
            frac[static_cast<std::size_t>(r)] = static_cast<double>(giant_component_size(graph)) / c.n;
        }
        const SummaryStats s = summarize(frac);
        print_summary(out, "giant_fraction", s);
        out << "scaled_variance: " << fmt(c.n * s.sd * s.sd) << '\n';
    }
    return exit_ok;
}

int cmd_compare(const ExperimentConfig& c, bool simulate, int n_initial, std::ostream& out) {
    const DegreeDistribution dist = make_distribution(c.degree);
    struct Column {
        std::string name;
        OffspringVariant variant;
        ModelParams params;
    };
    const Column cols[] = {{"dropping", OffspringVariant::dropping, c.model},
                           {"modified", OffspringVariant::modified, increased_recovery(c.model)}};
    std::vector<VarianceRow> vrows;
    std::vector<PmajorRow> prows;
    out << "quantity,model,asymptotic,point,lo,hi\n";
    for (const auto& col : cols) {
        const OffspringModel bp{col.variant, c.model};
        const double p_bp = pmaj(bp, dist, n_initial > 0 ? n_initial : c.i0);
        const VarianceResult v = sigma2_nsw_final(dist, col.params);
        vrows.push_back({col.name, degree_label(c), col.params, v});
        prows.push_back({col.name, offspring_pgf_later_derivative(bp, dist, 1.0), extinction_probability(bp, dist), p_bp});
        const double mean_a = c.n * v.rho, sd_a = std::sqrt(c.n * v.sigma2);
        if (simulate) {
            ExperimentConfig sc = c;
            sc.model = col.params;
            sc.network = "nsw";
            EnsembleConfig ec = ensemble_config(sc);
            const RunEnsemble ens = run_ensemble(ec, c.runs, c.seed);
            const MajorSplit split = classify_major(ens, c.threshold);
            const double p = split.p_hat, half = 1.96 * std::sqrt(p * (1.0 - p) / c.runs);
            out << "p_major," << col.name << ',' << fmt(p_bp) << ',' << fmt(p) << ',' << fmt(p - half) << ','
                << fmt(p + half) << '\n';
            if (split.major.size() >= 2) {
                const SummaryStats s = summarize(split.major);
                out << "mean_major," << col.name << ',' << fmt(mean_a) << ',' << fmt(s.mean) << ',' << fmt(s.mean_lo)
                    << ',' << fmt(s.mean_hi) << '\n';
                out << "sd_major," << col.name << ',' << fmt(sd_a) << ',' << fmt(s.sd) << ',' << fmt(s.sd_lo) << ','
                    << fmt(s.sd_hi) << '\n';
            }
        } else {
            out << "p_major," << col.name << ',' << fmt(p_bp) << ",,,\n";
            out << "mean_major," << col.name << ',' << fmt(mean_a) << ",,,\n";
            out << "sd_major," << col.name << ',' << fmt(sd_a) << ",,,\n";
        }
    }
    {
        auto f = open_output(c, "variance.csv");
        write_variance_csv(f, vrows);
    }
    auto f = open_output(c, "pmajor.csv");
    write_pmajor_csv(f, prows);
    return exit_ok;
}

int cmd_validate(std::ostream& out) {
    bool all = true;
    for (const auto& chk : run_self_checks()) {
        out << (chk.passed ? "PASS " : "FAIL ") << chk.name << ": " << chk.detail << '\n';
        all = all && chk.passed;
    }
    return all ? exit_ok : exit_numerical;
}

}  // namespace

std::vector<SelfCheck> run_self_checks() {
    std::vector<SelfCheck> checks;
    auto record = [&](const std::string& name, double err, double tol) {
        checks.push_back({name, std::isfinite(err) && err <= tol, "error " + fmt(err, 3) + " (tol " + fmt(tol, 3) + ")"});
    };
    const DegreeDistribution dist = make_poisson(5.0, 15);
    const ModelParams params{1.5, 1.0, 2.0};
    const InitialInfection trace = InitialInfection::none(dist);
    const InitialInfection seeded = InitialInfection::proportional(dist, 0.01);

    const FinalSizeResult fs = final_size(dist, trace, params);
    record("final-size residual", std::abs(final_size_residual(dist, trace, params, fs.z)), 1e-10);

    const auto grid = uniform_grid(6.0, 13);
    const auto series = solve_realtime(dist, seeded, params, grid);
    double stub_err = 0.0;
    for (const auto& s : series) {
        const auto w = pack_state(s);
        const auto d1 = drift(w, params), d2 = drift_by_enumeration(w, params);
        for (std::size_t k = 0; k < d1.size(); ++k) stub_err = std::max(stub_err, std::abs(d1[k] - d2[k]));
    }
    record("drift by jump enumeration", stub_err, 1e-12);

    double mono = 0.0;
    for (std::size_t k = 1; k < series.size(); ++k)
        mono = std::max(mono, series[k].x_total() - series[k - 1].x_total());
    record("susceptible fraction nonincreasing", std::max(mono, 0.0), 1e-12);

    for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
        const OffspringModel model{variant, params};
        const std::string label = variant == OffspringVariant::dropping ? "dropping" : "modified";
        // both variants share R0
        record("offspring mean equals R0 (" + label + ")",
               std::abs(offspring_pgf_later_derivative(model, dist, 1.0) - r0(dist, params)), 1e-8);
        double route = 0.0;
        for (int k = 0; k <= 15; ++k)
            for (double s : {0.0, 0.3, 0.7, 1.0})
                route = std::max(route, std::abs(offspring_pgf_k(model, k, s) - offspring_pgf_k_factorial(model, k, s)));
        record("offspring pgf routes agree (" + label + ")", route, 1e-10);
    }
    const OrderingReport ord = ordering_check(dist, params);
    checks.push_back({"dropping has larger outbreak probability", ord.holds,
                      "p " + fmt(ord.p_dropping) + " vs " + fmt(ord.p_modified)});

    const InvarianceReport inv = invariance_check(dist, seeded, params, grid);
    record("susceptible invariance under (gamma+omega, 0)", inv.sup_susceptible_gap, 1e-6);

    const VarianceResult near = sigma2_nsw_final(dist, ModelParams{1.5, 1.0, 1e-8});
    const VarianceResult none = sigma2_nsw_nodrop(dist, 1.5, 1.0);
    record("variance continuous as omega -> 0", std::abs(near.sigma2 - none.sigma2) / none.sigma2, 1e-5);

    const Graph g = build_mr(mr_degree_sequence(dist, 400), 7);
    const Trajectory tr = gillespie_run(g, params, choose_initial_uniform(400, 5, 8), 9, grid, true);
    checks.push_back({"simulation bookkeeping", tr.final_size >= 5 && tr.final_size <= 400,
                      "final size " + std::to_string(tr.final_size)});

    ExperimentConfig cfg;
    cfg.model.beta = 0.1 + 1.0 / 3.0;
    cfg.degree.p = 1.0 / 7.0;
    std::istringstream in(serialize_config(cfg));
    checks.push_back({"config round trip", parse_config(in) == cfg, "serialize then parse"});
    return checks;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Network SIR epidemics with preventive edge dropping", "netsir"};
    app.require_subcommand(1);
    Overrides o;
    bool per_degree = false, covariance = false, simulate = false;
    int n_initial = 1, graphs = 0;

    auto* sim = app.add_subcommand("simulate", "Run a stochastic ensemble");
    auto* ode = app.add_subcommand("ode", "Solve the deterministic limit in real time");
    auto* fsz = app.add_subcommand("final-size", "Asymptotic final size");
    auto* var = app.add_subcommand("variance", "Asymptotic final-size variance");
    auto* pmj = app.add_subcommand("pmajor", "Branching-process outbreak probabilities");
    auto* gnt = app.add_subcommand("giant", "Giant component size and variance");
    auto* cmp = app.add_subcommand("compare-models", "Dropping vs increased recovery summary");
    auto* val = app.add_subcommand("validate", "Cross-layer self checks");
    for (auto* s : {sim, ode, fsz, var, pmj, gnt, cmp}) add_common(*s, o);
    ode->add_flag("--per-degree", per_degree, "Emit x_i and y_i columns");
    ode->add_flag("--covariance", covariance, "Also solve for the fluctuation covariance");
    pmj->add_option("--n-initial", n_initial, "Independent initial lineages")->check(CLI::PositiveNumber);
    gnt->add_option("--graphs", graphs, "Sample this many graphs")->check(CLI::NonNegativeNumber);
    cmp->add_flag("--simulate", simulate, "Add simulation point estimates and CIs");
    int cmp_initial = 0;
    cmp->add_option("--n-initial", cmp_initial, "Branching lineages (default: i0)")->check(CLI::PositiveNumber);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return exit_ok;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_ok;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return exit_config;
    }

    try {
        if (val->parsed()) return cmd_validate(out);
        const ExperimentConfig c = resolve(o);
        if (sim->parsed()) return cmd_simulate(c, out);
        if (ode->parsed()) return cmd_ode(c, per_degree, covariance, out);
        if (fsz->parsed()) return cmd_final_size(c, out);
        if (var->parsed()) return cmd_variance(c, out);
        if (pmj->parsed()) return cmd_pmajor(c, n_initial, out);
        if (gnt->parsed()) return cmd_giant(c, graphs, out);
        if (cmp->parsed()) return cmd_compare(c, simulate, cmp_initial, out);
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::invalid_argument& e) {
        err << "invalid input: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        err << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return exit_config;
}

int run_cli(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    return run_cli(args, std::cout, std::cerr);
}

}  // namespace netsir
