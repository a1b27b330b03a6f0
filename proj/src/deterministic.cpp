#include "netsir/deterministic.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "netsir/errors.hpp"

namespace netsir {

double DeterministicState::x_total() const {
    double s = 0.0;
    for (double v : x) s += v;
    return s;
}
double DeterministicState::y_total() const {
    double s = 0.0;
    for (double v : y) s += v;
    return s;
}
double DeterministicState::x_E() const {
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += static_cast<double>(i) * x[i];
    return s;
}
double DeterministicState::y_E() const {
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) s += static_cast<double>(i) * y[i];
    return s;
}

std::vector<double> pack_state(const DeterministicState& s) {
    std::vector<double> w;
    w.reserve(s.x.size() + s.y.size() + 1);
    w.insert(w.end(), s.x.begin(), s.x.end());
    w.insert(w.end(), s.y.begin(), s.y.end());
    w.push_back(s.z_E);
    return w;
}

DeterministicState unpack_state(const std::vector<double>& w, double t) {
    if (w.size() < 3 || w.size() % 2 == 0) throw std::invalid_argument("state vector has the wrong length");
    const auto m1 = static_cast<std::ptrdiff_t>((w.size() - 1) / 2);
    DeterministicState s;
    s.t = t;
    s.x.assign(w.begin(), w.begin() + m1);
    s.y.assign(w.begin() + m1, w.begin() + 2 * m1);
    s.z_E = w.back();
    return s;
}

DeterministicState initial_state(const DegreeDistribution& dist, const InitialInfection& init) {
    init.validate(dist);
    DeterministicState s;
    s.x = deflated_coefficients(dist, init);
    s.y.assign(dist.pmf().size(), 0.0);
    std::copy(init.eps.begin(), init.eps.end(), s.y.begin());
    return s;
}

double r0(const DegreeDistribution& dist, const ModelParams& params) {
    params.validate();
    const auto m = moments(dist);
    if (!(m.mean > 0.0)) throw std::invalid_argument("R0 needs a positive mean degree");
    const double total = params.beta + params.gamma + params.omega;
    if (params.beta == 0.0) return 0.0;
    return params.beta / total * (m.mean + m.variance / m.mean - 1.0);
}

double malthusian(const DegreeDistribution& dist, const ModelParams& params) {
    params.validate();
    const auto m = moments(dist);
    if (!(m.mean > 0.0)) throw std::invalid_argument("growth rate needs a positive mean degree");
    return params.beta * (m.mean - 2.0 + m.variance / m.mean) - params.gamma - params.omega;
}

void realtime_rhs(const ModelParams& params, const std::vector<double>& w, std::vector<double>& dw) {
    const std::size_t m1 = (w.size() - 1) / 2;
    dw.resize(w.size());
    const double* x = w.data();
    const double* y = x + m1;
    const double z = w[2 * m1];
    const double a = params.edge_rate();
    double xE = 0.0, yE = 0.0;
    for (std::size_t i = 1; i < m1; ++i) {
        xE += static_cast<double>(i) * x[i];
        yE += static_cast<double>(i) * y[i];
    }
    const double eta = xE + yE + z;
    const double rho = eta > 0.0 ? yE / eta : 0.0;
    for (std::size_t i = 0; i < m1; ++i) {
        const double di = static_cast<double>(i);
        const double xn = i + 1 < m1 ? x[i + 1] : 0.0;
        const double yn = i + 1 < m1 ? y[i + 1] : 0.0;
        dw[i] = rho * (-params.beta * di * x[i] + params.omega * (-di * x[i] + (di + 1.0) * xn));
        const double shift = (di + 1.0) * yn - di * y[i];
        dw[m1 + i] = a * shift * (1.0 + rho) + params.beta * rho * (di + 1.0) * xn - params.gamma * y[i];
    }
    dw[2 * m1] = params.gamma * yE - a * rho * z;
}

namespace {

void transformed_rhs(const ModelParams& params, const std::vector<double>& w, std::vector<double>& dw) {
    const std::size_t m1 = (w.size() - 1) / 2;
    const double* x = w.data();
    const double* y = x + m1;
    const double z = w[2 * m1];
    const double a = params.edge_rate();
    double xE = 0.0, yE = 0.0;
    for (std::size_t i = 1; i < m1; ++i) {
        xE += static_cast<double>(i) * x[i];
        yE += static_cast<double>(i) * y[i];
    }
    const double eta = xE + yE + z;
    if (!(yE > 0.0)) throw NumericalError("transformed system reached y_E = 0");
    const double inv_rho = eta / yE;
    for (std::size_t i = 0; i < m1; ++i) {
        const double di = static_cast<double>(i);
        const double xn = i + 1 < m1 ? x[i + 1] : 0.0;
        const double yn = i + 1 < m1 ? y[i + 1] : 0.0;
        dw[i] = -params.beta * di * x[i] + params.omega * (-di * x[i] + (di + 1.0) * xn);
        const double shift = (di + 1.0) * yn - di * y[i];
        dw[m1 + i] = (a * shift - params.gamma * y[i]) * inv_rho + a * shift + params.beta * (di + 1.0) * xn;
    }
    dw[2 * m1] = params.gamma * eta - a * z;
}

std::vector<DeterministicState> to_states(const std::vector<std::vector<double>>& ws, const std::vector<double>& grid) {
    std::vector<DeterministicState> out;
    out.reserve(ws.size());
    for (std::size_t k = 0; k < ws.size(); ++k) out.push_back(unpack_state(ws[k], grid[k]));
    return out;
}

void require_edge_rate(const ModelParams& params) {
    if (!(params.edge_rate() > 0.0)) throw std::invalid_argument("time transform needs beta + omega > 0");
}

double mean_degree(const DegreeDistribution& dist) {
    const double mu = moments(dist).mean;
    if (!(mu > 0.0)) throw std::invalid_argument("mean degree must be positive");
    return mu;
}

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

}  // namespace

std::vector<DeterministicState> solve_realtime(const DegreeDistribution& dist, const InitialInfection& init,
                                               const ModelParams& params, const std::vector<double>& grid,
                                               const OdeTolerance& tol) {
    params.validate();
    const auto w0 = pack_state(initial_state(dist, init));
    const auto sys = [&params](const std::vector<double>& w, std::vector<double>& dw, double) {
        realtime_rhs(params, w, dw);
    };
    return to_states(integrate_on_grid(sys, w0, 0.0, grid, tol), grid);
}

std::vector<DeterministicState> solve_transformed(const DegreeDistribution& dist, const InitialInfection& init,
                                                  const ModelParams& params, const std::vector<double>& grid,
                                                  const OdeTolerance& tol) {
    params.validate();
    require_edge_rate(params);
    if (!(init.stub_density() > 0.0)) throw std::invalid_argument("transformed system needs eps_E > 0");
    const auto fs = final_size(dist, init, params);
    std::vector<double> kept;
    for (double t : grid)
        if (fs.tau_infinite || t < fs.tau_tilde) kept.push_back(t);
    const auto w0 = pack_state(initial_state(dist, init));
    const auto sys = [&params](const std::vector<double>& w, std::vector<double>& dw, double) {
        transformed_rhs(params, w, dw);
    };
    return to_states(integrate_on_grid(sys, w0, 0.0, kept, tol), kept);
}

double psi(const ModelParams& params, double t) {
    const double pw = params.p_omega();
    return pw + (1.0 - pw) * std::exp(-params.edge_rate() * t);
}

TransformedClosedForm closed_forms(const DegreeDistribution& dist, const InitialInfection& init,
                                   const ModelParams& params, double t) {
    params.validate();
    require_edge_rate(params);
    if (!(t >= 0.0)) throw std::invalid_argument("closed forms need t >= 0");
    const double mu = mean_degree(dist);
    const double a = params.edge_rate();
    const double g = params.gamma;
    const double pw = params.p_omega();
    const double e = std::exp(-a * t);
    const auto c = deflated_coefficients(dist, init);
    const int m = dist.max_degree();

    TransformedClosedForm r;
    r.t = t;
    r.psi = pw + (1.0 - pw) * e;
    const double fprime = poly_derivative(c, r.psi, 1);
    r.x_tilde_E = e * fprime;
    r.eta_tilde_E = mu * e * e;
    r.z_tilde_E = g / a * mu * e * (1.0 - e);
    r.y_tilde_E = e * ((a + g) / a * mu * e - g / a * mu - fprime);
    r.x_tilde_total = poly_derivative(c, r.psi, 0);

    // x~_i = sum_k c_k C(k,i) e^{-a i t} u^{k-i}, u = p_omega (1 - e^{-a t})
    const double u = pw * (1.0 - e);
    r.x_tilde.assign(static_cast<std::size_t>(m) + 1, 0.0);
    for (int i = 0; i <= m; ++i) {
        double acc = 0.0;
        for (int k = i; k <= m; ++k) {
            const double ck = c[static_cast<std::size_t>(k)];
            if (ck == 0.0) continue;
            const double upow = (k == i) ? 1.0 : std::pow(u, k - i);
            acc += ck * std::exp(log_choose(k, i)) * upow;
        }
        r.x_tilde[static_cast<std::size_t>(i)] = acc * std::pow(e, i);
    }
    return r;
}

std::vector<double> solve_xi(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params,
                             const std::vector<double>& grid, const OdeTolerance& tol) {
    params.validate();
    require_edge_rate(params);
    if (!(init.stub_density() > 0.0)) throw std::invalid_argument("xi needs eps_E > 0");
    const double mu = mean_degree(dist);
    const double a = params.edge_rate();
    const double g = params.gamma;
    const auto c = deflated_coefficients(dist, init);
    const auto sys = [&](const std::vector<double>& w, std::vector<double>& dw, double) {
        const double grow = std::exp(a * w[0]);
        const double ps = std::clamp(psi(params, w[0]), 0.0, 1.0);
        dw[0] = 1.0 + g / a * (1.0 - grow) - grow * poly_derivative(c, ps, 1) / mu;
    };
    std::vector<double> out;
    for (const auto& w : integrate_on_grid(sys, {0.0}, 0.0, grid, tol)) out.push_back(w[0]);
    return out;
}

std::vector<double> solve_theta(const DegreeDistribution& dist, const InitialInfection& init,
                                const ModelParams& params, const std::vector<double>& grid, const OdeTolerance& tol,
                                double eps_seed) {
    params.validate();
    if (!(eps_seed >= 0.0 && eps_seed < 1.0)) throw std::invalid_argument("eps_seed must lie in [0,1)");
    const double mu = mean_degree(dist);
    const bool trace = init.is_trace();
    const auto c = trace ? dist.pmf() : deflated_coefficients(dist, init);
    const double total = params.beta + params.gamma + params.omega;
    const double leave = params.gamma + params.omega;
    const auto sys = [&](const std::vector<double>& w, std::vector<double>& dw, double) {
        dw[0] = params.beta * poly_derivative(c, w[0], 1) / mu - total * w[0] + leave;
    };
    const double theta0 = trace ? 1.0 - eps_seed : 1.0;
    std::vector<double> out;
    for (const auto& w : integrate_on_grid(sys, {theta0}, 0.0, grid, tol)) out.push_back(w[0]);
    return out;
}

FinalSizeResult final_size(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params) {
    params.validate();
    init.validate(dist);
    const auto c = deflated_coefficients(dist, init);
    const double mu = moments(dist).mean;
    const double beta = params.beta;
    const double a = params.edge_rate();
    const double leave = params.gamma + params.omega;
    FinalSizeResult r;

    if (beta == 0.0 || !(mu > 0.0)) {
        // no transmission possible; only the initial infectives are ever infected
        r.s_star = 1.0;
        r.z = 1.0;
        r.rho = 1.0 - poly_derivative(c, 1.0, 0);
        r.below_threshold = init.is_trace();
        return r;
    }

    const auto h = [&](double s) { return (a + params.gamma) * s - leave - beta * poly_derivative(c, s, 1) / mu; };
    const auto dh = [&](double s) { return a + params.gamma - beta * poly_derivative(c, s, 2) / mu; };

    double lo = 0.0, hi = 1.0;
    if (init.is_trace() || !(h(1.0) > 0.0)) {
        if (r0(dist, params) <= 1.0) {
            r.below_threshold = init.is_trace();
            r.rho = 1.0 - poly_derivative(c, 1.0, 0);
            return r;
        }
        bool found = false;
        for (int k = 1; k <= 60 && !found; ++k) {
            hi = 1.0 - std::ldexp(1.0, -k);
            found = h(hi) > 0.0;
        }
        if (!found) throw NumericalError("final-size root not bracketed");
    }

    double s;
    if (h(lo) >= 0.0) {
        s = 0.0;
    } else {
        while (hi - lo > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            (h(mid) > 0.0 ? hi : lo) = mid;
        }
        s = 0.5 * (lo + hi);
        for (int it = 0; it < 100; ++it) {
            const double d = dh(s);
            if (d == 0.0) break;
            const double next = s - h(s) / d;
            if (!(next >= lo && next <= hi)) break;
            const double step = std::abs(next - s);
            s = next;
            if (step <= 1e-12) break;
        }
    }
    r.s_star = s;
    r.z = std::max(0.0, (a * s - params.omega) / beta);
    r.rho = 1.0 - poly_derivative(c, s, 0);
    r.tau_infinite = params.gamma == 0.0 && params.omega == 0.0 && c.size() > 1 && c[1] == 0.0;
    if (r.tau_infinite || r.z <= 0.0) {
        r.tau_infinite = true;
        r.tau_tilde = std::numeric_limits<double>::infinity();
    } else {
        r.tau_tilde = -std::log(r.z) / a;
    }
    return r;
}

double final_size_residual(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params,
                           double z) {
    require_edge_rate(params);
    const double mu = mean_degree(dist);
    const double a = params.edge_rate();
    const double pw = params.p_omega();
    const auto c = deflated_coefficients(dist, init);
    return poly_derivative(c, pw + (1.0 - pw) * z, 1) - ((a + params.gamma) * z - params.gamma) * mu / a;
}

InvarianceReport invariance_check(const DegreeDistribution& dist, const InitialInfection& init,
                                  const ModelParams& params, const std::vector<double>& grid,
                                  const OdeTolerance& tol) {
    const ModelParams mod = increased_recovery(params);
    const auto drop = solve_realtime(dist, init, params, grid, tol);
    const auto alt = solve_realtime(dist, init, mod, grid, tol);
    InvarianceReport rep;
    rep.min_prevalence_excess = std::numeric_limits<double>::infinity();
    for (std::size_t k = 0; k < drop.size(); ++k) {
        rep.sup_susceptible_gap = std::max(rep.sup_susceptible_gap, std::abs(drop[k].x_total() - alt[k].x_total()));
        if (drop[k].t > 0.0)
            rep.min_prevalence_excess = std::min(rep.min_prevalence_excess, drop[k].y_total() - alt[k].y_total());
    }
    rep.rho_dropping = final_size(dist, init, params).rho;
    rep.rho_modified = final_size(dist, init, mod).rho;
    return rep;
}

}  // namespace netsir
