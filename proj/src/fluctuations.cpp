#include "netsir/fluctuations.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <stdexcept>

#include "netsir/errors.hpp"

namespace netsir {

namespace {

struct Layout {
    int m1;  // M + 1
    int xi(int i) const { return i; }
    int yi(int i) const { return m1 + i; }
    int z() const { return 2 * m1; }
    int dim() const { return 2 * m1 + 1; }
};

Layout layout_of(const std::vector<double>& w) {
    if (w.size() < 3 || w.size() % 2 == 0) throw std::invalid_argument("state vector has the wrong length");
    return Layout{static_cast<int>((w.size() - 1) / 2)};
}

struct Aggregates {
    double xE = 0.0, yE = 0.0, eta = 0.0, rho = 0.0;
};

Aggregates aggregates(const std::vector<double>& w, const Layout& L) {
    Aggregates g;
    for (int i = 1; i < L.m1; ++i) {
        g.xE += i * w[static_cast<std::size_t>(L.xi(i))];
        g.yE += i * w[static_cast<std::size_t>(L.yi(i))];
    }
    g.eta = g.xE + g.yE + w[static_cast<std::size_t>(L.z())];
    if (!(g.eta > 0.0)) throw std::domain_error("stub density eta_E must be positive");
    g.rho = g.yE / g.eta;
    return g;
}

void add(std::vector<std::pair<int, double>>& d, int idx, double v) {
    for (auto& [k, c] : d)
        if (k == idx) {
            c += v;
            return;
        }
    d.emplace_back(idx, v);
}

double at(const std::vector<double>& w, int idx) { return w[static_cast<std::size_t>(idx)]; }

}  // namespace

std::vector<Jump> jump_set(int max_degree) {
    if (max_degree < 0) throw std::invalid_argument("max degree must be nonnegative");
    const Layout L{max_degree + 1};
    std::vector<Jump> out;
    out.reserve(static_cast<std::size_t>(3 * max_degree * max_degree + 2 * max_degree + 1));
    for (int i = 1; i <= max_degree; ++i) {
        for (int j = 1; j <= max_degree; ++j) {
            Jump t{JumpKind::transmit, i, j, {}};
            add(t.delta, L.yi(i), -1.0);
            add(t.delta, L.yi(i - 1), 1.0);
            add(t.delta, L.xi(j), -1.0);
            add(t.delta, L.yi(j - 1), 1.0);
            out.push_back(std::move(t));

            Jump p{JumpKind::infective_pair, i, j, {}};
            add(p.delta, L.yi(i), -1.0);
            add(p.delta, L.yi(i - 1), 1.0);
            add(p.delta, L.yi(j), -1.0);
            add(p.delta, L.yi(j - 1), 1.0);
            out.push_back(std::move(p));

            Jump d{JumpKind::drop, i, j, {}};
            add(d.delta, L.yi(i), -1.0);
            add(d.delta, L.yi(i - 1), 1.0);
            add(d.delta, L.xi(j), -1.0);
            add(d.delta, L.xi(j - 1), 1.0);
            out.push_back(std::move(d));
        }
        Jump r{JumpKind::recovered_pair, i, 0, {}};
        add(r.delta, L.yi(i), -1.0);
        add(r.delta, L.yi(i - 1), 1.0);
        add(r.delta, L.z(), -1.0);
        out.push_back(std::move(r));
    }
    for (int i = 0; i <= max_degree; ++i) {
        Jump rec{JumpKind::recover, i, 0, {}};
        add(rec.delta, L.yi(i), -1.0);
        if (i > 0) add(rec.delta, L.z(), static_cast<double>(i));
        out.push_back(std::move(rec));
    }
    return out;
}

double jump_intensity(const Jump& jump, const std::vector<double>& w, const ModelParams& params) {
    const Layout L = layout_of(w);
    const double a = params.edge_rate();
    const double yi = at(w, L.yi(jump.i));
    if (jump.kind == JumpKind::recover) return params.gamma * yi;
    const Aggregates g = aggregates(w, L);
    const double fire = jump.i * yi / g.eta;
    switch (jump.kind) {
        case JumpKind::transmit: return params.beta * fire * jump.j * at(w, L.xi(jump.j));
        case JumpKind::infective_pair: return a * fire * jump.j * at(w, L.yi(jump.j));
        case JumpKind::drop: return params.omega * fire * jump.j * at(w, L.xi(jump.j));
        case JumpKind::recovered_pair: return a * fire * at(w, L.z());
        default: return 0.0;
    }
}

std::vector<double> drift(const std::vector<double>& w, const ModelParams& params) {
    aggregates(w, layout_of(w));
    std::vector<double> dw(w.size());
    realtime_rhs(params, w, dw);
    return dw;
}

std::vector<double> drift(const DeterministicState& s, const ModelParams& params) {
    return drift(pack_state(s), params);
}

std::vector<double> drift_by_enumeration(const std::vector<double>& w, const ModelParams& params) {
    const Layout L = layout_of(w);
    aggregates(w, L);
    std::vector<double> f(w.size(), 0.0);
    for (const auto& jump : jump_set(L.m1 - 1)) {
        const double rate = jump_intensity(jump, w, params);
        for (const auto& [k, c] : jump.delta) f[static_cast<std::size_t>(k)] += c * rate;
    }
    return f;
}

Eigen::MatrixXd jacobian(const std::vector<double>& w, const ModelParams& params) {
    const Layout L = layout_of(w);
    const Aggregates g = aggregates(w, L);
    const int m1 = L.m1;
    const double a = params.edge_rate();
    const double beta = params.beta, omega = params.omega, gamma = params.gamma;
    const double z = at(w, L.z());
    const double eta2 = g.eta * g.eta;

    // partial derivatives of rho_E = y_E / eta_E
    Eigen::VectorXd drho(L.dim());
    for (int k = 0; k < m1; ++k) {
        drho(L.xi(k)) = -g.yE * k / eta2;
        drho(L.yi(k)) = k * (g.xE + z) / eta2;
    }
    drho(L.z()) = -g.yE / eta2;

    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(L.dim(), L.dim());
    for (int i = 0; i < m1; ++i) {
        const double xn = i + 1 < m1 ? at(w, L.xi(i + 1)) : 0.0;
        const double yn = i + 1 < m1 ? at(w, L.yi(i + 1)) : 0.0;
        const double xi = at(w, L.xi(i)), yi = at(w, L.yi(i));

        const double coef_x = -a * i * xi + omega * (i + 1) * xn;
        J.row(L.xi(i)) += coef_x * drho.transpose();
        J(L.xi(i), L.xi(i)) += -a * i * g.rho;
        if (i + 1 < m1) J(L.xi(i), L.xi(i + 1)) += omega * (i + 1) * g.rho;

        const double coef_y = a * ((i + 1) * yn - i * yi) + beta * (i + 1) * xn;
        J.row(L.yi(i)) += coef_y * drho.transpose();
        J(L.yi(i), L.yi(i)) += -a * i * (1.0 + g.rho) - gamma;
        if (i + 1 < m1) {
            J(L.yi(i), L.yi(i + 1)) += a * (i + 1) * (1.0 + g.rho);
            J(L.yi(i), L.xi(i + 1)) += beta * (i + 1) * g.rho;
        }
    }
    J.row(L.z()) = -a * z * drho.transpose();
    for (int k = 0; k < m1; ++k) J(L.z(), L.yi(k)) += gamma * k;
    J(L.z(), L.z()) += -a * g.rho;
    return J;
}

Eigen::MatrixXd g_matrix(const std::vector<double>& w, const ModelParams& params) {
    const Layout L = layout_of(w);
    aggregates(w, L);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(L.dim(), L.dim());
    for (const auto& jump : jump_set(L.m1 - 1)) {
        const double rate = jump_intensity(jump, w, params);
        if (rate == 0.0) continue;
        for (const auto& [p, cp] : jump.delta)
            for (const auto& [q, cq] : jump.delta) G(p, q) += rate * cp * cq;
    }
    return G;
}

namespace {

// G with the jump set built once; same sum as g_matrix.
class JumpMatrix {
public:
    explicit JumpMatrix(int max_degree) : jumps_(jump_set(max_degree)) {}
    void fill(const std::vector<double>& w, const ModelParams& params, Eigen::MatrixXd& G) const {
        G.setZero();
        for (const auto& jump : jumps_) {
            const double rate = jump_intensity(jump, w, params);
            if (rate == 0.0) continue;
            for (const auto& [p, cp] : jump.delta)
                for (const auto& [q, cq] : jump.delta) G(p, q) += rate * cp * cq;
        }
    }

private:
    std::vector<Jump> jumps_;
};

}  // namespace

std::vector<CovariancePoint> solve_sigma(const DegreeDistribution& dist, const InitialInfection& init,
                                         const ModelParams& params, const std::vector<double>& grid,
                                         const Eigen::MatrixXd& sigma0, const OdeTolerance& tol) {
    params.validate();
    const auto w0 = pack_state(initial_state(dist, init));
    const auto n = static_cast<Eigen::Index>(w0.size());
    if (sigma0.rows() != n || sigma0.cols() != n) throw std::invalid_argument("initial covariance has the wrong shape");

    std::vector<double> state(w0);
    state.resize(static_cast<std::size_t>(n + n * n));
    Eigen::Map<Eigen::MatrixXd>(state.data() + n, n, n) = sigma0;

    const JumpMatrix jumps(dist.max_degree());
    Eigen::MatrixXd G(n, n);
    const auto sys = [&](const std::vector<double>& s, std::vector<double>& ds, double) {
        const std::vector<double> w(s.begin(), s.begin() + n);
        std::vector<double> dw(static_cast<std::size_t>(n));
        realtime_rhs(params, w, dw);
        std::copy(dw.begin(), dw.end(), ds.begin());
        const Eigen::MatrixXd J = jacobian(w, params);
        jumps.fill(w, params, G);
        const Eigen::Map<const Eigen::MatrixXd> S(s.data() + n, n, n);
        Eigen::Map<Eigen::MatrixXd> dS(ds.data() + n, n, n);
        const Eigen::MatrixXd JS = J * S;
        dS = G + JS + JS.transpose();
    };

    std::vector<CovariancePoint> out;
    const auto states = integrate_on_grid(sys, state, 0.0, grid, tol);
    const int m1 = static_cast<int>((n - 1) / 2);
    for (std::size_t k = 0; k < states.size(); ++k) {
        CovariancePoint cp;
        cp.state = unpack_state(std::vector<double>(states[k].begin(), states[k].begin() + n), grid[k]);
        const Eigen::Map<const Eigen::MatrixXd> S(states[k].data() + n, n, n);
        cp.sigma = 0.5 * (S + S.transpose());
        cp.var_susceptible = cp.sigma.topLeftCorner(m1, m1).sum();
        cp.var_infective = cp.sigma.block(m1, m1, m1, m1).sum();
        cp.cov_si = cp.sigma.block(0, m1, m1, m1).sum();
        out.push_back(std::move(cp));
    }
    return out;
}

Eigen::MatrixXd nsw_sigma0(const DegreeDistribution& dist, double eps) {
    if (!(eps >= 0.0 && eps < 1.0)) throw std::invalid_argument("initial fraction must lie in [0,1)");
    const auto& p = dist.pmf();
    const int m1 = static_cast<int>(p.size());
    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(2 * m1 + 1, 2 * m1 + 1);
    for (int i = 0; i < m1; ++i)
        for (int j = 0; j < m1; ++j) {
            const double pi = p[static_cast<std::size_t>(i)], pj = p[static_cast<std::size_t>(j)];
            const double base = (i == j) ? pi * (1.0 - pi) : -pi * pj;
            S(i, j) = base * (1.0 - eps);
            S(m1 + i, m1 + j) = base * eps;
        }
    return S;
}

namespace {

double integrate(const std::function<double(double)>& f, double lo, double hi) {
    using boost::math::quadrature::gauss_kronrod;
    double err = 0.0;
    const double v = gauss_kronrod<double, 31>::integrate(f, lo, hi, 20, 1e-10, &err);
    if (!std::isfinite(v)) throw NumericalError("variance quadrature produced a non-finite value");
    return v;
}

struct Supercritical {
    FinalSizeResult fs;
    std::vector<double> c;
    Moments m;
};

Supercritical supercritical(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params) {
    params.validate();
    if (!(params.beta > 0.0)) throw std::invalid_argument("variance formulas need beta > 0");
    Supercritical s{final_size(dist, init, params), init.is_trace() ? dist.pmf() : deflated_coefficients(dist, init),
                    moments(dist)};
    if (s.fs.below_threshold) throw std::invalid_argument("below threshold: R0 <= 1, no major outbreak");
    if (!(s.fs.z > 0.0)) throw std::invalid_argument("variance formulas need z > 0");
    return s;
}

double sigma0_term(const std::vector<double>& c, const Moments& m, const ModelParams& params, double z, double b) {
    const double a = params.edge_rate(), g = params.gamma, beta = params.beta;
    const double pw = params.p_omega();
    const double ps = pw + (1.0 - pw) * z;
    const double ps2 = ps * ps;
    const double cz = ((a + g) * z - g) / a;
    const double f_ps = poly_derivative(c, ps, 0);
    const double second = m.variance + m.mean * m.mean;
    return poly_derivative(c, ps2, 0) - f_ps * f_ps + b * b * ps2 * z * z * poly_derivative(c, ps2, 2) +
           b * poly_derivative(c, ps2, 1) * z * (z * b - 2.0 * ps) + b * b * z * z * cz * cz * second -
           2.0 * b * b * z * z * m.mean * cz * (cz + (a + g) / beta * ps);
}

}  // namespace

VarianceResult sigma2_mr_final(const DegreeDistribution& dist, const InitialInfection& init,
                               const ModelParams& params) {
    const auto s = supercritical(dist, init, params);
    const auto& c = s.c;
    const double mu = s.m.mean, var = s.m.variance;
    const double beta = params.beta, omega = params.omega, g = params.gamma;
    const double a = beta + omega;
    const double pw = params.p_omega();
    const double z = s.fs.z;
    const double ps = pw + (1.0 - pw) * z;
    const double cz = ((a + g) * z - g) / a;
    const double denom = z * (beta * poly_derivative(c, ps, 2) - (a + g) * mu);
    if (denom == 0.0) throw NumericalError("variance formula is singular at this z");
    const double b = beta * cz * mu / denom;

    VarianceResult r;
    r.z = z;
    r.rho = s.fs.rho;
    r.b_tilde = b;
    r.explicit_terms = {
        2.0 * (a + g) * (g - a - (a + g) * z) / (a * a) * mu * b * b * z * z * (1.0 - z),
        g / (beta * a) * mu * b * b * z * (beta - (2.0 * beta + omega) * z),
        g / (beta * (2.0 * a + g)) * b * b * z * z * (beta * (var + mu * mu) + omega * mu),
        -g * ((a + g) * z - g) * z / ((2.0 * a + g) * a) * mu * b,
    };

    const auto ps1 = [&](double v) { return pw + (1.0 - pw) * z / v; };
    const auto ps2 = [&](double v) { return v * ps1(v) * ps1(v) + pw * (1.0 - v); };
    const auto ps3 = [&](double v) { return ps1(v) - b * z / v; };

    r.I_A = integrate(
                [&](double v) {
                    const double q = ps3(v);
                    return (omega * (q - 1.0) * (q - 1.0) + beta * q * q) * poly_derivative(c, ps2(v), 1);
                },
                z, 1.0) /
            a;
    r.I_B = 2.0 * omega * z * b / a * integrate(
                                          [&](double v) {
                                              const double q1 = ps1(v);
                                              return q1 * (q1 - 1.0) * (1.0 - ps3(v)) * poly_derivative(c, ps2(v), 2);
                                          },
                                          z, 1.0);
    r.I_C = beta * z * b / a * integrate(
                                   [&](double v) {
                                       const double q1 = ps1(v);
                                       return q1 * q1 * (b * z / v - 2.0 * ps3(v)) * poly_derivative(c, ps2(v), 2);
                                   },
                                   z, 1.0);
    r.I_D = z * z * b * b / a * integrate(
                                    [&](double v) {
                                        const double q1 = ps1(v);
                                        return (omega * (q1 - 1.0) * (q1 - 1.0) + beta * q1 * q1) * q1 * q1 *
                                               poly_derivative(c, ps2(v), 3);
                                    },
                                    z, 1.0);

    r.sigma2_mr = r.I_A + r.I_B + r.I_C + r.I_D;
    for (double t : r.explicit_terms) r.sigma2_mr += t;
    r.sigma2 = r.sigma2_mr;
    return r;
}

VarianceResult sigma2_nsw_final(const DegreeDistribution& dist, const ModelParams& params) {
    const auto none = InitialInfection::none(dist);
    VarianceResult r = sigma2_mr_final(dist, none, params);
    r.sigma2_0 = sigma0_term(dist.pmf(), moments(dist), params, r.z, r.b_tilde);
    r.sigma2 = r.sigma2_mr + r.sigma2_0;
    return r;
}

namespace {

struct NoDropTerms {
    double z, rho, h, k1, mu, second;
    std::vector<double> c;
};

NoDropTerms nodrop_terms(const DegreeDistribution& dist, const InitialInfection& init, double beta, double gamma) {
    const ModelParams params{beta, gamma, 0.0};
    const auto s = supercritical(dist, init, params);
    NoDropTerms t{s.fs.z, s.fs.rho, 0.0, 0.0, s.m.mean, s.m.variance + s.m.mean * s.m.mean, s.c};
    const double z = t.z;
    const double denom = beta + gamma - beta * poly_derivative(t.c, z, 2) / t.mu;
    if (denom == 0.0) throw NumericalError("no-drop variance formula is singular at this z");
    t.h = (gamma - (beta + gamma) * z) / denom;
    t.k1 = (gamma - (beta + gamma) * z) / beta;
    return t;
}

}  // namespace

VarianceResult sigma2_mr_nodrop(const DegreeDistribution& dist, const InitialInfection& init, double beta,
                                double gamma) {
    const auto t = nodrop_terms(dist, init, beta, gamma);
    const double z = t.z, h = t.h, k1 = t.k1, z2 = z * z;
    const auto& c = t.c;
    VarianceResult r;
    r.z = z;
    r.rho = t.rho;
    r.b_tilde = h / z;
    r.sigma2_mr = 1.0 - t.rho - poly_derivative(c, z2, 0) -
                  h * h * (poly_derivative(c, z2, 1) + z2 * poly_derivative(c, z2, 2)) +
                  h * h * (gamma / (2.0 * beta + gamma) * t.second + 2.0 * k1 * k1 * t.mu) +
                  2.0 * h * (z * poly_derivative(c, z2, 1) + k1 * (beta + gamma) / (2.0 * beta + gamma) * t.mu);
    r.sigma2 = r.sigma2_mr;
    return r;
}

VarianceResult sigma2_nsw_nodrop(const DegreeDistribution& dist, double beta, double gamma) {
    const auto t = nodrop_terms(dist, InitialInfection::none(dist), beta, gamma);
    const double z = t.z, h = t.h, k1 = t.k1;
    VarianceResult r;
    r.z = z;
    r.rho = t.rho;
    r.b_tilde = h / z;
    r.sigma2 = t.rho * (1.0 - t.rho) + 2.0 * h * k1 * (beta + gamma) / (2.0 * beta + gamma) * t.mu +
               h * h * (gamma / (2.0 * beta + gamma) + k1 * k1) * t.second +
               2.0 * h * h * (beta + gamma) * (gamma - (beta + gamma) * z) / (beta * beta) * z * t.mu;
    r.sigma2_mr = sigma2_mr_nodrop(dist, InitialInfection::none(dist), beta, gamma).sigma2;
    r.sigma2_0 = r.sigma2 - r.sigma2_mr;
    return r;
}

GiantComponentStats giant_component_stats(const DegreeDistribution& dist) {
    GiantComponentStats st;
    const auto m = moments(dist);
    const double kappa = m.variance + m.mean * m.mean - 2.0 * m.mean;
    if (!(kappa > 0.0) || !(m.mean > 0.0)) return st;
    const auto fs = final_size(dist, InitialInfection::none(dist), ModelParams{1.0, 0.0, 0.0});
    if (fs.below_threshold) return st;
    const auto& c = dist.pmf();
    const double z = fs.s_star, z2 = z * z, mu = m.mean;
    const double k = 1.0 - poly_derivative(c, z, 2) / mu;
    st.below_threshold = false;
    st.z = z;
    st.rho = fs.rho;
    st.sigma2_mr = 1.0 - st.rho - poly_derivative(c, z2, 0) - z2 / k * (2.0 * poly_derivative(c, z2, 1) - mu) -
                   z2 / (k * k) * (poly_derivative(c, z2, 1) + z2 * poly_derivative(c, z2, 2) - 2.0 * mu * z2);
    st.sigma2_nsw = st.rho * (1.0 - st.rho) + z2 / k * mu + z2 * z2 / (k * k) * kappa;
    return st;
}

}  // namespace netsir
