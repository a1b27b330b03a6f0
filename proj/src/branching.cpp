#include "netsir/branching.hpp"

#include <cmath>
#include <stdexcept>

#include "netsir/deterministic.hpp"
#include "netsir/errors.hpp"

namespace netsir {

namespace {

double log_choose(int n, int k) { return std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0); }

// E[exp(-r (beta+omega) I)] for I ~ Exp(gamma)
double exp_moment(double gamma, double a, int r) {
    if (r == 0) return 1.0;
    return gamma / (gamma + r * a);
}

// n^k with the convention 0^0 = 1
double power(double base, int k) { return k == 0 ? 1.0 : std::pow(base, k); }

void check(int k, double s) {
    if (k < 0) throw std::invalid_argument("offspring degree must be nonnegative");
    if (k > 10000) throw std::overflow_error("offspring degree too large");
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("pgf argument must lie in [0,1]");
}

}  // namespace

// 1 - q(I) + q(I) s = c0 + c1 exp(-(beta+omega) I) with c0 = (omega + beta s)/a, c1 = beta (1-s)/a.
double offspring_pgf_k(const OffspringModel& model, int k, double s) {
    check(k, s);
    const ModelParams p = model.effective();
    p.validate();
    const double a = p.edge_rate();
    if (p.beta == 0.0 || k == 0) return 1.0;
    const double c0 = (p.omega + p.beta * s) / a;
    const double c1 = p.beta * (1.0 - s) / a;
    double acc = 0.0;
    for (int r = 0; r <= k; ++r) acc += std::exp(log_choose(k, r)) * power(c0, k - r) * power(c1, r) * exp_moment(p.gamma, a, r);
    return acc;
}

double offspring_pgf_k_derivative(const OffspringModel& model, int k, double s) {
    check(k, s);
    const ModelParams p = model.effective();
    p.validate();
    const double a = p.edge_rate();
    if (p.beta == 0.0 || k == 0) return 0.0;
    const double c0 = (p.omega + p.beta * s) / a;
    const double c1 = p.beta * (1.0 - s) / a;
    const double d = p.beta / a;  // dc0/ds = -dc1/ds
    double acc = 0.0;
    for (int r = 0; r <= k; ++r) {
        const double term = (k - r > 0 ? (k - r) * power(c0, k - r - 1) * power(c1, r) : 0.0) -
                            (r > 0 ? r * power(c0, k - r) * power(c1, r - 1) : 0.0);
        acc += std::exp(log_choose(k, r)) * term * d * exp_moment(p.gamma, a, r);
    }
    return acc;
}

double no_infection_probability(const OffspringModel& model, int r) {
    if (r < 0) throw std::invalid_argument("r must be nonnegative");
    const ModelParams p = model.effective();
    p.validate();
    const double a = p.edge_rate();
    if (p.beta == 0.0 || r == 0) return 1.0;
    const double pw = p.p_omega();
    double acc = 0.0;
    for (int i = 0; i <= r; ++i)
        acc += std::exp(log_choose(r, i)) * power(pw, r - i) * power(p.beta / a, i) * exp_moment(p.gamma, a, i);
    return acc;
}

double offspring_pgf_k_factorial(const OffspringModel& model, int k, double s) {
    check(k, s);
    double acc = 0.0;
    for (int r = 0; r <= k; ++r)
        acc += std::exp(log_choose(k, r)) * no_infection_probability(model, r) * power(1.0 - s, r) * power(s, k - r);
    return acc;
}

double offspring_pgf(const OffspringModel& model, const DegreeDistribution& dist, double s) {
    double acc = 0.0;
    for (int k = 0; k <= dist.max_degree(); ++k)
        if (dist.p(k) > 0.0) acc += dist.p(k) * offspring_pgf_k(model, k, s);
    return acc;
}

double offspring_pgf_later(const OffspringModel& model, const DegreeDistribution& dist, double s) {
    return offspring_pgf(model, size_biased(dist), s);
}

double offspring_pgf_later_derivative(const OffspringModel& model, const DegreeDistribution& dist, double s) {
    const auto tilde = size_biased(dist);
    double acc = 0.0;
    for (int k = 0; k <= tilde.max_degree(); ++k)
        if (tilde.p(k) > 0.0) acc += tilde.p(k) * offspring_pgf_k_derivative(model, k, s);
    return acc;
}

double extinction_probability(const OffspringModel& model, const DegreeDistribution& dist) {
    if (r0(dist, model.effective()) <= 1.0) return 1.0;
    const auto tilde = size_biased(dist);
    const auto phi = [&](double s) { return offspring_pgf(model, tilde, s) - s; };
    // phi is convex with phi(1) = 0 and phi'(1) = R0 - 1 > 0, so it is negative just below 1
    double hi = 1.0;
    bool found = false;
    for (int k = 1; k <= 60 && !found; ++k) {
        hi = 1.0 - std::ldexp(1.0, -k);
        found = phi(hi) < 0.0;
    }
    if (!found) throw NumericalError("extinction root not bracketed");
    double lo = 0.0;
    if (phi(lo) <= 0.0) return 0.0;
    while (hi - lo > 1e-15 * std::max(1.0, hi)) {
        const double mid = 0.5 * (lo + hi);
        if (mid <= lo || mid >= hi) break;
        (phi(mid) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

double pmaj(const OffspringModel& model, const DegreeDistribution& dist, int n_initial) {
    if (n_initial < 1) throw std::invalid_argument("need at least one initial infective");
    const double sigma = extinction_probability(model, dist);
    if (sigma >= 1.0) return 0.0;
    return 1.0 - std::pow(offspring_pgf(model, dist, sigma), n_initial);
}

OrderingReport ordering_check(const DegreeDistribution& dist, const ModelParams& params, int n_initial) {
    const OffspringModel drop{OffspringVariant::dropping, params};
    const OffspringModel mod{OffspringVariant::modified, params};
    OrderingReport rep;
    rep.sigma_dropping = extinction_probability(drop, dist);
    rep.sigma_modified = extinction_probability(mod, dist);
    rep.p_dropping = pmaj(drop, dist, n_initial);
    rep.p_modified = pmaj(mod, dist, n_initial);
    rep.holds = rep.p_dropping > rep.p_modified;
    return rep;
}

}  // namespace netsir
