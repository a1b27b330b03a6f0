#include <doctest.h>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <random>

#include "netsir/branching.hpp"
#include "netsir/deterministic.hpp"

using namespace netsir;

namespace {

const ModelParams table_params{1.5, 1.0, 2.0};

// E[(1 - q + q s)^k] over the infectious period, with u = exp(-gamma I) uniform on (0,1).
// q = beta/(beta+omega) (1 - exp(-(beta+omega) I)) is the chance one edge transmits.
double pgf_by_quadrature(const ModelParams& p, int k, double s, bool derivative = false) {
    const double a = p.beta + p.omega;
    const auto integrand = [&](double u) {
        const double survive = std::pow(u, a / p.gamma);
        const double q = p.beta / a * (1.0 - survive);
        const double base = 1.0 - q + q * s;
        return derivative ? (k == 0 ? 0.0 : k * q * std::pow(base, k - 1)) : std::pow(base, k);
    };
    boost::math::quadrature::tanh_sinh<double> rule;
    return rule.integrate(integrand, 0.0, 1.0, 1e-14);
}

double binomial(int n, int k) { return std::exp(std::lgamma(n + 1.0) - std::lgamma(k + 1.0) - std::lgamma(n - k + 1.0)); }

const char* name(OffspringVariant v) { return v == OffspringVariant::dropping ? "dropping" : "modified"; }

}  // namespace

TEST_CASE("offspring pgf matches quadrature over the infectious period") {
    for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
        const OffspringModel model{variant, table_params};
        const ModelParams eff = variant == OffspringVariant::dropping ? table_params : increased_recovery(table_params);
        for (int k : {0, 1, 2, 5, 15, 30})
            for (double s : {0.0, 0.2, 0.55, 0.9, 1.0}) {
                CAPTURE(name(variant));
                CAPTURE(k);
                CAPTURE(s);
                CHECK(std::abs(offspring_pgf_k(model, k, s) - pgf_by_quadrature(eff, k, s)) < 1e-10);
                CHECK(std::abs(offspring_pgf_k_derivative(model, k, s) - pgf_by_quadrature(eff, k, s, true)) < 1e-10);
            }
    }
}

TEST_CASE("offspring pgf basics") {
    for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
        const OffspringModel model{variant, table_params};
        for (double s : {0.0, 0.3, 1.0}) CHECK(offspring_pgf_k(model, 0, s) == 1.0);
        for (int k = 0; k <= 20; ++k) {
            CHECK(offspring_pgf_k(model, k, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(offspring_pgf_k_derivative(model, k, 1.0) - k * 1.5 / 4.5) < 1e-10);
            // backward difference on the degree-k polynomial
            const double h = 1e-4;
            const double fd = (3 * offspring_pgf_k(model, k, 1.0) - 4 * offspring_pgf_k(model, k, 1.0 - h) +
                               offspring_pgf_k(model, k, 1.0 - 2 * h)) / (2 * h);
            CHECK(std::abs(fd - k * 1.5 / 4.5) < 1e-5 * std::max(1, k * k * k));
        }
    }
}

TEST_CASE("dropping offspring pgf lies below modified") {
    const OffspringModel drop{OffspringVariant::dropping, table_params};
    const OffspringModel mod{OffspringVariant::modified, table_params};
    for (int k = 0; k <= 20; ++k)
        for (int i = 0; i < 100; ++i) {
            const double s = i / 100.0;
            const double gap = offspring_pgf_k(mod, k, s) - offspring_pgf_k(drop, k, s);
            if (k >= 2)
                CHECK(gap > 0.0);
            else
                CHECK(gap >= -1e-15);
        }
}

TEST_CASE("factorial route agrees with direct expansion") {
    for (const auto& p : {table_params, ModelParams{0.7, 2.0, 0.3}, ModelParams{3.0, 0.5, 0.0}})
        for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
            const OffspringModel model{variant, p};
            for (int k = 0; k <= 50; ++k)
                for (double s : {0.0, 0.25, 0.5, 0.75, 0.99, 1.0})
                    CHECK(std::abs(offspring_pgf_k(model, k, s) - offspring_pgf_k_factorial(model, k, s)) < 1e-10);
        }
}

TEST_CASE("no-infection probabilities by hand") {
    const OffspringModel drop{OffspringVariant::dropping, table_params};
    const double a = 3.5, pw = 2.0 / 3.5, pb = 1.5 / 3.5;
    for (int r = 0; r <= 6; ++r) {
        double expected = 0.0;
        for (int i = 0; i <= r; ++i) expected += binomial(r, i) * std::pow(pw, r - i) * std::pow(pb, i) * 1.0 / (1.0 + i * a);
        CHECK(no_infection_probability(drop, r) == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("property: later-generation pgf shape and mean") {
    for (const auto& d : {make_poisson(5.0, 15), make_geometric(1.0 / 6.0, 50), make_poisson(2.0, 10)})
        for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
            const OffspringModel model{variant, table_params};
            CHECK(offspring_pgf_later(model, d, 1.0) == doctest::Approx(1.0).epsilon(1e-13));
            CHECK(std::abs(offspring_pgf_later_derivative(model, d, 1.0) - r0(d, table_params)) < 1e-8);
            double prev = -1.0, prev_slope = -1.0;
            for (int i = 0; i <= 200; ++i) {
                const double s = i / 200.0;
                const double v = offspring_pgf_later(model, d, s);
                const double slope = offspring_pgf_later_derivative(model, d, s);
                CHECK(v >= prev - 1e-15);
                CHECK(slope >= prev_slope - 1e-12);
                prev = v;
                prev_slope = slope;
            }
        }
}

TEST_CASE("outbreak probabilities") {
    const auto poi = make_poisson(5.0, 15);
    const auto geo = make_geometric(1.0 / 6.0, 50);
    const OffspringModel drop{OffspringVariant::dropping, table_params};
    const OffspringModel mod{OffspringVariant::modified, table_params};
    // single initial infective against the simulated intervals, 0.01 slack
    CHECK(pmaj(drop, poi, 1) > 0.592 - 0.01);
    CHECK(pmaj(drop, poi, 1) < 0.611 + 0.01);
    CHECK(pmaj(mod, poi, 1) > 0.474 - 0.01);
    CHECK(pmaj(mod, poi, 1) < 0.493 + 0.01);
    CHECK(pmaj(drop, geo, 1) > 0.519 - 0.01);
    CHECK(pmaj(drop, geo, 1) < 0.539 + 0.01);
    CHECK(pmaj(mod, geo, 1) > 0.443 - 0.01);
    CHECK(pmaj(mod, geo, 1) < 0.463 + 0.01);
    // independent lineages
    const double single = 1.0 - pmaj(drop, poi, 1);
    CHECK(pmaj(drop, poi, 5) == doctest::Approx(1.0 - std::pow(single, 5)).epsilon(1e-13));
    // extinction probability is the smallest fixed point
    const double sigma = extinction_probability(drop, poi);
    CHECK(std::abs(offspring_pgf_later(drop, poi, sigma) - sigma) < 1e-10);
    CHECK(sigma < 1.0);
    CHECK(pmaj(drop, poi, 1) == doctest::Approx(1.0 - offspring_pgf(drop, poi, sigma)).epsilon(1e-13));
    // subcritical
    const OffspringModel weak{OffspringVariant::dropping, ModelParams{0.1, 1.0, 1.0}};
    CHECK(pmaj(weak, poi, 3) == 0.0);
    CHECK(extinction_probability(weak, poi) == 1.0);
}

TEST_CASE("ordering of the two models") {
    for (const auto& d : {make_poisson(5.0, 15), make_geometric(1.0 / 6.0, 50)}) {
        const OrderingReport rep = ordering_check(d, table_params);
        CHECK(rep.holds);
        CHECK(rep.p_dropping > rep.p_modified);
        CHECK(rep.sigma_dropping < rep.sigma_modified);
        const OrderingReport same = ordering_check(d, ModelParams{1.5, 1.0, 0.0});
        CHECK(std::abs(same.p_dropping - same.p_modified) < 1e-12);
    }
}

TEST_CASE("Galton-Watson simulation matches extinction probability") {
    // each edge of an infective fires at rate beta+omega during an Exp(gamma) period; firing transmits w.p. beta/(beta+omega)
    const auto d = make_poisson(5.0, 15);
    const auto sb = size_biased(d);
    std::mt19937_64 rng(12345);
    std::discrete_distribution<int> first_degree(d.pmf().begin(), d.pmf().end());
    std::discrete_distribution<int> later_degree(sb.pmf().begin(), sb.pmf().end());
    for (auto variant : {OffspringVariant::dropping, OffspringVariant::modified}) {
        const ModelParams p = variant == OffspringVariant::dropping ? table_params : increased_recovery(table_params);
        std::exponential_distribution<double> period(p.gamma);
        std::uniform_real_distribution<double> unif(0.0, 1.0);
        const auto offspring = [&](int k) {
            const double q = p.beta / (p.beta + p.omega) * (1.0 - std::exp(-(p.beta + p.omega) * period(rng)));
            int born = 0;
            for (int e = 0; e < k; ++e) born += unif(rng) < q;
            return born;
        };
        const int lineages = 100000;
        int extinct = 0;
        for (int run = 0; run < lineages; ++run) {
            long alive = offspring(first_degree(rng));
            while (alive > 0 && alive < 200) {
                long next = 0;
                for (long c = 0; c < alive; ++c) next += offspring(later_degree(rng));
                alive = next;
            }
            extinct += alive == 0;
        }
        const double freq = static_cast<double>(extinct) / lineages;
        const double target = 1.0 - pmaj(OffspringModel{variant, table_params}, d, 1);
        const double se = std::sqrt(target * (1 - target) / lineages);
        CAPTURE(name(variant));
        CHECK(std::abs(freq - target) < 3 * se);
    }
}
