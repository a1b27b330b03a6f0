#include <doctest.h>

#include <cmath>
#include <fstream>
#include <stdexcept>

#include "netsir/degree_model.hpp"

using namespace netsir;

namespace {

// Untruncated Poisson pmf by the recurrence p_k = p_{k-1} lambda / k.
std::vector<double> poisson_recurrence(double lambda, int upto) {
    std::vector<double> p(static_cast<std::size_t>(upto) + 1);
    p[0] = std::exp(-lambda);
    for (int k = 1; k <= upto; ++k) p[static_cast<std::size_t>(k)] = p[static_cast<std::size_t>(k) - 1] * lambda / k;
    return p;
}

}  // namespace

TEST_CASE("poisson truncation keeps almost all mass and renormalizes") {
    const auto d = make_poisson(5.0, 15);
    const auto raw = poisson_recurrence(5.0, 15);
    double kept = 0.0;
    for (double v : raw) kept += v;
    CHECK(1.0 - kept < 1e-4);
    CHECK(pgf(d, 1.0, 0) == doctest::Approx(1.0).epsilon(1e-12));
    for (int k = 0; k <= 15; ++k) CHECK(d.p(k) == doctest::Approx(raw[static_cast<std::size_t>(k)] / kept).epsilon(1e-12));
}

TEST_CASE("geometric truncation and p0") {
    const auto d = make_geometric(1.0 / 6.0, 50);
    CHECK(std::abs(d.p(0) - 1.0 / 6.0) < 1e-4);
    const Moments m = moments(d);
    CHECK(std::abs(m.mean - 5.0) < 2e-2);
    CHECK(std::abs(m.variance - 30.0) < 2e-2 * 30.0);
}

TEST_CASE("poisson moments near untruncated") {
    const Moments m = moments(make_poisson(5.0, 15));
    // truncated and renormalized sums from the recurrence
    const auto raw = poisson_recurrence(5.0, 15);
    double mass = 0.0, first = 0.0, second = 0.0;
    for (int k = 0; k <= 15; ++k) {
        mass += raw[static_cast<std::size_t>(k)];
        first += k * raw[static_cast<std::size_t>(k)];
        second += k * k * raw[static_cast<std::size_t>(k)];
    }
    const double mean = first / mass, var = second / mass - mean * mean;
    CHECK(m.mean == doctest::Approx(mean).epsilon(1e-12));
    CHECK(m.variance == doctest::Approx(var).epsilon(1e-12));
    CHECK(pgf(make_poisson(5.0, 15), 1.0, 1) == doctest::Approx(mean).epsilon(1e-12));
    // truncation at 15 costs about 8e-4 in the mean and 9e-3 in the variance
    CHECK(std::abs(m.mean - 5.0) < 1e-3);
    CHECK(std::abs(m.variance - 5.0) < 1e-2);
}

TEST_CASE("point mass moments and size bias") {
    const DegreeDistribution d({0.0, 0.0, 0.0, 1.0});
    const Moments m = moments(d);
    CHECK(m.mean == doctest::Approx(3.0));
    CHECK(std::abs(m.variance) < 1e-12);
    const auto sb = size_biased(d);
    CHECK(sb.p(2) == doctest::Approx(1.0));
    CHECK(sb.max_degree() == 2);
}

TEST_CASE("size bias of poisson is poisson before truncation effects") {
    const auto d = make_poisson(5.0, 40);
    const auto sb = size_biased(d);
    const auto raw = poisson_recurrence(5.0, 20);
    for (int k = 0; k <= 20; ++k) CHECK(std::abs(sb.p(k) - raw[static_cast<std::size_t>(k)]) < 1e-9);
}

TEST_CASE("size biased geometric has mean 10") {
    const auto sb = size_biased(make_geometric(1.0 / 6.0, 200));
    CHECK(moments(sb).mean == doctest::Approx(10.0).epsilon(1e-6));
}

TEST_CASE("size bias rejects zero mean") {
    CHECK_THROWS(size_biased(DegreeDistribution({1.0})));
}

TEST_CASE("empirical distribution") {
    const auto d = make_empirical({2, 2, 2});
    CHECK(d.max_degree() == 2);
    CHECK(d.p(2) == 1.0);
    CHECK_THROWS(make_empirical({}));
    CHECK_THROWS(make_empirical({1, -1}));
}

TEST_CASE("pgf domain checks") {
    const auto d = make_poisson(5.0, 15);
    CHECK_THROWS_AS(pgf(d, 1.1, 0), std::domain_error);
    CHECK_THROWS_AS(pgf(d, -0.1, 0), std::domain_error);
    CHECK_THROWS_AS(pgf(d, 0.5, 4), std::domain_error);
}

TEST_CASE("invalid constructor parameters") {
    CHECK_THROWS(make_poisson(0.0, 10));
    CHECK_THROWS(make_geometric(0.0, 10));
    CHECK_THROWS(make_geometric(1.0, 10));
    CHECK_THROWS(DegreeDistribution({0.5, -0.1, 0.6}));
}

TEST_CASE("pgf_eps reductions") {
    const auto d = make_poisson(5.0, 15);
    const auto none = InitialInfection::none(d);
    const auto all = InitialInfection::proportional(d, 1.0);
    const auto five = InitialInfection::proportional(d, 0.05);
    for (double s : {0.0, 0.25, 0.5, 0.9, 1.0})
        for (int order = 0; order <= 3; ++order) {
            CHECK(pgf_eps(d, none, s, order) == pgf(d, s, order));
            CHECK(std::abs(pgf_eps(d, all, s, order)) < 1e-14);
        }
    CHECK(pgf_eps(d, five, 1.0, 0) == doctest::Approx(0.95).epsilon(1e-12));
}

TEST_CASE("property: constructed distributions are normalized and pgf monotone") {
    for (const auto& d : {make_poisson(2.0, 10), make_poisson(5.0, 15), make_geometric(1.0 / 6.0, 50),
                          make_geometric(0.4, 20), make_empirical({0, 1, 1, 4, 7})}) {
        double sum = 0.0;
        for (double v : d.pmf()) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-12);
        for (int order = 0; order <= 3; ++order) {
            double prev = -1.0;
            for (int i = 0; i <= 50; ++i) {
                const double v = pgf(d, i / 50.0, order);
                CHECK(v >= prev - 1e-15);
                prev = v;
            }
        }
        const Moments m = moments(d);
        double direct = 0.0;
        for (int k = 0; k <= d.max_degree(); ++k) direct += k * k * d.p(k);
        CHECK(std::abs((direct - m.mean * m.mean) - m.variance) < 1e-12 * std::max(1.0, direct));
    }
}

TEST_CASE("pgf derivatives match finite differences") {
    const auto d = make_geometric(0.3, 25);
    const double h = 1e-5;
    for (double s : {0.2, 0.5, 0.8})
        for (int order = 0; order < 3; ++order) {
            const double fd = (pgf(d, s + h, order) - pgf(d, s - h, order)) / (2 * h);
            CHECK(fd == doctest::Approx(pgf(d, s, order + 1)).epsilon(1e-7));
        }
}

TEST_CASE("initial infection validation") {
    const auto d = make_poisson(5.0, 15);
    InitialInfection bad = InitialInfection::none(d);
    bad.eps[3] = d.p(3) * 1.5;
    CHECK_THROWS(bad.validate(d));
    const auto counts = InitialInfection::from_counts({0, 2, 3}, 100);
    CHECK(counts.total() == doctest::Approx(0.05));
    CHECK(counts.stub_density() == doctest::Approx((2.0 * 1 + 3.0 * 2) / 100));
}

TEST_CASE("degree sequence file") {
    const std::string path = "degree_sequence_test.txt";
    {
        std::ofstream f(path);
        f << "# header\n3\n\n1\n2 # trailing\n";
    }
    CHECK(read_degree_sequence(path) == std::vector<int>{3, 1, 2});
    CHECK_THROWS(read_degree_sequence("does_not_exist.txt"));
}
