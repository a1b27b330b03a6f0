#include "netsir/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace netsir {

SummaryStats summarize(const std::vector<double>& samples, double level) {
    if (samples.size() < 2) throw std::invalid_argument("summary needs at least two samples");
    if (!(level > 0.0 && level < 1.0)) throw std::invalid_argument("confidence level must lie in (0,1)");
    SummaryStats s;
    s.count = samples.size();
    const double n = static_cast<double>(s.count);
    double m = 0.0;
    for (double v : samples) m += v;
    m /= n;
    double ss = 0.0;
    for (double v : samples) ss += (v - m) * (v - m);
    const double var = ss / (n - 1.0);
    s.mean = m;
    s.sd = std::sqrt(var);

    const double alpha = 1.0 - level;
    const boost::math::students_t t(n - 1.0);
    const double half = boost::math::quantile(t, 1.0 - alpha / 2.0) * s.sd / std::sqrt(n);
    s.mean_lo = m - half;
    s.mean_hi = m + half;
    const boost::math::chi_squared chi(n - 1.0);
    s.sd_lo = std::sqrt((n - 1.0) * var / boost::math::quantile(chi, 1.0 - alpha / 2.0));
    s.sd_hi = std::sqrt((n - 1.0) * var / boost::math::quantile(chi, alpha / 2.0));
    return s;
}

SummaryStats summarize(const std::vector<int>& samples, double level) {
    return summarize(std::vector<double>(samples.begin(), samples.end()), level);
}

double normal_cdf(double x, double mu, double sigma) { return 0.5 * std::erfc(-(x - mu) / (sigma * std::numbers::sqrt2)); }

double normal_density(double x, double mu, double sigma) {
    const double u = (x - mu) / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

double kolmogorov_distance(const std::vector<double>& samples, double mu, double sigma) {
    if (!(sigma > 0.0)) throw std::invalid_argument("reference sd must be positive");
    if (samples.empty()) throw std::invalid_argument("no samples");
    std::vector<double> x(samples);
    std::sort(x.begin(), x.end());
    if (x.front() == x.back()) throw std::invalid_argument("degenerate sample: all values identical");
    const double n = static_cast<double>(x.size());
    double d = 0.0;
    for (std::size_t i = 0; i < x.size();) {
        std::size_t j = i;
        while (j < x.size() && x[j] == x[i]) ++j;
        const double F = normal_cdf(x[i], mu, sigma);
        d = std::max({d, std::abs(static_cast<double>(i) / n - F), std::abs(static_cast<double>(j) / n - F)});
        i = j;
    }
    return d;
}

double kolmogorov_survival(double lambda) {
    if (lambda <= 0.0) return 1.0;
    if (lambda < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-17) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
    if (a.empty() || b.empty()) throw std::invalid_argument("KS test needs two non-empty samples");
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        const double v = std::min(a[i], b[j]);
        while (i < a.size() && a[i] == v) ++i;
        while (j < b.size() && b[j] == v) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    return KsResult{d, kolmogorov_survival((en + 0.12 + 0.11 / en) * d)};
}

Interval bootstrap_sd_ratio(const std::vector<double>& a, const std::vector<double>& b, int replicates, double level,
                            std::uint64_t seed) {
    if (a.size() < 2 || b.size() < 2) throw std::invalid_argument("bootstrap needs at least two samples per group");
    if (replicates < 10) throw std::invalid_argument("too few bootstrap replicates");
    const auto sd = [](const std::vector<double>& v) { return summarize(v).sd; };
    std::mt19937_64 rng(seed);
    std::vector<double> ratios;
    ratios.reserve(static_cast<std::size_t>(replicates));
    std::vector<double> ra(a.size()), rb(b.size());
    std::uniform_int_distribution<std::size_t> pa(0, a.size() - 1), pb(0, b.size() - 1);
    for (int r = 0; r < replicates; ++r) {
        for (double& v : ra) v = a[pa(rng)];
        for (double& v : rb) v = b[pb(rng)];
        ratios.push_back(sd(ra) / sd(rb));
    }
    std::sort(ratios.begin(), ratios.end());
    const double alpha = 1.0 - level;
    const auto q = [&](double p) {
        const auto k = static_cast<std::size_t>(std::clamp(p * (replicates - 1), 0.0, replicates - 1.0));
        return ratios[k];
    };
    return Interval{sd(a) / sd(b), q(alpha / 2.0), q(1.0 - alpha / 2.0)};
}

std::vector<std::pair<double, double>> normal_overlay(double mu, double sigma, double lo, double hi, int points) {
    if (!(sigma > 0.0) || points < 2 || !(hi > lo)) throw std::invalid_argument("bad overlay specification");
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(points));
    for (int k = 0; k < points; ++k) {
        const double x = lo + (hi - lo) * k / (points - 1);
        out.emplace_back(x, normal_density(x, mu, sigma));
    }
    return out;
}

}  // namespace netsir
