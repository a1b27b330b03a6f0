#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace netsir {

struct SummaryStats {
    std::size_t count = 0;
    double mean = 0.0;
    double sd = 0.0;
    double mean_lo = 0.0, mean_hi = 0.0;  // t interval
    double sd_lo = 0.0, sd_hi = 0.0;      // square roots of the equal-tailed chi-square interval for the variance
};

// Needs at least two samples.
SummaryStats summarize(const std::vector<double>& samples, double level = 0.95);
SummaryStats summarize(const std::vector<int>& samples, double level = 0.95);

double normal_cdf(double x, double mu, double sigma);
double normal_density(double x, double mu, double sigma);

// sup_x |F_n(x) - Phi((x - mu)/sigma)|. Rejects sigma <= 0 and zero-spread samples.
double kolmogorov_distance(const std::vector<double>& samples, double mu, double sigma);

// P(K > lambda) for the limiting Kolmogorov distribution.
double kolmogorov_survival(double lambda);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
};

// Two-sample Smirnov test with the usual finite-sample correction to the asymptotic p-value.
KsResult ks_two_sample(std::vector<double> a, std::vector<double> b);

struct Interval {
    double point = 0.0;
    double lo = 0.0;
    double hi = 0.0;
};

// Percentile bootstrap for sd(a) / sd(b), resampling both groups independently.
Interval bootstrap_sd_ratio(const std::vector<double>& a, const std::vector<double>& b, int replicates, double level,
                            std::uint64_t seed);

// (x, density) pairs on an even grid for overlaying a normal approximation.
std::vector<std::pair<double, double>> normal_overlay(double mu, double sigma, double lo, double hi, int points);

}  // namespace netsir
