#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace netsir {

// Truncated degree law p_0..p_M. Always nonnegative and normalized to 1 within 1e-12.
class DegreeDistribution {
public:
    DegreeDistribution() : pmf_{1.0} {}
    // Accepts any nonnegative vector whose sum is within 1e-6 of 1 and rescales it to sum exactly.
    explicit DegreeDistribution(std::vector<double> pmf);

    const std::vector<double>& pmf() const { return pmf_; }
    int max_degree() const { return static_cast<int>(pmf_.size()) - 1; }
    double p(int k) const { return (k >= 0 && k <= max_degree()) ? pmf_[static_cast<std::size_t>(k)] : 0.0; }

private:
    std::vector<double> pmf_;
};

// Initially infective fraction eps_k per degree; 0 <= eps_k <= p_k.
struct InitialInfection {
    std::vector<double> eps;

    static InitialInfection none(const DegreeDistribution& dist);
    // eps_k = fraction * p_k
    static InitialInfection proportional(const DegreeDistribution& dist, double fraction);
    // eps_k = counts_k / n
    static InitialInfection from_counts(const std::vector<long>& counts, long n);

    double total() const;
    double stub_density() const;  // sum k eps_k
    double at(int k) const { return (k >= 0 && k < static_cast<int>(eps.size())) ? eps[static_cast<std::size_t>(k)] : 0.0; }
    bool is_trace() const { return total() == 0.0; }
    void validate(const DegreeDistribution& dist) const;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

// d^order/ds^order of the polynomial sum_k coeffs[k] s^k, any order.
double poly_derivative(const std::vector<double>& coeffs, double s, int order);

// f_D^(order)(s), order 0..3, s in [0,1].
double pgf(const DegreeDistribution& dist, double s, int order);
// Same with coefficients p_k - eps_k.
double pgf_eps(const DegreeDistribution& dist, const InitialInfection& init, double s, int order);
// Coefficients p_k - eps_k, the deflated generating function's series.
std::vector<double> deflated_coefficients(const DegreeDistribution& dist, const InitialInfection& init);

Moments moments(const DegreeDistribution& dist);

// Law of D~ - 1: p~_k = (k+1) p_{k+1} / mu.
DegreeDistribution size_biased(const DegreeDistribution& dist);

DegreeDistribution make_poisson(double lambda, int max_degree);
// p_k proportional to p (1-p)^k.
DegreeDistribution make_geometric(double p, int max_degree);
DegreeDistribution make_empirical(const std::vector<int>& degree_sequence);

// One nonnegative integer per line; blank lines and '#' comments skipped.
std::vector<int> read_degree_sequence(const std::string& path);

}  // namespace netsir
