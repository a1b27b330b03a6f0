#include "netsir/degree_model.hpp"

#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace netsir {

DegreeDistribution::DegreeDistribution(std::vector<double> pmf) : pmf_(std::move(pmf)) {
    if (pmf_.empty()) throw std::invalid_argument("degree pmf is empty");
    double total = 0.0;
    for (double v : pmf_) {
        if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("degree pmf has a negative or non-finite entry");
        total += v;
    }
    if (std::abs(total - 1.0) > 1e-6) throw std::invalid_argument("degree pmf does not sum to 1");
    for (double& v : pmf_) v /= total;
}

InitialInfection InitialInfection::none(const DegreeDistribution& dist) {
    return InitialInfection{std::vector<double>(dist.pmf().size(), 0.0)};
}

InitialInfection InitialInfection::proportional(const DegreeDistribution& dist, double fraction) {
    if (!(fraction >= 0.0 && fraction <= 1.0)) throw std::invalid_argument("initial fraction must lie in [0,1]");
    InitialInfection init{dist.pmf()};
    for (double& e : init.eps) e *= fraction;
    return init;
}

InitialInfection InitialInfection::from_counts(const std::vector<long>& counts, long n) {
    if (n <= 0) throw std::invalid_argument("population size must be positive");
    InitialInfection init;
    init.eps.reserve(counts.size());
    for (long c : counts) init.eps.push_back(static_cast<double>(c) / static_cast<double>(n));
    return init;
}

double InitialInfection::total() const { return std::accumulate(eps.begin(), eps.end(), 0.0); }

double InitialInfection::stub_density() const {
    double s = 0.0;
    for (std::size_t k = 0; k < eps.size(); ++k) s += static_cast<double>(k) * eps[k];
    return s;
}

void InitialInfection::validate(const DegreeDistribution& dist) const {
    if (eps.size() > dist.pmf().size()) throw std::invalid_argument("initial infection has degrees beyond the support");
    for (std::size_t k = 0; k < eps.size(); ++k) {
        if (!(eps[k] >= 0.0) || eps[k] > dist.pmf()[k] + 1e-15)
            throw std::invalid_argument("initial infection must satisfy 0 <= eps_k <= p_k");
    }
}

double poly_derivative(const std::vector<double>& coeffs, double s, int order) {
    if (order < 0) throw std::domain_error("negative derivative order");
    const int n = static_cast<int>(coeffs.size());
    double acc = 0.0;
    // Horner over k = n-1 .. order of k_[order] c_k s^(k-order)
    for (int k = n - 1; k >= order; --k) {
        double falling = 1.0;
        for (int r = 0; r < order; ++r) falling *= static_cast<double>(k - r);
        acc = acc * s + falling * coeffs[static_cast<std::size_t>(k)];
    }
    return acc;
}

namespace {
void check_pgf_args(double s, int order) {
    if (!(s >= 0.0 && s <= 1.0)) throw std::domain_error("pgf argument must lie in [0,1]");
    if (order < 0 || order > 3) throw std::domain_error("pgf derivative order must be 0..3");
}
}  // namespace

double pgf(const DegreeDistribution& dist, double s, int order) {
    check_pgf_args(s, order);
    return poly_derivative(dist.pmf(), s, order);
}

std::vector<double> deflated_coefficients(const DegreeDistribution& dist, const InitialInfection& init) {
    std::vector<double> c = dist.pmf();
    for (std::size_t k = 0; k < c.size() && k < init.eps.size(); ++k) c[k] -= init.eps[k];
    return c;
}

double pgf_eps(const DegreeDistribution& dist, const InitialInfection& init, double s, int order) {
    check_pgf_args(s, order);
    return poly_derivative(deflated_coefficients(dist, init), s, order);
}

Moments moments(const DegreeDistribution& dist) {
    const double mu = poly_derivative(dist.pmf(), 1.0, 1);
    const double f2 = poly_derivative(dist.pmf(), 1.0, 2);
    return Moments{mu, f2 + mu - mu * mu};
}

DegreeDistribution size_biased(const DegreeDistribution& dist) {
    const double mu = moments(dist).mean;
    if (!(mu > 0.0)) throw std::invalid_argument("size-biasing needs a positive mean degree");
    const int m = dist.max_degree();
    if (m == 0) throw std::invalid_argument("size-biasing needs a positive mean degree");
    std::vector<double> out(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) out[static_cast<std::size_t>(k)] = (k + 1) * dist.p(k + 1) / mu;
    return DegreeDistribution(std::move(out));
}

DegreeDistribution make_poisson(double lambda, int max_degree) {
    if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("poisson mean must be positive");
    if (max_degree < 0) throw std::invalid_argument("max degree must be nonnegative");
    std::vector<double> p(static_cast<std::size_t>(max_degree) + 1);
    for (int k = 0; k <= max_degree; ++k)
        p[static_cast<std::size_t>(k)] = std::exp(-lambda + k * std::log(lambda) - std::lgamma(k + 1.0));
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return DegreeDistribution(std::move(p));
}

DegreeDistribution make_geometric(double prob, int max_degree) {
    if (!(prob > 0.0 && prob < 1.0)) throw std::invalid_argument("geometric parameter must lie in (0,1)");
    if (max_degree < 0) throw std::invalid_argument("max degree must be nonnegative");
    std::vector<double> p(static_cast<std::size_t>(max_degree) + 1);
    for (int k = 0; k <= max_degree; ++k) p[static_cast<std::size_t>(k)] = prob * std::pow(1.0 - prob, k);
    const double total = std::accumulate(p.begin(), p.end(), 0.0);
    for (double& v : p) v /= total;
    return DegreeDistribution(std::move(p));
}

DegreeDistribution make_empirical(const std::vector<int>& degree_sequence) {
    if (degree_sequence.empty()) throw std::invalid_argument("degree sequence is empty");
    int m = 0;
    for (int d : degree_sequence) {
        if (d < 0) throw std::invalid_argument("degrees must be nonnegative");
        m = std::max(m, d);
    }
    std::vector<double> p(static_cast<std::size_t>(m) + 1, 0.0);
    for (int d : degree_sequence) p[static_cast<std::size_t>(d)] += 1.0;
    for (double& v : p) v /= static_cast<double>(degree_sequence.size());
    return DegreeDistribution(std::move(p));
}

std::vector<int> read_degree_sequence(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open degree sequence file: " + path);
    std::vector<int> seq;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        std::istringstream ls(line);
        long v;
        if (!(ls >> v)) {
            std::string rest;
            if (std::istringstream(line) >> rest) throw std::runtime_error("bad degree on line " + std::to_string(lineno));
            continue;
        }
        std::string extra;
        if (ls >> extra || v < 0) throw std::runtime_error("bad degree on line " + std::to_string(lineno));
        seq.push_back(static_cast<int>(v));
    }
    if (seq.empty()) throw std::runtime_error("degree sequence file is empty: " + path);
    return seq;
}

}  // namespace netsir
