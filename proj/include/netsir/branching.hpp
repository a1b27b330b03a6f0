#pragma once

#include "netsir/degree_model.hpp"
#include "netsir/params.hpp"

namespace netsir {

enum class OffspringVariant { dropping, modified };

// modified uses (gamma + omega, 0); dropping uses the rates as given.
struct OffspringModel {
    OffspringVariant variant = OffspringVariant::dropping;
    ModelParams params;

    ModelParams effective() const { return variant == OffspringVariant::modified ? increased_recovery(params) : params; }
};

// PGF of the number of the k free neighbours an infective infects.
double offspring_pgf_k(const OffspringModel& model, int k, double s);
double offspring_pgf_k_derivative(const OffspringModel& model, int k, double s);
// P(none of r given neighbours is infected); the factorial moments are k_[r] times this.
double no_infection_probability(const OffspringModel& model, int r);
// Same PGF assembled from the factorial moments: sum_r C(k,r) P_r (1-s)^r s^(k-r).
double offspring_pgf_k_factorial(const OffspringModel& model, int k, double s);

// First generation uses dist, later generations the size-biased law minus one.
double offspring_pgf(const OffspringModel& model, const DegreeDistribution& dist, double s);
double offspring_pgf_later(const OffspringModel& model, const DegreeDistribution& dist, double s);
double offspring_pgf_later_derivative(const OffspringModel& model, const DegreeDistribution& dist, double s);

// Extinction probability of a later-generation lineage; 1 when R0 <= 1.
double extinction_probability(const OffspringModel& model, const DegreeDistribution& dist);
double pmaj(const OffspringModel& model, const DegreeDistribution& dist, int n_initial);

struct OrderingReport {
    double p_dropping = 0.0;
    double p_modified = 0.0;
    double sigma_dropping = 1.0;
    double sigma_modified = 1.0;
    bool holds = false;  // p_dropping > p_modified
};

OrderingReport ordering_check(const DegreeDistribution& dist, const ModelParams& params, int n_initial = 1);

}  // namespace netsir
