#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "netsir/branching.hpp"
#include "netsir/deterministic.hpp"
#include "netsir/epidemic_sim.hpp"
#include "netsir/fluctuations.hpp"

namespace netsir {

// Shortest text that reads back to the same double.
std::string format_exact(double v);

void write_ensemble_csv(std::ostream& out, const RunEnsemble& ens);
void write_trajectory_csv(std::ostream& out, const TrajectorySummary& s);
void write_ode_csv(std::ostream& out, const std::vector<DeterministicState>& series, bool per_degree);
void write_covariance_csv(std::ostream& out, const std::vector<CovariancePoint>& series);

struct VarianceRow {
    std::string model;
    std::string dist;
    ModelParams params;
    VarianceResult result;
};
void write_variance_csv(std::ostream& out, const std::vector<VarianceRow>& rows);

struct PmajorRow {
    std::string variant;
    double r0 = 0.0;
    double sigma = 1.0;
    double p_maj = 0.0;
};
void write_pmajor_csv(std::ostream& out, const std::vector<PmajorRow>& rows);
void write_overlay_csv(std::ostream& out, const std::vector<std::pair<double, double>>& overlay);

// Minimal reader for the numeric CSVs above: header plus rows of doubles (text cells are rejected).
struct NumericTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};
NumericTable read_numeric_csv(std::istream& in);

}  // namespace netsir
