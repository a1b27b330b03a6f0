#pragma once

#include <Eigen/Dense>
#include <utility>
#include <vector>

#include "netsir/degree_model.hpp"
#include "netsir/deterministic.hpp"
#include "netsir/params.hpp"

namespace netsir {

// Jump families of the effective-degree chain; values match the intensity index.
enum class JumpKind { transmit = 1, infective_pair = 2, drop = 3, recovered_pair = 4, recover = 5 };

struct Jump {
    JumpKind kind;
    int i = 0;  // effective degree of the infective whose stub fires (or who recovers)
    int j = 0;  // effective degree of the partner, families 1-3 only
    std::vector<std::pair<int, double>> delta;  // sparse jump vector, indices in the packed layout
};

// Families 1-3 for 1 <= i,j <= M, family 4 for 1 <= i <= M, family 5 for 0 <= i <= M.
std::vector<Jump> jump_set(int max_degree);
double jump_intensity(const Jump& jump, const std::vector<double>& w, const ModelParams& params);

// All of these need eta_E > 0 and take the packed layout [x, y, z_E].
std::vector<double> drift(const std::vector<double>& w, const ModelParams& params);
std::vector<double> drift(const DeterministicState& s, const ModelParams& params);
std::vector<double> drift_by_enumeration(const std::vector<double>& w, const ModelParams& params);
Eigen::MatrixXd jacobian(const std::vector<double>& w, const ModelParams& params);
Eigen::MatrixXd g_matrix(const std::vector<double>& w, const ModelParams& params);

struct CovariancePoint {
    DeterministicState state;
    Eigen::MatrixXd sigma;
    double var_susceptible = 0.0;  // limit of Var(S(t)) / N
    double var_infective = 0.0;    // limit of Var(I(t)) / N
    double cov_si = 0.0;
};

// Co-integrates the limit ODEs with dSigma/dt = G + J Sigma + Sigma J^T from Sigma(0) = sigma0.
std::vector<CovariancePoint> solve_sigma(const DegreeDistribution& dist, const InitialInfection& init,
                                         const ModelParams& params, const std::vector<double>& grid,
                                         const Eigen::MatrixXd& sigma0, const OdeTolerance& tol = {});

// Initial covariance when degrees are iid and a fixed fraction eps is infected uniformly at random.
Eigen::MatrixXd nsw_sigma0(const DegreeDistribution& dist, double eps);

struct VarianceResult {
    double sigma2 = 0.0;
    double z = 0.0;
    double rho = 0.0;
    double b_tilde = 0.0;
    double sigma2_mr = 0.0;
    double sigma2_0 = 0.0;
    std::vector<double> explicit_terms;  // the four closed-form terms of the dropping formula
    double I_A = 0.0, I_B = 0.0, I_C = 0.0, I_D = 0.0;
};

// Final-size variance on a prescribed degree sequence. Needs z > 0; trace case needs R0 > 1.
VarianceResult sigma2_mr_final(const DegreeDistribution& dist, const InitialInfection& init,
                               const ModelParams& params);
// Trace case on iid degrees: sigma2_mr + sigma2_0.
VarianceResult sigma2_nsw_final(const DegreeDistribution& dist, const ModelParams& params);

// omega = 0 closed forms; no quadrature.
VarianceResult sigma2_mr_nodrop(const DegreeDistribution& dist, const InitialInfection& init, double beta,
                                double gamma);
VarianceResult sigma2_nsw_nodrop(const DegreeDistribution& dist, double beta, double gamma);

struct GiantComponentStats {
    double z = 1.0;
    double rho = 0.0;
    double sigma2_mr = 0.0;
    double sigma2_nsw = 0.0;
    bool below_threshold = true;
};

GiantComponentStats giant_component_stats(const DegreeDistribution& dist);

}  // namespace netsir
