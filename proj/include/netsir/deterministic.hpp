#pragma once

#include <limits>
#include <vector>

#include "netsir/degree_model.hpp"
#include "netsir/ode.hpp"
#include "netsir/params.hpp"

namespace netsir {

// Susceptible and infective densities by effective degree, plus recovered-stub density.
struct DeterministicState {
    double t = 0.0;
    std::vector<double> x;
    std::vector<double> y;
    double z_E = 0.0;

    double x_total() const;
    double y_total() const;
    double x_E() const;
    double y_E() const;
    double eta_E() const { return x_E() + y_E() + z_E; }
    double rho_E() const { return y_E() / eta_E(); }
};

// Flat layout [x_0..x_M, y_0..y_M, z_E], shared with the fluctuation layer.
std::vector<double> pack_state(const DeterministicState& s);
DeterministicState unpack_state(const std::vector<double>& w, double t);
DeterministicState initial_state(const DegreeDistribution& dist, const InitialInfection& init);

double r0(const DegreeDistribution& dist, const ModelParams& params);
double malthusian(const DegreeDistribution& dist, const ModelParams& params);

// Real-time limit ODEs from x_i = p_i - eps_i, y_i = eps_i, z_E = 0.
std::vector<DeterministicState> solve_realtime(const DegreeDistribution& dist, const InitialInfection& init,
                                               const ModelParams& params, const std::vector<double>& grid,
                                               const OdeTolerance& tol = {});
void realtime_rhs(const ModelParams& params, const std::vector<double>& w, std::vector<double>& dwdt);

// Time-transformed ODEs. Grid points at or beyond the transformed duration are dropped.
std::vector<DeterministicState> solve_transformed(const DegreeDistribution& dist, const InitialInfection& init,
                                                  const ModelParams& params, const std::vector<double>& grid,
                                                  const OdeTolerance& tol = {});

struct TransformedClosedForm {
    double t = 0.0;
    double psi = 1.0;
    std::vector<double> x_tilde;
    double x_tilde_E = 0.0;
    double eta_tilde_E = 0.0;
    double z_tilde_E = 0.0;
    double y_tilde_E = 0.0;
    double x_tilde_total = 0.0;
};

// Requires beta + omega > 0.
TransformedClosedForm closed_forms(const DegreeDistribution& dist, const InitialInfection& init,
                                   const ModelParams& params, double t);
double psi(const ModelParams& params, double t);

// xi(t): transformed clock as a function of real time.
std::vector<double> solve_xi(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params,
                             const std::vector<double>& grid, const OdeTolerance& tol = {});

// theta(t). With eps > 0 uses the deflated generating function and theta(0) = 1;
// in the trace case theta(0) = 1 - eps_seed to leave the equilibrium at 1.
std::vector<double> solve_theta(const DegreeDistribution& dist, const InitialInfection& init,
                                const ModelParams& params, const std::vector<double>& grid,
                                const OdeTolerance& tol = {}, double eps_seed = 1e-6);

struct FinalSizeResult {
    double s_star = 1.0;
    double z = 1.0;
    double rho = 0.0;
    double tau_tilde = 0.0;
    bool tau_infinite = false;
    bool below_threshold = false;  // trace case with R0 <= 1
};

// Trace-of-infection limit when init has no mass.
FinalSizeResult final_size(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params);

// f'(psi~(z)) - [(a+gamma) z - gamma] mu / a; vanishes at the final-size z.
double final_size_residual(const DegreeDistribution& dist, const InitialInfection& init, const ModelParams& params,
                           double z);

struct InvarianceReport {
    double sup_susceptible_gap = 0.0;   // over the grid, |x(t)| for (gamma, omega) vs (gamma+omega, 0)
    double rho_dropping = 0.0;
    double rho_modified = 0.0;
    double min_prevalence_excess = 0.0;  // min over t > 0 of y_drop(t) - y_mod(t)
};

InvarianceReport invariance_check(const DegreeDistribution& dist, const InitialInfection& init,
                                  const ModelParams& params, const std::vector<double>& grid,
                                  const OdeTolerance& tol = {});

}  // namespace netsir
