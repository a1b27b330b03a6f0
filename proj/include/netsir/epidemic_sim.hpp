#pragma once

#include <cstdint>
#include <vector>

#include "netsir/config_graph.hpp"
#include "netsir/degree_model.hpp"
#include "netsir/params.hpp"

namespace netsir {

// Counts held piecewise-constant on a caller-supplied grid. S + I + R = n at every sample.
struct Trajectory {
    int n = 0;
    std::vector<double> times;
    std::vector<int> S, I, R;
    int final_size = 0;  // ever infected, initial infectives included
    double extinction_time = 0.0;
};

// Exact direct-method simulation on an explicit graph.
// verify_bookkeeping rechecks the live S-I edge set from scratch after every event (slow).
Trajectory gillespie_run(const Graph& graph, const ModelParams& params, const std::vector<int>& initial_infectives,
                         std::uint64_t seed, const std::vector<double>& grid, bool verify_bookkeeping = false);

// Simulation on aggregate effective-degree counts with the network paired on demand.
// initial_per_degree[k] infectives of degree k are taken out of the susceptible pool.
Trajectory effective_degree_run(const std::vector<int>& degree_sequence, const ModelParams& params,
                                const std::vector<long>& initial_per_degree, std::uint64_t seed,
                                const std::vector<double>& grid);

// Per-degree counts of initial infectives in proportion to degree frequencies (largest remainder).
std::vector<long> proportional_initial_counts(const std::vector<int>& degree_sequence, int i0);
// Nodes realizing proportional_initial_counts, picked uniformly within each degree class.
std::vector<int> choose_initial_by_degree(const std::vector<int>& degree_sequence, int i0, std::uint64_t seed);
std::vector<int> choose_initial_uniform(int n, int i0, std::uint64_t seed);
// Deterministic sequence with round(n p_k) nodes of degree k (largest remainder, total n).
std::vector<int> mr_degree_sequence(const DegreeDistribution& dist, int n);

enum class NetworkKind { mr, nsw };
enum class Engine { gillespie, effective_degree };

struct EnsembleConfig {
    DegreeDistribution dist;
    std::vector<int> degree_sequence;  // MR only; derived from dist when empty
    NetworkKind network = NetworkKind::nsw;
    Engine engine = Engine::gillespie;
    int n = 1000;
    int i0 = 5;
    ModelParams params;
    std::vector<double> grid;
    bool keep_trajectories = false;
    int threads = 0;  // 0: NETSIR_THREADS or hardware concurrency
};

struct RunEnsemble {
    int n = 0;
    std::vector<double> grid;
    std::vector<std::uint64_t> seeds;
    std::vector<int> final_sizes;
    std::vector<double> extinction_times;
    std::vector<Trajectory> trajectories;  // empty unless requested
};

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);
// One replicate: graph (or degree draw), initial infectives and dynamics all derived from seed.
Trajectory simulate_once(const EnsembleConfig& config, std::uint64_t seed);
RunEnsemble run_ensemble(const EnsembleConfig& config, int n_runs, std::uint64_t master_seed);
int worker_count(int requested, int n_tasks);

struct MajorSplit {
    double p_hat = 0.0;
    std::vector<int> major;
    std::vector<int> minor;
};

// Major means final size > threshold * n; threshold in (0,1).
MajorSplit classify_major(const RunEnsemble& ensemble, double threshold_fraction);

struct TrajectorySummary {
    std::vector<double> times;
    std::vector<double> S_mean, S_sd, I_mean, I_sd, R_mean, R_sd;
};

TrajectorySummary summarize_trajectories(const RunEnsemble& ensemble);

}  // namespace netsir
