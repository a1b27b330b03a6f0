#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "netsir/degree_model.hpp"
#include "netsir/epidemic_sim.hpp"
#include "netsir/params.hpp"

namespace netsir {

struct DegreeSpec {
    std::string kind = "poisson";  // poisson | geometric | empirical
    double lambda = 5.0;
    double p = 1.0 / 6.0;
    std::string file;
    int max_degree = -1;  // -1: 15 for poisson, 50 for geometric

    bool operator==(const DegreeSpec&) const = default;
};

struct ExperimentConfig {
    DegreeSpec degree;
    ModelParams model{1.5, 1.0, 2.0};
    std::string network = "nsw";  // mr | nsw
    std::string engine = "gillespie";  // gillespie | effective
    int n = 1000;
    int runs = 1000;
    int i0 = 5;
    std::uint64_t seed = 1;
    double threshold = 0.15;
    double t_end = 10.0;
    int grid_points = 101;
    double eps = 0.0;  // initial infected fraction for the deterministic layers; 0 = trace of infection
    std::string out_dir = ".";

    bool operator==(const ExperimentConfig& o) const;
};

// Flat "key = value" lines; '#' starts a comment. Unknown keys throw ConfigError.
ExperimentConfig parse_config(std::istream& in);
ExperimentConfig load_config(const std::string& path);
std::string serialize_config(const ExperimentConfig& cfg);
// Sets one dotted key from its text form. Throws ConfigError.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);
// "poisson:5", "geometric:0.1667", "empirical:path"
void apply_degree_flag(ExperimentConfig& cfg, const std::string& spec);
// Checks ranges; throws ConfigError.
void validate_config(const ExperimentConfig& cfg);

int resolved_max_degree(const DegreeSpec& spec);
DegreeDistribution make_distribution(const DegreeSpec& spec);
EnsembleConfig ensemble_config(const ExperimentConfig& cfg);

}  // namespace netsir
