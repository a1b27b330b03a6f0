#pragma once

namespace netsir {

// Per-edge infection rate, per-infective recovery rate, per-edge dropping rate.
struct ModelParams {
    double beta = 0.0;
    double gamma = 0.0;
    double omega = 0.0;

    // Rate at which an S-I edge is consumed, by either transmission or dropping.
    double edge_rate() const { return beta + omega; }
    // Probability a consumed S-I edge is dropped rather than transmitting; 0 when no edge ever fires.
    double p_omega() const { return edge_rate() > 0.0 ? omega / edge_rate() : 0.0; }

    void validate() const;
};

// Same susceptible dynamics with dropping folded into recovery: (gamma + omega, 0).
ModelParams increased_recovery(const ModelParams& p);

}  // namespace netsir
