#include "netsir/params.hpp"

#include <cmath>
#include <stdexcept>

namespace netsir {

void ModelParams::validate() const {
    if (!(beta >= 0.0) || !(gamma >= 0.0) || !(omega >= 0.0) || !std::isfinite(beta) || !std::isfinite(gamma) ||
        !std::isfinite(omega))
        throw std::invalid_argument("rates must be finite and nonnegative");
}

ModelParams increased_recovery(const ModelParams& p) { return ModelParams{p.beta, p.gamma + p.omega, 0.0}; }

}  // namespace netsir
