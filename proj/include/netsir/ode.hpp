#pragma once

#include <functional>
#include <vector>

namespace netsir {

struct OdeTolerance {
    double rtol = 1e-8;
    double atol = 1e-10;
};

using OdeSystem = std::function<void(const std::vector<double>& w, std::vector<double>& dwdt, double t)>;

// Adaptive Dormand-Prince 5(4) with dense output. grid must be ascending with grid.front() >= t0.
// Returns one state per grid time. Throws NumericalError on step collapse or non-finite state.
std::vector<std::vector<double>> integrate_on_grid(const OdeSystem& system, std::vector<double> w0, double t0,
                                                   const std::vector<double>& grid, const OdeTolerance& tol = {});

// n_points equally spaced times on [0, t_end], both ends included.
std::vector<double> uniform_grid(double t_end, int n_points);

}  // namespace netsir
