#include "netsir/ode.hpp"

#include <algorithm>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <stdexcept>
#include <string>

#include "netsir/errors.hpp"

namespace netsir {

namespace odeint = boost::numeric::odeint;

std::vector<std::vector<double>> integrate_on_grid(const OdeSystem& system, std::vector<double> w0, double t0,
                                                   const std::vector<double>& grid, const OdeTolerance& tol) {
    if (!std::is_sorted(grid.begin(), grid.end())) throw std::invalid_argument("time grid must be ascending");
    if (!grid.empty() && grid.front() < t0) throw std::invalid_argument("time grid starts before the initial time");
    std::vector<std::vector<double>> out;
    out.reserve(grid.size());
    if (grid.empty()) return out;

    const double span = std::max(grid.back() - t0, 1e-12);
    auto stepper = odeint::make_dense_output(tol.atol, tol.rtol, odeint::runge_kutta_dopri5<std::vector<double>>());
    auto rhs = [&system](const std::vector<double>& w, std::vector<double>& dw, double t) { system(w, dw, t); };
    stepper.initialize(w0, t0, std::min(1e-4, span * 1e-3));

    std::vector<double> w(w0.size());
    std::size_t next = 0;
    const std::size_t max_steps = 5'000'000;
    std::size_t steps = 0;
    try {
        while (next < grid.size()) {
            while (next < grid.size() && grid[next] <= stepper.current_time()) {
                if (grid[next] == t0 && steps == 0)
                    w = w0;
                else
                    stepper.calc_state(grid[next], w);
                out.push_back(w);
                ++next;
            }
            if (next == grid.size()) break;
            const auto [from, to] = stepper.do_step(rhs);
            ++steps;
            if (!(to > from) || steps > max_steps)
                throw NumericalError("ODE step size collapsed at t = " + std::to_string(from));
            for (double v : stepper.current_state())
                if (!std::isfinite(v)) throw NumericalError("ODE state became non-finite at t = " + std::to_string(to));
        }
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw NumericalError(std::string("ODE integration failed: ") + e.what());
    }
    return out;
}

std::vector<double> uniform_grid(double t_end, int n_points) {
    if (n_points < 2 || !(t_end > 0.0)) throw std::invalid_argument("grid needs t_end > 0 and at least 2 points");
    std::vector<double> g(static_cast<std::size_t>(n_points));
    for (int i = 0; i < n_points; ++i) g[static_cast<std::size_t>(i)] = t_end * i / (n_points - 1);
    g.back() = t_end;
    return g;
}

}  // namespace netsir
