#include "netsir/io.hpp"

#include <charconv>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace netsir {

std::string format_exact(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

void write_ensemble_csv(std::ostream& out, const RunEnsemble& ens) {
    out << "run,seed,final_size,extinction_time\n";
    for (std::size_t r = 0; r < ens.final_sizes.size(); ++r)
        out << r << ',' << ens.seeds[r] << ',' << ens.final_sizes[r] << ',' << format_exact(ens.extinction_times[r]) << '\n';
}

void write_trajectory_csv(std::ostream& out, const TrajectorySummary& s) {
    out << "time,S_mean,S_sd,I_mean,I_sd,R_mean,R_sd\n";
    for (std::size_t k = 0; k < s.times.size(); ++k)
        out << format_exact(s.times[k]) << ',' << format_exact(s.S_mean[k]) << ',' << format_exact(s.S_sd[k]) << ','
            << format_exact(s.I_mean[k]) << ',' << format_exact(s.I_sd[k]) << ',' << format_exact(s.R_mean[k]) << ','
            << format_exact(s.R_sd[k]) << '\n';
}

void write_ode_csv(std::ostream& out, const std::vector<DeterministicState>& series, bool per_degree) {
    out << "t,x_total,y_total,z_total,x_E,y_E,z_E";
    const std::size_t m1 = series.empty() ? 0 : series.front().x.size();
    if (per_degree) {
        for (std::size_t i = 0; i < m1; ++i) out << ",x_" << i;
        for (std::size_t i = 0; i < m1; ++i) out << ",y_" << i;
    }
    out << '\n';
    for (const auto& s : series) {
        const double xt = s.x_total(), yt = s.y_total();
        out << format_exact(s.t) << ',' << format_exact(xt) << ',' << format_exact(yt) << ','
            << format_exact(1.0 - xt - yt) << ',' << format_exact(s.x_E()) << ',' << format_exact(s.y_E()) << ','
            << format_exact(s.z_E);
        if (per_degree) {
            for (double v : s.x) out << ',' << format_exact(v);
            for (double v : s.y) out << ',' << format_exact(v);
        }
        out << '\n';
    }
}

void write_covariance_csv(std::ostream& out, const std::vector<CovariancePoint>& series) {
    out << "t,x_total,y_total,var_S,var_I,cov_SI\n";
    for (const auto& p : series)
        out << format_exact(p.state.t) << ',' << format_exact(p.state.x_total()) << ','
            << format_exact(p.state.y_total()) << ',' << format_exact(p.var_susceptible) << ','
            << format_exact(p.var_infective) << ',' << format_exact(p.cov_si) << '\n';
}

void write_variance_csv(std::ostream& out, const std::vector<VarianceRow>& rows) {
    out << "model,dist,beta,gamma,omega,z,rho,sigma2_mr,sigma2_0,sigma2_nsw\n";
    for (const auto& r : rows)
        out << r.model << ',' << r.dist << ',' << format_exact(r.params.beta) << ',' << format_exact(r.params.gamma)
            << ',' << format_exact(r.params.omega) << ',' << format_exact(r.result.z) << ','
            << format_exact(r.result.rho) << ',' << format_exact(r.result.sigma2_mr) << ','
            << format_exact(r.result.sigma2_0) << ',' << format_exact(r.result.sigma2_mr + r.result.sigma2_0) << '\n';
}

void write_pmajor_csv(std::ostream& out, const std::vector<PmajorRow>& rows) {
    out << "variant,R0,sigma,p_maj\n";
    for (const auto& r : rows)
        out << r.variant << ',' << format_exact(r.r0) << ',' << format_exact(r.sigma) << ',' << format_exact(r.p_maj)
            << '\n';
}

void write_overlay_csv(std::ostream& out, const std::vector<std::pair<double, double>>& overlay) {
    out << "x,density\n";
    for (const auto& [x, d] : overlay) out << format_exact(x) << ',' << format_exact(d) << '\n';
}

NumericTable read_numeric_csv(std::istream& in) {
    NumericTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty CSV");
    std::istringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) t.header.push_back(cell);
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<double> row;
        std::istringstream ls(line);
        for (std::string cell; std::getline(ls, cell, ',');) {
            double v = 0.0;
            const auto res = std::from_chars(cell.data(), cell.data() + cell.size(), v);
            if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
                throw std::runtime_error("non-numeric CSV cell '" + cell + "'");
            row.push_back(v);
        }
        if (row.size() != t.header.size()) throw std::runtime_error("CSV row width does not match header");
        t.rows.push_back(std::move(row));
    }
    return t;
}

}  // namespace netsir
