#ifndef CHAOKEY_CSV_HPP
#define CHAOKEY_CSV_HPP

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include "chaokey/bifurcation.hpp"
#include "chaokey/complexity.hpp"
#include "chaokey/integrate.hpp"
#include "chaokey/lyapunov.hpp"

namespace chaokey::csv {

/// 17 significant digits: enough to reproduce any double bit-exactly.
inline std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

inline void write_trajectory(std::ostream& out, const Trajectory& traj) {
    out << "t,u1,u2,u3,u4,u5,u6,u7,u8,u9\n";
    for (std::size_t k = 0; k < traj.samples.size(); ++k) {
        out << num(traj.time_of(k));
        for (double v : traj.samples[k]) out << ',' << num(v);
        out << '\n';
    }
}

/// One row per recorded extremum; diverged parameter values emit no rows.
inline void write_bifurcation(std::ostream& out, const BifurcationData& data) {
    out << "param,value\n";
    for (std::size_t i = 0; i < data.values.size(); ++i)
        for (double extremum : data.extrema[i])
            out << num(data.values[i]) << ',' << num(extremum) << '\n';
}

/// Matrix CSV with axis header rows: first row the c-axis, first column the
/// a-axis. Missing cells (diverged trajectories) are left empty.
inline void write_grid(std::ostream& out, const std::vector<double>& a_values,
                       const std::vector<double>& c_values,
                       const std::vector<double>& cells) {
    out << "a\\c";
    for (double c : c_values) out << ',' << num(c);
    out << '\n';
    for (std::size_t i = 0; i < a_values.size(); ++i) {
        out << num(a_values[i]);
        for (std::size_t j = 0; j < c_values.size(); ++j) {
            const double v = cells[i * c_values.size() + j];
            out << ',';
            if (v == v) out << num(v); // NaN -> empty field
        }
        out << '\n';
    }
}

inline void write_lyapunov_trace(std::ostream& out,
                                 const std::vector<LyapunovTracePoint>& trace) {
    out << "time,LE1,LE2,LE3,LE4,LE5,LE6,LE7,LE8,LE9\n";
    for (const auto& pt : trace) {
        out << num(pt.time);
        for (double e : pt.estimates) out << ',' << num(e);
        out << '\n';
    }
}

} // namespace chaokey::csv

#endif
