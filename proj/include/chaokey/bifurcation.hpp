#ifndef CHAOKEY_BIFURCATION_HPP
#define CHAOKEY_BIFURCATION_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "chaokey/chen9.hpp"
#include "chaokey/detail/parallel.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/integrate.hpp"

namespace chaokey {

enum class ParamAxis { A, B, C };

inline const char* param_axis_name(ParamAxis axis) {
    switch (axis) {
        case ParamAxis::A: return "a";
        case ParamAxis::B: return "b";
        default: return "c";
    }
}

inline ParamAxis param_axis_from_name(const std::string& name) {
    if (name == "a") return ParamAxis::A;
    if (name == "b") return ParamAxis::B;
    if (name == "c") return ParamAxis::C;
    throw InvalidArgError("unknown parameter axis: " + name);
}

struct BifurcationData {
    ParamAxis axis = ParamAxis::A;
    int component = 0;
    std::vector<double> values;               // ascending parameter values
    std::vector<std::vector<double>> extrema; // local maxima per value
    // per-point NonFinite flag; uint8_t instead of bool so parallel workers
    // can write distinct elements without touching shared bits
    std::vector<std::uint8_t> diverged;
};

/// Local maxima of one component after the transient: sample m is a maximum
/// when x[m-1] < x[m] > x[m+1].
inline std::vector<double> local_maxima(const std::vector<State9>& samples, int component) {
    std::vector<double> out;
    for (std::size_t m = 1; m + 1 < samples.size(); ++m) {
        const double prev = samples[m - 1][component];
        const double cur = samples[m][component];
        const double next = samples[m + 1][component];
        if (prev < cur && cur > next) out.push_back(cur);
    }
    return out;
}

/// Sweeps one parameter over [lo, hi] and records the attractor's local
/// maxima at each value. Divergence at a parameter value is recorded
/// per-point, never fatal for the scan.
inline BifurcationData bifurcation_scan(const SystemParams& base, ParamAxis vary,
                                        double lo, double hi, int n_points,
                                        int component = 0, double dt = 1e-3,
                                        std::int64_t steps = 100000,
                                        std::int64_t transient = 50000,
                                        const State9& init = {0.1, 0.1, 0.1, 0.1, 0.1,
                                                              0.1, 0.1, 0.1, 0.1}) {
    if (!(lo < hi)) throw InvalidArgError("bifurcation_scan: need lo < hi");
    if (n_points < 2) throw InvalidArgError("bifurcation_scan: need n_points >= 2");
    if (component < 0 || component > 8)
        throw InvalidArgError("bifurcation_scan: component index out of range");

    BifurcationData data;
    data.axis = vary;
    data.component = component;
    data.values.resize(n_points);
    data.extrema.resize(n_points);
    data.diverged.assign(n_points, false);
    for (int i = 0; i < n_points; ++i)
        data.values[i] = lo + (hi - lo) * static_cast<double>(i) / (n_points - 1);

    detail::parallel_for(static_cast<std::size_t>(n_points), [&](std::size_t i) {
        SystemParams p = base;
        switch (vary) {
            case ParamAxis::A: p.a = data.values[i]; break;
            case ParamAxis::B: p.b = data.values[i]; break;
            case ParamAxis::C: p.c = data.values[i]; break;
        }
        try {
            const Trajectory traj = simulate(init, p, dt, steps, transient);
            data.extrema[i] = local_maxima(traj.samples, component);
        } catch (const NonFiniteError&) {
            data.diverged[i] = 1;
        }
    });
    return data;
}

} // namespace chaokey

#endif
