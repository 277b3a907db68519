#ifndef CHAOKEY_INTEGRATE_HPP
#define CHAOKEY_INTEGRATE_HPP

#include <cstdint>
#include <vector>

#include "chaokey/chen9.hpp"
#include "chaokey/errors.hpp"

namespace chaokey {

/// Fixed-step trajectory. samples[k] is the state after (transient_steps+k+1)
/// integration steps from the initial condition; the initial condition itself
/// is never a sample.
struct Trajectory {
    double dt = 0.0;
    std::int64_t transient_steps = 0;
    std::vector<State9> samples;

    double time_of(std::size_t k) const {
        return dt * static_cast<double>(transient_steps + static_cast<std::int64_t>(k) + 1);
    }
};

/// One classical RK4 step of an autonomous system. dt == 0 returns s.
template <typename System>
typename std::array<double, System::dim>
rk4_step(const System& sys, const std::array<double, System::dim>& s, double dt) {
    constexpr std::size_t n = System::dim;
    using St = std::array<double, n>;

    const St k1 = sys.derivative(s);
    St tmp;
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k1[i];
    const St k2 = sys.derivative(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * dt * k2[i];
    const St k3 = sys.derivative(tmp);
    for (std::size_t i = 0; i < n; ++i) tmp[i] = s[i] + dt * k3[i];
    const St k4 = sys.derivative(tmp);

    St out;
    for (std::size_t i = 0; i < n; ++i)
        out[i] = s[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    return out;
}

inline State9 rk4_step(const State9& s, const SystemParams& p, double dt) {
    if (dt < 0.0) throw InvalidArgError("rk4_step: dt must be >= 0");
    State9 out = rk4_step(Chen9System{p}, s, dt);
    if (!all_finite(out)) throw NonFiniteError("rk4_step: state left the finite range");
    return out;
}

/// Integrates transient+steps RK4 steps, discards the first `transient`
/// states, returns the rest. Deterministic for fixed inputs.
inline Trajectory simulate(const State9& init, const SystemParams& p, double dt,
                           std::int64_t steps, std::int64_t transient,
                           bool include_u4u8 = false) {
    if (steps <= 0) throw InvalidArgError("simulate: steps must be > 0");
    if (transient < 0) throw InvalidArgError("simulate: transient must be >= 0");
    if (!(dt > 0.0)) throw InvalidArgError("simulate: dt must be > 0");
    p.validate();
    if (!all_finite(init)) throw NonFiniteError("simulate: non-finite initial condition");

    const Chen9System sys{p, include_u4u8};
    Trajectory traj;
    traj.dt = dt;
    traj.transient_steps = transient;
    traj.samples.reserve(static_cast<std::size_t>(steps));

    State9 s = init;
    for (std::int64_t k = 0; k < transient + steps; ++k) {
        s = rk4_step(sys, s, dt);
        if (!all_finite(s))
            throw NonFiniteError("simulate: trajectory diverged at step " + std::to_string(k + 1));
        if (k >= transient) traj.samples.push_back(s);
    }
    return traj;
}

} // namespace chaokey

#endif
