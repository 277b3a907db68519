#ifndef CHAOKEY_LYAPUNOV_HPP
#define CHAOKEY_LYAPUNOV_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

#include "chaokey/chen9.hpp"
#include "chaokey/errors.hpp"
#include "chaokey/integrate.hpp"

namespace chaokey {

struct LyapunovOptions {
    double dt = 1e-3;
    double total_time = 500.0;
    double transient_time = 50.0;
    int reorth_interval = 10; // steps between QR re-orthonormalizations
};

struct LyapunovSpectrum {
    std::array<double, 9> exponents{}; // sorted descending, nats per time unit
    double settle_time = 0.0;          // transient discarded before averaging
};

/// One row of the convergence trace: running exponent estimates at `time`.
struct LyapunovTracePoint {
    double time;
    std::array<double, 9> estimates; // sorted descending
};

namespace detail {

// Modified Gram-Schmidt on the columns of q; returns the diagonal of R
// (the stretch factors consumed by the Benettin averages).
template <std::size_t N>
std::array<double, N> mgs_reorthonormalize(std::array<std::array<double, N>, N>& q) {
    // q[k] is the k-th column vector.
    std::array<double, N> norms{};
    for (std::size_t k = 0; k < N; ++k) {
        double nrm2 = 0.0;
        for (std::size_t i = 0; i < N; ++i) nrm2 += q[k][i] * q[k][i];
        double nrm = std::sqrt(nrm2);
        norms[k] = nrm;
        if (nrm == 0.0) throw NonFiniteError("lyapunov: tangent vector collapsed to zero");
        for (std::size_t i = 0; i < N; ++i) q[k][i] /= nrm;
        for (std::size_t j = k + 1; j < N; ++j) {
            double dot = 0.0;
            for (std::size_t i = 0; i < N; ++i) dot += q[k][i] * q[j][i];
            for (std::size_t i = 0; i < N; ++i) q[j][i] -= dot * q[k][i];
        }
    }
    return norms;
}

} // namespace detail

/// Benettin/QR Lyapunov spectrum for any system exposing
/// derivative(state) and jacobian(state) with a constexpr `dim`.
///
/// State and tangent columns advance together under one RK4 step of the
/// augmented flow (J evaluated at the matching stage states), so the
/// variational integration is order-consistent with the orbit.
template <typename System>
std::array<double, System::dim>
lyapunov_spectrum_of(const System& sys,
                     const std::array<double, System::dim>& init,
                     const LyapunovOptions& opt,
                     std::vector<LyapunovTracePoint>* trace = nullptr) {
    constexpr std::size_t N = System::dim;
    using St = std::array<double, N>;
    using Basis = std::array<St, N>; // column vectors

    if (!(opt.dt > 0.0)) throw InvalidArgError("lyapunov: dt must be > 0");
    if (!(opt.total_time > opt.transient_time) || opt.transient_time < 0.0)
        throw InvalidArgError("lyapunov: need total_time > transient_time >= 0");
    if (opt.reorth_interval < 1) throw InvalidArgError("lyapunov: reorth_interval must be >= 1");

    const std::int64_t total_steps =
        static_cast<std::int64_t>(std::llround(opt.total_time / opt.dt));
    const std::int64_t transient_steps =
        static_cast<std::int64_t>(std::llround(opt.transient_time / opt.dt));

    St s = init;
    Basis q{};
    for (std::size_t k = 0; k < N; ++k) q[k][k] = 1.0;

    std::array<double, N> log_sum{};
    double averaged_time = 0.0;
    std::int64_t last_reorth = 0;

    auto apply_jac = [](const auto& jac, const Basis& b) {
        Basis out{};
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t i = 0; i < N; ++i) {
                double acc = 0.0;
                for (std::size_t j = 0; j < N; ++j) acc += jac[i][j] * b[k][j];
                out[k][i] = acc;
            }
        return out;
    };
    auto axpy = [](const Basis& b, double h, const Basis& d) {
        Basis out;
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t i = 0; i < N; ++i) out[k][i] = b[k][i] + h * d[k][i];
        return out;
    };

    const double dt = opt.dt;
    for (std::int64_t step = 1; step <= total_steps; ++step) {
        // Augmented RK4: orbit and tangent basis share stage states.
        const St k1 = sys.derivative(s);
        const Basis m1 = apply_jac(sys.jacobian(s), q);

        St s2;
        for (std::size_t i = 0; i < N; ++i) s2[i] = s[i] + 0.5 * dt * k1[i];
        const St k2 = sys.derivative(s2);
        const Basis m2 = apply_jac(sys.jacobian(s2), axpy(q, 0.5 * dt, m1));

        St s3;
        for (std::size_t i = 0; i < N; ++i) s3[i] = s[i] + 0.5 * dt * k2[i];
        const St k3 = sys.derivative(s3);
        const Basis m3 = apply_jac(sys.jacobian(s3), axpy(q, 0.5 * dt, m2));

        St s4;
        for (std::size_t i = 0; i < N; ++i) s4[i] = s[i] + dt * k3[i];
        const St k4 = sys.derivative(s4);
        const Basis m4 = apply_jac(sys.jacobian(s4), axpy(q, dt, m3));

        for (std::size_t i = 0; i < N; ++i)
            s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        for (std::size_t k = 0; k < N; ++k)
            for (std::size_t i = 0; i < N; ++i)
                q[k][i] += dt / 6.0 * (m1[k][i] + 2.0 * m2[k][i] + 2.0 * m3[k][i] + m4[k][i]);

        for (std::size_t i = 0; i < N; ++i)
            if (!std::isfinite(s[i])) throw NonFiniteError("lyapunov: orbit diverged");

        if (step % opt.reorth_interval == 0 || step == total_steps) {
            const auto norms = detail::mgs_reorthonormalize<N>(q);
            if (last_reorth >= transient_steps) {
                const double span = static_cast<double>(step - last_reorth) * dt;
                averaged_time += span;
                for (std::size_t k = 0; k < N; ++k) log_sum[k] += std::log(norms[k]);
                if (trace && averaged_time > 0.0) {
                    LyapunovTracePoint pt;
                    pt.time = static_cast<double>(step) * dt;
                    if constexpr (N == 9) {
                        for (std::size_t k = 0; k < N; ++k)
                            pt.estimates[k] = log_sum[k] / averaged_time;
                        std::sort(pt.estimates.begin(), pt.estimates.end(), std::greater<>());
                        trace->push_back(pt);
                    }
                }
            }
            last_reorth = step;
        }
    }

    if (averaged_time <= 0.0)
        throw InvalidArgError("lyapunov: no steps left after transient");

    std::array<double, N> exponents;
    for (std::size_t k = 0; k < N; ++k) exponents[k] = log_sum[k] / averaged_time;
    std::sort(exponents.begin(), exponents.end(), std::greater<>());
    return exponents;
}

/// Spectrum of the 9D system at the given parameters.
inline LyapunovSpectrum lyapunov_spectrum(const SystemParams& p, const State9& init,
                                          const LyapunovOptions& opt = {},
                                          std::vector<LyapunovTracePoint>* trace = nullptr) {
    p.validate();
    LyapunovSpectrum out;
    out.exponents = lyapunov_spectrum_of(Chen9System{p}, init, opt, trace);
    out.settle_time = opt.transient_time;
    return out;
}

} // namespace chaokey

#endif
