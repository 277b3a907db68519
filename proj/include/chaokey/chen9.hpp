#ifndef CHAOKEY_CHEN9_HPP
#define CHAOKEY_CHEN9_HPP

#include <array>
#include <cmath>

#include "chaokey/errors.hpp"

namespace chaokey {

/// Nine real state variables u1..u9 (index 0..8).
using State9 = std::array<double, 9>;

using Mat9 = std::array<std::array<double, 9>, 9>;

/// Parameters of the 9D quaternion-extended Chen system. All positive.
struct SystemParams {
    double a = 27.0;
    double b = 23.0;
    double c = 1.0;

    void validate() const {
        if (!(a > 0.0) || !(b > 0.0) || !(c > 0.0))
            throw InvalidArgError("system parameters must be positive");
    }

    bool operator==(const SystemParams&) const = default;
};

inline bool all_finite(const State9& s) {
    for (double v : s)
        if (!std::isfinite(v)) return false;
    return true;
}

/// The 9D hyperchaotic flow obtained by expanding the complex Chen system
/// over the quaternions and splitting real components.
///
/// The ninth equation as published couples only the first three product
/// pairs; `include_u4u8` adds the u4*u8 term the full quaternion product
/// would carry. Default is the published form.
struct Chen9System {
    static constexpr std::size_t dim = 9;

    SystemParams params;
    bool include_u4u8 = false;

    State9 derivative(const State9& u) const {
        const double a = params.a, b = params.b, c = params.c;
        State9 d;
        d[0] = a * (u[4] - u[0]);
        d[1] = a * (u[5] - u[1]);
        d[2] = a * (u[6] - u[2]);
        d[3] = a * (u[7] - u[3]);
        d[4] = (b - a) * u[0] + b * u[4] - u[0] * u[8];
        d[5] = (b - a) * u[1] + b * u[5] - u[1] * u[8];
        d[6] = (b - a) * u[2] + b * u[6] - u[2] * u[8];
        d[7] = (b - a) * u[3] + b * u[7] - u[3] * u[8];
        d[8] = u[0] * u[4] + u[1] * u[5] + u[2] * u[6] - c * u[8];
        if (include_u4u8) d[8] += u[3] * u[7];
        return d;
    }

    Mat9 jacobian(const State9& u) const {
        const double a = params.a, b = params.b, c = params.c;
        Mat9 j{}; // zero-initialized
        for (int i = 0; i < 4; ++i) {
            j[i][i] = -a;
            j[i][i + 4] = a;
        }
        for (int i = 4; i < 8; ++i) {
            j[i][i - 4] = (b - a) - u[8];
            j[i][i] = b;
            j[i][8] = -u[i - 4];
        }
        j[8][0] = u[4];
        j[8][1] = u[5];
        j[8][2] = u[6];
        j[8][4] = u[0];
        j[8][5] = u[1];
        j[8][6] = u[2];
        j[8][8] = -c;
        if (include_u4u8) {
            j[8][3] = u[7];
            j[8][7] = u[3];
        }
        return j;
    }

    /// trace of the Jacobian, state-independent: 4(b-a) - c.
    double divergence() const { return 4.0 * (params.b - params.a) - params.c; }
};

inline State9 derivative(const State9& s, const SystemParams& p) {
    return Chen9System{p}.derivative(s);
}

inline Mat9 jacobian(const State9& s, const SystemParams& p) {
    return Chen9System{p}.jacobian(s);
}

} // namespace chaokey

#endif
