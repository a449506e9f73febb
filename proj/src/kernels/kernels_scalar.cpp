#include <cmath>
#include <limits>

#include "ctsim/kernels/kernels.hpp"

namespace cts::kernels::scalar {

ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py) {
    ArgMin best{static_cast<std::size_t>(-1), std::numeric_limits<double>::infinity()};
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = xs[i] - px;
        const double dy = ys[i] - py;
        const double d2 = dx * dx + dy * dy;
        if (d2 < best.dist2) {
            best.dist2 = d2;
            best.index = i;
        }
    }
    return best;
}

void curve_speed_caps(const double* curvature, std::size_t n, double a_lat_max, double v_limit,
                      double* out) {
    constexpr double kCurvEps = 1e-12;
    for (std::size_t i = 0; i < n; ++i) {
        const double k = std::fabs(curvature[i]);
        if (k > kCurvEps) {
            const double cap = std::sqrt(a_lat_max / k);
            out[i] = cap < v_limit ? cap : v_limit;
        } else {
            out[i] = v_limit;
        }
    }
}

double max_abs(const double* values, std::size_t n) {
    double m = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double a = std::fabs(values[i]);
        if (a > m) {
            m = a;
        }
    }
    return m;
}

}  // namespace cts::kernels::scalar
