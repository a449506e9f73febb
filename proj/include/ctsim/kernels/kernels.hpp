#pragma once

#include <cstddef>
#include <string>

// Data-parallel inner loops of the simulation. The control loop runs a
// nearest-point scan over the sampled trajectory on every cycle (horizon
// clipping, tracking-error computation, obstacle corridor checks), plus
// elementwise curve-speed caps whenever the profile is rebuilt. Each kernel
// has a scalar reference implementation and an AVX2 variant selected at
// runtime; the two are bit-identical by construction (no FMA contraction)
// and equivalence-tested.

namespace cts::kernels {

struct ArgMin {
    std::size_t index;
    double dist2;
};

/// Index and squared distance of the point (xs[i], ys[i]) closest to
/// (px, py). Ties resolve to the smallest index. n == 0 yields
/// {npos, +inf}.
ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py);

/// out[i] = min(v_limit, sqrt(a_lat_max / |curvature[i]|)), with the curve
/// term dropped where |curvature| <= 1e-12.
void curve_speed_caps(const double* curvature, std::size_t n, double a_lat_max, double v_limit,
                      double* out);

/// max_i |values[i]|; 0 for n == 0.
double max_abs(const double* values, std::size_t n);

namespace scalar {
ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py);
void curve_speed_caps(const double* curvature, std::size_t n, double a_lat_max, double v_limit,
                      double* out);
double max_abs(const double* values, std::size_t n);
}  // namespace scalar

#if defined(CTSIM_HAVE_AVX2)
namespace avx2 {
ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py);
void curve_speed_caps(const double* curvature, std::size_t n, double a_lat_max, double v_limit,
                      double* out);
double max_abs(const double* values, std::size_t n);
}  // namespace avx2
#endif

/// True when the AVX2 variants are compiled in and the CPU supports them.
bool avx2_available();

/// Name of the backend currently dispatched to: "scalar" or "avx2".
/// Selection order: CTSIM_KERNELS env var if set, else the best available.
std::string active_backend();

/// Force a backend by name ("scalar" or "avx2"); throws if unavailable.
void force_backend(const std::string& name);

}  // namespace cts::kernels
