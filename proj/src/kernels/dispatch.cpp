#include <cstdlib>
#include <string>

#include "ctsim/errors.hpp"
#include "ctsim/kernels/kernels.hpp"

namespace cts::kernels {

namespace {

struct Backend {
    const char* name;
    ArgMin (*argmin_dist2)(const double*, const double*, std::size_t, double, double);
    void (*curve_speed_caps)(const double*, std::size_t, double, double, double*);
    double (*max_abs)(const double*, std::size_t);
};

constexpr Backend kScalar{"scalar", &scalar::argmin_dist2, &scalar::curve_speed_caps,
                          &scalar::max_abs};

#if defined(CTSIM_HAVE_AVX2)
constexpr Backend kAvx2{"avx2", &avx2::argmin_dist2, &avx2::curve_speed_caps, &avx2::max_abs};
#endif

bool cpu_has_avx2() {
#if defined(CTSIM_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
    return __builtin_cpu_supports("avx2") != 0;
#else
    return false;
#endif
}

const Backend* backend_by_name(const std::string& name) {
#if defined(CTSIM_HAVE_AVX2)
    if (name == "avx2") {
        if (!cpu_has_avx2()) {
            throw ConfigError("kernel backend 'avx2' not supported by this CPU");
        }
        return &kAvx2;
    }
#endif
    if (name == "scalar") {
        return &kScalar;
    }
    throw ConfigError("unknown kernel backend '" + name + "'");
}

const Backend* select_default() {
    if (const char* env = std::getenv("CTSIM_KERNELS")) {
        return backend_by_name(env);
    }
#if defined(CTSIM_HAVE_AVX2)
    if (cpu_has_avx2()) {
        return &kAvx2;
    }
#endif
    return &kScalar;
}

const Backend*& active() {
    static const Backend* current = select_default();
    return current;
}

}  // namespace

bool avx2_available() { return cpu_has_avx2(); }

std::string active_backend() { return active()->name; }

void force_backend(const std::string& name) { active() = backend_by_name(name); }

ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py) {
    return active()->argmin_dist2(xs, ys, n, px, py);
}

void curve_speed_caps(const double* curvature, std::size_t n, double a_lat_max, double v_limit,
                      double* out) {
    active()->curve_speed_caps(curvature, n, a_lat_max, v_limit, out);
}

double max_abs(const double* values, std::size_t n) { return active()->max_abs(values, n); }

}  // namespace cts::kernels
