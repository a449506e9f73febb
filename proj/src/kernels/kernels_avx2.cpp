#include "ctsim/kernels/kernels.hpp"

#if defined(CTSIM_HAVE_AVX2)

#include <immintrin.h>

#include <cmath>
#include <cstdint>
#include <limits>

// Compiled with -mavx2 and -ffp-contract=off; no FMA, so every lane performs
// exactly the scalar sequence of IEEE operations and results stay
// bit-identical to the reference kernels.

namespace cts::kernels::avx2 {

ArgMin argmin_dist2(const double* xs, const double* ys, std::size_t n, double px, double py) {
    ArgMin best{static_cast<std::size_t>(-1), std::numeric_limits<double>::infinity()};

    std::size_t i = 0;
    if (n >= 4) {
        const __m256d pxv = _mm256_set1_pd(px);
        const __m256d pyv = _mm256_set1_pd(py);
        __m256d best_d2 = _mm256_set1_pd(std::numeric_limits<double>::infinity());
        __m256i best_idx = _mm256_set1_epi64x(-1);
        __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
        const __m256i idx_step = _mm256_set1_epi64x(4);

        for (; i + 4 <= n; i += 4) {
            const __m256d dx = _mm256_sub_pd(_mm256_loadu_pd(xs + i), pxv);
            const __m256d dy = _mm256_sub_pd(_mm256_loadu_pd(ys + i), pyv);
            const __m256d d2 = _mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy));
            // Strict less-than: within a lane, indices grow, so the earliest
            // (smallest) index wins on ties.
            const __m256d lt = _mm256_cmp_pd(d2, best_d2, _CMP_LT_OQ);
            best_d2 = _mm256_blendv_pd(best_d2, d2, lt);
            best_idx = _mm256_castpd_si256(
                _mm256_blendv_pd(_mm256_castsi256_pd(best_idx), _mm256_castsi256_pd(idx), lt));
            idx = _mm256_add_epi64(idx, idx_step);
        }

        alignas(32) double d2s[4];
        alignas(32) std::int64_t idxs[4];
        _mm256_store_pd(d2s, best_d2);
        _mm256_store_si256(reinterpret_cast<__m256i*>(idxs), best_idx);
        for (int lane = 0; lane < 4; ++lane) {
            const auto lane_idx = static_cast<std::size_t>(idxs[lane]);
            if (d2s[lane] < best.dist2 ||
                (d2s[lane] == best.dist2 && lane_idx < best.index)) {
                best.dist2 = d2s[lane];
                best.index = lane_idx;
            }
        }
    }

    // Tail indices are larger than every vector-phase index, so strict
    // less-than preserves the tie-break.
    for (; i < n; ++i) {
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
    std::size_t i = 0;

    const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
    const __m256d epsv = _mm256_set1_pd(kCurvEps);
    const __m256d av = _mm256_set1_pd(a_lat_max);
    const __m256d vlim = _mm256_set1_pd(v_limit);

    for (; i + 4 <= n; i += 4) {
        const __m256d k = _mm256_and_pd(_mm256_loadu_pd(curvature + i), abs_mask);
        const __m256d curved = _mm256_cmp_pd(k, epsv, _CMP_GT_OQ);
        const __m256d cap = _mm256_sqrt_pd(_mm256_div_pd(av, k));
        // min_pd returns the second operand on ties, matching the scalar
        // `cap < v_limit ? cap : v_limit`.
        const __m256d capped = _mm256_min_pd(cap, vlim);
        _mm256_storeu_pd(out + i, _mm256_blendv_pd(vlim, capped, curved));
    }

    for (; i < n; ++i) {
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
    std::size_t i = 0;

    if (n >= 4) {
        const __m256d abs_mask = _mm256_castsi256_pd(_mm256_set1_epi64x(0x7fffffffffffffffLL));
        __m256d acc = _mm256_setzero_pd();
        for (; i + 4 <= n; i += 4) {
            acc = _mm256_max_pd(acc, _mm256_and_pd(_mm256_loadu_pd(values + i), abs_mask));
        }
        alignas(32) double lanes[4];
        _mm256_store_pd(lanes, acc);
        for (double lane : lanes) {
            if (lane > m) {
                m = lane;
            }
        }
    }

    for (; i < n; ++i) {
        const double a = std::fabs(values[i]);
        if (a > m) {
            m = a;
        }
    }
    return m;
}

}  // namespace cts::kernels::avx2

#endif  // CTSIM_HAVE_AVX2
