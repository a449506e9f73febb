#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "ctsim/kernels/kernels.hpp"

using namespace cts;

namespace {

struct Arrays {
    std::vector<double> xs;
    std::vector<double> ys;
};

Arrays random_arrays(std::mt19937_64& rng, std::size_t n) {
    std::uniform_real_distribution<double> coord(-100.0, 100.0);
    Arrays a;
    for (std::size_t i = 0; i < n; ++i) {
        a.xs.push_back(coord(rng));
        a.ys.push_back(coord(rng));
    }
    return a;
}

}  // namespace

TEST_CASE("scalar argmin_dist2 basics") {
    const std::vector<double> xs{0.0, 1.0, 2.0, 3.0};
    const std::vector<double> ys{0.0, 0.0, 0.0, 0.0};
    const auto r = kernels::scalar::argmin_dist2(xs.data(), ys.data(), 4, 2.1, 0.0);
    CHECK(r.index == 2);
    CHECK(r.dist2 == doctest::Approx(0.01));

    const auto empty = kernels::scalar::argmin_dist2(nullptr, nullptr, 0, 0.0, 0.0);
    CHECK(empty.index == static_cast<std::size_t>(-1));
    CHECK(std::isinf(empty.dist2));
}

TEST_CASE("scalar argmin_dist2 tie-break picks the smallest index") {
    // Points 1 and 3 are both at distance 1.
    const std::vector<double> xs{5.0, 1.0, 5.0, 1.0};
    const std::vector<double> ys{5.0, 0.0, 5.0, 0.0};
    const auto r = kernels::scalar::argmin_dist2(xs.data(), ys.data(), 4, 0.0, 0.0);
    CHECK(r.index == 1);
}

TEST_CASE("scalar curve_speed_caps") {
    const std::vector<double> k{0.0, 0.2, -0.2, 1e-13, 4.0};
    std::vector<double> out(k.size());
    kernels::scalar::curve_speed_caps(k.data(), k.size(), 1.0, 3.0, out.data());
    CHECK(out[0] == 3.0);
    CHECK(out[1] == doctest::Approx(std::sqrt(5.0)).epsilon(1e-12));
    CHECK(out[2] == out[1]);
    CHECK(out[3] == 3.0);  // below the curvature floor
    CHECK(out[4] == 0.5);
}

TEST_CASE("scalar max_abs") {
    const std::vector<double> v{1.0, -7.5, 3.0};
    CHECK(kernels::scalar::max_abs(v.data(), v.size()) == 7.5);
    CHECK(kernels::scalar::max_abs(nullptr, 0) == 0.0);
}

#if defined(CTSIM_HAVE_AVX2)
TEST_CASE("avx2 kernels are bit-identical to the scalar reference") {
    if (!kernels::avx2_available()) {
        return;  // host without AVX2; the dispatcher already falls back
    }
    std::mt19937_64 rng(0x5eed0001);
    std::uniform_real_distribution<double> coord(-100.0, 100.0);

    // Sweep sizes across the vector width and remainder cases.
    for (std::size_t n : {0, 1, 2, 3, 4, 5, 7, 8, 9, 15, 16, 17, 63, 64, 65, 1000}) {
        const Arrays a = random_arrays(rng, n);
        const double px = coord(rng);
        const double py = coord(rng);

        const auto rs = kernels::scalar::argmin_dist2(a.xs.data(), a.ys.data(), n, px, py);
        const auto rv = kernels::avx2::argmin_dist2(a.xs.data(), a.ys.data(), n, px, py);
        CHECK(rs.index == rv.index);
        CHECK(rs.dist2 == rv.dist2);  // bitwise: same IEEE ops in both paths

        std::vector<double> cs(n), cv(n);
        kernels::scalar::curve_speed_caps(a.xs.data(), n, 1.3, 2.7, cs.data());
        kernels::avx2::curve_speed_caps(a.xs.data(), n, 1.3, 2.7, cv.data());
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(cs[i] == cv[i]);
        }

        CHECK(kernels::scalar::max_abs(a.ys.data(), n) ==
              kernels::avx2::max_abs(a.ys.data(), n));
    }
}

TEST_CASE("avx2 argmin tie-break matches scalar across lanes") {
    if (!kernels::avx2_available()) {
        return;
    }
    // Identical points everywhere: index 0 must win in both paths.
    std::vector<double> xs(37, 1.5), ys(37, -2.5);
    const auto rs = kernels::scalar::argmin_dist2(xs.data(), ys.data(), xs.size(), 0.0, 0.0);
    const auto rv = kernels::avx2::argmin_dist2(xs.data(), ys.data(), xs.size(), 0.0, 0.0);
    CHECK(rs.index == 0);
    CHECK(rv.index == 0);
    CHECK(rs.dist2 == rv.dist2);
}
#endif

TEST_CASE("dispatcher backend can be forced") {
    const std::string before = kernels::active_backend();
    kernels::force_backend("scalar");
    CHECK(kernels::active_backend() == "scalar");
    const std::vector<double> xs{0.0, 1.0};
    const std::vector<double> ys{0.0, 0.0};
    CHECK(kernels::argmin_dist2(xs.data(), ys.data(), 2, 0.9, 0.0).index == 1);
    kernels::force_backend(before);
}
