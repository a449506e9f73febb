#include <doctest.h>

#include <cmath>
#include <random>

#include "ctsim/controller.hpp"
#include "ctsim/errors.hpp"
#include "ctsim/vehicle_sim.hpp"

#include "../test_util.hpp"

using namespace cts;

TEST_CASE("compute_errors on-path aligned vehicle") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(20.0, 0.5);
    VehicleState vehicle;
    vehicle.x = 5.0;
    const ControlErrors e = compute_errors(vehicle, traj);
    CHECK(e.lateral_error == doctest::Approx(0.0));
    CHECK(e.heading_error == doctest::Approx(0.0));
    CHECK(e.reference_curvature == 0.0);
    CHECK(e.nearest_index == 10);

    CHECK_THROWS_AS(compute_errors(vehicle, LocalTrajectory{}), EmptyTrajectory);
}

TEST_CASE("compute_errors sign convention: left of path is positive") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(20.0, 0.5);
    VehicleState vehicle;
    vehicle.x = 5.0;
    vehicle.y = 1.0;  // +y is left of a +x path
    const ControlErrors e = compute_errors(vehicle, traj);
    CHECK(e.lateral_error == doctest::Approx(1.0));
    CHECK(e.heading_error == doctest::Approx(0.0));

    vehicle.y = -2.0;
    CHECK(compute_errors(vehicle, traj).lateral_error == doctest::Approx(-2.0));
}

TEST_CASE("compute_errors heading error is path minus vehicle, wrapped") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(20.0, 0.5);
    VehicleState vehicle;
    vehicle.x = 5.0;
    vehicle.heading = 0.3;
    CHECK(compute_errors(vehicle, traj).heading_error == doctest::Approx(-0.3));
    vehicle.heading = 3.0;
    const double wrapped = compute_errors(vehicle, traj).heading_error;
    CHECK(wrapped == doctest::Approx(wrap_angle(-3.0)));
    CHECK(std::fabs(wrapped) <= kPi);
}

TEST_CASE("compute_errors nearest point matches an exhaustive scan") {
    // Dense-sampled curved path against brute force.
    std::vector<SegmentPrimitive> prims;
    const Vec2 p0{10.0, 0.0};
    const Vec2 p3{20.0, 10.0};
    prims.push_back({StraightSegment{{0.0, 0.0}, p0}, 0, 3.0});
    prims.push_back(
        {BezierSegment{{p0, p0 + Vec2{4.0, 0.0}, p3 - Vec2{0.0, 4.0}, p3}}, 1, 3.0});
    const LocalTrajectory traj = sample_trajectory(prims, 0.1);

    std::mt19937_64 rng(0x5eed0020);
    std::uniform_real_distribution<double> coord(-2.0, 22.0);
    for (int iter = 0; iter < 100; ++iter) {
        VehicleState vehicle;
        vehicle.x = coord(rng);
        vehicle.y = coord(rng);
        const ControlErrors e = compute_errors(vehicle, traj);

        std::size_t best = 0;
        double best_d = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < traj.size(); ++i) {
            const double d = distance(traj.point(i).position, vehicle.position());
            if (d < best_d) {
                best_d = d;
                best = i;
            }
        }
        CHECK(e.nearest_index == best);
    }

    // Near the path (the operating regime) |lateral error| agrees with the
    // point-to-segment distance.
    std::uniform_real_distribution<double> offset(-0.5, 0.5);
    std::uniform_int_distribution<std::size_t> pick(1, traj.size() - 2);
    for (int iter = 0; iter < 100; ++iter) {
        const std::size_t i = pick(rng);
        const TrajectoryPoint& ref = traj.point(i);
        const Vec2 left{-std::sin(ref.heading), std::cos(ref.heading)};
        const double d = offset(rng);
        VehicleState vehicle;
        vehicle.x = ref.position.x + left.x * d;
        vehicle.y = ref.position.y + left.y * d;
        const ControlErrors e = compute_errors(vehicle, traj);

        double seg_d = std::numeric_limits<double>::infinity();
        for (std::size_t j = 0; j + 1 < traj.size(); ++j) {
            seg_d = std::min(seg_d, segment_distance(traj.point(j).position,
                                                     traj.point(j + 1).position,
                                                     vehicle.position()));
        }
        CHECK(std::fabs(e.lateral_error) == doctest::Approx(seg_d).epsilon(0.05).scale(0.01));
    }
}

TEST_CASE("lateral_control implements the control law arithmetic") {
    // U = a1*k + a2*L + a3*H with the worked numbers.
    ControlErrors e;
    e.reference_curvature = 0.1;
    e.lateral_error = 0.5;
    e.heading_error = 0.05;
    const ControllerGains gains{1.0, 0.2, 0.8};
    CHECK(lateral_control(e, gains, 0.48) == doctest::Approx(0.24).epsilon(1e-12));

    // Null input.
    CHECK(lateral_control(ControlErrors{}, gains, 0.48) == 0.0);
}

TEST_CASE("lateral_control saturates at the steering limit") {
    ControlErrors e;
    e.reference_curvature = 0.6;  // unclamped command would be 0.60
    const ControllerGains gains{1.0, 0.0, 0.0};
    CHECK(lateral_control(e, gains, 0.48) == 0.48);
    e.reference_curvature = -0.6;
    CHECK(lateral_control(e, gains, 0.48) == -0.48);
}

TEST_CASE("lateral_control clamp holds for randomized inputs") {
    std::mt19937_64 rng(0x5eed0021);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int iter = 0; iter < 1000; ++iter) {
        ControlErrors e;
        e.reference_curvature = val(rng);
        e.lateral_error = val(rng);
        e.heading_error = val(rng);
        const ControllerGains gains{val(rng), val(rng), val(rng)};
        CHECK(std::fabs(lateral_control(e, gains, 0.48)) <= 0.48);
    }
}

TEST_CASE("lateral_control is linear before the clamp") {
    ControlErrors e;
    e.reference_curvature = 0.02;
    e.lateral_error = 0.2;
    e.heading_error = -0.1;
    const ControllerGains gains{1.0, -0.35, 1.2};
    const double u1 = lateral_control(e, gains, 1e9);
    ControlErrors doubled = e;
    doubled.reference_curvature *= 2.0;
    doubled.lateral_error *= 2.0;
    doubled.heading_error *= 2.0;
    CHECK(lateral_control(doubled, gains, 1e9) == doctest::Approx(2.0 * u1).epsilon(1e-12));

    // With gains (0, 1, 0) the command has the sign of the lateral error.
    const ControllerGains unit{0.0, 1.0, 0.0};
    ControlErrors left;
    left.lateral_error = 0.7;
    CHECK(lateral_control(left, unit, 1.0) > 0.0);
    left.lateral_error = -0.7;
    CHECK(lateral_control(left, unit, 1.0) < 0.0);
}

TEST_CASE("longitudinal_control equilibrium and saturation") {
    const LongitudinalLimits limits{1.0, 3.0};
    CHECK(longitudinal_control(2.0, 2.0, 1.0, limits) == 0.0);
    CHECK(longitudinal_control(0.0, 2.0, 1.0, limits) == 1.0);  // clamp(2, -3, 1)
    CHECK(longitudinal_control(5.0, 0.0, 1.0, limits) == -3.0);
}

TEST_CASE("longitudinal closed loop converges like the first-order ODE") {
    // v' = k(v_t - v) without saturation settles to v_t within 2% after
    // 4 time constants; the discrete loop must match the analytic solution.
    const double k_v = 0.8;
    const double v_target = 2.0;
    const double dt = 0.02;
    double v = 0.0;
    double t = 0.0;
    const LongitudinalLimits limits{100.0, 100.0};  // no clamping
    while (t < 12.0) {
        v += longitudinal_control(v, v_target, k_v, limits) * dt;
        t += dt;
        const double analytic = v_target * (1.0 - std::exp(-k_v * t));
        CHECK(v == doctest::Approx(analytic).epsilon(0.02));
    }
    CHECK(v == doctest::Approx(v_target).epsilon(0.02));
}

TEST_CASE("emergency_check trips on corridor blockage only") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(40.0, 0.25);
    VehicleState vehicle;

    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), {}, 0.0, 50.0, 1.0));

    // Obstacle of radius 0.5 centered on the path 10 m ahead.
    std::vector<ObstacleSpec> on_path{{{10.0, 0.0}, 0.5, 0.0}};
    CHECK(emergency_check(vehicle, traj, traj.size(), on_path, 0.0, 50.0, 1.0));

    // Not yet active, or already gone.
    std::vector<ObstacleSpec> later{{{10.0, 0.0}, 0.5, 5.0, 9.0}};
    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), later, 1.0, 50.0, 1.0));
    CHECK(emergency_check(vehicle, traj, traj.size(), later, 5.0, 50.0, 1.0));
    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), later, 9.0, 50.0, 1.0));
}

TEST_CASE("emergency_check corridor boundary verified by dense sampling") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(40.0, 0.25);
    VehicleState vehicle;
    const double corridor = 1.0;
    const double radius = 0.5;

    // Just beyond corridor + radius: clear. Just inside: blocked.
    std::vector<ObstacleSpec> outside{{{10.0, corridor + radius + 0.05}, radius, 0.0}};
    std::vector<ObstacleSpec> inside{{{10.0, corridor + radius - 0.05}, radius, 0.0}};
    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), outside, 0.0, 50.0, corridor));
    CHECK(emergency_check(vehicle, traj, traj.size(), inside, 0.0, 50.0, corridor));

    // Brute-force distance from the obstacle to the densely sampled path.
    double min_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < traj.size(); ++i) {
        min_d = std::min(min_d, distance(traj.point(i).position, outside[0].position));
    }
    CHECK(min_d > corridor + radius);
}

TEST_CASE("emergency_check ignores obstacles behind or beyond sense range") {
    const LocalTrajectory traj = cts::testing::straight_trajectory(100.0, 0.25);
    VehicleState vehicle;
    vehicle.x = 50.0;

    std::vector<ObstacleSpec> behind{{{30.0, 0.0}, 0.5, 0.0}};
    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), behind, 0.0, 20.0, 1.0));

    std::vector<ObstacleSpec> too_far{{{90.0, 0.0}, 0.5, 0.0}};
    CHECK_FALSE(emergency_check(vehicle, traj, traj.size(), too_far, 0.0, 20.0, 1.0));
    CHECK(emergency_check(vehicle, traj, traj.size(), too_far, 0.0, 50.0, 1.0));

    // Released prefix bounds the check.
    std::vector<ObstacleSpec> unreleased{{{60.0, 0.0}, 0.5, 0.0}};
    CHECK_FALSE(emergency_check(vehicle, traj, 210, unreleased, 0.0, 50.0, 1.0));
}
