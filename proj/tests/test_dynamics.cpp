#include <doctest.h>

#include "platoon/dynamics.hpp"

using namespace platoon;

TEST_CASE("constant velocity advances position only") {
  const VehicleState next = av_step({0.0, 10.0}, 0.0, 0.1);
  CHECK(next.position == doctest::Approx(1.0).epsilon(1e-15));
  CHECK(next.velocity == 10.0);
}

TEST_CASE("position update uses the pre-update velocity") {
  const VehicleState next = av_step({0.0, 0.0}, 5.0, 0.1);
  CHECK(next.position == 0.0);
  CHECK(next.velocity == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("ten steps of unit acceleration from rest") {
  VehicleState s{0.0, 0.0};
  for (int i = 0; i < 10; ++i) s = av_step(s, 1.0, 0.1);
  CHECK(s.velocity == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(s.position == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("the kinematic identity holds at the bit level") {
  VehicleState s{3.25, 7.5};
  const double dt = 0.1;
  const VehicleState next = av_step(s, -2.0, dt);
  CHECK(next.position - s.position == dt * s.velocity);
}

TEST_CASE("dt must be positive") {
  CHECK_THROWS_AS(av_step({0.0, 0.0}, 0.0, 0.0), std::invalid_argument);
}

TEST_CASE("mean propagation examples") {
  CHECK(propagate_hv_mean(100.0, 10.0, 0.0, 0.1) ==
        doctest::Approx(101.0).epsilon(1e-15));
  CHECK(propagate_hv_mean(100.0, 10.0, 0.5, 0.1) ==
        doctest::Approx(101.05).epsilon(1e-15));
  CHECK(propagate_hv_mean(100.0, 10.0, -10.0, 0.1) ==
        doctest::Approx(100.0).epsilon(1e-15));
}

TEST_CASE("variance propagation examples") {
  CHECK(propagate_hv_variance(0.0, 1.0, 0.1) ==
        doctest::Approx(0.01).epsilon(1e-15));
  double v = 0.0;
  for (int i = 0; i < 10; ++i) v = propagate_hv_variance(v, 1.0, 0.1);
  CHECK(v == doctest::Approx(0.10).epsilon(1e-12));
  CHECK(propagate_hv_variance(0.37, 0.0, 0.1) == 0.37);
}

TEST_CASE("variance is nondecreasing along any horizon") {
  double v = 0.0;
  for (int i = 0; i < 50; ++i) {
    const double next = propagate_hv_variance(v, 0.3 * i, 0.1);
    CHECK(next >= v);
    v = next;
  }
}
