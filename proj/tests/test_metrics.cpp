#include "doctest.h"

#include <random>

#include "polelift/metrics.hpp"

using namespace polelift;

TEST_SUITE("metrics") {
  TEST_CASE("radial error excludes z") {
    CHECK(compute_radial_error(Vec3(0.03, 0.04, 0.12)) == doctest::Approx(0.05));
    CHECK(compute_radial_error(Vec3(0, 0, 1)) == 0.0);
    CHECK(compute_radial_error(Vec3(0.05, 0, 0)) == doctest::Approx(0.05));
  }

  TEST_CASE("tip error examples") {
    const Vec3 e_p(0.01, -0.02, 0.03);
    CHECK((compute_tip_error(e_p, Vec3::Zero(), 2.0) - e_p).norm() == 0.0);
    CHECK((compute_tip_error(Vec3::Zero(), Vec3(0.01, 0, 0), 2.0) - Vec3(0, 0.01, 0)).norm() < 1e-15);
  }

  TEST_CASE("tip error agrees with rotating the pole bottom, to second order") {
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int k = 0; k < 100; ++k) {
      const double L = 1.0 + u(rng) * 0.5 + 0.5;
      const Vec3 e_p = 0.02 * Vec3(u(rng), u(rng), u(rng));
      const Vec3 phi = 0.01 * Vec3(u(rng), u(rng), u(rng));
      const Mat3 r = Eigen::AngleAxisd(phi.norm(), phi.normalized()).toRotationMatrix();
      // Desired attitude identity; bottom point at -L/2 along body z.
      const Vec3 exact = e_p + r * Vec3(0, 0, -L / 2) - Vec3(0, 0, -L / 2);
      const Vec3 e_R = 0.5 * Vec3(r(2, 1) - r(1, 2), r(0, 2) - r(2, 0), r(1, 0) - r(0, 1));
      CHECK((compute_tip_error(e_p, e_R, L) - exact).norm() <= L * phi.squaredNorm());
    }
  }

  TEST_CASE("aggregates: mean <= max, per phase and overall") {
    MetricsRecorder rec;
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0.0, 0.05);
    for (int i = 0; i < 300; ++i) {
      rec.add({0.01 * (i + 1), i < 100 ? "A" : "B", u(rng), u(rng), u(rng) - 0.025, u(rng)});
    }
    CHECK(rec.per_phase().size() == 2);
    CHECK(rec.per_phase().at("A").radial.count == 100);
    CHECK(rec.overall().radial.count == 300);
    for (const auto& [name, a] : rec.per_phase()) {
      CHECK(a.radial.mean <= a.radial.max);
      CHECK(a.tip_radial.mean <= a.tip_radial.max);
      CHECK(a.roll.mean <= a.roll.max);
      CHECK(a.roll.mean >= 0.0);
    }
    double sum = 0.0;
    for (const auto& s : rec.samples()) sum += s.radial;
    CHECK(rec.overall().radial.mean == doctest::Approx(sum / 300));
  }

  TEST_CASE("samples must be time-monotone") {
    MetricsRecorder rec;
    rec.add({1.0, "A", 0, 0, 0, 0});
    CHECK_THROWS_AS(rec.add({1.0, "A", 0, 0, 0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(rec.add({0.5, "A", 0, 0, 0, 0}), std::invalid_argument);
  }
}
