#include "doctest.h"

#include <cmath>

#include "polelift/gripper.hpp"

using namespace polelift;

namespace {
GripperGeometry geometry(double mu, double alpha) {
  GripperGeometry g;
  g.friction_coeff = mu;
  g.fold_angle = alpha;
  return g;
}
}  // namespace

TEST_SUITE("gripper") {
  TEST_CASE("radial tolerance is R - r_max") {
    GripperGeometry g = geometry(0.7, 0.5);
    CHECK(radial_tolerance(g) == doctest::Approx(0.05));
    g.pole_radius_max = g.incircle_radius;
    CHECK_THROWS_AS(validate(g), std::invalid_argument);
    g.pole_radius_max = 0.2;
    CHECK_THROWS_WITH_AS(validate(g), doctest::Contains("radial tolerance"), std::invalid_argument);
  }

  TEST_CASE("self-lock condition mu >= tan(alpha), including the boundary") {
    CHECK(self_lock_check(geometry(0.7, 0.5)));          // tan 0.5 = 0.546
    CHECK_FALSE(self_lock_check(geometry(0.5, 0.5)));
    CHECK(self_lock_check(geometry(std::tan(0.4), 0.4)));  // exactly at the boundary
    GripperGeometry g = geometry(0.6, 0.5);
    g.fold_angle_perturbation = {0.0, 0.1, 0.0};         // one triangle folded further
    CHECK_FALSE(self_lock_check(g));
  }

  TEST_CASE("lifting statics: force balance and Coulomb limit") {
    const GripperGeometry g = geometry(0.8, 0.6);
    const double weight = 3.0 * 9.81;
    const LiftingStatics s = lifting_statics(g, weight);
    const Vec3 total = s.friction_sum + s.normal_sum + Vec3(0, 0, -weight);
    CHECK(total.norm() < 1e-12 * weight);
    for (const auto& t : s.triangles) {
      CHECK(t.friction.z() > 0.0);
      CHECK(std::abs(t.normal.z()) < 1e-15);
      // f_n = f_f / tan(alpha) and friction within mu * f_n.
      CHECK(t.normal.norm() == doctest::Approx(t.friction.norm() / std::tan(0.6)));
      CHECK(t.friction.norm() <= g.friction_coeff * t.normal.norm() * (1 + 1e-12));
    }
    CHECK_THROWS_AS(lifting_statics(geometry(0.5, 0.6), weight), std::domain_error);
  }

  TEST_CASE("grasp sequencing: center then lock, 2 s each") {
    const GripperGeometry g = geometry(0.7, 0.5);
    const SequencerResult r = grasp_sequencer(GripperPhase::Open, GripperCommand::Grasp, true, 10.0, g);
    CHECK_FALSE(r.refusal.has_value());
    CHECK(r.phase == GripperPhase::Locked);
    REQUIRE(r.events.size() == 2);
    CHECK(r.events[0].kind == GripperEvent::Kind::CenterStart);
    CHECK(r.events[0].time == 10.0);
    CHECK(r.events[1].kind == GripperEvent::Kind::LockStart);
    CHECK(r.events[1].time == 12.0);
    CHECK(r.completion_time == 14.0);
    CHECK(phase_at(r, GripperPhase::Open, 11.0, g) == GripperPhase::Open);
    CHECK(phase_at(r, GripperPhase::Open, 12.5, g) == GripperPhase::Centered);
    CHECK(phase_at(r, GripperPhase::Open, 14.0, g) == GripperPhase::Locked);
  }

  TEST_CASE("release under load is refused, allowed on the ground") {
    const GripperGeometry g = geometry(0.7, 0.5);
    const SequencerResult refused = grasp_sequencer(GripperPhase::Locked, GripperCommand::Release, false, 0.0, g);
    REQUIRE(refused.refusal.has_value());
    CHECK(refused.phase == GripperPhase::Locked);
    CHECK(refused.events.empty());
    const SequencerResult ok = grasp_sequencer(GripperPhase::Locked, GripperCommand::Release, true, 0.0, g);
    CHECK_FALSE(ok.refusal.has_value());
    CHECK(ok.phase == GripperPhase::Open);
    CHECK(phase_at(ok, GripperPhase::Locked, ok.completion_time, g) == GripperPhase::Open);
  }
}
