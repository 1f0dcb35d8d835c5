import math

import numpy as np
import pytest

from posturemap.errors import OutOfRangeError
from posturemap.kinematics import (
    ArmGeometry,
    KinematicChain,
    arm_points,
    gaze_to_target,
    hand_position,
    head_posture,
    joint_angle_from_length,
    minimum_jerk_profile,
    minimum_jerk_segment,
    muscle_length,
    solve_arm_ik,
)

HEAD_LIMITS = np.array([
    [-40.0, 25.0], [-20.0, 20.0], [-55.0, 55.0],
    [-35.0, 30.0], [-50.0, 50.0], [0.0, 45.0],
])


class TestMuscleLength:
    def test_right_angle_unit_segments(self):
        assert muscle_length(ArmGeometry(1.0, 1.0), 90.0) == pytest.approx(math.sqrt(2), abs=1e-12)

    def test_degenerate_overlap(self):
        assert muscle_length(ArmGeometry(1.0, 1.0), 0.0) == pytest.approx(0.0, abs=1e-9)

    def test_direct_evaluation(self):
        # a^2 + b^2 - 2ab cos(120deg) = 0.09 + 0.0625 + 0.075 = 0.2275
        expected = math.sqrt(0.2275)
        assert muscle_length(ArmGeometry(0.30, 0.25), 120.0) == pytest.approx(expected, rel=1e-12)
        assert expected == pytest.approx(0.476970, abs=1e-6)

    def test_bounds(self):
        geom = ArmGeometry(0.3, 0.2)
        for theta in np.linspace(0.0, 180.0, 181):
            lam = muscle_length(geom, float(theta))
            assert abs(geom.a - geom.b) - 1e-12 <= lam <= geom.a + geom.b + 1e-12

    @pytest.mark.parametrize("theta", [-0.001, 180.001, 270.0])
    def test_domain_error(self, theta):
        with pytest.raises(OutOfRangeError):
            muscle_length(ArmGeometry(1.0, 1.0), theta)

    def test_monotonic_in_theta(self):
        geom = ArmGeometry(0.30, 0.25)
        thetas = np.arange(0.0, 180.0 + 0.1, 0.1)
        lams = [muscle_length(geom, float(t)) for t in thetas]
        assert all(b > a for a, b in zip(lams, lams[1:]))

    def test_invalid_geometry(self):
        with pytest.raises(ValueError):
            ArmGeometry(0.0, 1.0)
        with pytest.raises(ValueError):
            ArmGeometry(1.0, -0.5)


class TestJointAngleFromLength:
    def test_right_angle_inverse(self):
        assert joint_angle_from_length(ArmGeometry(1.0, 1.0), math.sqrt(2)) == pytest.approx(90.0, abs=1e-9)

    def test_fully_extended(self):
        assert joint_angle_from_length(ArmGeometry(1.0, 1.0), 2.0) == pytest.approx(180.0, abs=1e-9)

    def test_derived_roundtrip(self):
        geom = ArmGeometry(0.30, 0.25)
        lam = muscle_length(geom, 120.0)
        assert joint_angle_from_length(geom, lam) == pytest.approx(120.0, abs=1e-6)

    def test_roundtrip_sweep(self):
        geom = ArmGeometry(0.30, 0.25)
        for theta in np.linspace(1.0, 179.0, 357):
            lam = muscle_length(geom, float(theta))
            assert joint_angle_from_length(geom, lam) == pytest.approx(float(theta), abs=1e-9)

    @pytest.mark.parametrize("lam", [0.04, 0.56, -0.1])
    def test_out_of_band(self, lam):
        with pytest.raises(OutOfRangeError):
            joint_angle_from_length(ArmGeometry(0.30, 0.25), lam)


class TestArmChain:
    def test_zero_posture_hangs_down(self):
        chain = KinematicChain()
        hand = hand_position(chain, np.zeros(7))
        expected = np.asarray(chain.shoulder_offset) + [0.0, 0.0, -chain.reach]
        np.testing.assert_allclose(hand, expected, atol=1e-12)

    def test_points_are_chained(self):
        chain = KinematicChain()
        pts = arm_points(chain, [-60.0, 25.0, 10.0, 60.0, 5.0, -10.0, 15.0])
        np.testing.assert_allclose(np.linalg.norm(pts[1] - pts[0]), chain.upper_arm, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(pts[2] - pts[1]), chain.forearm, atol=1e-12)
        np.testing.assert_allclose(np.linalg.norm(pts[3] - pts[2]), chain.hand, atol=1e-12)

    def test_ik_reaches_targets(self, rng):
        chain = KinematicChain()
        limits = np.array([
            [-140, 40], [-10, 120], [-60, 90], [2, 145], [-90, 90], [-65, 65], [-45, 45]
        ], dtype=float)
        q = np.array([-60.0, 25.0, 10.0, 60.0, 0.0, 0.0, 0.0])
        hits = 0
        for _ in range(25):
            target = np.array([0.16, 0.09, 0.14]) + rng.uniform(-1, 1, 3) * [0.09, 0.07, 0.07]
            q_sol, ok = solve_arm_ik(chain, target, q, limits)
            if ok:
                hits += 1
                assert np.all(q_sol >= limits[:, 0] - 1e-9)
                assert np.all(q_sol <= limits[:, 1] + 1e-9)
                assert np.linalg.norm(hand_position(chain, q_sol) - target) <= 1e-3
                q = q_sol
        assert hits >= 20

    def test_ik_unreachable_reports_failure(self):
        chain = KinematicChain()
        limits = np.tile([[-180.0, 180.0]], (7, 1))
        _, ok = solve_arm_ik(chain, [1.0, 0.0, 0.0], np.zeros(7), limits)
        assert not ok


class TestGaze:
    def test_straight_ahead(self):
        chain = KinematicChain(head_offset=(0.0, 0.0, 0.3))
        pitch, yaw, vergence = gaze_to_target(chain, [0.5, 0.0, 0.3])
        assert pitch == pytest.approx(0.0, abs=1e-12)
        assert yaw == pytest.approx(0.0, abs=1e-12)
        assert vergence == pytest.approx(2 * math.degrees(math.atan2(chain.eye_baseline / 2, 0.5)))

    def test_vergence_shrinks_with_distance(self):
        chain = KinematicChain()
        _, _, near = gaze_to_target(chain, [0.2, 0.0, 0.28])
        _, _, far = gaze_to_target(chain, [0.6, 0.0, 0.28])
        assert near > far > 0

    def test_yaw_sign_symmetry(self):
        chain = KinematicChain(head_offset=(0.0, 0.0, 0.3))
        _, yaw_left, _ = gaze_to_target(chain, [0.3, 0.2, 0.3])
        _, yaw_right, _ = gaze_to_target(chain, [0.3, -0.2, 0.3])
        assert yaw_left == pytest.approx(-yaw_right)

    def test_head_posture_splits_gain_and_residual(self):
        chain = KinematicChain(head_gain=0.7)
        target = [0.3, 0.1, 0.1]
        pitch, yaw, _ = gaze_to_target(chain, target)
        head = head_posture(chain, target, HEAD_LIMITS)
        assert head[0] + head[3] == pytest.approx(pitch, abs=1e-9)
        assert head[2] + head[4] == pytest.approx(yaw, abs=1e-9)
        assert head[1] == 0.0

    def test_head_posture_respects_limits(self):
        chain = KinematicChain()
        head = head_posture(chain, [0.05, 0.4, -0.4], HEAD_LIMITS)
        assert np.all(head >= HEAD_LIMITS[:, 0] - 1e-12)
        assert np.all(head <= HEAD_LIMITS[:, 1] + 1e-12)

    def test_target_at_head_rejected(self):
        chain = KinematicChain()
        with pytest.raises(ValueError):
            gaze_to_target(chain, chain.head_offset)


class TestMinimumJerk:
    def test_endpoints(self):
        assert minimum_jerk_profile(0.0) == 0.0
        assert minimum_jerk_profile(1.0) == 1.0

    def test_monotone(self):
        tau = np.linspace(0, 1, 1001)
        s = minimum_jerk_profile(tau)
        assert np.all(np.diff(s) >= 0)

    def test_peak_slope_is_15_eighths(self):
        tau = np.linspace(0, 1, 100001)
        s = minimum_jerk_profile(tau)
        slope = np.diff(s) / np.diff(tau)
        assert slope.max() == pytest.approx(15.0 / 8.0, rel=1e-6)

    def test_zero_velocity_at_ends(self):
        h = 1e-5
        assert (minimum_jerk_profile(h) - minimum_jerk_profile(0.0)) / h == pytest.approx(0.0, abs=1e-9)
        assert (minimum_jerk_profile(1.0) - minimum_jerk_profile(1.0 - h)) / h == pytest.approx(0.0, abs=1e-9)

    def test_segment_shape_and_endpoint(self):
        seg = minimum_jerk_segment([0.0, 10.0], [1.0, -10.0], 40)
        assert seg.shape == (40, 2)
        np.testing.assert_allclose(seg[-1], [1.0, -10.0], atol=1e-12)
        assert np.all(seg[:, 0] >= 0.0) and np.all(seg[:, 0] <= 1.0)

    def test_segment_rejects_zero_steps(self):
        with pytest.raises(ValueError):
            minimum_jerk_segment([0.0], [1.0], 0)
