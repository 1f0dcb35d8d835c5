"""Muscle-length geometry and the serial-chain arm/head surrogate.

The muscle model is the two-segment triangle: a muscle spanning a hinge
joint has length ``lambda = sqrt(a^2 + b^2 - 2*a*b*cos(theta))`` where
``a`` and ``b`` are the segment lengths and ``theta`` is the inter-segment
angle.  The inverse recovers ``theta`` from a length via the law of
cosines.

The arm surrogate is a generic 7-DoF serial chain (3 shoulder, elbow
flexion, forearm pronosupination, 2 wrist) with configurable link lengths,
solved for hand position by damped-least-squares inverse kinematics.  The
head plant (neck pitch/roll/yaw plus eye tilt/version/vergence) is solved
analytically from target geometry.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OutOfRangeError


@dataclass(frozen=True)
class ArmGeometry:
    """Two muscle attachment lever lengths, in meters."""

    a: float
    b: float

    def __post_init__(self):
        if self.a <= 0 or self.b <= 0:
            raise ValueError(f"segment lengths must be positive, got a={self.a}, b={self.b}")


def muscle_length(geom: ArmGeometry, theta_deg: float) -> float:
    """Muscle length over a hinge joint opened to ``theta_deg``.

    Valid for 0 <= theta_deg <= 180; the result lies in [|a-b|, a+b].
    """
    if not 0.0 <= theta_deg <= 180.0:
        raise OutOfRangeError(f"theta must be in [0, 180] degrees, got {theta_deg}")
    theta = math.radians(theta_deg)
    sq = geom.a**2 + geom.b**2 - 2.0 * geom.a * geom.b * math.cos(theta)
    return math.sqrt(max(sq, 0.0))


def joint_angle_from_length(geom: ArmGeometry, lambda_m: float) -> float:
    """Inverse of :func:`muscle_length`: angle in degrees for a muscle length.

    Closed form from the law of cosines,
    ``theta = arccos((a^2 + b^2 - lambda^2) / (2*a*b))``.
    """
    lo, hi = abs(geom.a - geom.b), geom.a + geom.b
    # Tolerate float dust from a forward evaluation at the band edges.
    eps = 1e-12 * max(hi, 1.0)
    if not lo - eps <= lambda_m <= hi + eps:
        raise OutOfRangeError(
            f"length {lambda_m} outside reachable band [{lo}, {hi}]"
        )
    c = (geom.a**2 + geom.b**2 - lambda_m**2) / (2.0 * geom.a * geom.b)
    return math.degrees(math.acos(min(1.0, max(-1.0, c))))


# ---------------------------------------------------------------------------
# Serial-chain surrogate
# ---------------------------------------------------------------------------

ARM_JOINT_NAMES = (
    "shoulder_pitch",
    "shoulder_roll",
    "shoulder_yaw",
    "elbow_flex",
    "forearm_prono",
    "wrist_pitch",
    "wrist_yaw",
)

HEAD_JOINT_NAMES = (
    "neck_pitch",
    "neck_roll",
    "neck_yaw",
    "eyes_tilt",
    "eyes_version",
    "eyes_vergence",
)


@dataclass(frozen=True)
class KinematicChain:
    """Link lengths and frame offsets of the arm/head surrogate, in meters.

    World frame: x forward, y left, z up, origin at the torso.  The arm
    hangs straight down (-z) at the zero posture.
    """

    shoulder_offset: tuple[float, float, float] = (0.0, 0.11, 0.0)
    upper_arm: float = 0.15
    forearm: float = 0.15
    hand: float = 0.08
    head_offset: tuple[float, float, float] = (0.0, 0.0, 0.28)
    eye_baseline: float = 0.068
    head_gain: float = 0.7

    def __post_init__(self):
        for name in ("upper_arm", "forearm", "hand"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not 0.0 <= self.head_gain <= 1.0:
            raise ValueError("head_gain must lie in [0, 1]")
        if self.eye_baseline <= 0:
            raise ValueError("eye_baseline must be positive")

    @property
    def reach(self) -> float:
        return self.upper_arm + self.forearm + self.hand


def _rot_x(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[1, 0, 0], [0, c, -s], [0, s, c]])


def _rot_y(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, 0, s], [0, 1, 0], [-s, 0, c]])


def _rot_z(t: float) -> np.ndarray:
    c, s = math.cos(t), math.sin(t)
    return np.array([[c, -s, 0], [s, c, 0], [0, 0, 1]])


def arm_points(chain: KinematicChain, q_deg) -> np.ndarray:
    """World positions of shoulder, elbow, wrist, and hand for arm angles.

    ``q_deg`` holds the 7 arm joint values in degrees, ordered as
    :data:`ARM_JOINT_NAMES`.  Returns a 4x3 array.
    """
    q = np.radians(np.asarray(q_deg, dtype=float))
    if q.shape != (7,):
        raise ValueError(f"expected 7 arm angles, got shape {q.shape}")
    shoulder = np.asarray(chain.shoulder_offset, dtype=float)
    r_sh = _rot_y(q[0]) @ _rot_x(q[1]) @ _rot_z(q[2])
    elbow = shoulder + r_sh @ np.array([0.0, 0.0, -chain.upper_arm])
    r_el = r_sh @ _rot_y(q[3]) @ _rot_z(q[4])
    wrist = elbow + r_el @ np.array([0.0, 0.0, -chain.forearm])
    r_wr = r_el @ _rot_y(q[5]) @ _rot_x(q[6])
    hand = wrist + r_wr @ np.array([0.0, 0.0, -chain.hand])
    return np.stack([shoulder, elbow, wrist, hand])


def hand_position(chain: KinematicChain, q_deg) -> np.ndarray:
    return arm_points(chain, q_deg)[3]


def _hand_position_rad(chain: KinematicChain, q_rad: np.ndarray) -> np.ndarray:
    return hand_position(chain, np.degrees(q_rad))


def _jacobian_rad(chain: KinematicChain, q_rad: np.ndarray, eps: float = 1e-6) -> np.ndarray:
    """Numeric 3x7 position Jacobian, in meters per radian."""
    jac = np.empty((3, 7))
    base = _hand_position_rad(chain, q_rad)
    for i in range(7):
        probe = q_rad.copy()
        probe[i] += eps
        jac[:, i] = (_hand_position_rad(chain, probe) - base) / eps
    return jac


def solve_arm_ik(
    chain: KinematicChain,
    target_m,
    q0_deg,
    limits_deg,
    damping: float = 0.1,
    tol_m: float = 1e-3,
    max_iters: int = 200,
) -> tuple[np.ndarray, bool]:
    """Damped-least-squares IK for the hand position.

    Works in radians internally: iterates ``dq = J^T (J J^T + d^2 I)^-1 err``
    and clamps to ``limits_deg`` (a 7x2 array of [min, max]) after every
    step.  The damped step keeps the joint displacement minimum-norm on the
    redundant arm.  Returns ``(q_deg, converged)``; convergence means the
    hand is within ``tol_m`` of the target.
    """
    target = np.asarray(target_m, dtype=float)
    q = np.radians(np.array(q0_deg, dtype=float))
    lo = np.radians(np.asarray(limits_deg, dtype=float)[:, 0])
    hi = np.radians(np.asarray(limits_deg, dtype=float)[:, 1])
    eye = np.eye(3) * damping**2
    for _ in range(max_iters):
        err = target - _hand_position_rad(chain, q)
        if np.linalg.norm(err) <= tol_m:
            return np.degrees(q), True
        jac = _jacobian_rad(chain, q)
        dq = jac.T @ np.linalg.solve(jac @ jac.T + eye, err)
        # Cap the per-iteration step to keep the linearization honest.
        step = np.linalg.norm(dq)
        if step > 0.5:
            dq *= 0.5 / step
        q = np.clip(q + dq, lo, hi)
    ok = bool(np.linalg.norm(target - _hand_position_rad(chain, q)) <= tol_m)
    return np.degrees(q), ok


def gaze_to_target(chain: KinematicChain, target_m) -> tuple[float, float, float]:
    """Total gaze pitch, yaw, and vergence (degrees) for a world target.

    Vergence follows from the target distance and the interocular baseline.
    """
    head = np.asarray(chain.head_offset, dtype=float)
    v = np.asarray(target_m, dtype=float) - head
    dist = float(np.linalg.norm(v))
    if dist <= 1e-9:
        raise ValueError("gaze target coincides with the head origin")
    yaw = math.degrees(math.atan2(v[1], v[0]))
    pitch = math.degrees(math.atan2(v[2], math.hypot(v[0], v[1])))
    vergence = 2.0 * math.degrees(math.atan2(chain.eye_baseline / 2.0, dist))
    return pitch, yaw, vergence


def head_posture(chain: KinematicChain, target_m, head_limits_deg) -> np.ndarray:
    """Neck/eye angles (degrees) fixating a target, clamped to joint limits.

    The neck takes ``head_gain`` of the required pitch/yaw and the eyes
    cover whatever residual remains after the neck is clamped.  Neck roll
    is held at zero.
    """
    pitch, yaw, vergence = gaze_to_target(chain, target_m)
    limits = np.asarray(head_limits_deg, dtype=float)
    g = chain.head_gain
    neck_pitch = min(max(g * pitch, limits[0, 0]), limits[0, 1])
    neck_yaw = min(max(g * yaw, limits[2, 0]), limits[2, 1])
    eyes_tilt = min(max(pitch - neck_pitch, limits[3, 0]), limits[3, 1])
    eyes_version = min(max(yaw - neck_yaw, limits[4, 0]), limits[4, 1])
    vergence = min(max(vergence, limits[5, 0]), limits[5, 1])
    return np.array([neck_pitch, 0.0, neck_yaw, eyes_tilt, eyes_version, vergence])


# ---------------------------------------------------------------------------
# Minimum-jerk interpolation
# ---------------------------------------------------------------------------

def minimum_jerk_profile(tau) -> np.ndarray:
    """Normalized minimum-jerk position profile on tau in [0, 1].

    ``s(tau) = 10 tau^3 - 15 tau^4 + 6 tau^5`` rises monotonically from 0
    to 1 with zero velocity and acceleration at both ends; peak slope is
    15/8 at the midpoint.
    """
    tau = np.clip(np.asarray(tau, dtype=float), 0.0, 1.0)
    return tau**3 * (10.0 - 15.0 * tau + 6.0 * tau**2)


def minimum_jerk_segment(q_from, q_to, n_steps: int) -> np.ndarray:
    """Joint-space minimum-jerk segment over ``n_steps`` samples.

    Returns an ``n_steps x D`` array covering tau in (0, 1] so that
    consecutive segments chain without repeating the shared endpoint.
    """
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    q_from = np.asarray(q_from, dtype=float)
    q_to = np.asarray(q_to, dtype=float)
    tau = np.arange(1, n_steps + 1) / n_steps
    s = minimum_jerk_profile(tau)
    return q_from + s[:, None] * (q_to - q_from)
