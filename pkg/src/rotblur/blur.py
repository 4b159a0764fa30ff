"""Rotational motion blur: piecewise motion profiles, blur synthesis, and
the complex attenuation constants the blur applies to angular harmonics.

A motion profile is the angular displacement psi(t) of the object over the
exposure [0, T], given as contiguous segments each quadratic in t.  Blurring
averages rotated copies of the image over the exposure; a harmonic of index
``delta`` is attenuated by (1/T) * sum_k integral exp(i*delta*psi_k(t)) dt.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage
from scipy.integrate import quad

from .image import as_image, centered_coords, image_center


@dataclass(frozen=True)
class MotionSegment:
    """psi(t) = a0 + a1*(t - t_start) + a2*(t - t_start)^2 on [t_start, t_end]."""

    t_start: float
    t_end: float
    a0: float
    a1: float
    a2: float

    def __post_init__(self):
        if not self.t_end > self.t_start:
            raise ValueError(f"segment must have t_end > t_start, got [{self.t_start}, {self.t_end}]")

    def psi(self, t):
        u = np.asarray(t, dtype=np.float64) - self.t_start
        return self.a0 + self.a1 * u + self.a2 * u * u


@dataclass(frozen=True)
class MotionProfile:
    """Ordered, contiguous motion segments covering [0, exposure]."""

    segments: tuple[MotionSegment, ...]
    exposure: float

    def __post_init__(self):
        if not self.exposure > 0:
            raise ValueError(f"exposure must be positive, got {self.exposure}")
        segs = tuple(self.segments)
        if not segs:
            raise ValueError("profile needs at least one segment")
        if not math.isclose(segs[0].t_start, 0.0, abs_tol=1e-12):
            raise ValueError("first segment must start at t=0")
        for prev, cur in zip(segs, segs[1:]):
            if not math.isclose(prev.t_end, cur.t_start, rel_tol=1e-12, abs_tol=1e-12):
                raise ValueError("segments must be contiguous")
        if not math.isclose(segs[-1].t_end, self.exposure, rel_tol=1e-12, abs_tol=1e-12):
            raise ValueError("last segment must end at the exposure time")
        object.__setattr__(self, "segments", segs)


def profile_ucm(omega: float, exposure: float) -> MotionProfile:
    """Uniform circular motion: psi(t) = omega * t."""
    return MotionProfile((MotionSegment(0.0, exposure, 0.0, omega, 0.0),), exposure)


def profile_uacm(omega: float, alpha: float, exposure: float) -> MotionProfile:
    """Uniformly accelerated circular motion: psi(t) = omega*t + alpha*t^2/2."""
    return MotionProfile((MotionSegment(0.0, exposure, 0.0, omega, alpha / 2.0),), exposure)


def profile_rcm(omega: float, alpha: float, exposure: float) -> MotionProfile:
    """Reciprocating circular motion: counterclockwise at ``omega`` until T/2,
    then reversing with deceleration ``alpha`` until T."""
    if not exposure > 0:
        raise ValueError(f"exposure must be positive, got {exposure}")
    half = exposure / 2.0
    return MotionProfile(
        (
            MotionSegment(0.0, half, 0.0, omega, 0.0),
            MotionSegment(half, exposure, omega * half, -omega, -alpha / 2.0),
        ),
        exposure,
    )


def psi_eval(profile: MotionProfile, t: float) -> float:
    """Angular displacement at time t; boundary ties go to the later segment."""
    if not (0.0 <= t <= profile.exposure):
        raise ValueError(f"t={t} outside [0, {profile.exposure}]")
    for seg in reversed(profile.segments):
        if t >= seg.t_start:
            return float(seg.psi(t))
    return float(profile.segments[0].psi(t))


def _sample_angles(profile: MotionProfile, n_steps: int) -> np.ndarray:
    """Midpoint-rule sample angles psi(t_i) over the exposure."""
    t = (np.arange(n_steps) + 0.5) * (profile.exposure / n_steps)
    psi = np.empty(n_steps)
    for seg in profile.segments:
        sel = t >= seg.t_start
        psi[sel] = seg.psi(t[sel])
    return psi


def angular_sweep(profile: MotionProfile) -> float:
    """Total angular range max(psi) - min(psi) over the exposure."""
    lo = math.inf
    hi = -math.inf
    for seg in profile.segments:
        candidates = [seg.t_start, seg.t_end]
        if seg.a2 != 0.0:
            vertex = seg.t_start - seg.a1 / (2.0 * seg.a2)
            if seg.t_start < vertex < seg.t_end:
                candidates.append(vertex)
        for t in candidates:
            v = float(seg.psi(t))
            lo = min(lo, v)
            hi = max(hi, v)
    return hi - lo


def default_n_steps(profile: MotionProfile, rad_per_step: float = 0.02) -> int:
    """Step count keeping the per-step rotation under ``rad_per_step``."""
    sweep = angular_sweep(profile)
    return max(120, int(math.ceil(sweep / rad_per_step)) if sweep > 0 else 0)


def synthesize_blur(img: np.ndarray, profile: MotionProfile, n_steps: int | None = None) -> np.ndarray:
    """Average of rotated copies of ``img`` over the motion profile.

    The time integral is approximated by the midpoint rule with ``n_steps``
    uniform samples; each sample rotates the image about its center with the
    same inverse-map bilinear kernel as apply_similarity.
    """
    img = as_image(img)
    if n_steps is None:
        n_steps = default_n_steps(profile)
    if n_steps < 1:
        raise ValueError("n_steps must be >= 1")
    cx, cy = image_center(img)
    x, y = centered_coords(img.shape)
    xg, yg = np.meshgrid(x, y)
    acc = np.zeros_like(img)
    for psi in _sample_angles(profile, n_steps):
        cos_p, sin_p = math.cos(psi), math.sin(psi)
        rows = cy - (-xg * sin_p + yg * cos_p)
        cols = cx + (xg * cos_p + yg * sin_p)
        acc += ndimage.map_coordinates(img, [rows, cols], order=1, mode="constant", cval=0.0)
    return acc / n_steps


def _segment_phasor_closed(seg: MotionSegment, delta: int) -> complex:
    """Closed-form integral of exp(i*delta*psi) over a linear segment."""
    length = seg.t_end - seg.t_start
    lead = complex(math.cos(delta * seg.a0), math.sin(delta * seg.a0))
    rate = delta * seg.a1
    if rate == 0.0:
        return lead * length
    return lead * (np.exp(1j * rate * length) - 1.0) / (1j * rate)


def _segment_phasor_quadrature(seg: MotionSegment, delta: int) -> complex:
    length = seg.t_end - seg.t_start
    # Oscillatory but smooth; split into enough subintervals for quad.
    limit = max(200, 10 * int(abs(delta) * angular_sweep_segment(seg)) + 50)
    re, _ = quad(lambda u: math.cos(delta * (seg.a0 + seg.a1 * u + seg.a2 * u * u)),
                 0.0, length, epsabs=1e-13, epsrel=1e-12, limit=limit)
    im, _ = quad(lambda u: math.sin(delta * (seg.a0 + seg.a1 * u + seg.a2 * u * u)),
                 0.0, length, epsabs=1e-13, epsrel=1e-12, limit=limit)
    return complex(re, im)


def angular_sweep_segment(seg: MotionSegment) -> float:
    length = seg.t_end - seg.t_start
    return abs(seg.a1) * length + abs(seg.a2) * length * length


def blur_constant(profile: MotionProfile, delta: int, method: str = "auto") -> complex:
    """Attenuation (1/T) * sum_k integral exp(i*delta*psi_k(t)) dt.

    ``method``: "auto" uses the closed form for linear segments and adaptive
    quadrature otherwise; "closed" requires all segments linear;
    "quadrature" forces numerical integration everywhere.
    """
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    total = 0j
    for seg in profile.segments:
        if method == "quadrature":
            total += _segment_phasor_quadrature(seg, delta)
        elif method == "closed":
            if seg.a2 != 0.0:
                raise ValueError("closed form requires linear segments (a2 == 0)")
            total += _segment_phasor_closed(seg, delta)
        elif method == "auto":
            if seg.a2 == 0.0:
                total += _segment_phasor_closed(seg, delta)
            else:
                total += _segment_phasor_quadrature(seg, delta)
        else:
            raise ValueError(f"unknown method {method!r}")
    return total / profile.exposure


# --- profile (de)serialization -------------------------------------------

_SHORTCUTS = {"ucm", "uacm", "rcm"}


def profile_from_spec(spec: dict) -> MotionProfile:
    """Build a profile from a parsed config mapping.

    Shortcut form: {"type": "ucm"|"uacm"|"rcm", "omega": ..., "alpha": ...,
    "exposure": ...}.  Explicit form: {"exposure": T, "segments":
    [{"t_start", "t_end", "a0", "a1", "a2"}, ...]}.  Angle-valued fields
    accept numbers or "pi"-expression strings such as "3pi/20".
    """
    if "type" in spec:
        kind = spec["type"]
        if kind not in _SHORTCUTS:
            raise ValueError(f"unknown profile type {kind!r}")
        omega = parse_angle(spec["omega"])
        exposure = float(spec["exposure"])
        if kind == "ucm":
            return profile_ucm(omega, exposure)
        alpha = parse_angle(spec.get("alpha", 0.0))
        if kind == "uacm":
            return profile_uacm(omega, alpha, exposure)
        return profile_rcm(omega, alpha, exposure)
    if "segments" in spec:
        segs = tuple(
            MotionSegment(
                float(s["t_start"]),
                float(s["t_end"]),
                parse_angle(s["a0"]),
                parse_angle(s["a1"]),
                parse_angle(s["a2"]),
            )
            for s in spec["segments"]
        )
        return MotionProfile(segs, float(spec["exposure"]))
    raise ValueError("profile spec needs either 'type' or 'segments'")


def load_profile(path) -> MotionProfile:
    with open(str(path), "r", encoding="utf-8") as fh:
        return profile_from_spec(json.load(fh))


def parse_angle(value) -> float:
    """Parse an angle given as a number or a 'pi' literal like "3pi/20"."""
    if isinstance(value, (int, float)):
        return float(value)
    text = str(value).strip().lower().replace(" ", "").replace("*", "")
    if "pi" not in text:
        return float(text)
    sign = 1.0
    if text.startswith("-"):
        sign, text = -1.0, text[1:]
    head, _, tail = text.partition("pi")
    factor = float(head) if head else 1.0
    if tail:
        if not tail.startswith("/"):
            raise ValueError(f"cannot parse angle {value!r}")
        factor /= float(tail[1:])
    return sign * factor * math.pi
