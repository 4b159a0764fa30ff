"""Blur-invariant moment feature vectors.

Two families are provided.  The complex-ratio features combine the
blur-stable diagonal moments c_pp with ratios c_a / c_b of equal harmonic
index (p - q); ratios whose denominator is degenerate (as happens for
circularly symmetric images) are flagged unreliable rather than evaluated.
The geometric family evaluates the same fourth-order quantities in their
closed algebraic form over geometric moments.  The seven Hu invariants are
included as classification baselines.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .moments import ComplexMomentSet, GeometricMomentSet, complex_from_geometric

#: Degeneracy threshold for ratio denominators: a denominator c_b of order
#: o is unusable when |c_b| <= DEGENERACY_EPS * c00 * r_g^o, where
#: r_g = sqrt(c11 / c00) is the intensity radius of gyration.  This scale is
#: similarity-covariant, so flags agree between raw and normalized moments,
#: and it sits well above the moment noise floor while staying an order of
#: magnitude below denominators that genuinely carry blur-stable signal.
DEGENERACY_EPS = 0.01

#: Ratio pairs (numerator, denominator) of equal harmonic index, 4th order.
RATIOS_ORDER4 = (((1, 0), (2, 1)), ((2, 0), (3, 1)))

#: Additional ratio pairs available at 6th order.
RATIOS_ORDER6 = RATIOS_ORDER4 + (
    ((1, 0), (3, 2)),
    ((3, 0), (4, 1)),
    ((2, 0), (4, 2)),
    ((4, 0), (5, 1)),
)


@dataclass(frozen=True)
class FeatureVector:
    """Ordered, named invariant values; flags mark unreliable entries."""

    names: tuple[str, ...]
    values: np.ndarray
    flags: np.ndarray  # True where the value is degenerate / unreliable

    def __post_init__(self):
        values = np.asarray(self.values, dtype=np.float64)
        flags = np.asarray(self.flags, dtype=bool)
        if not (len(self.names) == values.shape[0] == flags.shape[0]):
            raise ValueError("names, values, and flags must have equal length")
        if not np.all(np.isfinite(values)):
            raise ValueError("feature values must be finite")
        object.__setattr__(self, "names", tuple(self.names))
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "flags", flags)

    def __len__(self) -> int:
        return len(self.names)

    def subset(self, names) -> "FeatureVector":
        idx = [self.names.index(n) for n in names]
        return FeatureVector(tuple(names), self.values[idx], self.flags[idx])


def _ratio_name(num, den, part):
    return f"{part}_c{num[0]}{num[1]}_c{den[0]}{den[1]}"


def _ratio_features(cm: ComplexMomentSet, pairs):
    c00 = cm.c00
    r_gyr = math.sqrt(max(cm[1, 1].real, 0.0) / c00) if c00 > 0 else 0.0
    names, values, flags = [], [], []
    for num, den in pairs:
        denom = cm[den]
        threshold = DEGENERACY_EPS * c00 * r_gyr ** (den[0] + den[1])
        degenerate = abs(denom) <= threshold
        ratio = 0j if degenerate else cm[num] / denom
        names += [_ratio_name(num, den, "re"), _ratio_name(num, den, "im")]
        values += [ratio.real, ratio.imag]
        flags += [degenerate, degenerate]
    return names, values, flags


def _diagonal_features(cm: ComplexMomentSet, max_p: int, drop_c00: bool):
    names, values = [], []
    for p in range(1 if drop_c00 else 0, max_p + 1):
        names.append(f"c{p}{p}")
        values.append(cm[p, p].real)
    return names, values


def rmbmi4(cm: ComplexMomentSet, similarity_normalized: bool = False) -> FeatureVector:
    """Fourth-order blur-invariant features from complex moments.

    Unnormalized: [c00, c11, c22, Re/Im(c10/c21), Re/Im(c20/c31)] (7 reals).
    When ``similarity_normalized`` (caller passes normalize_complex output),
    c00 is identically 1 and is dropped, leaving 6 reals.
    """
    if cm.max_order < 4:
        raise ValueError("need moments up to order 4")
    names, values = _diagonal_features(cm, 2, drop_c00=similarity_normalized)
    flags = [False] * len(names)
    rn, rv, rf = _ratio_features(cm, RATIOS_ORDER4)
    return FeatureVector(tuple(names + rn), np.array(values + rv), np.array(flags + rf))


def rmbmi6(cm: ComplexMomentSet, similarity_normalized: bool = False) -> FeatureVector:
    """Sixth-order blur-invariant features (16 reals, or 15 normalized)."""
    if cm.max_order < 6:
        raise ValueError("need moments up to order 6")
    names, values = _diagonal_features(cm, 3, drop_c00=similarity_normalized)
    flags = [False] * len(names)
    rn, rv, rf = _ratio_features(cm, RATIOS_ORDER6)
    return FeatureVector(tuple(names + rn), np.array(values + rv), np.array(flags + rf))


def rmbmi_geometric(gm: GeometricMomentSet, similarity_normalized: bool = False) -> FeatureVector:
    """Fourth-order blur invariants in closed form over geometric moments.

    Algebraically identical to the complex-moment route:
      m00, m20+m02, m40+2*m22+m04, and the real/imaginary parts of
      (m10 + i*m01) / ((m30+m12) + i*(m21+m03)) and
      ((m20-m02) + 2i*m11) / ((m40-m04) + 2i*(m31+m13)).
    """
    if gm.max_order < 4:
        raise ValueError("need moments up to order 4")
    m = gm.values
    scale = gm.m00
    r_gyr = math.sqrt(max(m[2, 0] + m[0, 2], 0.0) / scale) if scale > 0 else 0.0

    names, values, flags = [], [], []
    if not similarity_normalized:
        names.append("c00")
        values.append(m[0, 0])
        flags.append(False)
    names += ["c11", "c22"]
    values += [m[2, 0] + m[0, 2], m[4, 0] + 2.0 * m[2, 2] + m[0, 4]]
    flags += [False, False]

    den3 = (m[3, 0] + m[1, 2]) ** 2 + (m[2, 1] + m[0, 3]) ** 2
    thr3 = (DEGENERACY_EPS * scale * r_gyr**3) ** 2
    if den3 <= thr3:
        re1 = im1 = 0.0
        bad3 = True
    else:
        re1 = (m[1, 0] * (m[3, 0] + m[1, 2]) + m[0, 1] * (m[2, 1] + m[0, 3])) / den3
        im1 = (m[0, 1] * (m[3, 0] + m[1, 2]) - m[1, 0] * (m[2, 1] + m[0, 3])) / den3
        bad3 = False
    names += [_ratio_name((1, 0), (2, 1), "re"), _ratio_name((1, 0), (2, 1), "im")]
    values += [re1, im1]
    flags += [bad3, bad3]

    den5 = (m[4, 0] - m[0, 4]) ** 2 + 4.0 * (m[3, 1] + m[1, 3]) ** 2
    thr5 = (DEGENERACY_EPS * scale * r_gyr**4) ** 2
    if den5 <= thr5:
        re2 = im2 = 0.0
        bad5 = True
    else:
        re2 = ((m[2, 0] - m[0, 2]) * (m[4, 0] - m[0, 4]) + 4.0 * m[1, 1] * (m[3, 1] + m[1, 3])) / den5
        im2 = (2.0 * m[1, 1] * (m[4, 0] - m[0, 4]) - 2.0 * (m[2, 0] - m[0, 2]) * (m[3, 1] + m[1, 3])) / den5
        bad5 = False
    names += [_ratio_name((2, 0), (3, 1), "re"), _ratio_name((2, 0), (3, 1), "im")]
    values += [re2, im2]
    flags += [bad5, bad5]

    return FeatureVector(tuple(names), np.array(values), np.array(flags))


HU_NAMES = tuple(f"hu{k}" for k in range(1, 8))


def hu_moments(gm_normalized: GeometricMomentSet) -> FeatureVector:
    """The seven classical Hu invariants, in standard textbook numbering.

    Expects scale-normalized moments (normalize_geometric output); then
    hu1 = m~20 + m~02, hu2 = (m~20 - m~02)^2 + 4 m~11^2, and so on.
    """
    if gm_normalized.max_order < 3:
        raise ValueError("need moments up to order 3")
    m = gm_normalized.values
    n20, n02, n11 = m[2, 0], m[0, 2], m[1, 1]
    n30, n03, n21, n12 = m[3, 0], m[0, 3], m[2, 1], m[1, 2]
    a = n30 + n12
    b = n21 + n03
    c = n30 - 3.0 * n12
    d = 3.0 * n21 - n03
    hu = np.array([
        n20 + n02,
        (n20 - n02) ** 2 + 4.0 * n11**2,
        c**2 + d**2,
        a**2 + b**2,
        c * a * (a**2 - 3.0 * b**2) + d * b * (3.0 * a**2 - b**2),
        (n20 - n02) * (a**2 - b**2) + 4.0 * n11 * a * b,
        d * a * (a**2 - 3.0 * b**2) - c * b * (3.0 * a**2 - b**2),
    ])
    return FeatureVector(HU_NAMES, hu, np.zeros(7, dtype=bool))


def hu_subset_hm5(hu: FeatureVector) -> FeatureVector:
    """Baseline of five Hu invariants (hu2 through hu6)."""
    return hu.subset(HU_NAMES[1:6])


def hu_subset_lmbmi(hu: FeatureVector) -> FeatureVector:
    """Baseline of the Hu invariants robust to linear motion blur (hu2, hu3, hu5, hu7)."""
    return hu.subset(("hu2", "hu3", "hu5", "hu7"))
