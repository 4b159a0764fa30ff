"""Geometric and complex image moments about the image center.

Geometric moments m_pq sum x^p y^q f(x, y) over pixel-center coordinates
relative to the image center (x right, y up).  Complex moments c_pq use the
basis (x+iy)^p (x-iy)^q, so c_pq = conj(c_qp) and c_pp is real.  Both are
offered as direct pixel sums; complex moments can also be derived exactly
from geometric moments via the binomial expansion, which the test suite
uses as an independent cross-check.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .image import as_image, centered_coords


@dataclass(frozen=True)
class GeometricMomentSet:
    """m_pq for all p + q <= max_order; values[p, q] is NaN above the order."""

    max_order: int
    values: np.ndarray

    def __getitem__(self, pq: tuple[int, int]) -> float:
        p, q = pq
        if p + q > self.max_order:
            raise KeyError(f"moment ({p},{q}) exceeds max_order {self.max_order}")
        return float(self.values[p, q])

    @property
    def m00(self) -> float:
        return float(self.values[0, 0])


@dataclass(frozen=True)
class ComplexMomentSet:
    """c_pq for all p + q <= max_order; values[p, q] is NaN above the order."""

    max_order: int
    values: np.ndarray

    def __getitem__(self, pq: tuple[int, int]) -> complex:
        p, q = pq
        if p + q > self.max_order:
            raise KeyError(f"moment ({p},{q}) exceeds max_order {self.max_order}")
        return complex(self.values[p, q])

    @property
    def c00(self) -> float:
        c = complex(self.values[0, 0])
        assert abs(c.imag) <= 1e-9 * max(abs(c.real), 1.0), "c00 must be real"
        return c.real


def _index_pairs(max_order: int):
    for p in range(max_order + 1):
        for q in range(max_order + 1 - p):
            yield p, q


def geometric_moments(img: np.ndarray, max_order: int) -> GeometricMomentSet:
    """All geometric moments m_pq with p + q <= max_order."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    img = as_image(img)
    x, y = centered_coords(img.shape)
    xpow = np.stack([x**p for p in range(max_order + 1)])  # (P+1, w)
    ypow = np.stack([y**q for q in range(max_order + 1)])  # (Q+1, h)
    # m[p, q] = ypow[q] . img . xpow[p]; BLAS dot keeps order-6 sums accurate.
    table = ypow @ img @ xpow.T  # [q, p]
    values = np.full((max_order + 1, max_order + 1), np.nan)
    for p, q in _index_pairs(max_order):
        values[p, q] = table[q, p]
    return GeometricMomentSet(max_order, values)


def complex_moments_direct(img: np.ndarray, max_order: int) -> ComplexMomentSet:
    """All complex moments c_pq with p + q <= max_order, summed per pixel."""
    if max_order < 0:
        raise ValueError("max_order must be >= 0")
    img = as_image(img)
    x, y = centered_coords(img.shape)
    xg, yg = np.meshgrid(x, y)
    z = xg + 1j * yg
    zbar = np.conj(z)
    zp = [np.ones_like(z)]
    zq = [np.ones_like(z)]
    for _ in range(max_order):
        zp.append(zp[-1] * z)
        zq.append(zq[-1] * zbar)
    values = np.full((max_order + 1, max_order + 1), np.nan, dtype=np.complex128)
    for p, q in _index_pairs(max_order):
        values[p, q] = np.sum(zp[p] * zq[q] * img)
    return ComplexMomentSet(max_order, values)


_I_POW = (1, 1j, -1, -1j)


def complex_from_geometric(gm: GeometricMomentSet) -> ComplexMomentSet:
    """Convert geometric moments to complex moments by binomial expansion."""
    n = gm.max_order
    values = np.full((n + 1, n + 1), np.nan, dtype=np.complex128)
    for p, q in _index_pairs(n):
        total = 0j
        for a in range(p + 1):
            for b in range(q + 1):
                coef = comb(p, a) * comb(q, b) * (-1) ** (q - b)
                total += coef * _I_POW[(p + q - a - b) % 4] * gm.values[a + b, p + q - a - b]
        values[p, q] = total
    return ComplexMomentSet(n, values)


def normalize_geometric(gm: GeometricMomentSet) -> GeometricMomentSet:
    """Scale-normalized moments m_pq / m00^((p+q)/2 + 1)."""
    m00 = gm.m00
    if not m00 > 0:
        raise ValueError("normalization requires positive total mass")
    values = np.full_like(gm.values, np.nan)
    for p, q in _index_pairs(gm.max_order):
        values[p, q] = gm.values[p, q] / m00 ** ((p + q) / 2.0 + 1.0)
    return GeometricMomentSet(gm.max_order, values)


def normalize_complex(cm: ComplexMomentSet) -> ComplexMomentSet:
    """Scale-normalized moments c_pq / c00^((p+q)/2 + 1)."""
    c00 = cm.c00
    if not c00 > 0:
        raise ValueError("normalization requires positive total mass")
    values = np.full_like(cm.values, np.nan)
    for p, q in _index_pairs(cm.max_order):
        values[p, q] = cm.values[p, q] / c00 ** ((p + q) / 2.0 + 1.0)
    return ComplexMomentSet(cm.max_order, values)
