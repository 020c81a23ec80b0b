"""Finite unions of closed arcs of the circle, parametrized by angle.

An arc set is a sorted tuple of disjoint ``(a, b)`` pairs with
``0 <= a < b <= 2*pi``.  ``None`` stands for the whole circle.
"""

from __future__ import annotations

import numpy as np

TWO_PI = 2.0 * np.pi
_MERGE = 1e-13


def normalize(arcs):
    """Canonical form of an arc list; returns ``None`` for the full circle."""
    if arcs is None:
        return None
    parts = []
    for a, b in arcs:
        a, b = float(a), float(b)
        if b < a:
            raise ValueError(f"arc ({a}, {b}) has negative length")
        if b - a >= TWO_PI - _MERGE:
            return None
        a0 = a % TWO_PI
        b0 = a0 + (b - a)
        if b0 > TWO_PI:
            parts.append((a0, TWO_PI))
            parts.append((0.0, b0 - TWO_PI))
        elif b0 > a0:
            parts.append((a0, b0))
    parts.sort()
    merged: list[list[float]] = []
    for a, b in parts:
        if merged and a <= merged[-1][1] + _MERGE:
            merged[-1][1] = max(merged[-1][1], b)
        else:
            merged.append([a, b])
    if len(merged) == 1 and merged[0][0] <= _MERGE and merged[0][1] >= TWO_PI - _MERGE:
        return None
    return tuple((a, b) for a, b in merged)


def complement(arcs):
    if arcs is None:
        return ()
    if not arcs:
        return None
    out = []
    prev = 0.0
    for a, b in arcs:
        if a > prev:
            out.append((prev, a))
        prev = b
    if prev < TWO_PI:
        out.append((prev, TWO_PI))
    return normalize(out)


def intersect(A, B):
    if A is None:
        return B
    if B is None:
        return A
    out = []
    for a1, b1 in A:
        for a2, b2 in B:
            lo, hi = max(a1, a2), min(b1, b2)
            if hi > lo:
                out.append((lo, hi))
    return normalize(out)


def union(A, B):
    if A is None or B is None:
        return None
    return normalize(list(A) + list(B))


def length(arcs) -> float:
    """Normalized length, i.e. the m-measure of the set."""
    if arcs is None:
        return 1.0
    return sum(b - a for a, b in arcs) / TWO_PI


def indicator(arcs, theta):
    """Indicator of the set, with value 1/2 at endpoints (radial-limit convention)."""
    theta = np.mod(np.asarray(theta, dtype=float), TWO_PI)
    if arcs is None:
        return np.ones_like(theta)
    out = np.zeros_like(theta)
    tol = 1e-14
    for a, b in arcs:
        inside = (theta > a + tol) & (theta < b - tol)
        out = out + inside
        for e in (a, b):
            on = np.abs(np.angle(np.exp(1j * (theta - e)))) <= tol
            out = out + 0.5 * on
    # endpoints shared by two arcs, or 0 ~ 2*pi on a wrapped arc, can double count
    return np.minimum(out, 1.0)


def fourier(arcs, k):
    """``int_A e^{i k theta} dm(theta)`` for integer ``k`` (vectorized)."""
    k = np.asarray(k)
    if arcs is None:
        return (k == 0).astype(complex)
    out = np.zeros(k.shape, dtype=complex)
    zero = k == 0
    kk = np.where(zero, 1, k).astype(float)
    for a, b in arcs:
        val = (np.exp(1j * kk * b) - np.exp(1j * kk * a)) / (2j * np.pi * kk)
        out += np.where(zero, (b - a) / TWO_PI, val)
    return out


def from_mask(mask, shift: float = 0.5):
    """Arc set of grid cells flagged in a boolean mask on an ``M``-point grid.

    Cell ``k`` is centred at ``2*pi*(k + shift)/M`` and has width ``2*pi/M``.
    """
    mask = np.asarray(mask, dtype=bool)
    M = mask.size
    h = TWO_PI / M
    arcs = [((k + shift - 0.5) * h, (k + shift + 0.5) * h) for k in np.nonzero(mask)[0]]
    return normalize(arcs)


def to_list(arcs):
    return None if arcs is None else [[a, b] for a, b in arcs]
